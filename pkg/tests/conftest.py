import os
import sys

import pytest

# Raíz del repo en el path, como hacen los scripts del proyecto
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from index_core.text_index import SuffixIndex  # noqa: E402

RUN_SLOW = os.getenv("VLG_RUN_SLOW", "0") == "1"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: pruebas de rendimiento a escala de escritorio (VLG_RUN_SLOW=1)")


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip = pytest.mark.skip(reason="defina VLG_RUN_SLOW=1 para ejecutarlas")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def abracadabra():
    return SuffixIndex.build(b"abracadabra")


@pytest.fixture
def banana():
    return SuffixIndex.build(b"banana")
