import sys
from datetime import datetime

from index_core import settings


def log(msg: str) -> None:
    """Línea de progreso con hora. Va a stderr: stdout queda para resultados."""
    if not settings.VERBOSE:
        return
    timestamp = datetime.now().strftime("%H:%M:%S")
    print(f"[{timestamp}] {msg}", file=sys.stderr)
