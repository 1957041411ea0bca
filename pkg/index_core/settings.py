import os

from dotenv import load_dotenv

# Cargar variables de entorno
load_dotenv()

# Configuración
INDEX_WIDTH = int(os.getenv("VLG_INDEX_WIDTH", 5))
C_SORT = float(os.getenv("VLG_C_SORT", 4.0))
L3_BUDGET_BYTES = int(os.getenv("VLG_L3_BUDGET", 16 * 1024 * 1024))
MAX_BITS_PER_OCC = int(os.getenv("VLG_MAX_BITS_PER_OCC", 4))
POOL_SIZE = int(os.getenv("VLG_POOL_SIZE", 200))
VERBOSE = os.getenv("VLG_VERBOSE", "1") != "0"
