from os import getenv
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent.parent
LOGS_DIR = PROJECT_ROOT / "logs"
DATA_DIR = Path(getenv("CGC_DATA_DIR", default=str(PROJECT_ROOT / "data")))
ARTIFACTS_DIR = Path(
    getenv("CGC_ARTIFACTS_DIR", default=str(PROJECT_ROOT / "artifacts"))
)
REPORTS_DIR = ARTIFACTS_DIR / "reports"
