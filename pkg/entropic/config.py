import os, logging
from pydantic import BaseModel, Field

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


def _flag(value: str | None) -> bool:
    return (value or "").strip().lower() in {"1", "true", "yes", "on"}


class Settings(BaseModel):
    threads: int = Field(ge=1)
    strict: bool = False
    ledger: str | None = None
    art_dir: str = "results"
    data: str | None = None


def load_settings() -> Settings:
    threads = os.environ.get("EOF_THREADS", "").strip()
    return Settings(
        threads=int(threads) if threads else (os.cpu_count() or 1),
        strict=_flag(os.environ.get("EOF_STRICT")),
        ledger=os.environ.get("EOF_LEDGER") or None,
        art_dir=os.environ.get("EOF_ART_DIR", "results"),
        data=os.environ.get("EOF_DATA") or None,
    )


def configure_logging(level: int = logging.INFO) -> None:
    root = logging.getLogger("entropic")
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    root.setLevel(level)
