from pydantic_settings import BaseSettings
from typing import Optional
import os
from dotenv import load_dotenv

load_dotenv()

VERSION = "0.3.0"


class Settings(BaseSettings):
    # Logging
    log_level: str = os.getenv("PAFM_LOG_LEVEL", "INFO")

    # Where commands write artifacts when the experiment config names none
    output_dir: str = os.getenv("PAFM_OUTPUT_DIR", "runs/default")

    # CI sweeps override the experiment seed through this variable
    seed_override: Optional[int] = int(os.environ["PAFM_SEED"]) if os.getenv("PAFM_SEED") else None

    # Progress bars (disable in CI logs)
    show_progress: bool = os.getenv("PAFM_SHOW_PROGRESS", "1") not in ("0", "false", "False")

    # Environment
    environment: str = os.getenv("PAFM_ENVIRONMENT", "development")

    class Config:
        env_file = ".env"
        env_prefix = "PAFM_"
        extra = "ignore"


settings = Settings()
