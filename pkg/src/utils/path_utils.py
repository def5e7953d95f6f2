import os
from pathlib import Path

from dotenv import load_dotenv

from src.utils.logging_config import setup_logger

logger = setup_logger(__name__)

CONFIG_ENV_VAR = "GMCS_CONFIG"


def get_project_root() -> Path:
    """
    Returns the absolute path to the project root directory.
    Assumes this file is located at project_root/src/utils/path_utils.py
    """
    # .parent of utils is src, .parent of src is project_root
    return Path(__file__).resolve().parent.parent.parent


def load_env_vars() -> bool:
    """
    Loads <project_root>/.env into the environment if it exists.

    Only GMCS_CONFIG, LOG_LEVEL and GMCS_LOG_FILE are read by the toolkit.
    Returns True when a file was loaded.
    """
    env_path = get_project_root() / ".env"
    if env_path.exists():
        load_dotenv(dotenv_path=env_path, override=False)
        logger.debug(f"Loaded environment variables from: {env_path}")
        return True
    return False


def resolve_config_path(arg: str | os.PathLike | None) -> Path | None:
    """
    Picks the config file: explicit argument first, then $GMCS_CONFIG.

    Returns None when neither is given, meaning reference-link defaults apply.
    """
    if arg:
        return Path(arg)
    load_env_vars()
    env_value = os.getenv(CONFIG_ENV_VAR)
    if env_value:
        logger.info(f"Using config from ${CONFIG_ENV_VAR}: {env_value}")
        return Path(env_value)
    return None


def ensure_output_dir(path: str | os.PathLike) -> Path:
    """Creates the directory (and parents) if needed and returns it."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out
