import logging
import os
import sys
from pathlib import Path

# Resolve project root (three levels up from src/utils/logging_config.py)
PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent


def setup_logger(name: str) -> logging.Logger:
    """
    Creates and returns a configured logger for the given module name.

    Console output goes to stderr so reports printed on stdout stay parseable.
    Set GMCS_LOG_FILE to also append to a log file (relative paths resolve
    against the project root). LOG_LEVEL selects the threshold.
    """
    logger = logging.getLogger(name)

    # Avoid adding multiple handlers if setup is called multiple times
    if not logger.handlers:
        level_name = os.environ.get("LOG_LEVEL", "INFO").upper()
        level = getattr(logging, level_name, logging.INFO)
        logger.setLevel(level)

        # Formatter: Timestamp - LoggerName - Level - Message
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        log_file = os.environ.get("GMCS_LOG_FILE")
        if log_file:
            log_path = Path(log_file)
            if not log_path.is_absolute():
                log_path = PROJECT_ROOT / log_path
            file_handler = logging.FileHandler(log_path, encoding='utf-8')
            file_handler.setLevel(level)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

        # Prevent bubbling up to the root logger to avoid double printing
        logger.propagate = False

    return logger
