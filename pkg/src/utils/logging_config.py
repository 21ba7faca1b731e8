"""
Logging for selmut

Numerical modules only ask for a named logger. The CLI is the single place
that decides where records go: a log file next to the outputs and a
console stream for progress and failures.
"""

import logging
from pathlib import Path
from typing import Dict, Union

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
DATE_FORMAT = "%H:%M:%S"


class SelmutLogger:
    """Process-wide logging setup, applied at most once until reset()"""

    _initialized = False
    _loggers: Dict[str, logging.Logger] = {}
    _handlers: list = []

    @classmethod
    def setup(
        cls,
        log_file: str = "selmut.log",
        file_level: int = logging.DEBUG,
        console_level: int = logging.INFO,
    ) -> str:
        """
        Attach a file handler and a console handler to the root logger.

        Returns the log file path. A second call before reset() is a no-op,
        so a batch run keeps writing to the first run's file.

        Example:
            >>> SelmutLogger.setup("out/selmut.log", console_level=logging.WARNING)
            'out/selmut.log'
        """
        if cls._initialized:
            return log_file

        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)
        levels = {
            logging.FileHandler(log_file, mode="w", encoding="utf-8"): file_level,
            logging.StreamHandler(): console_level,
        }

        root = logging.getLogger()
        root.setLevel(min(levels.values()))
        for handler, handler_level in levels.items():
            handler.setLevel(handler_level)
            handler.setFormatter(formatter)
            root.addHandler(handler)
            cls._handlers.append(handler)

        cls._initialized = True
        cls.get_logger(__name__).info(f"📝 Logging to {log_file}")
        return log_file

    @classmethod
    def get_logger(cls, name: str) -> logging.Logger:
        """Logger for a module; pass __name__"""
        return cls._loggers.setdefault(name, logging.getLogger(name))

    @classmethod
    def reset(cls) -> None:
        """Detach and close the handlers added by setup(); used by tests"""
        root = logging.getLogger()
        for handler in cls._handlers:
            root.removeHandler(handler)
            handler.close()
        cls._handlers.clear()
        cls._loggers.clear()
        cls._initialized = False


def _level(level: Union[str, int], default: int) -> int:
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
    return level if isinstance(level, int) else default


def setup_logging(
    log_file: str = "selmut.log",
    console_level: Union[str, int] = "INFO",
    file_level: Union[str, int] = "DEBUG",
) -> str:
    """setup() with levels given by name ("DEBUG", "INFO", ...); unknown names fall back"""
    return SelmutLogger.setup(
        log_file,
        file_level=_level(file_level, logging.DEBUG),
        console_level=_level(console_level, logging.INFO),
    )
