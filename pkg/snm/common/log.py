import inspect
import logging
import sys

from pathlib import Path

from loguru import logger

from snm.core.conf import settings
from snm.core.path_conf import LOG_DIR

# sink file name -> (level, record filter, backtrace)
_FILE_SINKS = {
    'main': (lambda: settings.LOG_FILE_LEVEL, lambda record: record['level'].no <= logging.WARNING - 5, False),
    'error': (lambda: settings.LOG_FILE_ERROR_LEVEL, lambda record: record['level'].no >= logging.WARNING, True),
}


class InterceptHandler(logging.Handler):
    """
    Route standard library records, including captured ``warnings``, into loguru

    Reference: https://loguru.readthedocs.io/en/stable/overview.html#entirely-compatible-with-standard-logging
    """

    def emit(self, record: logging.LogRecord) -> None:
        try:
            level: str | int = logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        # skip logging internals so the record points at the caller
        frame, depth = inspect.currentframe(), 0
        while frame and (depth == 0 or frame.f_code.co_filename == logging.__file__):
            frame = frame.f_back
            depth += 1

        logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())


def record_format(record: dict) -> str:
    fmt = settings.LOG_FORMAT
    return fmt if fmt.endswith('\n') else fmt + '\n'


def setup_logging(level: str | None = None) -> None:
    """
    Reset loguru to a single stderr sink and hand stdlib logging to it

    :param level: Console level override, e.g. ``DEBUG`` for ``--verbose`` runs
    :return:
    """
    console_level = level or settings.LOG_STD_LEVEL
    logging.basicConfig(handlers=[InterceptHandler()], level=console_level, force=True)
    logging.captureWarnings(True)
    for name in list(logging.root.manager.loggerDict):
        stdlib_logger = logging.getLogger(name)
        stdlib_logger.handlers.clear()
        stdlib_logger.propagate = True

    logger.remove()
    logger.configure(
        extra={'run': '-'},
        handlers=[{'sink': sys.stderr, 'level': console_level, 'format': record_format}],
    )


def set_custom_logfile(directory: Path | None = None) -> list[Path]:
    """
    Add rotating run and error log files

    :param directory: Target directory, ``LOG_DIR`` by default
    :return: The log file paths
    """
    directory = directory or LOG_DIR
    directory.mkdir(parents=True, exist_ok=True)
    names = {'main': settings.LOG_FILENAME, 'error': settings.LOG_ERROR_FILENAME}

    paths = []
    for key, (level, keep, backtrace) in _FILE_SINKS.items():
        path = directory / names[key]
        logger.add(
            str(path),
            level=level(),
            filter=keep,
            format=record_format,
            backtrace=backtrace,
            diagnose=backtrace,
            enqueue=True,
            rotation='10 MB',
            retention='7 days',
        )
        paths.append(path)
    return paths


log = logger
