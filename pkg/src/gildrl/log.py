import logging


class LOGLEVEL():
    CRITICAL = 50
    ERROR    = 40
    WARNING  = 30
    INFO     = 20
    DEBUG    = 10
    NOTSET   = 0


_FORMAT = '%(levelname)s(%(name)s): %(message)s'


def create_logger(logname,
                  base_level=LOGLEVEL.WARNING):
    logger = logging.getLogger(logname)
    logger.setLevel(base_level)
    logger.propagate = False
    return logger


def get_all_gildrl_logger():
    return [logging.getLogger(name) for name in logging.root.manager.loggerDict if name.startswith('gildrl')]


def set_gildrl_logger_level(level, loggers=[]):
    [logging.getLogger(logger).setLevel(level) if isinstance(logger, str) else logger.setLevel(level) for logger in loggers]


def set_all_gildrl_logger_level(level):
    set_gildrl_logger_level(level, get_all_gildrl_logger())


def parse_level(level) -> int:
    """Accept either a numeric level or one of the LOGLEVEL names."""
    if isinstance(level, int):
        return level
    value = getattr(LOGLEVEL, str(level).upper(), None)
    if value is None:
        raise ValueError(f"Unknown log level {level}")
    return value


def attach_log_file(filename: str, file_level=LOGLEVEL.INFO):
    loggers = get_all_gildrl_logger()
    file_handler = logging.FileHandler(filename, mode="w")
    file_handler.setLevel(file_level)
    file_handler.setFormatter(logging.Formatter(_FORMAT))
    for l in loggers:
        l.addHandler(file_handler)
    return file_handler


def attach_stream_handler(level=LOGLEVEL.INFO):
    loggers = get_all_gildrl_logger()
    stream = logging.StreamHandler()
    stream.setLevel(level)
    stream.setFormatter(logging.Formatter(_FORMAT))
    for l in loggers:
        l.addHandler(stream)
    return stream


def detach_handler(handler):
    for l in get_all_gildrl_logger():
        l.removeHandler(handler)
    handler.close()
