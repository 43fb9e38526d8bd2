"""Logging set-up for the command line and for library users"""
import copy
import logging
import os
from logging.config import dictConfig
from typing import Optional

import yaml

PACKAGE_LOGGER = "swiptgame"

# pid tells sweep worker processes apart
LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s [%(process)d] %(message)s"

LOGGING_DEFAULT = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {"default": {"format": LOG_FORMAT}},
    "handlers": {
        "stderr": {
            "class": "logging.StreamHandler",
            "formatter": "default",
            "stream": "ext://sys.stderr",
        }
    },
    "loggers": {PACKAGE_LOGGER: {"level": "INFO"}},
    "root": {"handlers": ["stderr"], "level": "WARNING"},
}

SHORTHAND_KEYS = {"level", "format", "filename"}


def _from_shorthand(conf: dict) -> dict:
    """
    Expand a `logging` config section of the form {level, format, filename}
    into a dictConfig dictionary built on LOGGING_DEFAULT.
    """
    unknown = set(conf) - SHORTHAND_KEYS
    if unknown:
        raise ValueError(f"Unknown logging keys: {sorted(unknown)}")

    config_dict = copy.deepcopy(LOGGING_DEFAULT)
    if "format" in conf:
        config_dict["formatters"]["default"]["format"] = conf["format"]
    if "level" in conf:
        config_dict["loggers"][PACKAGE_LOGGER]["level"] = str(conf["level"]).upper()
    if conf.get("filename"):
        config_dict["handlers"]["file"] = {
            "class": "logging.FileHandler",
            "formatter": "default",
            "filename": conf["filename"],
            "encoding": "utf-8",
        }
        config_dict["root"]["handlers"].append("file")
    return config_dict


def configure_logging(
    debug: Optional[bool] = False,
    config: Optional[dict] = None,
    filename: Optional[str] = "",
) -> logging.Logger:
    """
    Configure logging and return the package logger.

    `config` is either a full dictConfig dictionary (it has a `version` key)
    or the shorthand {level, format, filename}.
    """

    if config is not None:
        if "version" in config:
            config_dict = copy.deepcopy(config)
        else:
            config_dict = _from_shorthand(config)
        config_source = "dictionary"
    elif filename and os.path.exists(filename):
        with open(filename, "rt", encoding="utf-8") as file:
            config_dict = yaml.safe_load(file)
        config_source = "file"
    else:
        config_dict = copy.deepcopy(LOGGING_DEFAULT)
        config_source = "default"

    if debug:
        config_dict.setdefault("loggers", {}).setdefault(PACKAGE_LOGGER, {})["level"] = "DEBUG"

    dictConfig(config_dict)
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.debug("Configured logging using: {}".format(config_source))
    return logger
