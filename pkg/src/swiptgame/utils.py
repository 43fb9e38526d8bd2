import json

import yaml

from swiptgame.exception import ConfigParseError


def load_json(file_name):
    try:
        with open(file_name, encoding="utf-8") as fp:
            js = json.load(fp)
    except json.JSONDecodeError as err:
        raise ConfigParseError(f"{file_name}: {err.msg}", line=err.lineno)
    except UnicodeDecodeError as err:
        raise ConfigParseError(f"{file_name}: not valid UTF-8 ({err.reason})")
    return js


def load_yaml_config(file_name):
    try:
        with open(file_name, encoding="utf-8") as fp:
            c = yaml.safe_load(fp)
    except yaml.YAMLError as err:
        _mark = getattr(err, "problem_mark", None)
        _line = _mark.line + 1 if _mark is not None else None
        raise ConfigParseError(f"{file_name}: {err}", line=_line)
    except UnicodeDecodeError as err:
        raise ConfigParseError(f"{file_name}: not valid UTF-8 ({err.reason})")
    return c


def load_config_file(file_name):
    if file_name.endswith((".yaml", ".yml")):
        return load_yaml_config(file_name)
    elif file_name.endswith(".json"):
        return load_json(file_name)
    raise ConfigParseError(f"Unknown configuration file type: {file_name}")
