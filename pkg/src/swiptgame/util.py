import hashlib
import importlib
import logging
import math

from swiptgame.exception import ConfigurationError

logger = logging.getLogger(__name__)


def modsplit(s):
    """Split importable"""
    if ":" in s:
        c = s.split(":")
        if len(c) != 2:
            raise ValueError(f"Syntax error: {s}")
        return c[0], c[1]
    else:
        c = s.split(".")
        if len(c) < 2:
            raise ValueError(f"Syntax error: {s}")
        return ".".join(c[:-1]), c[-1]


def importer(name):
    """Import by name"""
    c1, c2 = modsplit(name)
    module = importlib.import_module(c1)
    return getattr(module, c2)


def instantiate(cls, **kwargs):
    if isinstance(cls, str):
        return importer(cls)(**kwargs)
    else:
        return cls(**kwargs)


def build_schemes(conf, **kwargs):
    """
    Instantiate comparison schemes from a name -> spec map.

    conf typically contains::

        'game': {
            'class': 'swiptgame.experiments.GameScheme',
            'kwargs': {}
        },

    :param conf: Scheme specifications keyed by scheme name
    :param kwargs: Keyword arguments handed to every scheme
    :return: dictionary of scheme instances keyed by name
    """
    schemes = {}
    for name, spec in conf.items():
        try:
            _cls = spec["class"]
        except KeyError:
            raise ConfigurationError(f"Scheme '{name}' lacks a class", field="schemes")

        _kwargs = dict(spec.get("kwargs", {}))
        _kwargs.update(kwargs)
        _instance = instantiate(_cls, **_kwargs)
        _instance.name = name
        schemes[name] = _instance

    return schemes


def config_digest(filename):
    """
    SHA-256 of the raw bytes of a configuration file.

    :param filename: Path to the file
    :return: hex digest
    """
    _hash = hashlib.sha256()
    with open(filename, "rb") as fp:
        for chunk in iter(lambda: fp.read(65536), b""):
            _hash.update(chunk)
    return _hash.hexdigest()


def db_to_linear(value):
    return 10.0 ** (float(value) / 10.0)


def format_number(value, digits=12):
    """Fixed significant-digit rendering; NaN is written as 'NaN'."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "NaN"
    if isinstance(value, int):
        return str(value)
    return "{:.{}g}".format(float(value), digits)
