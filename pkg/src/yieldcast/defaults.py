"""Loader for the pinned hyperparameter defaults shipped with the package."""

from __future__ import annotations

import configparser
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def defaults() -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    text = resources.files("yieldcast").joinpath("defaults.cfg").read_text()
    parser.read_string(text)
    return parser
