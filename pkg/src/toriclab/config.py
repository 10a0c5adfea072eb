"""Run configuration: defaults, JSON schema validation and typed access."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Optional

import jsonschema

from .lattice import Cone, LatticeError, Window

SUITES = ("geometry", "omega-oracle", "canonical", "classify", "dense-decompose", "split", "h0")

DEFAULTS: dict = {
    "window": {"xmin": -6, "xmax": 6, "ymin": -3, "ymax": 9},
    "oracle_window": {"xmin": 0, "xmax": 3, "ymin": 0, "ymax": 2},
    "census_window": {"xmin": 0, "xmax": 2, "ymin": 0, "ymax": 2},
    "factorization_window": {"xmin": -5, "xmax": 5, "ymin": -2, "ymax": 8},
    "classify_window": {"xmin": -1, "xmax": 2, "ymin": -1, "ymax": 2},
    "cones": {
        "lambda1": {"apex": [0, 1], "d1": [1, 1], "d2": [-1, 1]},
        "lambda2": {"apex": [0, 0], "d1": [1, 1], "d2": [-1, 1]},
    },
    "seed": 20240917,
    "trials": {"omega-oracle": 1000, "canonical": 500, "split": 500, "conjugation": 200, "parity": 200},
    "suites": list(SUITES),
    "classify_max_strings": 4,
    "out": "out",
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field or line."""


def load_schema(name: str) -> dict:
    text = resources.files("toriclab").joinpath("schemas", name).read_text(encoding="utf-8")
    return json.loads(text)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "cones":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def parse_config_text(text: str, source: str = "<config>") -> dict:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return validate_config(raw, source)


def validate_config(raw: Any, source: str = "<config>") -> dict:
    schema = load_schema("config.schema.json")
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.path) or "(root)"
        raise ConfigError(f"{source}: field {where}: {e.message}")
    merged = _merge(DEFAULTS, raw)
    try:
        cfg = RunConfig(merged)
        cfg.check()
    except LatticeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return merged


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return copy.deepcopy(DEFAULTS)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    return parse_config_text(text, path)


@dataclass
class RunConfig:
    """Typed view of a merged configuration dict."""

    data: dict

    def window(self, key: str = "window") -> Window:
        return Window.from_dict(self.data[key])

    def cone(self, name: str) -> Cone:
        cones = self.data["cones"]
        if name == "lambda" and "lambda" not in cones:
            name = "lambda2"
        if name not in cones:
            raise ConfigError(f"cone {name!r} is not configured")
        return Cone.from_dict(cones[name])

    def has_pair(self) -> bool:
        return "lambda1" in self.data["cones"] and "lambda2" in self.data["cones"]

    @property
    def seed(self) -> int:
        return int(self.data["seed"])

    def trials(self, suite: str) -> int:
        return int(self.data["trials"].get(suite, DEFAULTS["trials"].get(suite, 0)))

    @property
    def suites(self) -> list:
        return list(self.data["suites"])

    def check(self) -> None:
        for key in ("window", "oracle_window", "census_window", "factorization_window", "classify_window"):
            self.window(key)
        for name in self.data["cones"]:
            self.cone(name)
