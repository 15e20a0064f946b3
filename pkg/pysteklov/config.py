import configparser
import json
import logging
import os
import re
from typing import Dict, List

import numpy as np

from pysteklov.errors import ConfigError
from pysteklov.decay import TAYLOR_DEGREE
from pysteklov.geometry import Domain
from pysteklov.reference import CylinderDomain
from pysteklov.fbi import PhaseSpaceGrid, WeightSpec

logger = logging.getLogger(__name__)

REQUIRED = object()

"""
Schema of an experiment file: section -> key -> (type, default). A default of REQUIRED makes the
key mandatory; None leaves it unset. Lists are comma separated in .cfg files.
"""
SCHEMA = {
    "domain": {
        "kind": ("str", REQUIRED),
        "radius": ("float", 1.0),
        "a": ("float", None),
        "b": ("float", None),
        "r0": ("float", None),
        "cosines": ("floatList", None),
        "sines": ("floatList", []),
        "lambda": ("int", 40),
    },
    "solver": {
        "n": ("int", 256),
        "n_modes": ("int", 21),
        "cluster_tolerance": ("float", 1e-6),
        "capacity_scale": ("float", None),
        "oracle_tolerance": ("float", 1e-6),
        "self_adjoint_tolerance": ("float", 1e-8),
    },
    "modes": {
        "indices": ("intList", None),
        "sigma_min": ("float", None),
        "sigma_max": ("float", None),
    },
    "extension": {
        "mode_sigma": ("float", 5.0),
        "mode_index": ("int", None),
        "upsampling": ("int", 8),
        "points": ("str", None),
        "grid_spacing": ("float", 0.1),
        "minimum_distance": ("float", 0.05),
        "tolerance": ("float", 1e-6),
        "oracle_tolerance": ("float", 1e-7),
    },
    "fbi": {
        "source": ("str", "computed"),
        "transform": ("str", "hol"),
        "h_sweep": ("floatList", [0.1, 0.05, 0.025]),
        "target_sigma": ("floatList", [10.0, 20.0, 40.0]),
        "samples": ("int", 256),
        "nx": ("int", 256),
        "nxi": ("int", 601),
        "xi_min": ("float", -3.0),
        "xi_max": ("float", 3.0),
        "weights": ("strList", ["thm2:0.05"]),
        "zero_section_epsilon": ("float", 0.25),
        "concentration_min": ("float", 0.9),
        "zero_section_max": ("float", 1e-3),
    },
    "decay": {
        "target_sigma": ("floatList", [40.0]),
        "component": ("intList", [0]),
        "law": ("strList", None),
        "parity": ("str", "even"),
        "feet": ("floatList", [0.0]),
        "t_min": ("float", 0.02),
        "t_max": ("float", 0.2),
        "t_count": ("int", 19),
        "degree": ("int", TAYLOR_DEGREE),
        "window": ("bool", True),
        "delta": ("float", 0.05),
        "linear_tolerance": ("float", 0.01),
        "quadratic_tolerance": ("float", 0.05),
        "residual_threshold": ("float", 1e-3),
    },
    "output": {
        "directory": ("str", "results"),
        "seed": ("int", 0),
    },
}

DOMAIN_KINDS = ("circle", "ellipse", "radial_fourier", "annulus", "cylinder")
TRANSFORMS = ("hol", "geo")
FBI_SOURCES = ("circle", "computed")
LAWS = ("disk", "annulus_inner", "annulus_outer", "cylinder")

sectionPattern = re.compile(r"^\s*\[([^\]]+)\]")
keyPattern = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")


def _lineAnchors(text: str) -> Dict[tuple, int]:
    """ Maps (section,) and (section, key) to the 1-based line where they appear. """
    anchors = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        match = sectionPattern.match(line)
        if match:
            section = match.group(1).strip()
            anchors.setdefault((section,), number)
            continue
        match = keyPattern.match(line)
        if match and section is not None and not line[0].isspace():
            anchors.setdefault((section, match.group(1).strip().lower()), number)
    return anchors


class ExperimentConfig:
    """
    Validated experiment description. Built from an INI-style .cfg file or from the JSON echo
    of a resolved configuration; both go through the same schema.
    """

    def __init__(self, values: Dict[str, dict], path: str = None):
        self.values = values
        self.path = path

    @classmethod
    def fromFile(cls, path: str) -> 'ExperimentConfig':
        if not os.path.exists(path):
            raise ConfigError("Configuration file not found", path)
        with open(path, encoding="utf-8") as file:
            text = file.read()
        if path.endswith(".json"):
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as error:
                raise ConfigError("Invalid JSON: {0}".format(error.msg), path, error.lineno)
            return cls.fromDict(raw, path)
        return cls.fromString(text, path)

    @classmethod
    def fromString(cls, text: str, path: str = "<string>") -> 'ExperimentConfig':
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        try:
            parser.read_string(text, source=path)
        except configparser.DuplicateSectionError as error:
            raise ConfigError("Duplicate section [{0}]".format(error.section), path, error.lineno)
        except configparser.DuplicateOptionError as error:
            raise ConfigError("Duplicate key '{0}' in [{1}]".format(error.option, error.section), path,
                              error.lineno)
        except configparser.MissingSectionHeaderError as error:
            raise ConfigError("Key outside of any [section]", path, error.lineno)
        except configparser.ParsingError as error:
            line = error.errors[0][0] if error.errors else None
            raise ConfigError("Cannot parse line", path, line)

        anchors = _lineAnchors(text)
        raw = {section: dict(parser.items(section)) for section in parser.sections()}
        return cls._validate(raw, path, anchors, fromText=True)

    @classmethod
    def fromDict(cls, raw: dict, path: str = None) -> 'ExperimentConfig':
        if not isinstance(raw, dict):
            raise ConfigError("Top level must be a table of sections", path)
        return cls._validate(raw, path, {}, fromText=False)

    @classmethod
    def _validate(cls, raw: dict, path, anchors, fromText: bool) -> 'ExperimentConfig':
        values = {}
        for section, entries in raw.items():
            line = anchors.get((section,))
            if section not in SCHEMA:
                raise ConfigError("Unknown section [{0}]".format(section), path, line)
            if not isinstance(entries, dict):
                raise ConfigError("Section [{0}] must be a table".format(section), path, line)
            schema = SCHEMA[section]
            resolved = {}
            for key, value in entries.items():
                keyLine = anchors.get((section, key), line)
                if key not in schema:
                    raise ConfigError("Unknown key '{0}' in [{1}]".format(key, section), path, keyLine)
                kind, _ = schema[key]
                resolved[key] = _coerce(value, kind, fromText, "{0}.{1}".format(section, key), path, keyLine)
            for key, (kind, default) in schema.items():
                if key not in resolved:
                    if default is REQUIRED:
                        raise ConfigError("Missing required key '{0}' in [{1}]".format(key, section), path, line)
                    resolved[key] = default
            values[section] = resolved

        if "domain" not in values:
            raise ConfigError("Missing required section [domain]", path)

        config = cls(values, path)
        config._checkChoices(anchors)
        return config

    def _checkChoices(self, anchors):
        def fail(section, key, message):
            raise ConfigError(message, self.path, anchors.get((section, key), anchors.get((section,))))

        kind = self.get("domain", "kind")
        if kind not in DOMAIN_KINDS:
            fail("domain", "kind", "Unknown domain kind '{0}', expected one of {1}".format(
                kind, ", ".join(DOMAIN_KINDS)))
        if kind == "ellipse" and (self.get("domain", "a") is None or self.get("domain", "b") is None):
            fail("domain", "kind", "Ellipse needs both 'a' and 'b'")
        if kind == "annulus" and self.get("domain", "r0") is None:
            fail("domain", "kind", "Annulus needs 'r0'")
        if kind == "radial_fourier" and not self.get("domain", "cosines"):
            fail("domain", "kind", "Radial Fourier domain needs 'cosines'")

        if self.hasSection("fbi"):
            if self.get("fbi", "transform") not in TRANSFORMS:
                fail("fbi", "transform", "Unknown transform '{0}'".format(self.get("fbi", "transform")))
            if self.get("fbi", "source") not in FBI_SOURCES:
                fail("fbi", "source", "Unknown FBI source '{0}'".format(self.get("fbi", "source")))
            try:
                self.weightSpecs()
            except Exception as error:
                fail("fbi", "weights", error.args[0] if error.args else str(error))

        if self.hasSection("decay"):
            for law in self.get("decay", "law") or []:
                if law not in LAWS:
                    fail("decay", "law", "Unknown decay law '{0}', expected one of {1}".format(law, ", ".join(LAWS)))
            if self.get("decay", "t_min") >= self.get("decay", "t_max"):
                fail("decay", "t_min", "t_min must be below t_max")

    def hasSection(self, section: str) -> bool:
        return section in self.values

    def get(self, section: str, key: str):
        if section in self.values:
            return self.values[section][key]
        kind, default = SCHEMA[section][key]
        return default

    def resolved(self) -> dict:
        return {section: dict(sorted(entries.items())) for section, entries in sorted(self.values.items())}

    def writeResolved(self, path: str):
        with open(path, "w", encoding="utf-8") as file:
            json.dump(self.resolved(), file, indent=2, sort_keys=True)
            file.write("\n")

    @property
    def isCylinder(self) -> bool:
        return self.get("domain", "kind") == "cylinder"

    def buildDomain(self):
        kind = self.get("domain", "kind")
        if kind == "circle":
            return Domain.disk(self.get("domain", "radius"))
        elif kind == "ellipse":
            return Domain.ellipse(self.get("domain", "a"), self.get("domain", "b"))
        elif kind == "annulus":
            return Domain.annulus(self.get("domain", "r0"), self.get("domain", "radius"))
        elif kind == "radial_fourier":
            return Domain.radialFourier(self.get("domain", "cosines"), self.get("domain", "sines"))
        return CylinderDomain()

    def weightSpecs(self) -> List[WeightSpec]:
        specs = []
        for entry in self.get("fbi", "weights"):
            parts = entry.split(":")
            family, parameters = parts[0], [float(p) for p in parts[1:]]
            if family == WeightSpec.THM2:
                order = int(parameters[1]) if len(parameters) > 1 else 1
                specs.append(WeightSpec.thm2(parameters[0], order))
            elif family == WeightSpec.THM3_GAMMA:
                specs.append(WeightSpec.thm3Gamma(*parameters))
            elif family == WeightSpec.THM3_SHARP:
                specs.append(WeightSpec.thm3Sharp(*parameters))
            elif family == WeightSpec.ZERO:
                specs.append(WeightSpec.zero())
            else:
                raise ConfigError("Unknown weight family '{0}'".format(family))
        return specs

    def phaseSpaceGrid(self) -> PhaseSpaceGrid:
        return PhaseSpaceGrid(self.get("fbi", "nx"), self.get("fbi", "xi_min"), self.get("fbi", "xi_max"),
                              self.get("fbi", "nxi"))

    def distances(self):
        return np.linspace(self.get("decay", "t_min"), self.get("decay", "t_max"), self.get("decay", "t_count"))

    def __repr__(self):
        return "ExperimentConfig({0}, {1})".format(self.path, self.get("domain", "kind"))


def _coerce(value, kind: str, fromText: bool, name: str, path, line):
    if value is None:
        return None
    try:
        if kind.endswith("List"):
            itemKind = kind[:-4]
            if fromText:
                items = [item.strip() for item in value.split(",") if item.strip()]
            elif isinstance(value, list):
                items = value
            else:
                items = [value]
            return [_coerceScalar(item, itemKind, fromText) for item in items]
        return _coerceScalar(value, kind, fromText)
    except (TypeError, ValueError):
        raise ConfigError("'{0}' expects {1}, got {2!r}".format(name, kind, value), path, line)


def _coerceScalar(value, kind: str, fromText: bool):
    if value is None:
        return None
    if kind == "int":
        if isinstance(value, bool) or (not fromText and isinstance(value, float) and not value.is_integer()):
            raise ValueError()
        return int(value)
    elif kind == "float":
        if isinstance(value, bool):
            raise ValueError()
        return float(value)
    elif kind == "bool":
        if isinstance(value, bool):
            return value
        states = configparser.ConfigParser.BOOLEAN_STATES
        if str(value).lower() not in states:
            raise ValueError()
        return states[str(value).lower()]
    return str(value)
