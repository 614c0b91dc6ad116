"""
Pulse definition files
KEY=VALUE files (the .env grammar, read with python-dotenv) describing one PulseProfile

Example:
    family=Sech
    a=0.5
    c=0.05
    omega=0.1
    Bplus=0.0
    t_end=200
"""

import logging
import math
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from dotenv import dotenv_values

from pulses import (
    ConstantShape,
    FAMILIES,
    PulseProfile,
    SechShape,
    SinSquaredShape,
    constant_pair,
    dual_sech_pulse,
    free_pulse,
    planar_loop,
    proportional,
    q_vector_pulse,
    sampled_pulse,
    sech_pulse,
)

logger = logging.getLogger(__name__)

TARGETS = ("none", "xor", "sqrt_swap")
Q_SHAPES = ("constant", "sech", "sin2")

# Keys every family accepts besides its own
COMMON_KEYS = {"family", "t_end", "Bplus", "target", "samples"}

FAMILY_KEYS = {
    "Free": {"J", "phi"},
    "ConstantPair": {"J", "Bminus"},
    "Proportional": {"lambda", "q", "q_shape", "q_rate", "q_duration"},
    "Sech": {"a", "c", "omega"},
    "DualSech": {"a", "c", "omega"},
    "QVector": {"radius", "q2_start", "sweep", "duration"},
    "Sampled": {"times", "J", "Bminus"},
}


class PulseFileError(ValueError):
    """Raised for a malformed pulse file; carries the field and line number"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.field = field
        self.line = line


class PulseSpec:
    """Parsed pulse file: raw values plus line numbers for error reports"""

    def __init__(self, values: Dict[str, Optional[str]], lines: Dict[str, int], source: str = "<string>"):
        self.values = values
        self.lines = lines
        self.source = source

    def error(self, message: str, key: str) -> PulseFileError:
        return PulseFileError(message, key, self.lines.get(key))

    def has(self, key: str) -> bool:
        return self.values.get(key) not in (None, "")

    def text(self, key: str, default: Optional[str] = None) -> str:
        if not self.has(key):
            if default is None:
                raise PulseFileError(f"missing required value in {self.source}", key)
            return default
        return self.values[key].strip()

    def number(self, key: str, default: Optional[float] = None) -> float:
        if not self.has(key):
            if default is None:
                raise PulseFileError(f"missing required value in {self.source}", key)
            return default
        try:
            value = float(self.values[key])
        except ValueError:
            raise self.error(f"not a number: {self.values[key]!r}", key)
        if not math.isfinite(value):
            raise self.error(f"value must be finite, got {value}", key)
        return value

    def numbers(self, key: str) -> List[float]:
        raw = self.text(key)
        try:
            return [float(item) for item in raw.split(",") if item.strip()]
        except ValueError:
            raise self.error(f"expected a comma-separated list of numbers, got {raw!r}", key)

    def positive(self, key: str, default: Optional[float] = None) -> float:
        value = self.number(key, default)
        if value <= 0:
            raise self.error(f"must be > 0, got {value}", key)
        return value


_KEY_PATTERN = re.compile(r"^\s*(?:export\s+)?([A-Za-z_][A-Za-z0-9_]*)\s*=")


def _line_numbers(text: str) -> Dict[str, int]:
    lines = {}
    for number, line in enumerate(text.splitlines(), start=1):
        match = _KEY_PATTERN.match(line)
        if match:
            lines[match.group(1)] = number
        elif line.strip() and not line.lstrip().startswith("#"):
            raise PulseFileError(f"expected KEY=VALUE, got {line.strip()!r}", line=number)
    return lines


def read_pulse_spec(path) -> PulseSpec:
    """Read and syntax-check a pulse file"""
    path = Path(path)
    if not path.is_file():
        raise PulseFileError(f"pulse file not found: {path}")
    text = path.read_text(encoding="utf-8")
    lines = _line_numbers(text)
    values = dict(dotenv_values(path, interpolate=False))
    spec = PulseSpec(values, lines, str(path))

    family = spec.text("family")
    if family not in FAMILIES:
        raise spec.error(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}", "family")
    allowed = COMMON_KEYS | FAMILY_KEYS[family]
    for key in values:
        if key not in allowed:
            raise spec.error(f"key not used by family {family}", key)
    target = spec.text("target", "none")
    if target not in TARGETS:
        raise spec.error(f"unknown target {target!r}; expected one of {', '.join(TARGETS)}", "target")
    return spec


def _q_shape(spec: PulseSpec, t_end: float):
    kind = spec.text("q_shape", "constant")
    amplitude = spec.number("q")
    if kind == "constant":
        return ConstantShape(amplitude)
    if kind == "sech":
        return SechShape(amplitude, spec.positive("q_rate"))
    if kind == "sin2":
        return SinSquaredShape(amplitude, spec.positive("q_duration", t_end))
    raise spec.error(f"unknown q_shape {kind!r}; expected one of {', '.join(Q_SHAPES)}", "q_shape")


def build_profile(spec: PulseSpec) -> PulseProfile:
    """PulseProfile described by a parsed pulse file"""
    family = spec.text("family")
    bplus = spec.number("Bplus", 0.0)

    if family == "Sampled":
        times = spec.numbers("times")
        j_values = spec.numbers("J")
        bminus_values = spec.numbers("Bminus")
        if not (len(times) == len(j_values) == len(bminus_values)):
            raise spec.error("times, J and Bminus must have the same length", "times")
        try:
            return sampled_pulse(times, j_values, bminus_values, [bplus] * len(times))
        except ValueError as e:
            raise spec.error(str(e), "times")

    t_end = spec.positive("t_end")
    if family == "Free":
        if spec.has("phi"):
            return free_pulse(ConstantShape(spec.number("phi") / t_end), t_end, bplus)
        return free_pulse(ConstantShape(spec.number("J")), t_end, bplus)
    if family == "ConstantPair":
        return constant_pair(spec.number("J"), spec.number("Bminus"), bplus, t_end)
    if family == "Proportional":
        return proportional(spec.number("lambda"), _q_shape(spec, t_end), bplus, t_end)
    if family == "Sech":
        return sech_pulse(spec.number("a"), spec.number("c"), spec.positive("omega"), bplus, t_end)
    if family == "DualSech":
        return dual_sech_pulse(spec.number("a"), spec.number("c"), spec.positive("omega"), bplus, t_end)
    if family == "QVector":
        trajectory = planar_loop(spec.number("radius"), spec.number("q2_start", 0.0),
                                 spec.number("sweep"), spec.positive("duration", t_end))
        return q_vector_pulse(trajectory, bplus, t_end)
    raise spec.error(f"unsupported family {family!r}", "family")


def load_pulse(path) -> Tuple[PulseProfile, PulseSpec]:
    """
    Read a pulse file and build its profile

    Returns:
        (PulseProfile, PulseSpec)

    Raises:
        PulseFileError: malformed file, unknown key or invalid value
    """
    spec = read_pulse_spec(path)
    profile = build_profile(spec)
    logger.info(f"Loaded {profile.family} pulse from {spec.source} (t_end = {profile.t_end:.6g} ps)")
    return profile, spec
