"""Experiment configuration: flat key = value documents with # comments.

Complex numbers use ``re+imi`` tokens (``0.5-0.5i``); lists are comma
separated.  Basis-state tokens use the characters ``1``, ``0`` and ``m``
per site, e.g. ``m11`` for the state with site 1 lowered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .spin_algebra import as_triple

MODES = ("spectrum", "evolve", "qutrit", "dipole", "adiabaticity", "pulse")
SCHEDULE_KINDS = ("ci", "dipole")
CHAIN_TOKENS = ("up_up", "down_down", "singlet", "triplet", "entangled", "custom")


class ConfigError(ValueError):
    """Configuration problem, carrying the offending key when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message if key is None else f"{message} (key: {key})")
        self.key = key


@dataclass
class ExperimentConfig:
    mode: str
    b: float = 1.0
    d: float = 0.2
    t_max: float = 100.0
    n_steps: int | None = None
    n_samples: int = 201
    initial_state: str = "011"
    watchlist: tuple[str, ...] = ("011", "101", "110")
    chain_state: str = "up_up"
    chain_phi: float | None = None
    chain_amplitudes: tuple[complex, ...] | None = None
    qutrit_coeffs: tuple[complex, complex, complex] = (0j, 1 + 0j, 0j)
    zeeman_mode: str = "constant_magnitude"
    schedule: str = "ci"
    output_path: str = ""
    dump_trajectory: str = ""


def _parse_complex(token: str, key: str) -> complex:
    try:
        return complex(token.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"invalid complex token {token.strip()!r}", key) from None


def _parse_float(token: str, key: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ConfigError(f"invalid number {token!r}", key) from None
    if not math.isfinite(value):
        raise ConfigError(f"non-finite value {token!r}", key)
    return value


def _parse_int(token: str, key: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ConfigError(f"invalid integer {token!r}", key) from None


def _check_label(token: str, key: str) -> str:
    try:
        as_triple(token)
    except ValueError:
        raise ConfigError(f"invalid label token {token!r}", key) from None
    return token


def parse_key_values(document: str) -> dict[str, str]:
    """Split a config document into raw key/value strings."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(document.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno} is not a 'key = value' pair: {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno} has an empty key")
        if key in pairs:
            raise ConfigError("duplicate key", key)
        pairs[key] = value
    return pairs


def parse_config(document: str, default_mode: str | None = None) -> ExperimentConfig:
    """Validate a config document and apply defaults; unknown keys are rejected."""
    pairs = parse_key_values(document)

    mode = pairs.pop("mode", None) or default_mode
    if mode is None:
        raise ConfigError("missing mode")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r} (expected one of {', '.join(MODES)})", "mode")
    if default_mode is not None and mode != default_mode:
        raise ConfigError(f"config mode {mode!r} conflicts with requested mode {default_mode!r}", "mode")
    config = ExperimentConfig(mode=mode)

    for key, value in pairs.items():
        if key == "B":
            config.b = _parse_float(value, key)
        elif key == "d":
            config.d = _parse_float(value, key)
        elif key == "t_max":
            config.t_max = _parse_float(value, key)
            if config.t_max <= 0:
                raise ConfigError("t_max must be positive", key)
        elif key == "n_steps":
            config.n_steps = _parse_int(value, key)
            if config.n_steps < 1:
                raise ConfigError("n_steps must be at least 1", key)
        elif key == "n_samples":
            config.n_samples = _parse_int(value, key)
            if config.n_samples < 2:
                raise ConfigError("n_samples must be at least 2", key)
        elif key == "initial_state":
            config.initial_state = _check_label(value, key)
        elif key == "watchlist":
            tokens = tuple(tok.strip() for tok in value.split(",") if tok.strip())
            if not tokens:
                raise ConfigError("watchlist must not be empty", key)
            config.watchlist = tuple(_check_label(tok, key) for tok in tokens)
        elif key == "chain_state":
            if value not in CHAIN_TOKENS:
                raise ConfigError(f"unknown chain state {value!r}", key)
            config.chain_state = value
        elif key == "chain_phi":
            config.chain_phi = _parse_float(value, key)
        elif key == "chain_amplitudes":
            amps = tuple(_parse_complex(tok, key) for tok in value.split(","))
            if len(amps) != 9:
                raise ConfigError("custom chain state needs 9 amplitudes", key)
            norm = math.sqrt(sum(abs(a) ** 2 for a in amps))
            if abs(norm - 1.0) > 1e-6:
                raise ConfigError("custom chain state must be normalised", key)
            config.chain_amplitudes = tuple(a / norm for a in amps)
        elif key == "qutrit_coeffs":
            coeffs = tuple(_parse_complex(tok, key) for tok in value.split(","))
            if len(coeffs) != 3:
                raise ConfigError("qutrit_coeffs needs exactly 3 complex numbers", key)
            norm = math.sqrt(sum(abs(c) ** 2 for c in coeffs))
            if abs(norm - 1.0) > 1e-6:
                raise ConfigError("non-normalized qutrit coefficients", key)
            config.qutrit_coeffs = tuple(c / norm for c in coeffs)
        elif key == "zeeman_mode":
            if value not in ("constant_magnitude", "lab_z_projection"):
                raise ConfigError(f"unknown zeeman mode {value!r}", key)
            config.zeeman_mode = value
        elif key == "schedule":
            if value not in SCHEDULE_KINDS:
                raise ConfigError(f"unknown schedule kind {value!r}", key)
            config.schedule = value
        elif key == "output_path":
            config.output_path = value
        elif key == "dump_trajectory":
            config.dump_trajectory = value
        else:
            raise ConfigError("unknown key", key)

    if config.chain_state == "entangled" and config.chain_phi is None:
        raise ConfigError("entangled chain state needs chain_phi", "chain_phi")
    if config.chain_state == "custom" and config.chain_amplitudes is None:
        raise ConfigError("custom chain state needs chain_amplitudes", "chain_amplitudes")
    return config
