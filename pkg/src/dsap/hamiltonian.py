"""Chain Hamiltonian assembly and pulse schedules.

The Hamiltonian of the three-site spin-one chain is

    H = B * (Jz1 + Jz2 + Jz3) + d12 * X12 + d23 * X23

where Xij is the normalised nearest-neighbour flip-flop (Ji+ Jj- + h.c.)/2.
With this normalisation the coupling strengths are the actual transition
matrix elements: <101|H|011> = d12 and <110|H|101> = d23, which makes the
single-excitation blocks identical to the canonical three-level
adiabatic-passage problem with tunnel couplings (d12, d23).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .spin_algebra import embed_site_operator, spin1_operators, total_magnetization_operator

MZ_TOTAL = total_magnetization_operator()

_JZ, _JP, _JM = spin1_operators()
_T12 = embed_site_operator(_JP, 1) @ embed_site_operator(_JM, 2)
_T23 = embed_site_operator(_JP, 2) @ embed_site_operator(_JM, 3)

#: normalised flip-flop couplers; real symmetric
HOP12 = (_T12 + _T12.conj().T) / 2.0
HOP23 = (_T23 + _T23.conj().T) / 2.0


@dataclass(frozen=True)
class CouplingSnapshot:
    """Instantaneous Hamiltonian parameters (energies in units of B)."""

    b_coeff: float
    d12: float
    d23: float
    t: float = 0.0


@dataclass(frozen=True, eq=False)
class PulseSchedule:
    """Time-parameterised couplings on [0, t_max].

    ``sampler`` maps a time to a CouplingSnapshot; ``d`` records the peak
    coupling magnitude and ``shape`` the construction
    (``counter_intuitive_sin2``, ``tabulated`` or ``dipole_trajectory``).
    """

    t_max: float
    d: float
    shape: str
    sampler: Callable[[float], CouplingSnapshot]

    def at(self, t: float) -> CouplingSnapshot:
        if not 0.0 <= t <= self.t_max:
            raise ValueError("time out of schedule range")
        return self.sampler(t)


def ci_pulse(t: float, t_max: float, d: float) -> tuple[float, float]:
    """Counter-intuitive pulse pair d12 = d sin^2(pi t / 2 t_max), d23 = d - d12."""
    if not 0.0 <= t <= t_max:
        raise ValueError("time out of schedule range")
    s = math.sin(math.pi * t / (2.0 * t_max)) ** 2
    return d * s, d * (1.0 - s)


def ci_schedule(t_max: float = 100.0, d: float = 0.2, b: float = 1.0) -> PulseSchedule:
    """Counter-intuitive sin^2/cos^2 schedule with constant Zeeman coefficient."""
    if t_max <= 0:
        raise ValueError("t_max must be positive")

    def sampler(t: float) -> CouplingSnapshot:
        d12, d23 = ci_pulse(t, t_max, d)
        return CouplingSnapshot(b_coeff=b, d12=d12, d23=d23, t=t)

    return PulseSchedule(t_max=t_max, d=d, shape="counter_intuitive_sin2", sampler=sampler)


def tabulated_schedule(times, d12s, d23s, bs) -> PulseSchedule:
    """Schedule interpolating linearly between (t, d12, d23, B) samples.

    The time grid must be strictly increasing, start at 0 and end at t_max.
    """
    times = np.asarray(times, dtype=float)
    d12s = np.asarray(d12s, dtype=float)
    d23s = np.asarray(d23s, dtype=float)
    bs = np.asarray(bs, dtype=float)
    if times.ndim != 1 or len(times) < 2:
        raise ValueError("a tabulated schedule needs at least two samples")
    if not (len(times) == len(d12s) == len(d23s) == len(bs)):
        raise ValueError("tabulated columns must have equal length")
    if np.any(np.diff(times) <= 0):
        raise ValueError("tabulated times must be strictly increasing")
    if times[0] != 0.0:
        raise ValueError("tabulated schedule must start at t = 0")
    t_max = float(times[-1])

    def sampler(t: float) -> CouplingSnapshot:
        if not 0.0 <= t <= t_max:
            raise ValueError("time out of schedule range")
        return CouplingSnapshot(
            b_coeff=float(np.interp(t, times, bs)),
            d12=float(np.interp(t, times, d12s)),
            d23=float(np.interp(t, times, d23s)),
            t=t,
        )

    peak = float(max(np.max(np.abs(d12s)), np.max(np.abs(d23s))))
    return PulseSchedule(t_max=t_max, d=peak, shape="tabulated", sampler=sampler)


def read_schedule_csv(path: str | Path) -> PulseSchedule:
    """Read a tabulated schedule from a CSV file with header ``t,d12,d23,B``."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "d12", "d23", "B"]:
            raise ValueError(f"schedule CSV must have header 't,d12,d23,B', got {header!r}")
        rows = [[float(cell) for cell in row] for row in reader if row]
    if not rows:
        raise ValueError("schedule CSV has no data rows")
    cols = np.array(rows, dtype=float).T
    return tabulated_schedule(cols[0], cols[1], cols[2], cols[3])


def build_hamiltonian(snap: CouplingSnapshot) -> np.ndarray:
    """Assemble the 27x27 chain Hamiltonian for one coupling snapshot."""
    values = (snap.b_coeff, snap.d12, snap.d23)
    if not all(math.isfinite(v) for v in values):
        raise ValueError("non-finite Hamiltonian coefficients")
    return snap.b_coeff * MZ_TOTAL + snap.d12 * HOP12 + snap.d23 * HOP23


def hamiltonian_at(schedule: PulseSchedule, t: float) -> np.ndarray:
    """Instantaneous Hamiltonian of a schedule at time t."""
    return build_hamiltonian(schedule.at(t))
