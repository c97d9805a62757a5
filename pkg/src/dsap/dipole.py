"""Magic-angle dipolar control of the chain couplings.

Three spins sit at the vertices of an equilateral triangle in the x-y plane
with the 1-3 ray along the y axis.  A magnetic field held at the magic angle
arccos(1/sqrt(3)) to that ray nulls the 1-3 dipole coupling identically, and
sweeping the field azimuth phi moves the zeros of d12 and d23 so that the
counter-intuitive pulse ordering is realised purely by field steering.

The field direction is B_mag * [cos(phi), cot(theta_magic), sin(phi)]: its
angle to the y axis is theta_magic for every phi, and its magnitude is
constant at B_mag * sqrt(3/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .hamiltonian import CouplingSnapshot, PulseSchedule

MAGIC_ANGLE = math.acos(1.0 / math.sqrt(3.0))
_COT_MAGIC = 1.0 / math.tan(MAGIC_ANGLE)

#: tolerance for the nulled 1-3 coupling along the trajectory
D13_NULL_ATOL = 1e-12

ZEEMAN_MODES = ("constant_magnitude", "lab_z_projection")

# default layout: side and field strength chosen so the peak coupling is 0.2
# of the Zeeman energy, the same separation of manifolds as the ideal pulse
DEFAULT_SIDE = 5.0 ** (1.0 / 3.0)
DEFAULT_B_MAG = math.sqrt(2.0 / 3.0)


@dataclass(frozen=True)
class DipoleGeometry:
    """Spin positions (rows, length units), dipole moments and field strength."""

    positions: np.ndarray
    gammas: np.ndarray
    b_mag: float

    def separation(self, j: int, k: int) -> np.ndarray:
        return self.positions[k - 1] - self.positions[j - 1]


def equilateral_geometry(
    side: float = DEFAULT_SIDE,
    gamma: float = 1.0,
    b_mag: float = DEFAULT_B_MAG,
) -> DipoleGeometry:
    """Equilateral triangle in the x-y plane with the 1-3 ray along y."""
    positions = np.array(
        [
            [0.0, 0.0, 0.0],
            [math.sqrt(3.0) * side / 2.0, side / 2.0, 0.0],
            [0.0, side, 0.0],
        ]
    )
    return DipoleGeometry(positions=positions, gammas=np.full(3, float(gamma)), b_mag=float(b_mag))


def dipole_coupling(gamma_j: float, gamma_k: float, r_jk: float, theta_jk: float) -> float:
    """Dipole-dipole coupling (gamma_j gamma_k / r^3)(3 cos^2(theta) - 1)."""
    if r_jk <= 0.0:
        raise ValueError("spin separation must be positive")
    return (gamma_j * gamma_k / r_jk**3) * (3.0 * math.cos(theta_jk) ** 2 - 1.0)


def magic_field(phi: float, b_mag: float) -> np.ndarray:
    """Field vector on the magic cone about the y axis at azimuth phi."""
    return b_mag * np.array([math.cos(phi), _COT_MAGIC, math.sin(phi)])


def _check_axis(geom: DipoleGeometry) -> None:
    ray = geom.separation(1, 3)
    if ray[0] != 0.0 or ray[2] != 0.0 or ray[1] == 0.0:
        raise ValueError("trajectory axis mismatch")


def trajectory_couplings(geom: DipoleGeometry, phi: float) -> tuple[float, float, float]:
    """(d12, d23, d13) produced by the magic field at azimuth phi."""
    _check_axis(geom)
    field = magic_field(phi, geom.b_mag)
    unit_field = field / np.linalg.norm(field)
    couplings = []
    for j, k in ((1, 2), (2, 3), (1, 3)):
        ray = geom.separation(j, k)
        r = float(np.linalg.norm(ray))
        cos_theta = float(np.clip(unit_field @ (ray / r), -1.0, 1.0))
        theta = math.acos(cos_theta)
        couplings.append(dipole_coupling(geom.gammas[j - 1], geom.gammas[k - 1], r, theta))
    return tuple(couplings)


def endpoint_reference_cosines() -> dict[str, float]:
    """Closed-form endpoint expressions retained for comparison.

    The sweep-start expression mixes an angle with a cosine and is not a valid
    cosine value; the solver finds both endpoints from the null conditions
    d12 = 0 and d23 = 0 instead.
    """
    c = _COT_MAGIC * math.sin(2.0 * math.pi / 3.0) / (math.cos(2.0 * math.pi / 3.0) - 1.0)
    return {"sweep_start": math.pi - c, "sweep_end": c}


def solve_endpoints(geom: DipoleGeometry) -> tuple[float, float]:
    """Azimuths where d12 and d23 vanish, bracketing a counter-intuitive arc.

    Returns (phi0, phi_max) with d12(phi0) = 0 and d23(phi_max) = 0 such that
    both couplings stay single-signed and nonzero strictly between them.
    """
    _check_axis(geom)

    def d12(phi: float) -> float:
        return trajectory_couplings(geom, phi)[0]

    def d23(phi: float) -> float:
        return trajectory_couplings(geom, phi)[1]

    def roots(fun) -> list[float]:
        grid = np.linspace(0.0, 2.0 * math.pi, 721)
        vals = np.array([fun(p) for p in grid])
        found = []
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                found.append(float(grid[i]))
            elif vals[i] * vals[i + 1] < 0.0:
                found.append(float(brentq(fun, grid[i], grid[i + 1], xtol=1e-14)))
        return found

    candidates = []
    for phi0 in roots(d12):
        for phi_max in roots(d23):
            if phi0 == phi_max:
                continue
            interior = np.linspace(phi0, phi_max, 101)[1:-1]
            v12 = np.array([d12(p) for p in interior])
            v23 = np.array([d23(p) for p in interior])
            if np.all(np.abs(v12) > 1e-10) and np.all(np.abs(v23) > 1e-10):
                if len(set(np.sign(v12))) == 1 and len(set(np.sign(v23))) == 1:
                    candidates.append((phi0, phi_max))
    if not candidates:
        raise ValueError("geometry admits no counter-intuitive arc")
    candidates.sort(key=lambda pair: (abs(pair[1] - pair[0]), pair[0]))
    return candidates[0]


@dataclass(frozen=True)
class MagicTrajectory:
    """Sampled field sweep implementing the counter-intuitive sequence."""

    geometry: DipoleGeometry
    phi0: float
    phi_max: float
    theta_m: float
    zeeman_mode: str
    times: np.ndarray
    phis: np.ndarray
    fields: np.ndarray      # (n, 3)
    d12s: np.ndarray
    d23s: np.ndarray
    d13s: np.ndarray
    b_coeffs: np.ndarray


def _zeeman_coeff(geom: DipoleGeometry, phi: float, mode: str) -> float:
    gamma = float(geom.gammas[0])
    if mode == "constant_magnitude":
        return gamma * float(np.linalg.norm(magic_field(phi, geom.b_mag)))
    if mode == "lab_z_projection":
        return gamma * geom.b_mag * math.sin(phi)
    raise ValueError(f"unknown zeeman mode {mode!r}")


def magic_trajectory(
    geom: DipoleGeometry,
    t_max: float,
    n_samples: int = 201,
    zeeman_mode: str = "constant_magnitude",
) -> MagicTrajectory:
    """Sample the linear phi sweep between the two coupling-null endpoints."""
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    if not np.all(geom.gammas == geom.gammas[0]):
        raise ValueError("uniform dipole moments are required for a single Zeeman coefficient")
    phi0, phi_max = solve_endpoints(geom)
    times = np.linspace(0.0, t_max, n_samples)
    phis = phi0 + (phi_max - phi0) * times / t_max
    fields = np.stack([magic_field(p, geom.b_mag) for p in phis])
    coupl = np.array([trajectory_couplings(geom, p) for p in phis])
    b_coeffs = np.array([_zeeman_coeff(geom, p, zeeman_mode) for p in phis])
    return MagicTrajectory(
        geometry=geom,
        phi0=phi0,
        phi_max=phi_max,
        theta_m=MAGIC_ANGLE,
        zeeman_mode=zeeman_mode,
        times=times,
        phis=phis,
        fields=fields,
        d12s=coupl[:, 0],
        d23s=coupl[:, 1],
        d13s=coupl[:, 2],
        b_coeffs=b_coeffs,
    )


def magic_schedule(
    geom: DipoleGeometry,
    t_max: float,
    n_samples: int = 201,
    zeeman_mode: str = "constant_magnitude",
) -> PulseSchedule:
    """Pulse schedule realised by the magic-angle field sweep.

    The sampler evaluates the geometry exactly at every requested time (the
    sample grid is only used to record the trajectory and the peak coupling).
    """
    trajectory = magic_trajectory(geom, t_max, n_samples, zeeman_mode)
    phi0, phi_max = trajectory.phi0, trajectory.phi_max

    def sampler(t: float) -> CouplingSnapshot:
        if not 0.0 <= t <= t_max:
            raise ValueError("time out of schedule range")
        phi = phi0 + (phi_max - phi0) * t / t_max
        d12, d23, _ = trajectory_couplings(geom, phi)
        return CouplingSnapshot(b_coeff=_zeeman_coeff(geom, phi, zeeman_mode), d12=d12, d23=d23, t=t)

    peak = float(max(np.max(np.abs(trajectory.d12s)), np.max(np.abs(trajectory.d23s))))
    return PulseSchedule(t_max=t_max, d=peak, shape="dipole_trajectory", sampler=sampler)
