"""Eigensystems with continuity tracking, closed-form eigenstates, adiabaticity.

Because the chain Hamiltonian commutes with total Jz, eigenpairs are computed
sector by sector and the sector label attached to every eigenvector is exact.
Curve tracking across a pulse sweep matches eigenvectors between neighbouring
time samples by maximal overlap within each sector; exactly degenerate
clusters are re-oriented against the previous frame before matching so that
degenerate curves stay continuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import MZ_TOTAL, PulseSchedule, ci_pulse, hamiltonian_at
from .spin_algebra import DIM, SECTOR_INDICES, basis_index

HERMITICITY_ATOL = 1e-12
#: eigenvalue gap below which a cluster is treated as exactly degenerate
DEGENERACY_GAP = 1e-9


@dataclass
class SpectralFrame:
    """Full eigendecomposition at one time sample.

    ``eigenvalues`` are ascending; column k of ``eigenvectors`` belongs to
    ``eigenvalues[k]`` and carries magnetization sector ``m_labels[k]``.
    """

    t: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    m_labels: np.ndarray


@dataclass
class TrackedSpectrum:
    """Eigen-curves followed through a schedule sweep.

    ``assignments[j, k]`` is the eigen index (into ``frames[j]``) of curve k;
    frame 0 uses the identity assignment.  ``diagnostics`` records every
    matched overlap below 0.9 as (frame, curve, overlap).
    """

    schedule: PulseSchedule
    frames: list[SpectralFrame]
    assignments: np.ndarray
    min_overlap: float
    diagnostics: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([f.t for f in self.frames])

    def curve_energies(self) -> np.ndarray:
        """(n_samples, 27) eigenvalues in tracked curve order."""
        return np.stack(
            [frame.eigenvalues[self.assignments[j]] for j, frame in enumerate(self.frames)]
        )

    def curve_m_labels(self) -> np.ndarray:
        """(n_samples, 27) sector labels in tracked curve order."""
        return np.stack(
            [frame.m_labels[self.assignments[j]] for j, frame in enumerate(self.frames)]
        )

    def curve_vector(self, j: int, k: int) -> np.ndarray:
        return self.frames[j].eigenvectors[:, self.assignments[j, k]]


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude component is real positive."""
    pivot = int(np.argmax(np.abs(vec)))
    phase = vec[pivot] / abs(vec[pivot])
    return vec / phase


def eigensystem(mat: np.ndarray, t: float = 0.0) -> SpectralFrame:
    """Eigendecompose a magnetization-conserving Hermitian operator.

    Eigenvalues ascend; ties across sectors are broken by sector label, then
    by position within the sector, so repeated calls are deterministic.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (DIM, DIM):
        raise ValueError(f"operator must be {DIM}x{DIM}")
    if np.max(np.abs(mat - mat.conj().T)) > HERMITICITY_ATOL:
        raise ValueError("operator is not Hermitian")

    commutes = np.max(np.abs(mat @ MZ_TOTAL - MZ_TOTAL @ mat)) <= HERMITICITY_ATOL
    eigenvalues = np.empty(DIM)
    eigenvectors = np.zeros((DIM, DIM), dtype=complex)
    m_labels = np.empty(DIM, dtype=int)
    sector_pos = np.empty(DIM, dtype=int)

    if commutes:
        k = 0
        for m in range(-3, 4):
            idx = SECTOR_INDICES[m]
            w, v = np.linalg.eigh(mat[np.ix_(idx, idx)])
            for pos in range(len(idx)):
                eigenvalues[k] = w[pos]
                eigenvectors[idx, k] = v[:, pos]
                m_labels[k] = m
                sector_pos[k] = pos
                k += 1
    else:
        w, v = np.linalg.eigh(mat)
        eigenvalues[:] = w
        eigenvectors[:] = v
        mz = np.diag(MZ_TOTAL).real
        m_labels[:] = np.rint(np.einsum("ik,i,ik->k", v.conj(), mz, v).real).astype(int)
        sector_pos[:] = np.arange(DIM)

    order = np.lexsort((sector_pos, m_labels, eigenvalues))
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]
    m_labels = m_labels[order]
    for k in range(DIM):
        eigenvectors[:, k] = _fix_phase(eigenvectors[:, k])
    return SpectralFrame(t=t, eigenvalues=eigenvalues, eigenvectors=eigenvectors, m_labels=m_labels)


def _degenerate_clusters(values: np.ndarray) -> list[np.ndarray]:
    """Group sorted positions into clusters with internal gaps < DEGENERACY_GAP."""
    clusters, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] >= DEGENERACY_GAP:
            clusters.append(np.arange(start, i))
            start = i
    return clusters


def _reorient_clusters(frame: SpectralFrame, prev_frame: SpectralFrame) -> None:
    """Rotate degenerate eigenvector clusters towards the previous frame.

    Within an exactly degenerate cluster the eigenbasis is arbitrary, so the
    previous frame's vectors at the same within-sector positions are projected
    onto the cluster subspace and re-orthonormalised.  This keeps degenerate
    curves continuous between samples.
    """
    for m in range(-3, 4):
        cols = np.flatnonzero(frame.m_labels == m)
        prev_cols = np.flatnonzero(prev_frame.m_labels == m)
        for cluster in _degenerate_clusters(frame.eigenvalues[cols]):
            if len(cluster) < 2:
                continue
            cl_cols = cols[cluster]
            subspace = frame.eigenvectors[:, cl_cols]
            prior = prev_frame.eigenvectors[:, prev_cols[cluster]]
            projected = subspace @ (subspace.conj().T @ prior)
            q, r = np.linalg.qr(projected)
            signs = np.sign(np.diag(r).real)
            signs[signs == 0] = 1.0
            frame.eigenvectors[:, cl_cols] = q * signs
            for k in cl_cols:
                frame.eigenvectors[:, k] = _fix_phase(frame.eigenvectors[:, k])


def _greedy_match(overlaps: np.ndarray) -> list[tuple[int, int]]:
    """Greedy maximal-overlap assignment of rows (new) to columns (previous).

    Ties break deterministically on the lower row, then lower column index.
    Returns (row, col) pairs covering every row and column once.
    """
    n = overlaps.shape[0]
    entries = sorted(
        ((row, col) for row in range(n) for col in range(n)),
        key=lambda rc: (-overlaps[rc], rc[0], rc[1]),
    )
    used_rows: set[int] = set()
    used_cols: set[int] = set()
    pairs = []
    for row, col in entries:
        if row in used_rows or col in used_cols:
            continue
        used_rows.add(row)
        used_cols.add(col)
        pairs.append((row, col))
        if len(pairs) == n:
            break
    return pairs


def track_eigenstates(schedule: PulseSchedule, n_samples: int) -> TrackedSpectrum:
    """Follow all 27 eigen-curves across a uniform time grid of the schedule."""
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    times = np.linspace(0.0, schedule.t_max, n_samples)
    frames = [eigensystem(hamiltonian_at(schedule, t), t) for t in times]

    # clusters that are degenerate at the start but split immediately have an
    # arbitrary basis at frame 0; orient them against the split basis of frame 1
    _reorient_clusters(frames[0], frames[1])

    assignments = np.empty((n_samples, DIM), dtype=int)
    assignments[0] = np.arange(DIM)
    diagnostics: list[tuple[int, int, float]] = []
    min_overlap = 1.0

    for j in range(1, n_samples):
        prev_frame, frame = frames[j - 1], frames[j]
        prev_cols = assignments[j - 1]
        _reorient_clusters(frame, prev_frame)
        new_assignment = np.empty(DIM, dtype=int)
        for m in range(-3, 4):
            curves = [k for k in range(DIM) if prev_frame.m_labels[prev_cols[k]] == m]
            cand = np.flatnonzero(frame.m_labels == m)
            prev_vecs = np.stack(
                [prev_frame.eigenvectors[:, prev_cols[k]] for k in curves], axis=1
            )
            overlaps = np.abs(frame.eigenvectors[:, cand].conj().T @ prev_vecs)
            for row, col in _greedy_match(overlaps):
                curve = curves[col]
                new_assignment[curve] = cand[row]
                ov = float(overlaps[row, col])
                min_overlap = min(min_overlap, ov)
                if ov < 0.9:
                    diagnostics.append((j, curve, ov))
        assignments[j] = new_assignment

    return TrackedSpectrum(
        schedule=schedule,
        frames=frames,
        assignments=assignments,
        min_overlap=min_overlap,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# closed-form eigenstates
# ---------------------------------------------------------------------------

_I011 = basis_index("011")
_I101 = basis_index("101")
_I110 = basis_index("110")


def analytic_D2(t: float, t_max: float, d: float, sign: int, b: float = 1.0):
    """Closed-form eigenstates of the m=+2 manifold under the CI pulse.

    ``sign`` 0 selects the transport (dark-like) state with energy 2B; +1/-1
    select the split states with energies 2B +/- sqrt(d12^2 + d23^2), where
    sqrt(d12^2 + d23^2) = (d/2) sqrt(3 + cos(2 pi t / t_max)).
    Returns (state, energy).
    """
    if sign not in (0, 1, -1):
        raise ValueError("sign must be 0, +1 or -1")
    d12, d23 = ci_pulse(t, t_max, d)
    gap = math.hypot(d12, d23)
    if gap == 0.0:
        raise ValueError("degenerate manifold undefined")
    vec = np.zeros(DIM, dtype=complex)
    if sign == 0:
        vec[_I011] = d23 / gap
        vec[_I110] = -d12 / gap
        return vec, 2.0 * b
    vec[_I011] = d12 / (math.sqrt(2.0) * gap)
    vec[_I101] = sign / math.sqrt(2.0)
    vec[_I110] = d23 / (math.sqrt(2.0) * gap)
    return vec, 2.0 * b + sign * gap


_I11M = basis_index("11m")
_I1M1 = basis_index("1m1")
_IM11 = basis_index("m11")
_I010 = basis_index("010")


def analytic_D1(d12: float, d23: float):
    """The degenerate E=B eigenstates and the transport superposition.

    Returns (D1_1, D1_2, D1), all normalised.  D1_1 is coupling independent;
    D1 has support exactly on {|m11>, |010>, |11m>} and interpolates the
    passage |m11> -> |11m>.
    """
    if d12 == 0.0 and d23 == 0.0:
        raise ValueError("degenerate manifold undefined")
    v1 = np.zeros(DIM, dtype=complex)
    v1[[_I11M, _I1M1, _IM11]] = np.array([1.0, -1.0, 1.0]) / math.sqrt(3.0)

    n2 = math.sqrt(d12**4 - d12**2 * d23**2 + 2.0 * d23**4)
    v2 = np.zeros(DIM, dtype=complex)
    v2[_I11M] = (d23**2 - d12**2) / n2
    v2[_I1M1] = -(d23**2) / n2
    v2[_I010] = d12 * d23 / n2

    n3 = math.sqrt(d12**4 + d12**2 * d23**2 + d23**4)
    v3 = np.zeros(DIM, dtype=complex)
    v3[_IM11] = d23**2 / n3
    v3[_I010] = -d12 * d23 / n3
    v3[_I11M] = d12**2 / n3
    return v1, v2, v3


_I01M = basis_index("01m")
_I0M1 = basis_index("0m1")
_I1M0 = basis_index("1m0")
_IM10 = basis_index("m10")


def analytic_D0(d12: float, d23: float) -> np.ndarray:
    """The E=0 eigenstate carrying transport with an entangled chain rest."""
    if d12 == 0.0 and d23 == 0.0:
        raise ValueError("degenerate manifold undefined")
    norm = math.sqrt(2.0) * math.hypot(d12, d23)
    vec = np.zeros(DIM, dtype=complex)
    vec[_I01M] = d23 / norm
    vec[_I0M1] = -d23 / norm
    vec[_I1M0] = -d12 / norm
    vec[_IM10] = d12 / norm
    return vec


# ---------------------------------------------------------------------------
# adiabaticity
# ---------------------------------------------------------------------------

DEGENERATE_PAIR_ATOL = 1e-12


def adiabaticity_A2_closed(t: float, t_max: float, d: float) -> float:
    """Closed-form adiabaticity of the m=2 transport state against its neighbours."""
    phase = 2.0 * math.pi * t / t_max
    return (
        2.0 * math.sqrt(2.0) * math.pi * math.sin(math.pi * t / t_max)
        / (d * t_max * (3.0 + math.cos(phase)) ** 1.5)
    )


def midpoint_adiabaticities(t_max: float, d: float) -> tuple[float, float]:
    """Mid-protocol adiabaticities of the m=2 and E=B transport channels."""
    if t_max <= 0 or d <= 0:
        raise ValueError("t_max and d must be positive")
    a2 = math.pi / (t_max * d)
    a1 = (2.0 * math.pi / (t_max * d)) * math.sqrt((3.0 / 7.0) * (4.0 + math.sqrt(2.0)))
    return a2, a1


def _continue_state(schedule: PulseSchedule, ref: np.ndarray, t: float) -> np.ndarray:
    """Continue ``ref`` to the instantaneous eigenbasis at time t.

    The reference is projected onto the degenerate eigen-cluster it overlaps
    most, which both selects the matching eigenvector and aligns its phase
    (the projection overlap with ``ref`` is real positive by construction).
    """
    frame = eigensystem(hamiltonian_at(schedule, t), t)
    overlaps = frame.eigenvectors.conj().T @ ref
    pivot = int(np.argmax(np.abs(overlaps)))
    cluster = np.abs(frame.eigenvalues - frame.eigenvalues[pivot]) < DEGENERACY_GAP
    projected = frame.eigenvectors[:, cluster] @ overlaps[cluster]
    return projected / np.linalg.norm(projected)


def adiabaticity_numeric(
    schedule: PulseSchedule,
    t: float,
    pair: tuple[np.ndarray, np.ndarray],
    dt: float | None = None,
    rtol: float = 1e-4,
) -> float:
    """|<a| d/dt |b>| / |E_a - E_b| from finite differences of tracked eigenvectors.

    ``pair`` holds two instantaneous eigenstates at time t (analytic or from a
    SpectralFrame).  The derivative uses a second-order stencil (central where
    possible, one-sided at the schedule boundaries) and is accepted only if
    halving dt changes the result by less than ``rtol`` relatively.
    """
    state_a, state_b = (np.asarray(s, dtype=complex) for s in pair)
    if dt is None:
        dt = schedule.t_max / 1e6
    ham = hamiltonian_at(schedule, t)
    e_a = float(np.real(np.vdot(state_a, ham @ state_a)))
    e_b = float(np.real(np.vdot(state_b, ham @ state_b)))
    gap = abs(e_a - e_b)
    if gap < DEGENERATE_PAIR_ATOL:
        raise ValueError("degenerate pair; choose states outside the degenerate manifold")

    def derivative(step: float) -> np.ndarray:
        if t - step >= 0.0 and t + step <= schedule.t_max:
            plus = _continue_state(schedule, state_b, t + step)
            minus = _continue_state(schedule, state_b, t - step)
            return (plus - minus) / (2.0 * step)
        if t + 2.0 * step <= schedule.t_max:  # forward one-sided
            p1 = _continue_state(schedule, state_b, t + step)
            p2 = _continue_state(schedule, state_b, t + 2.0 * step)
            return (-3.0 * state_b + 4.0 * p1 - p2) / (2.0 * step)
        m1 = _continue_state(schedule, state_b, t - step)
        m2 = _continue_state(schedule, state_b, t - 2.0 * step)
        return (3.0 * state_b - 4.0 * m1 + m2) / (2.0 * step)

    coarse = abs(np.vdot(state_a, derivative(dt))) / gap
    fine = abs(np.vdot(state_a, derivative(dt / 2.0))) / gap
    # eigendecomposition roundoff enters the stencil amplified by 1/dt
    noise_budget = 1e-13 / (0.5 * dt * gap)
    if abs(coarse - fine) > rtol * abs(fine) + noise_budget:
        raise RuntimeError("finite-difference adiabaticity did not converge; reduce dt")
    return float(fine)
