"""Spin-one site operators and the 27-dimensional three-site product basis.

Site states are labelled by their z projection: ``1`` (m=+1), ``0`` (m=0)
and ``m`` (m=-1, the text token for the overbarred label).  Basis ordering
is lexicographic with site 1 most significant and codes 1 -> 0, 0 -> 1,
m -> 2, so ``index = 9*code(site1) + 3*code(site2) + code(site3)``.
"""

from __future__ import annotations

import enum
from typing import Iterable, NamedTuple

import numpy as np

DIM_SITE = 3
DIM = 27

SQRT2 = np.sqrt(2.0)

#: tolerance for treating a state vector as normalised
NORM_ATOL = 1e-9


class SpinLabel(enum.IntEnum):
    """Single-site spin-one label; the enum value is the basis code."""

    PLUS = 0   # |1>,  m = +1
    ZERO = 1   # |0>,  m =  0
    MINUS = 2  # |1bar>, m = -1

    @property
    def m(self) -> int:
        return 1 - int(self)

    @property
    def token(self) -> str:
        return "10m"[int(self)]

    @classmethod
    def from_token(cls, token: str) -> "SpinLabel":
        try:
            return cls("10m".index(token))
        except ValueError:
            raise ValueError(f"invalid label token {token!r}") from None


class BasisTriple(NamedTuple):
    """Product basis state of the three-site chain."""

    site1: SpinLabel
    site2: SpinLabel
    site3: SpinLabel

    @property
    def m_total(self) -> int:
        return self.site1.m + self.site2.m + self.site3.m

    @property
    def token(self) -> str:
        return self.site1.token + self.site2.token + self.site3.token


def as_triple(value: BasisTriple | str | Iterable) -> BasisTriple:
    """Coerce a token string like ``"m11"`` or a 3-sequence of labels."""
    if isinstance(value, BasisTriple):
        return value
    if isinstance(value, str):
        if len(value) != 3:
            raise ValueError(f"invalid label token {value!r}")
        return BasisTriple(*(SpinLabel.from_token(ch) for ch in value))
    labels = tuple(value)
    if len(labels) != 3:
        raise ValueError("a basis triple needs exactly three site labels")
    return BasisTriple(*(SpinLabel(lab) for lab in labels))


def basis_index(triple: BasisTriple | str | Iterable) -> int:
    t = as_triple(triple)
    return 9 * int(t.site1) + 3 * int(t.site2) + int(t.site3)


def index_to_triple(index: int) -> BasisTriple:
    if not 0 <= index < DIM:
        raise ValueError(f"basis index {index} out of range 0..26")
    return BasisTriple(SpinLabel(index // 9), SpinLabel((index // 3) % 3), SpinLabel(index % 3))


def all_triples() -> list[BasisTriple]:
    return [index_to_triple(i) for i in range(DIM)]


#: total magnetization of each basis state, indexed by basis_index
M_TOTALS = np.array([index_to_triple(i).m_total for i in range(DIM)], dtype=int)

#: basis indices of each magnetization sector, keyed by m_total
SECTOR_INDICES = {m: np.flatnonzero(M_TOTALS == m) for m in range(-3, 4)}

#: sector dimensions by m_total = 3..-3
SECTOR_DIMS = tuple(len(SECTOR_INDICES[m]) for m in range(3, -4, -1))


def spin1_operators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (Jz, Jplus, Jminus) for a single spin-one site.

    In the basis (|1>, |0>, |1bar>): Jz = diag(+1, 0, -1) and
    Jplus maps |0> -> sqrt(2)|1>, |1bar> -> sqrt(2)|0>.
    """
    jz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    jplus = SQRT2 * np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
    return jz, jplus, jplus.conj().T


def embed_site_operator(op: np.ndarray, site: int) -> np.ndarray:
    """Tensor-embed a 3x3 single-site operator at ``site`` (1, 2 or 3).

    Site 1 is the most significant tensor factor under the basis ordering.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (DIM_SITE, DIM_SITE):
        raise ValueError("single-site operator must be 3x3")
    if site not in (1, 2, 3):
        raise ValueError("site out of range")
    factors = [np.eye(DIM_SITE, dtype=complex)] * 3
    factors[site - 1] = op
    return np.kron(factors[0], np.kron(factors[1], factors[2]))


def total_magnetization_operator() -> np.ndarray:
    """Sum of embedded Jz over the three sites (diagonal, entries m_total)."""
    jz, _, _ = spin1_operators()
    return sum(embed_site_operator(jz, site) for site in (1, 2, 3))


def product_state(triple: BasisTriple | str | Iterable) -> np.ndarray:
    """Unit coordinate vector for a product basis state."""
    psi = np.zeros(DIM, dtype=complex)
    psi[basis_index(triple)] = 1.0
    return psi


def population(psi: np.ndarray, triple: BasisTriple | str | Iterable) -> float:
    """P_(site1,site2,site3) = |<triple|psi>|^2."""
    return float(np.abs(np.asarray(psi)[basis_index(triple)]) ** 2)


def check_normalized(psi: np.ndarray, atol: float = NORM_ATOL) -> None:
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"state vector is not normalised (norm = {norm!r})")
