"""Spectra of the pair superoperators: characteristic quartic, eigenvalues
and the persistent-eigenvalue classification.

Every pair matrix is a Frobenius contraction, so all eigenvalues lie in the
closed unit disk.  For 0 < p < 1 the only unit-modulus eigenvalues are +1
(exactly on diagonal pairs k = k') and -1 (exactly on antipodal pairs
|k' - k| = N/2, even N).  All other pairs decay geometrically; the spectral
gap of the walk is taken over those non-persistent pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import NumericalCheckError, WalkConfig
from .fourier import SuperOp, superop_closed_form, superop_definitional

__all__ = [
    "Quartic",
    "SpectrumReport",
    "GapResult",
    "char_poly",
    "eigenvalues",
    "spectral_gap",
    "classify_pair",
    "multiset_match_distance",
]

#: |lambda| within this of 1 counts as unit modulus.
UNIT_MODULUS_TOL = 1e-9

CLASS_DIAGONAL = "diagonal-pair"
CLASS_ANTIPODAL = "antipodal-pair"
CLASS_GENERIC = "generic"


@dataclass(frozen=True, eq=False)
class Quartic:
    """Monic quartic a4 l^4 + a3 l^3 + a2 l^2 + a1 l + a0, coefficients
    stored highest degree first (a4 = 1)."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.float64)
        if c.shape != (5,) or c[0] != 1.0:
            raise ValueError("need 5 real coefficients with leading coefficient 1")
        object.__setattr__(self, "coefficients", c)
        self.coefficients.setflags(write=False)

    def __call__(self, lam):
        return np.polyval(self.coefficients, lam)

    def derivative(self, lam):
        return np.polyval(np.polyder(self.coefficients), lam)

    def roots(self) -> np.ndarray:
        return np.roots(self.coefficients)


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    spectral_radius: float
    has_unit_eigenvalue: bool
    has_minus_one: bool
    classification: str


class GapResult(NamedTuple):
    """Spectral gap value; degenerate means unit-modulus eigenvalues persist
    on non-persistent pairs (p = 0), so there is no decay at all."""

    value: float
    degenerate: bool


def classify_pair(k: int, k_prime: int, n_nodes: int) -> str:
    if k == k_prime:
        return CLASS_DIAGONAL
    if n_nodes % 2 == 0 and abs(k_prime - k) == n_nodes // 2:
        return CLASS_ANTIPODAL
    return CLASS_GENERIC


def char_poly(superop: SuperOp) -> Quartic:
    """Characteristic polynomial det(lambda I - L) in closed form.

    With q = 1 - p, c+ = cos 2 pi (k'+k)/N and c- = cos 2 pi (k'-k)/N:

        lambda^4 + (q c+ - c-) lambda^3 - 2 q c+ c- lambda^2
                 + q (c+ - q c-) lambda + q^2

    The constant term q^2 is the product of the eigenvalue moduli; it pins
    how much total contraction one step applies.
    """
    q = 1.0 - superop.rate
    cp, cm = superop.c_plus, superop.c_minus
    return Quartic(coefficients=np.array([
        1.0,
        q * cp - cm,
        -2.0 * q * cp * cm,
        q * (cp - q * cm),
        q * q,
    ]))


def eigenvalues(superop: SuperOp) -> SpectrumReport:
    """Eigenvalues of the 4x4 pair matrix with the persistent-eigenvalue
    flags and the structural pair classification."""
    try:
        eig = np.linalg.eigvals(superop.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalCheckError(
            f"eigensolver failed on pair (k={superop.k}, k'={superop.k_prime}): "
            f"{exc}; matrix={superop.matrix!r}"
        ) from exc
    radius = float(np.abs(eig).max())
    return SpectrumReport(
        eigenvalues=eig,
        spectral_radius=radius,
        has_unit_eigenvalue=bool(np.abs(eig - 1.0).min() < UNIT_MODULUS_TOL),
        has_minus_one=bool(np.abs(eig + 1.0).min() < UNIT_MODULUS_TOL),
        classification=classify_pair(superop.k, superop.k_prime, superop.n_nodes),
    )


def spectral_gap(config: WalkConfig, method: str = "definitional") -> GapResult:
    """1 minus the largest eigenvalue modulus over non-persistent pairs.

    Diagonal pairs (and antipodal pairs for even N) carry eigenvalues of
    modulus 1 forever and are excluded; the gap over the remaining pairs
    controls the geometric convergence rate of the position distribution.
    Positive for 0 < p <= 1; zero with the degenerate flag at p = 0.
    """
    build = {"definitional": superop_definitional,
             "closed-form": superop_closed_form}[method]
    n = config.n_nodes
    radius = 0.0
    for k in range(n):
        for k_prime in range(n):
            if classify_pair(k, k_prime, n) != CLASS_GENERIC:
                continue
            report = eigenvalues(build(k, k_prime, config))
            radius = max(radius, report.spectral_radius)
    gap = 1.0 - radius
    degenerate = config.decoherence_rate == 0.0
    if degenerate:
        gap = 0.0
    return GapResult(value=gap, degenerate=degenerate)


def multiset_match_distance(a, b) -> float:
    """Largest pairwise distance under a greedy minimal-distance matching of
    two equal-size complex multisets.  Used to compare eigenvalue sets with
    quartic root sets without relying on ordering."""
    a = list(np.asarray(a, dtype=np.complex128))
    b = list(np.asarray(b, dtype=np.complex128))
    if len(a) != len(b):
        raise ValueError("multisets must have equal size")
    worst = 0.0
    while a:
        dist = np.array([[abs(x - y) for y in b] for x in a])
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        worst = max(worst, float(dist[i, j]))
        a.pop(int(i))
        b.pop(int(j))
    return worst
