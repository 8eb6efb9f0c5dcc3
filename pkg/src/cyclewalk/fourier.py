"""Momentum-space machinery: the per-pair decoherence superoperator.

For each momentum pair (k, k') the one-step action on coin operators is

    L_{k,k'}(B) = sum_n C_k A_n B A_n^dag C_{k'}^dag,

a linear (not trace-preserving, unless k = k') map represented here as a 4x4
complex matrix in the Pauli basis.  Two constructions are provided: the
definitional one, built column by column from the Kraus conjugation above,
and a closed form in terms of cos/sin of 2 pi (k' +- k)/N.  The definitional
construction is the source of truth; the closed form exists to cross-check it
and to make the spectral structure readable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    PAULIS,
    PauliVector,
    WalkConfig,
    build_kraus_family,
    hadamard_coin_momentum,
    pauli_decompose,
)

__all__ = [
    "SuperOp",
    "superop_definitional",
    "superop_closed_form",
    "trace_term",
    "all_pair_matrices",
    "phase_table",
]


@dataclass(frozen=True, eq=False)
class SuperOp:
    """4x4 Pauli-basis matrix of the pair superoperator, tagged with its
    momentum indices, cycle length, decoherence rate and the phase cosines
    c+- = cos(2 pi (k' +- k)/N), s+- = sin(2 pi (k' +- k)/N)."""

    matrix: np.ndarray
    k: int
    k_prime: int
    n_nodes: int
    rate: float
    c_plus: float
    s_plus: float
    c_minus: float
    s_minus: float

    def apply(self, operand: PauliVector) -> PauliVector:
        return PauliVector(coeffs=self.matrix @ operand.coeffs)

    @property
    def is_diagonal_pair(self) -> bool:
        return self.k == self.k_prime

    @property
    def is_antipodal_pair(self) -> bool:
        return self.n_nodes % 2 == 0 and abs(self.k_prime - self.k) == self.n_nodes // 2


def _pair_angles(k: int, k_prime: int, n_nodes: int):
    plus = 2.0 * np.pi * (k_prime + k) / n_nodes
    minus = 2.0 * np.pi * (k_prime - k) / n_nodes
    return np.cos(plus), np.sin(plus), np.cos(minus), np.sin(minus)


def _check_indices(k: int, k_prime: int, config: WalkConfig):
    n = config.n_nodes
    if not (0 <= k < n and 0 <= k_prime < n):
        raise ValueError(
            f"momentum indices must satisfy 0 <= k, k' < {n}, got ({k}, {k_prime})"
        )


def superop_definitional(k: int, k_prime: int, config: WalkConfig) -> SuperOp:
    """Build L_{k,k'} column by column from the Kraus conjugation.

    Column j holds the Pauli coefficients of
    sum_n C_k A_n sigma_j A_n^dag C_{k'}^dag.
    """
    _check_indices(k, k_prime, config)
    n, p = config.n_nodes, config.decoherence_rate
    kraus = build_kraus_family(p).operators
    ck = hadamard_coin_momentum(k, n).entries
    ckp_dag = hadamard_coin_momentum(k_prime, n).entries.conj().T
    matrix = np.empty((4, 4), dtype=np.complex128)
    for j, sigma in enumerate(PAULIS):
        image = np.zeros((2, 2), dtype=np.complex128)
        for a in kraus:
            image += ck @ a @ sigma @ a.conj().T @ ckp_dag
        matrix[:, j] = pauli_decompose(image).coeffs
    cp, sp, cm, sm = _pair_angles(k, k_prime, n)
    return SuperOp(matrix=matrix, k=int(k), k_prime=int(k_prime), n_nodes=n,
                   rate=p, c_plus=cp, s_plus=sp, c_minus=cm, s_minus=sm)


def superop_closed_form(k: int, k_prime: int, config: WalkConfig) -> SuperOp:
    """Closed-form matrix of L_{k,k'}; regression check for the definitional
    construction.  With q = 1 - p:

        [ c-    i q s-   0       0  ]
        [ 0     0        q s+    c+ ]
        [ 0     0       -q c+    s+ ]
        [ i s-  q c-     0       0  ]
    """
    _check_indices(k, k_prime, config)
    n, p = config.n_nodes, config.decoherence_rate
    q = 1.0 - p
    cp, sp, cm, sm = _pair_angles(k, k_prime, n)
    matrix = np.array([
        [cm, 1j * q * sm, 0.0, 0.0],
        [0.0, 0.0, q * sp, cp],
        [0.0, 0.0, -q * cp, sp],
        [1j * sm, q * cm, 0.0, 0.0],
    ], dtype=np.complex128)
    return SuperOp(matrix=matrix, k=int(k), k_prime=int(k_prime), n_nodes=n,
                   rate=p, c_plus=cp, s_plus=sp, c_minus=cm, s_minus=sm)


def trace_term(superop: SuperOp, initial: PauliVector, t: int) -> complex:
    """tr(L_{k,k'}^t |psi><psi|) by t matrix-vector products.

    The operand must represent a rank-1 projector, whose first Pauli
    coefficient is exactly 1/2 (half its unit trace).
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if abs(initial.coeffs[0] - 0.5) > 1e-10:
        raise ValueError(
            "initial operand must be a projector with first Pauli coefficient 1/2, "
            f"got {initial.coeffs[0]}"
        )
    v = initial.coeffs.copy()
    for _ in range(int(t)):
        v = superop.matrix @ v
    return complex(2.0 * v[0])


def all_pair_matrices(config: WalkConfig, method: str = "definitional"):
    """Stack of all N^2 pair matrices plus the (k - k') mod N index per pair.

    Returns (matrices, d_index): matrices has shape (N^2, 4, 4) with pair
    (k, k') stored at row k*N + k'; d_index[q] = (k - k') mod N drives the
    phase grouping in the distribution reconstruction.
    """
    build = {"definitional": superop_definitional,
             "closed-form": superop_closed_form}[method]
    n = config.n_nodes
    matrices = np.empty((n * n, 4, 4), dtype=np.complex128)
    d_index = np.empty(n * n, dtype=np.int64)
    for k in range(n):
        for k_prime in range(n):
            q = k * n + k_prime
            matrices[q] = build(k, k_prime, config).matrix
            d_index[q] = (k - k_prime) % n
    return matrices, d_index


def phase_table(n_nodes: int) -> np.ndarray:
    """phase[x, d] = e^{2 pi i x d / N}; row x reconstructs P(x, .) from the
    trace sums grouped by momentum difference d."""
    x = np.arange(n_nodes)
    return np.exp(2j * np.pi * np.outer(x, x) / n_nodes)
