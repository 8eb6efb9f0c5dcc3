"""Domain types and coin-space algebra for decohered walks on the N-cycle.

The coin space is spanned by the step directions j = +1 and j = -1, in that
order: the first basis vector ``|1>`` moves the walker one node forward, the
second ``|-1>`` one node backward.  All 2x2 coin operators are expanded in the
Pauli basis (sigma_0, sigma_x, sigma_y, sigma_z), which is orthogonal under
the trace inner product and turns superoperators on the coin into 4x4
matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SIGMA_0",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "PAULIS",
    "NumericalCheckError",
    "WalkConfig",
    "PauliVector",
    "KrausFamily",
    "CoinMatrix",
    "coin_state",
    "build_kraus_family",
    "hadamard_coin_momentum",
    "pauli_decompose",
    "pauli_compose",
]

SIGMA_0 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)

#: Named initial coin states, in the (|1>, |-1>) basis.
COIN_STATES = {
    "up": np.array([1.0, 0.0], dtype=np.complex128),
    "down": np.array([0.0, 1.0], dtype=np.complex128),
    "balanced": np.array([1j, 1.0], dtype=np.complex128) / np.sqrt(2.0),
}


class NumericalCheckError(RuntimeError):
    """A runtime numerical assertion failed (e.g. an imaginary residue that
    should vanish did not).  Signals a construction bug, not bad user input."""


def coin_state(spec) -> np.ndarray:
    """Resolve a coin state from a name ('up', 'down', 'balanced') or a
    length-2 complex sequence.  Returns a fresh complex unit 2-vector."""
    if isinstance(spec, str):
        try:
            return COIN_STATES[spec].copy()
        except KeyError:
            raise ValueError(
                f"unknown coin state {spec!r}; expected one of {sorted(COIN_STATES)}"
            ) from None
    vec = np.asarray(spec, dtype=np.complex128)
    if vec.shape != (2,):
        raise ValueError(f"coin state must have shape (2,), got {vec.shape}")
    return vec.copy()


@dataclass(frozen=True, eq=False)
class WalkConfig:
    """Full parameterization of one walk: cycle length, decoherence rate and
    initial coin state.  The walker always starts at node 0; other launch
    nodes are a cyclic relabeling of the outputs.
    """

    n_nodes: int
    decoherence_rate: float
    initial_coin: np.ndarray = field(default_factory=lambda: COIN_STATES["up"].copy())
    launch_position: int = 0

    def __post_init__(self):
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 2:
            raise ValueError(f"n_nodes must be an integer >= 2, got {self.n_nodes}")
        if not 0.0 <= self.decoherence_rate <= 1.0:
            raise ValueError(
                f"decoherence_rate must lie in [0, 1], got {self.decoherence_rate}"
            )
        coin = np.asarray(self.initial_coin, dtype=np.complex128)
        if coin.shape != (2,):
            raise ValueError(f"initial_coin must have shape (2,), got {coin.shape}")
        if abs(np.linalg.norm(coin) - 1.0) > 1e-12:
            raise ValueError("initial_coin must be normalized to within 1e-12")
        if self.launch_position != 0:
            raise ValueError("launch_position is fixed at node 0")
        object.__setattr__(self, "n_nodes", int(self.n_nodes))
        object.__setattr__(self, "decoherence_rate", float(self.decoherence_rate))
        object.__setattr__(self, "initial_coin", coin)
        self.initial_coin.setflags(write=False)


@dataclass(frozen=True, eq=False)
class PauliVector:
    """Coefficients (v0, vx, vy, vz) of a 2x2 operator M = sum_i v_i sigma_i.

    The trace functional is linear in the first coordinate: tr(M) = 2 v0.
    Coefficients are kept complex; they are all real exactly when M is
    Hermitian.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (4,):
            raise ValueError(f"PauliVector needs 4 coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)
        self.coeffs.setflags(write=False)

    @property
    def trace(self) -> complex:
        return 2.0 * self.coeffs[0]

    def to_matrix(self) -> np.ndarray:
        return pauli_compose(self)


@dataclass(frozen=True, eq=False)
class KrausFamily:
    """The three coin-measurement operators at rate p:

        A0 = sqrt(1-p) sigma_0,
        A1 = (sqrt(p)/2)(sigma_0 + sigma_z),
        A2 = (sqrt(p)/2)(sigma_0 - sigma_z).

    They satisfy sum_n A_n^dag A_n = I, so the induced map on coin operators
    is a unital channel: with probability p per step the coin is measured in
    its computational basis, with probability 1-p it is left untouched.
    """

    operators: np.ndarray
    rate: float

    def unitality_defect(self) -> float:
        """Max entrywise deviation of sum_n A_n^dag A_n from the identity."""
        acc = np.zeros((2, 2), dtype=np.complex128)
        for op in self.operators:
            acc += op.conj().T @ op
        return float(np.abs(acc - SIGMA_0).max())


@dataclass(frozen=True, eq=False)
class CoinMatrix:
    """A 2x2 unitary coin, optionally dressed with the momentum phases picked
    up under the conditional shift."""

    entries: np.ndarray
    momentum: int | None = None
    n_nodes: int | None = None

    def unitarity_defect(self) -> float:
        return float(np.abs(self.entries.conj().T @ self.entries - SIGMA_0).max())


def build_kraus_family(p: float) -> KrausFamily:
    """Build the coin-measurement Kraus family at decoherence rate p.

    Raises ValueError if p is outside [0, 1].
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"decoherence rate must lie in [0, 1], got {p}")
    ops = np.stack([
        np.sqrt(1.0 - p) * SIGMA_0,
        (np.sqrt(p) / 2.0) * (SIGMA_0 + SIGMA_Z),
        (np.sqrt(p) / 2.0) * (SIGMA_0 - SIGMA_Z),
    ])
    return KrausFamily(operators=ops, rate=float(p))


def hadamard_coin_momentum(k: int, n_nodes: int) -> CoinMatrix:
    """Hadamard coin dressed with the momentum-k shift phases.

    For the cycle of length N the conditional shift acts on momentum state k
    as the diagonal phase diag(e^{-2 pi i k/N}, e^{2 pi i k/N}), so the
    one-step coin operator seen in momentum space is

        C_k = (1/sqrt 2) [[w, w], [1/w, -1/w]],  w = e^{-2 pi i k / N}.

    Parameters
    ----------
    k : int
        Momentum index, 0 <= k < n_nodes.
    n_nodes : int
        Cycle length N.
    """
    if not 0 <= k < n_nodes:
        raise ValueError(f"momentum index must satisfy 0 <= k < {n_nodes}, got {k}")
    w = np.exp(-2j * np.pi * k / n_nodes)
    phases = np.array([[w, 0], [0, np.conj(w)]], dtype=np.complex128)
    return CoinMatrix(entries=phases @ _HADAMARD, momentum=int(k), n_nodes=int(n_nodes))


def pauli_decompose(m: np.ndarray) -> PauliVector:
    """Expand a 2x2 complex matrix in the Pauli basis: v_i = tr(sigma_i m)/2."""
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    coeffs = np.array([0.5 * np.trace(s.conj().T @ m) for s in PAULIS])
    return PauliVector(coeffs=coeffs)


def pauli_compose(v: PauliVector | np.ndarray) -> np.ndarray:
    """Inverse of :func:`pauli_decompose`: rebuild the 2x2 matrix."""
    c = v.coeffs if isinstance(v, PauliVector) else np.asarray(v, dtype=np.complex128)
    return c[0] * SIGMA_0 + c[1] * SIGMA_X + c[2] * SIGMA_Y + c[3] * SIGMA_Z
