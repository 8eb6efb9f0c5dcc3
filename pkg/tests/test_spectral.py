import numpy as np
import pytest

from cyclewalk import (
    WalkConfig,
    char_poly,
    eigenvalues,
    spectral_gap,
    superop_definitional,
)
from cyclewalk.spectral import (
    CLASS_ANTIPODAL,
    CLASS_DIAGONAL,
    CLASS_GENERIC,
    Quartic,
    classify_pair,
    multiset_match_distance,
)


def _cfg(n, p):
    return WalkConfig(n_nodes=n, decoherence_rate=p)


def _random_ops(count, seed, max_nodes=24):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(2, max_nodes + 1))
        k, kp = int(rng.integers(n)), int(rng.integers(n))
        p = float(rng.uniform(0, 1))
        yield superop_definitional(k, kp, _cfg(n, p))


def test_char_poly_matches_determinant_samples():
    for op in _random_ops(80, seed=20):
        poly = char_poly(op)
        for lam in (-2.0, -1.0, 0.0, 1.0, 2.0):
            det = np.linalg.det(lam * np.eye(4) - op.matrix)
            assert abs(det - poly(lam)) <= 1e-10


def test_char_poly_constant_term_is_squared_survival():
    for op in _random_ops(30, seed=21):
        assert abs(char_poly(op).coefficients[4] - (1.0 - op.rate) ** 2) <= 1e-12


def test_char_poly_full_dephasing_collapses():
    op = superop_definitional(1, 2, _cfg(5, 1.0))
    poly = char_poly(op)
    assert np.allclose(poly.coefficients, [1.0, -op.c_minus, 0.0, 0.0, 0.0], atol=1e-14)
    roots = poly.roots()
    assert multiset_match_distance(roots, [op.c_minus, 0, 0, 0]) <= 1e-10


def test_char_poly_diagonal_pairs_have_root_at_one():
    for n, k, p in ((5, 2, 0.3), (8, 0, 0.7), (11, 10, 0.05)):
        poly = char_poly(superop_definitional(k, k, _cfg(n, p)))
        assert abs(poly(1.0)) <= 1e-12


def test_char_poly_antipodal_pairs_have_simple_root_at_minus_one():
    for n, k, p in ((6, 1, 0.4), (8, 3, 0.25), (4, 0, 0.8)):
        op = superop_definitional(k, (k + n // 2) % n, _cfg(n, p))
        poly = char_poly(op)
        assert abs(poly(-1.0)) <= 1e-12
        assert abs(poly.derivative(-1.0) - ((1 - p) ** 2 - 1.0)) <= 1e-12


def test_boundary_value_factorizations():
    # f(1) = (1 - c-)(1 + 2 q c+ + q^2), f(-1) = (1 + c-)(1 - 2 q c+ + q^2)
    for op in _random_ops(60, seed=22):
        q = 1.0 - op.rate
        poly = char_poly(op)
        plus = (1.0 - op.c_minus) * (1.0 + 2.0 * q * op.c_plus + q * q)
        minus = (1.0 + op.c_minus) * (1.0 - 2.0 * q * op.c_plus + q * q)
        assert abs(poly(1.0) - plus) <= 1e-12
        assert abs(poly(-1.0) - minus) <= 1e-12


def test_eigenvalue_report_diagonal_pair():
    report = eigenvalues(superop_definitional(3, 3, _cfg(7, 0.5)))
    assert report.classification == CLASS_DIAGONAL
    assert report.has_unit_eigenvalue
    assert not report.has_minus_one
    assert np.abs(report.eigenvalues - 1.0).min() <= 1e-9


def test_eigenvalue_report_antipodal_pair():
    report = eigenvalues(superop_definitional(1, 4, _cfg(6, 0.5)))
    assert report.classification == CLASS_ANTIPODAL
    assert report.has_minus_one
    others = report.eigenvalues[np.abs(report.eigenvalues + 1.0) > 1e-9]
    assert np.all(np.abs(others) < 1.0)


def test_odd_cycle_off_diagonal_pairs_contract_strictly():
    cfg = _cfg(7, 0.3)
    for k in range(7):
        for kp in range(7):
            if k == kp:
                continue
            report = eigenvalues(superop_definitional(k, kp, cfg))
            assert report.classification == CLASS_GENERIC
            assert report.spectral_radius < 1.0


def test_roots_agree_with_eigenvalues_as_multisets():
    for op in _random_ops(60, seed=23):
        roots = char_poly(op).roots()
        eig = eigenvalues(op).eigenvalues
        assert multiset_match_distance(roots, eig) <= 1e-8


def test_classification_sweep_small_cycles():
    for n in range(3, 9):
        for p in (0.1, 0.5):
            cfg = _cfg(n, p)
            for k in range(n):
                for kp in range(n):
                    report = eigenvalues(superop_definitional(k, kp, cfg))
                    assert report.spectral_radius <= 1.0 + 1e-10
                    expected = classify_pair(k, kp, n)
                    assert report.classification == expected
                    assert report.has_unit_eigenvalue == (expected == CLASS_DIAGONAL)
                    assert report.has_minus_one == (expected == CLASS_ANTIPODAL)


def test_unit_modulus_eigenvalues_are_real_pm_one():
    for op in _random_ops(120, seed=24, max_nodes=32):
        report = eigenvalues(op)
        assert report.spectral_radius <= 1.0 + 1e-10
        if not 0.0 < op.rate < 1.0:
            continue
        eig = report.eigenvalues
        near_unit = eig[np.abs(np.abs(eig) - 1.0) < 1e-9]
        for lam in near_unit:
            assert min(abs(lam - 1.0), abs(lam + 1.0)) <= 1e-8


def test_spectral_gap_full_dephasing_three_cycle():
    # p=1 collapses each quartic to {c-, 0, 0, 0}; max |c-| over k != k' is 1/2
    gap = spectral_gap(_cfg(3, 1.0))
    assert not gap.degenerate
    assert abs(gap.value - 0.5) <= 1e-12


def test_spectral_gap_degenerate_at_zero_rate():
    gap = spectral_gap(_cfg(5, 0.0))
    assert gap.degenerate
    assert gap.value == 0.0


def test_spectral_gap_construction_independent():
    a = spectral_gap(_cfg(9, 0.2), method="definitional")
    b = spectral_gap(_cfg(9, 0.2), method="closed-form")
    assert a.value > 0.0
    assert abs(a.value - b.value) <= 1e-10


def test_quartic_requires_monic_coefficients():
    with pytest.raises(ValueError):
        Quartic(coefficients=np.array([2.0, 0, 0, 0, 1.0]))
    with pytest.raises(ValueError):
        Quartic(coefficients=np.array([1.0, 0, 0, 0]))


def test_multiset_match_distance_basics():
    assert multiset_match_distance([1, 2], [2, 1]) == 0.0
    assert multiset_match_distance([0.0], [3.0]) == 3.0
    with pytest.raises(ValueError):
        multiset_match_distance([1.0], [1.0, 2.0])
