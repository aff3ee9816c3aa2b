from __future__ import annotations

import math

import numpy as np
import pytest

from graphspectra import edges as em
from graphspectra.spectra import _transfer_matrices
from graphspectra.graphs import interval


LAP = em.Laplacian()
HALF = em.HalfLineLaplacian()


def hermitian_part_check(m):
    return np.linalg.eigvalsh((m - m.conj().T) / 2j)


@pytest.mark.parametrize("ell", [0.1, 1.0, 2.0])
@pytest.mark.parametrize("c", [1.0, 137.0])
def test_dirac_hat_gap_values(ell, c):
    model = em.Dirac(c)
    lam0 = c * c / 2
    value = em.weyl(model, ell, lam0, triplet="hat")
    assert np.max(np.abs(value - np.array([[0, 1], [1, ell]]))) < 1e-9
    deriv = em.weyl_derivative(model, ell, lam0, triplet="hat")
    expected = np.array([[ell, ell ** 2 / 2],
                         [ell ** 2 / 2, ell / c ** 2 + ell ** 3 / 3]])
    assert np.max(np.abs(deriv - expected)) < 1e-9


@pytest.mark.parametrize("ell", [0.1, 1.0, 2.0])
@pytest.mark.parametrize("c", [1.0, 137.0])
def test_dirac_graph_triplet_gap_values(ell, c):
    # Derived by eliminating psi2 from the first-order system with the
    # value/scaled-derivative trace maps; fixed by the finite-difference
    # and transfer-matrix cross-checks below and by the hat-triplet
    # transform identity.
    model = em.Dirac(c)
    lam0 = c * c / 2
    value = em.weyl(model, ell, lam0)
    expected = np.array([[-1, -1j], [1j, -1]]) / ell
    assert np.max(np.abs(value - expected)) < 1e-9
    deriv = em.weyl_derivative(model, ell, lam0)
    a = 1 / (ell * c * c) + ell / 3
    bo = 1 / (ell * c * c) - ell / 6
    expected_d = np.array([[a, 1j * bo], [-1j * bo, a]])
    assert np.max(np.abs(deriv - expected_d)) < 1e-9


def test_graph_triplet_is_hat_transform():
    model = em.Dirac(1.0)
    for lam in [0.5, 0.9, -0.1, 2.4, 0.3 + 0.4j]:
        hat = em.weyl(model, 1.0, lam, triplet="hat")
        direct = em.weyl(model, 1.0, lam)
        transformed = em.transform_triplet(hat, em.DIRAC_GRAPH_FROM_HAT)
        assert np.max(np.abs(direct - transformed)) < 1e-10


def test_laplacian_zero_limit():
    value = em.weyl(LAP, 1.0, 0.0)
    assert np.max(np.abs(value - np.array([[-1, 1], [1, -1]]))) < 1e-12
    deriv = em.weyl_derivative(LAP, 1.0, 0.0)
    assert np.max(np.abs(deriv - np.array([[1 / 3, 1 / 6], [1 / 6, 1 / 3]]))) < 1e-12


def test_laplacian_series_matches_direct_formula():
    # Continuity across the |w| = 1e-3 series cutoff.
    for lam in [9.9e-4, 1.01e-3, -9.9e-4, -1.01e-3]:
        m_series = em.weyl(LAP, 1.0, lam)
        k = np.sqrt(complex(lam))
        direct = np.array([
            [-k * np.cos(k) / np.sin(k), k / np.sin(k)],
            [k / np.sin(k), -k * np.cos(k) / np.sin(k)],
        ])
        assert np.max(np.abs(m_series - direct)) < 1e-11


def test_norm_prime_examples():
    assert abs(em.weyl_norm_prime(em.Dirac(1.0), 1.0) - 13 / 6) < 1e-12
    assert abs(em.weyl_norm_prime(LAP, 1.0) - 0.5) < 1e-12
    assert abs(em.weyl_norm_prime(LAP, 2.0) - 1.0) < 1e-12


def test_norm_prime_dirac_closed_form():
    # a + |b| for the 2x2 Hermitian with equal diagonal a and off-diagonal b.
    for ell in (0.1, 0.7, 2.0):
        for c in (0.5, 1.0, 10.0):
            a = 1 / (ell * c * c) + ell / 3
            b = abs(1 / (ell * c * c) - ell / 6)
            got = em.weyl_norm_prime(em.Dirac(c), ell)
            assert abs(got - (a + b)) < 1e-12 * max(1.0, a + b)


def test_norm_prime_dirac_lower_bound_sampled():
    rng = np.random.default_rng(42)
    for _ in range(100):
        ell = float(rng.uniform(0.01, 10.0))
        c = float(rng.uniform(0.5, 300.0))
        val = em.weyl_norm_prime(em.Dirac(c), ell)
        assert val >= 1.0 / (ell * c * c)


def test_transform_identity_and_blockdiag():
    m = em.weyl(em.Dirac(1.0), 1.0, 0.8, triplet="hat")
    assert np.max(np.abs(em.transform_triplet(m, np.eye(4)) - m)) < 1e-14
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    w = np.block([[q, np.zeros((2, 2))], [np.zeros((2, 2)), q]])
    assert np.max(np.abs(em.transform_triplet(m, w) - q @ m @ q.conj().T)) < 1e-12


def test_transform_rejects_nonunitary():
    m = em.weyl(LAP, 1.0, -1.0)
    with pytest.raises(em.EdgeModelError):
        em.transform_triplet(m, 2.0 * np.eye(4))


@pytest.mark.parametrize("model,lams", [
    (LAP, [-3.0, -1.0, 0.5, 2.0]),
    (em.Dirac(1.0), [-0.3, 0.2, 0.5, 1.5]),
])
def test_defect_element_boundary_consistency(model, lams):
    rng = np.random.default_rng(1)
    for lam in lams:
        g0 = rng.normal(size=2) + 1j * rng.normal(size=2)
        el = em.defect_element(model, 1.3, lam, g0)
        b0, b1 = el.boundary_data()
        assert np.max(np.abs(b0 - g0)) < 1e-10
        m = em.weyl(model, 1.3, lam)
        assert np.max(np.abs(b1 - m @ g0)) < 1e-9


def test_defect_element_halfline():
    el = em.defect_element(HALF, math.inf, -4.0, [2.0])
    b0, b1 = el.boundary_data()
    assert abs(b0[0] - 2.0) < 1e-14
    assert abs(b1[0] - (-2.0) * 2.0) < 1e-12
    x = np.linspace(0, 3, 7)
    vals = el.values(x)
    assert np.max(np.abs(vals - 2.0 * np.exp(-2.0 * x))) < 1e-12


def test_defect_element_solves_ode():
    # psi'' = -lam psi checked by second differences for the Laplacian.
    el = em.defect_element(LAP, 1.0, -2.5, [1.0, 0.5])
    h = 1e-4
    x = np.array([0.3 - h, 0.3, 0.3 + h])
    v = el.values(x)
    second = (v[0] - 2 * v[1] + v[2]) / h ** 2
    assert abs(second - 2.5 * v[1]) < 1e-5


def test_green_identity_symmetric_case():
    f = em.defect_element(LAP, 1.0, -1.0, [1.0, 0.25])
    assert abs(em.green_identity_residual(f, f)) < 1e-12


def test_green_identity_examples():
    f = em.defect_element(LAP, 1.0, -1.0, [1.0, 0.0])
    g = em.defect_element(LAP, 1.0, -2.0, [0.0, 1.0])
    assert abs(em.green_identity_residual(f, g)) < 1e-8
    d = em.Dirac(1.0)
    f = em.defect_element(d, 1.0, 0.6, [1.0, 0.0])
    g = em.defect_element(d, 1.0, 0.4, [0.0, 1.0])
    assert abs(em.green_identity_residual(f, g)) < 1e-8


def test_green_identity_random_pairs():
    rng = np.random.default_rng(7)
    models = [LAP, em.Dirac(1.0), em.Dirac(2.0)]
    for _ in range(60):
        model = models[rng.integers(0, len(models))]
        ell = float(rng.uniform(0.3, 2.0))
        if isinstance(model, em.Laplacian):
            lam, mu = rng.uniform(-8.0, 2.0, size=2)
        else:
            lam, mu = model.c ** 2 / 2 + rng.uniform(-0.4, 0.4, size=2)
        try:
            f = em.defect_element(model, ell, lam,
                                  rng.normal(size=2) + 1j * rng.normal(size=2))
            g = em.defect_element(model, ell, mu,
                                  rng.normal(size=2) + 1j * rng.normal(size=2))
        except em.PoleOfWeylError:
            continue
        assert abs(em.green_identity_residual(f, g)) < 1e-8


def test_decoupled_eigenvalues_laplacian():
    vals = em.decoupled_eigenvalues(LAP, 1.0, count=3)
    assert np.allclose(vals, [np.pi ** 2, 4 * np.pi ** 2, 9 * np.pi ** 2])
    vals = em.decoupled_eigenvalues(LAP, 1.0, window=(50.0, 95.0))
    assert np.allclose(vals, [9 * np.pi ** 2])


def test_decoupled_eigenvalues_dirac():
    c = 1.0
    vals = em.decoupled_eigenvalues(em.Dirac(c), 1.0, window=(-12.0, 12.0))
    expect = sorted([-c * c / 2]
                    + [s * math.sqrt((n * math.pi) ** 2 + 0.25)
                       for n in (1, 2, 3) for s in (1, -1)])
    expect = [v for v in expect if -12 <= v <= 12]
    assert np.allclose(vals, expect)
    hat = em.decoupled_eigenvalues(em.Dirac(c), 1.0, window=(-12.0, 12.0),
                                   triplet="hat")
    expect_hat = sorted(s * math.sqrt(((n + 0.5) * math.pi) ** 2 + 0.25)
                        for n in (0, 1, 2, 3) for s in (1, -1))
    expect_hat = [v for v in expect_hat if -12 <= v <= 12]
    assert np.allclose(hat, expect_hat)


def test_decoupled_window_excluding_all_poles_is_empty():
    assert em.decoupled_eigenvalues(LAP, 1.0, window=(-5.0, 5.0)).size == 0
    assert em.decoupled_eigenvalues(HALF, math.inf, window=(-5.0, -1.0)).size == 0


def test_pole_errors_carry_nearest_pole():
    with pytest.raises(em.PoleOfWeylError) as err:
        em.weyl(LAP, 1.0, np.pi ** 2 + 1e-12)
    assert abs(err.value.nearest_pole - np.pi ** 2) < 1e-9
    with pytest.raises(em.PoleOfWeylError):
        em.weyl(em.Dirac(1.0), 1.0, -0.5)
    with pytest.raises(em.EdgeModelError):
        em.weyl(HALF, math.inf, 3.0)


def test_herglotz_property_sampled():
    rng = np.random.default_rng(123)
    cases = [(LAP, "graph"), (em.Dirac(1.3), "graph"), (em.Dirac(1.3), "hat")]
    for _ in range(40):
        model, triplet = cases[rng.integers(0, len(cases))]
        ell = float(rng.uniform(0.2, 3.0))
        lam = complex(rng.uniform(-10, 10), rng.uniform(0.1, 5.0))
        m = em.weyl(model, ell, lam, triplet=triplet)
        assert np.min(hermitian_part_check(m)) > -1e-10
    for _ in range(10):
        lam = complex(rng.uniform(-10, 10), rng.uniform(0.1, 5.0))
        m = em.weyl(HALF, math.inf, lam)
        assert m[0, 0].imag > 0


def test_conjugate_symmetry_sampled():
    rng = np.random.default_rng(321)
    for model in [LAP, em.Dirac(0.7)]:
        for _ in range(20):
            ell = float(rng.uniform(0.2, 3.0))
            lam = complex(rng.uniform(-5, 5), rng.uniform(-3, 3))
            if abs(lam.imag) < 1e-3:
                continue
            m1 = em.weyl(model, ell, lam)
            m2 = em.weyl(model, ell, np.conj(lam))
            assert np.max(np.abs(m2 - m1.conj().T)) < 1e-10 * max(1, np.max(np.abs(m1)))


def test_derivative_positive_definite_on_real_gaps():
    for model, lams in [(LAP, [-6.0, -1.0, 0.0, 3.0]),
                        (em.Dirac(1.0), [-0.4, 0.0, 0.5, 1.1])]:
        for lam in lams:
            d = em.weyl_derivative(model, 1.0, lam)
            assert np.min(np.linalg.eigvalsh(d)) > 0


def test_derivative_matches_central_differences():
    rng = np.random.default_rng(5)
    for model, low, high in [(LAP, -8.0, 6.0), (em.Dirac(1.0), -2.0, 2.0)]:
        for _ in range(25):
            lam = float(rng.uniform(low, high))
            try:
                d = em.weyl_derivative(model, 1.0, lam)
            except em.PoleOfWeylError:
                continue
            h = 1e-5 * max(1.0, abs(lam))
            try:
                fd = (em.weyl(model, 1.0, lam + h) - em.weyl(model, 1.0, lam - h)) / (2 * h)
            except em.PoleOfWeylError:
                continue
            denom = max(np.max(np.abs(d)), 1e-12)
            if np.max(np.abs(fd)) > 1e5:
                continue  # too close to a pole for differencing
            assert np.max(np.abs(fd - d)) / denom < 1e-6


def test_deep_negative_laplacian_stable():
    for lam in [-1e4, -1e6, -1e8]:
        m = em.weyl(LAP, 1.0, lam)
        kappa = math.sqrt(-lam)
        assert abs(m[0, 0] + kappa) < 1e-9 * kappa
        assert abs(m[0, 1]) < 1e-6
        d = em.weyl_derivative(LAP, 1.0, lam)
        assert abs(d[0, 0] - 1 / (2 * kappa)) < 1e-9


def test_halfline_values():
    assert abs(em.weyl(HALF, math.inf, -9.0)[0, 0] + 3.0) < 1e-14
    assert abs(em.weyl_derivative(HALF, math.inf, -9.0)[0, 0] - 1 / 6) < 1e-14
    m = em.weyl(HALF, math.inf, 1.0 + 1.0j)[0, 0]
    assert m.imag > 0


def test_weyl_matches_rk4_transfer_matrix():
    # The interval response matrices against the raw ODE transfer matrix:
    # columns of T give the normalized fundamental system.
    g = interval(1.0)
    for lam in [-3.0, -1.0, 0.7, 5.0]:
        t = _transfer_matrices(g, np.array([lam]), 4096)["e"][0]
        m = em.weyl(LAP, 1.0, lam)
        # Laplacian traces: psi(0), psi(l); psi'(0), -psi'(l).
        gamma0 = np.array([[1.0, 0.0], [t[0, 0], t[0, 1]]])
        gamma1 = np.array([[0.0, 1.0], [-t[1, 0], -t[1, 1]]])
        assert np.max(np.abs(gamma1 - m @ gamma0)) < 1e-8

    gd = interval(1.0, model=em.Dirac(1.0))
    c = 1.0
    for lam in [0.2, 0.5, 0.9]:
        t = _transfer_matrices(gd, np.array([lam]), 4096)["e"][0]
        m = em.weyl(em.Dirac(c), 1.0, lam)
        # Real system (psi1, i psi2); graph traces: (psi1(0), i psi1(l)),
        # (c (i psi2)(0), -i c (i psi2)(l)).
        gamma0 = np.array([[1.0, 0.0], [1j * t[0, 0], 1j * t[0, 1]]])
        gamma1 = np.array([[0.0, c], [-1j * c * t[1, 0], -1j * c * t[1, 1]]])
        assert np.max(np.abs(gamma1 - m @ gamma0)) < 1e-8
