import math

import numpy as np
import pytest

from covering_webs import benenti
from covering_webs.geometry import DomainError, Euclid3, Flat, random_points

P = (1, 4, 8)


def test_L_examples():
    assert np.array_equal(benenti.ellipsoidal_L(P, (0, 0, 0)), np.diag([1.0, 4.0, 8.0]))
    assert np.array_equal(benenti.ellipsoidal_L(P, (1, 1, 0)), np.array([[2, 1, 0], [1, 5, 0], [0, 0, 8]], dtype=float))


def test_recursion_first_step():
    L = benenti.ellipsoidal_L(P, (0.3, -0.7, 1.1))
    K0, K1 = benenti.benenti_recursion(L, 2)
    assert np.array_equal(K0, np.eye(3))
    assert np.allclose(K1, np.trace(L) * np.eye(3) - L)


def test_origin_values():
    _, K1, K2 = benenti.stackel_basis(P, (0, 0, 0))
    assert np.allclose(K1, np.diag([12, 9, 5]), atol=1e-12)
    assert np.allclose(K2, np.diag([32, 8, 4]), atol=1e-12)


def test_basis_commutes_with_L(rng):
    # the recursion produces polynomials in L
    for x in rng.uniform(-2, 2, size=(10, 3)):
        L = benenti.ellipsoidal_L(P, x)
        for K in benenti.stackel_basis(P, x):
            assert np.allclose(K @ L, L @ K, atol=1e-10)


def test_cayley_hamilton_closes_the_recursion(rng):
    # a fourth step vanishes identically in dimension three
    L = benenti.ellipsoidal_L(P, rng.uniform(-2, 2, 3))
    assert np.allclose(benenti.benenti_recursion(L, 4)[3], 0, atol=1e-9)


def test_transform_examples():
    assert np.allclose(benenti.covering_transform3((1, math.pi / 2, 0), 1), (1, 0, 0))
    assert np.allclose(benenti.covering_transform3((1, math.pi / 2, math.pi), 2), (0, 2, 0), atol=1e-12)


def test_transform_radius(rng):
    for p in random_points(Euclid3(1.5), 20, rng):
        x = benenti.covering_transform3(p, 1.5)
        assert x @ x == pytest.approx((1.5 * p[0]) ** 2)


def test_theta_r_example():
    assert benenti.theta_r_component(P, 2, (1, math.pi / 4, 0)) == pytest.approx(-3.5)
    assert benenti.pullback_L(P, 2, (1, math.pi / 4, 0))[1, 0] == pytest.approx(-3.5)


def test_pullback_component_relation(rng):
    for p in random_points(Euclid3(2), 100, rng):
        Lp = benenti.pullback_L(P, 2, p)
        assert Lp[0, 1] == pytest.approx(p[0] ** 2 * Lp[1, 0], abs=1e-10)


def test_pullback_at_k1_is_spherical_L(rng):
    for p in random_points(Euclid3(1), 10, rng):
        r, th, ph = p
        x = benenti.covering_transform3(p, 1)
        e_r = x / r
        e_th = np.array([math.cos(th) * math.cos(ph), math.cos(th) * math.sin(ph), -math.sin(th)])
        e_ph = np.array([-math.sin(ph), math.cos(ph), 0.0])
        J = np.column_stack([e_r, r * e_th, r * math.sin(th) * e_ph])
        want = np.linalg.solve(J, benenti.ellipsoidal_L(P, x) @ J)
        assert np.allclose(benenti.pullback_L(P, 1, p), want, atol=1e-10)


def test_eigenvalues_preserved(rng):
    for p in random_points(Euclid3(2), 10, rng):
        a = np.sort(np.linalg.eigvals(benenti.pullback_L(P, 2, p)).real)
        b = np.linalg.eigvalsh(benenti.ellipsoidal_L(P, benenti.covering_transform3(p, 2)))
        assert np.allclose(a, b)


def test_killing_residuals(rng):
    flat = random_points(Flat(3), 30, rng)
    cov = random_points(Euclid3(2), 20, rng)
    for idx in (1, 2):
        assert benenti.cartesian_residual(P, idx, flat) < 1e-5
        assert benenti.covering_residual(P, 2, idx, cov) < 1e-5


def test_pullback_consistency(rng):
    for p in random_points(Euclid3(3), 20, rng):
        for a, b in zip(benenti.covering_basis(P, 3, p), benenti.pulled_back_basis(P, 3, p)):
            assert np.allclose(a, b, atol=1e-8)


def test_axis_is_singular():
    with pytest.raises(DomainError):
        benenti.covering_jacobian((1.0, 0.0, 0.0), 2)


def test_surface_sample():
    grid = benenti.ShellGrid((0.1, 3, 20), (0.1, math.pi - 0.1, 20), (0, 2 * math.pi, 40))
    pts = benenti.eigen_surface_sample(P, 2, 5.0, 2, grid)
    assert pts.ndim == 2 and pts.shape[1] == 3 and len(pts) > 0
    nc = benenti.eigen_surface_sample(P, 2, 5.0, 2, grid, mode="nonconformal")
    assert len(nc) == len(pts)
    # rho_2 of the hit points is close to the level
    rho = np.linalg.eigvalsh(benenti._ellipsoidal_batch(P, *pts.T))[:, 1]
    assert np.median(np.abs(rho - 5.0)) < 0.5


def test_surface_sample_constant_field_is_empty():
    identity = lambda X, Y, Z: np.broadcast_to(np.eye(3), X.shape + (3, 3)).copy()  # noqa: E731
    grid = benenti.ShellGrid((0.1, 3, 10), (0.1, 3.0, 10), (0, 6.0, 10))
    assert len(benenti.eigen_surface_sample(P, 2, 2.0, 1, grid, field=identity)) == 0


def test_surface_sample_validation():
    with pytest.raises(ValueError):
        benenti.eigen_surface_sample((1, 1, 8), 2, 5.0, 2)
    with pytest.raises(ValueError):
        benenti.eigen_surface_sample(P, 2, 5.0, 4)
    with pytest.raises(DomainError):
        benenti.eigen_surface_sample(P, 2, 5.0, 1, benenti.ShellGrid(theta=(0.0, 1.0, 5)))


def test_cloud_csv(tmp_path):
    pts = np.array([[0.1, 0.2, 0.3]])
    benenti.write_cloud_csv(tmp_path / "c.csv", [(2, 5.0, pts)])
    assert (tmp_path / "c.csv").read_text().splitlines() == ["eigen_index,level,x,y,z", "2,5.0,0.1,0.2,0.3"]
