import math
from fractions import Fraction as F

import numpy as np
import pytest

from covering_webs import flow, systems
from covering_webs.geometry import DomainError


def test_hamiltonian_examples():
    s = systems.state(1, 0, 0, 1)
    assert systems.hamiltonian(systems.ttw(0, 0, F(1, 2), 1), s) == pytest.approx(1.0)
    assert systems.hamiltonian(systems.kc(-1, 1), s) == pytest.approx(-0.5)
    pw = systems.pw_covering(0, 0, 0, F(1, 2))
    assert systems.hamiltonian(pw, systems.state(1.3, 0.4, 0.7, 0)) == pytest.approx(0.49)


def test_hamiltonian_domain():
    spec = systems.ttw(1, 1, 1, 1)
    with pytest.raises(DomainError):
        systems.hamiltonian(spec, systems.state(1, 0, 0, 1))  # on a singular ray
    with pytest.raises(DomainError):
        systems.hamiltonian_z(spec, (-1.0, 0.3, 0.0, 1.0))


def test_spec_validation():
    with pytest.raises(ValueError):
        systems.SystemSpec("KC", {"a": -1})
    with pytest.raises(ValueError):
        systems.SystemSpec("Foo", {})
    with pytest.raises(ValueError):
        systems.kc(-1, 0)


def test_covering_indices():
    assert systems.ttw(1, 1, 1, F(1, 3), "covering_form").k == 3
    assert systems.ttw(1, 1, 1, F(1, 3)).k == 1
    assert systems.pw_base(2, 0, 0, F(1, 2)).k == 4
    assert systems.kc(-1, F(5, 2)).k == F(5, 2)


@pytest.mark.parametrize("k", [F(1, 2), F(1), F(2), F(5, 2)])
def test_kc_integrals_commute_with_H(k, rng):
    H, L, K = systems.kc_integrals(-1, k)
    for s in systems.sample_states(systems.kc(-1, k), 50, rng):
        assert abs(systems.poisson_bracket(H, L, s)) < 1e-9
        assert abs(systems.poisson_bracket(H, K, s)) < 1e-9
        assert systems.poisson_bracket(H, H, s) == 0.0


def test_L_K_do_not_commute():
    s = systems.state(1, 0, 1, 1)
    for a, k in ((-2.0, 1), (-1.0, 2), (0.5, F(1, 2))):
        _, L, K = systems.kc_integrals(a, k)
        assert abs(systems.poisson_bracket(L, K, s)) > 1e-3
    # at a = -1, k = 1 this particular state is a zero of {L, K}; a generic one is not
    _, L, K = systems.kc_integrals(-1, 1)
    assert abs(systems.poisson_bracket(L, K, systems.state(1, 0.7, 0.3, 1.2))) > 1e-3


def test_laplace_integral_is_runge_lenz_at_k1(rng):
    # at k = 1 the integral is A_y / 2 with A = p x (x p) + a x/r in Cartesian form
    a = -1.3
    K = systems.kc_laplace(a, 1.0)
    for s in systems.sample_states(systems.kc(a, 1), 10, rng):
        r, phi, pr, pphi = s.as_array()
        x, y = r * math.cos(phi), r * math.sin(phi)
        px = math.cos(phi) * pr - math.sin(phi) * pphi / r
        py = math.sin(phi) * pr + math.cos(phi) * pphi / r
        lz = x * py - y * px
        A_y = -px * lz + a * y / r
        assert K(s.as_array()) == pytest.approx(0.5 * A_y, abs=1e-12)


def test_dual_and_central_gradients_agree(rng):
    H, L, K = systems.kc_integrals(-1, F(1, 2))
    for s in systems.sample_states(systems.kc(-1, F(1, 2)), 5, rng):
        d = systems.phase_gradient(K, s, "dual")
        c = systems.phase_gradient(K, s, "central")
        assert np.max(np.abs(d - c)) < 1e-7 * max(1.0, np.max(np.abs(d)))


def test_rank_examples():
    H, L, K = systems.kc_integrals(-1, 2)
    s = systems.state(1.2, 0.7, 0.3, 0.9)
    combo = systems.FirstIntegral("c", lambda z: 2 * L.func(z) + 3 * H.func(z), None, 2)
    assert systems.independence_rank([H, L, K], s) == 3
    assert systems.independence_rank([H, L, combo], s) == 2
    assert systems.independence_rank([H], s) == 1


def test_product_is_an_integral(rng):
    H, L, K = systems.kc_integrals(-1, 2)
    LK = systems.product(L, K)
    for s in systems.sample_states(systems.kc(-1, 2), 10, rng):
        assert abs(systems.poisson_bracket(H, LK, s)) < 1e-9


@pytest.mark.parametrize("form", systems.FORMS)
@pytest.mark.parametrize("h", [F(1, 2), F(2, 3), F(3)])
def test_ttw_integrals(form, h):
    rep = systems.verification_report(systems.ttw(1, F(1, 2), 1, h, form), 40, 1)
    assert all(r["max_bracket_residual"] < 1e-9 for r in rep["integrals"])


@pytest.mark.parametrize("form", systems.FORMS)
def test_oscillator_integrals(form):
    rep = systems.verification_report(systems.ttw(0, 0, F(1, 2), F(2, 3), form), 40, 1)
    names = [r["name"] for r in rep["integrals"]]
    assert names == ["H", "L", "Fxx", "Fxy"]
    assert all(r["max_bracket_residual"] < 1e-9 for r in rep["integrals"])


def test_pw_forms():
    for spec in (systems.pw_base(2, F(3, 10), F(1, 10), F(1, 2)), systems.pw_covering(F(1, 2), F(1, 3), 4, 3)):
        rep = systems.verification_report(spec, 40, 2)
        assert all(r["max_bracket_residual"] < 1e-9 for r in rep["integrals"])


def test_pw_kepler_limits_reduce_to_kc():
    s = systems.state(1.1, 0.3, 0.2, 0.8)
    base = systems.pw_base(3, 0, 0, F(2, 3))
    kc = systems.kc(-1.5, 3)
    assert systems.hamiltonian(base, s) == pytest.approx(systems.hamiltonian(kc, s))
    ints = systems.integrals(base)
    assert [I.name for I in ints] == ["H", "L", "K"]
    assert ints[2](s) == pytest.approx(systems.kc_laplace(-1.5, 3)(s.as_array()))


def test_globality_examples():
    rep = systems.globality_report(systems.ttw(1, 1, 1, F(3, 2)))
    assert rep["hamiltonian_global"] and rep["confined"]
    kc = systems.globality_report(systems.kc(-1, F(5, 2)))
    assert [r["global"] for r in kc["integrals"] if r["name"] == "K"] == [False]
    bad = systems.globality_report(systems.ttw(1, 0, 1, F(1, 5)))
    assert not bad["confined"] and not bad["hamiltonian_global"]
    assert bad["regime_verdict"].startswith("not well defined")


def test_globality_parameter_override():
    spec = systems.kc(-1, 1)
    assert systems.globality_report(spec, F(3))["integrals"][2]["global"]
    assert not systems.globality_report(spec, F(3, 2))["integrals"][2]["global"]


def test_globality_needs_rationals():
    with pytest.raises(ValueError):
        systems.globality_report(systems.kc(-1, 0.7))


def test_report_schema():
    rep = systems.verification_report(systems.kc(-1, 2), 10, 0)
    assert set(rep) == {"system", "parameters", "integrals", "regime_verdict"}
    assert set(rep["integrals"][0]) == {"name", "degree", "global", "max_bracket_residual", "rank_contribution"}
    assert sum(r["rank_contribution"] for r in rep["integrals"]) == 3


def test_sampled_states_avoid_singular_rays(rng):
    spec = systems.ttw(1, 1, 1, 2)
    for s in systems.sample_states(spec, 100, rng):
        systems.hamiltonian(spec, s)


def test_jacobi_turning_points_match_kepler_conic():
    a, k = -1.0, 1
    s = systems.state(1.0, 0.0, 0.0, 1.1)
    E, l = systems.kc_constants(a, k, s)
    orbit = systems.kc_jacobi_orbit(a, k, E, l)
    # classical conic: semi-latus rectum p = L_z^2 / |a|, eccentricity from the energy
    lz = 1.1
    p = lz**2
    e = math.sqrt(1 + 2 * E * lz**2)
    assert orbit.r_min == pytest.approx(p / (1 + e))
    assert orbit.r_max == pytest.approx(p / (1 - e))
    assert orbit.radial_period == pytest.approx(2 * math.pi * (0.5 * (orbit.r_min + orbit.r_max)) ** 1.5)
    assert orbit.phi_advance == pytest.approx(2 * math.pi)


def test_jacobi_orbit_matches_integrated_orbit():
    a, k = -1.0, 1
    s = systems.state(1.0, 0.0, 0.0, 1.1)
    E, l = systems.kc_constants(a, k, s)
    orbit = systems.kc_jacobi_orbit(a, k, E, l)
    H = systems.kc_integrals(a, k)[0]
    traj = flow.integrate(H, s, 1e-3, int(orbit.radial_period / 1e-3) + 1)
    r_flow = np.interp(orbit.t, traj.times, traj.z[:, 0])
    assert np.max(np.abs(r_flow - orbit.r)) < 1e-4


@pytest.mark.parametrize("k", [F(1, 2), F(2)])
def test_angular_advance_scales_with_k(k):
    E, l = systems.kc_constants(-1.0, k, systems.state(1.0, 0.0, 0.0, 1.1 * float(k)))
    orbit = systems.kc_jacobi_orbit(-1.0, k, E, l)
    assert orbit.phi_advance == pytest.approx(2 * math.pi / float(k))


def test_zero_angular_momentum():
    orbit = systems.kc_jacobi_orbit(-1.0, 2, -0.5, 0.0)
    assert np.all(orbit.W_phi(np.linspace(0, 6, 5)) == 0)
    assert np.all(orbit.phi == 0)


def test_unbound_orbit_needs_range():
    with pytest.raises(ValueError):
        systems.kc_jacobi_orbit(-1.0, 1, 0.5, 0.5)
    orbit = systems.kc_jacobi_orbit(-1.0, 1, 0.5, 0.5, r_range=(0.1, 5.0))
    assert math.isinf(orbit.r_max) and orbit.r[-1] == pytest.approx(5.0)


def test_no_motion():
    with pytest.raises(ValueError):
        systems.kc_jacobi_orbit(1.0, 1, -1.0, 0.5)
