import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import gaussian, smooth_random
from gzk.errors import AdmissibilityError, BoundaryTailError
from gzk.grid import Field, make_grid
from gzk.norms import (
    MixedNormSpec,
    Trajectory,
    bessel_norm,
    hs_norm,
    mixed_norm,
    mu1,
    mu1_terms,
    mu2,
    weight_sum_l2,
    weighted_l2,
    z_norm,
)
from gzk.params import WeightParams, regularity_threshold

INF = math.inf


def stationary(field, times):
    return Trajectory.from_fields(times, [field] * len(times))


def test_hs_examples():
    g = make_grid(16, 16, 2 * np.pi, 2 * np.pi)
    u = Field.from_function(g, lambda X, Y: np.exp(2j * X))
    c = u.norm()
    assert c == pytest.approx(2 * np.pi)
    assert hs_norm(u, 1.0) == pytest.approx(3 * c, rel=1e-13)
    assert hs_norm(u, 0.0) == pytest.approx(3 * c, rel=1e-13)


def test_hs_matches_naive_dft():
    g = make_grid(16, 16, 12, 12)
    u = gaussian(g)
    X, Y = g.mesh()
    tot = [0.0, 0.0, 0.0]
    for xi in g.xi:
        for eta in g.eta:
            c = np.sum(u.values * np.exp(-1j * (xi * X + eta * Y))) / u.values.size
            p = abs(c) ** 2 * g.area
            tot[0] += p
            tot[1] += abs(xi) ** 1.0 * p
            tot[2] += abs(eta) ** 1.0 * p
    ref = sum(math.sqrt(v) for v in tot)
    assert hs_norm(u, 0.5) == pytest.approx(ref, rel=1e-12)


def test_bessel_equivalence(rng):
    g = make_grid(32, 32, 10, 10)
    for s in (0.3, 1.0, 2.0):
        u = smooth_random(g, rng, width=2)
        b, h = bessel_norm(u, s), hs_norm(u, s)
        assert b <= h * (1 + 1e-12) and h <= 3 * b


def _gauss_moment(a):
    """``int |x|^a exp(-x^2) dx`` by quadrature."""
    f = lambda x: abs(x) ** a * mpmath.exp(-(x**2))
    return float(mpmath.quad(f, [-mpmath.inf, 0, mpmath.inf]))


def test_weighted_l2_closed_forms():
    g = make_grid(256, 256, 40, 40)
    u = gaussian(g)
    assert weighted_l2(Field.physical(g, np.zeros(g.shape)), 0.5, 0.5) == 0.0
    assert weighted_l2(u, 1.0, 1.0) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    # as r2 -> 0 the value tends to (int (x^2 + 1) exp(-(x^2+y^2)))^(1/2)
    limit = math.sqrt(1.5 * math.pi)
    vals = [weighted_l2(u, 1.0, r2) for r2 in (0.9, 0.5, 0.1, 0.01)]
    assert all(abs(b - limit) < abs(a - limit) for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("r2", [0.5, 0.25, 0.1])
def test_weighted_l2_grid_convergence(r2):
    # the cusp of |y|^(2 r2) at the origin limits grid quadrature to O(dy^(1+2 r2))
    exact = math.sqrt(_gauss_moment(2.0) * _gauss_moment(0.0) + _gauss_moment(2 * r2) * _gauss_moment(0.0))
    errs = []
    for n in (256, 512, 1024):
        u = gaussian(make_grid(n, n, 40, 40))
        errs.append(abs(weighted_l2(u, 1.0, r2) - exact) / exact)
    rates = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert errs[-1] < 1e-2
    assert min(rates) > 1 + 2 * r2 - 0.3


def test_weighted_l2_tail_guard():
    g = make_grid(64, 64, 20, 20)
    with pytest.raises(BoundaryTailError):
        weighted_l2(gaussian(g, sigma=5), 0.5, 0.5)


def _bump(grid, centre, width=0.15):
    return Field.from_function(
        grid, lambda X, Y: np.exp(-((X - centre) ** 2 + (Y - centre) ** 2) / (2 * width**2))
    )


def test_weighted_l2_monotonicity_in_r():
    g = make_grid(256, 256, 20, 20)
    far, near = _bump(g, 3.0), _bump(g, 0.5)
    rs = (0.1, 0.3, 0.6, 0.9)
    a = [weighted_l2(far, r, r) for r in rs]
    b = [weighted_l2(near, r, r) for r in rs]
    assert all(y > x for x, y in zip(a, a[1:]))
    assert all(y < x for x, y in zip(b, b[1:]))


def test_z_norm():
    g = make_grid(128, 128, 40, 40)
    w = WeightParams(1.0, 0.5, 0.5)
    u = gaussian(g)
    assert z_norm(u, w) == pytest.approx(hs_norm(u, 1.0) + weighted_l2(u, 0.5, 0.5))
    assert z_norm(Field.physical(g, np.zeros(g.shape)), w) == 0.0


def test_weight_params_validation():
    WeightParams(1.0, 0.5, 0.4, beta=0.3)
    with pytest.raises(AdmissibilityError, match=r"s=0.6 violates s >= 2\*max\{r1,r2\}=1.0"):
        WeightParams(0.6, 0.5, 0.3)
    with pytest.raises(AdmissibilityError, match=r"r1=1.2 violates r in \(0,1\)"):
        WeightParams(2.5, 1.2, 0.5)
    with pytest.raises(AdmissibilityError):
        WeightParams(0.7, 0.3, 0.3)  # s <= 3/4
    with pytest.raises(AdmissibilityError):
        WeightParams(1.0, 0.5, 0.3, beta=0.3)
    assert regularity_threshold(7) == 0.75 and regularity_threshold(10) == pytest.approx(0.8)
    WeightParams(0.85, 0.4, 0.4, k=10)
    with pytest.raises(AdmissibilityError):
        WeightParams(0.79, 0.3, 0.3, k=10)


def test_trajectory_validation():
    g = make_grid(8, 8, 1, 1)
    z = np.zeros((3,) + g.shape)
    with pytest.raises(ValueError):
        Trajectory(g, [0, 1, 3], z)
    with pytest.raises(ValueError):
        Trajectory(g, [0, 0, 0], z)
    with pytest.raises(ValueError):
        Trajectory(g, [], z[:0])


def test_mixed_norm_constant_and_single_time():
    g = make_grid(8, 16, 3.0, 5.0)
    c = 1.7
    M, dt = 4, 0.25
    traj = Trajectory(g, dt * np.arange(M + 1), c * np.ones((M + 1,) + g.shape))
    T = M * dt
    for order in ("Txy", "xyT", "yTx"):
        assert mixed_norm(traj, MixedNormSpec(order, (2, 2, 2))) == pytest.approx(c * math.sqrt(g.area * T), rel=1e-13)
    u = gaussian(g)
    one = Trajectory.from_fields([0.0], [u])
    assert mixed_norm(one, MixedNormSpec("Txy", (INF, 2, 2))) == pytest.approx(u.norm(), rel=1e-13)
    with pytest.raises(ValueError):
        mixed_norm(one, MixedNormSpec("Txy", (2, 2, 2)))
    with pytest.raises(ValueError):
        MixedNormSpec("Txy", (0.5, 2, 2))


def _random_traj(seed, nx=8, ny=8, m=4):
    rng = np.random.default_rng(seed)
    g = make_grid(nx, ny, 2.0, 3.0)
    return Trajectory(g, 0.1 * np.arange(m), rng.standard_normal((m, nx, ny)))


@given(st.integers(0, 10_000), st.permutations("Txy"))
def test_fubini_all_two(seed, order):
    traj = _random_traj(seed)
    ref = mixed_norm(traj, MixedNormSpec("Txy", (2, 2, 2)))
    assert mixed_norm(traj, MixedNormSpec("".join(order), (2, 2, 2))) == pytest.approx(ref, rel=1e-12)


def test_nesting_order_matters():
    traj = _random_traj(5)
    a = mixed_norm(traj, MixedNormSpec("xyT", (INF, 2, 2)))
    b = mixed_norm(traj, MixedNormSpec("yTx", (2, 2, INF)))
    assert abs(a - b) > 1e-6 * a


@given(st.integers(0, 10_000), st.sampled_from([("xyT", (INF, 2, 2)), ("Txy", (3, INF, INF)), ("xyT", (4, INF, INF)), ("Txy", (2.4, 1.5, 2))]))
def test_triangle_inequality(seed, spec):
    a, b = _random_traj(seed), _random_traj(seed + 1)
    s = MixedNormSpec(*spec)
    ab = Trajectory(a.grid, a.times, a.data + b.data)
    assert mixed_norm(ab, s) <= (mixed_norm(a, s) + mixed_norm(b, s)) * (1 + 1e-12)


def test_other_norms_triangle(rng):
    g = make_grid(32, 32, 16, 16)
    for _ in range(5):
        u, v = smooth_random(g, rng, width=1.5), smooth_random(g, rng, width=1.5)
        for f in (lambda w: hs_norm(w, 0.8), lambda w: weighted_l2(w, 0.3, 0.7), lambda w: weight_sum_l2(w, 0.3, 0.7)):
            assert f(u + v) <= (f(u) + f(v)) * (1 + 1e-12)


def test_mu1_single_mode_closed_form():
    g = make_grid(16, 16, 2 * np.pi, 2 * np.pi)
    u = Field.from_function(g, lambda X, Y: np.exp(1j * (X + Y)))
    M, dt = 8, 0.05
    T = M * dt
    traj = stationary(u, dt * np.arange(M + 1))
    w = WeightParams(1.0, 0.5, 0.5, k=1)
    expect = 6 * math.pi + 2 * math.sqrt(2 * math.pi * T) + math.sqrt(T) + math.sqrt(2 * math.pi)
    assert mu1(traj, w) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 7, 8, 12])
def test_mu_families(k):
    g = make_grid(32, 32, 16, 16)
    u = smooth_random(g, np.random.default_rng(k), width=1.5)
    traj = Trajectory.from_fields(0.1 * np.arange(5), [u, 0.9 * u, 0.8 * u, 0.7 * u, 0.6 * u])
    w = WeightParams(1.0, 0.4, 0.4, k=k)
    terms = mu1_terms(traj, w)
    assert len(terms) == {1: 5, 2: 6}.get(k, 6 if k <= 7 else 7)
    assert mu1(traj, w) >= terms["LinfT_Hs"]
    zero = traj.scaled(0.0)
    assert mu1(zero, w) == 0.0 and mu2(zero, w) == 0.0
    lam = -2.5
    assert mu1(traj.scaled(lam), w) == pytest.approx(abs(lam) * mu1(traj, w), rel=1e-12)
    assert mu2(traj.scaled(lam), w) == pytest.approx(abs(lam) * mu2(traj, w), rel=1e-12)


def test_mu1_k7_gamma_range():
    traj = _random_traj(1, 8, 8, 3)
    w = WeightParams(1.0, 0.4, 0.4, k=4)
    with pytest.raises(ValueError):
        mu1(traj, w, gamma=0.1)


def test_weight_sum_gaussian_closed_form():
    exact = math.sqrt(2 * _gauss_moment(1.0) * _gauss_moment(0.0) + 2 * _gauss_moment(0.5) ** 2)
    assert exact**2 == pytest.approx(2 * math.sqrt(math.pi) + 2 * math.gamma(0.75) ** 2, rel=1e-12)
    errs = []
    for n in (256, 512, 1024):
        u = gaussian(make_grid(n, n, 40, 40))
        errs.append(abs(weight_sum_l2(u, 0.5, 0.5) - exact) / exact)
    assert errs[-1] < 2e-3
    assert all(math.log2(a / b) > 1.2 for a, b in zip(errs, errs[1:]))


def test_mu2_adds_weight_sup():
    g = make_grid(128, 128, 40, 40)
    u = gaussian(g)
    traj = Trajectory.from_fields([0.0, 0.1, 0.2], [u, 1.2 * u, 0.7 * u])
    w = WeightParams(1.0, 0.5, 0.5)
    assert mu2(traj, w) == pytest.approx(mu1(traj, w) + 1.2 * weight_sum_l2(u, 0.5, 0.5), rel=1e-12)
