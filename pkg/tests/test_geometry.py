import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from noisy_neighbors.geometry import (
    HyperharmonicSpec,
    TripleSignal,
    builtin_triple,
    hyperharmonic_norm_sq,
    hyperharmonic_z,
    limiting_probability,
    noise_std_of_gap,
    predicted_preservation_prob,
    triple_stats,
    zeta,
)
from noisy_neighbors.noise import DomainError, InvalidParameter, make_gaussian, make_uniform, make_zero_noise, std_normal_cdf

U075 = make_uniform(0.75)
U125 = make_uniform(1.25)


def zeta_oracle(x, y, z, var, m4):
    """Direct transcription in exact rationals where possible."""
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    d = x.size
    a = float(np.sum((x - y) ** 2))
    b = float(np.sum((x - z) ** 2))
    c = float(np.sum((x - y) * (x - z)))
    return (b - a) / math.sqrt(2 * d * (m4 + 3 * var**2) + 8 * var * (a + b - c))


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def triples(draw, max_d=12):
    d = draw(st.integers(1, max_d))
    vec = arrays(np.float64, d, elements=finite)
    return TripleSignal(draw(vec), draw(vec), draw(vec))


@st.composite
def noises(draw):
    a = draw(st.floats(0.05, 3.0))
    return draw(st.sampled_from([make_uniform(a), make_gaussian(a)]))


def random_rotation(d, rng):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


# --- triple_stats --------------------------------------------------------------


def test_all_zero_triple():
    s = triple_stats(TripleSignal(np.zeros(2), np.zeros(2), np.zeros(2)))
    assert (s.dist_xy_sq, s.dist_xz_sq, s.cross_inner, s.delta_inf, s.delta_two) == (0, 0, 0, 0, 0)


def test_set1_stats():
    s = triple_stats(builtin_triple("set1", 10**4))
    assert s.dist_xy_sq == 0 and s.dist_xz_sq == 1 and s.delta_inf == 1


def test_set2_stats():
    s = triple_stats(builtin_triple("set2", 10**4))
    assert s.dist_xy_sq == 0 and s.dist_xz_sq == 10**4 and s.delta_inf == 1


def test_triple_validation():
    with pytest.raises(InvalidParameter):
        TripleSignal(np.zeros(2), np.zeros(3), np.zeros(2))
    with pytest.raises(InvalidParameter):
        TripleSignal(np.array([np.nan]), np.zeros(1), np.zeros(1))
    with pytest.raises(InvalidParameter):
        TripleSignal(np.array([]), np.array([]), np.array([]))


@given(triples())
def test_stats_invariants(t):
    s = triple_stats(t)
    assert abs(s.cross_inner) <= math.sqrt(s.dist_xy_sq * s.dist_xz_sq) * (1 + 1e-12) + 1e-12
    assert s.delta_two**2 == pytest.approx(max(s.dist_xy_sq, s.dist_xz_sq), rel=1e-12, abs=1e-300)
    assert s.delta_inf <= s.delta_two * (1 + 1e-12)


def test_compensated_summation():
    # many tiny terms after a large one: naive left-to-right sum loses them
    d = 10**4
    z = np.full(d, 1e-8)
    z[0] = 1e4
    s = triple_stats(TripleSignal(np.zeros(d), np.zeros(d), z))
    assert s.dist_xz_sq == math.fsum([1e8] + [1e-16] * (d - 1))


# --- zeta ----------------------------------------------------------------------


def test_zeta_identical_points():
    t = TripleSignal(np.ones(5), np.ones(5), np.ones(5))
    assert zeta(triple_stats(t), U075) == 0.0
    assert predicted_preservation_prob(triple_stats(t), U075) == 0.5


def test_zeta_one_dimensional_hand_value():
    t = TripleSignal(np.zeros(1), np.zeros(1), np.ones(1))
    assert U075.fourth_moment + 3 * U075.variance**2 == pytest.approx(0.16875, rel=1e-14)
    assert zeta(triple_stats(t), U075) == pytest.approx(1 / math.sqrt(1.8375), rel=1e-13)
    assert zeta(triple_stats(t), U075) == pytest.approx(0.73772, abs=1e-5)


def test_set1_prediction():
    s = triple_stats(builtin_triple("set1", 10**4))
    assert zeta(s, U075) == pytest.approx(0.0172, abs=5e-5)
    assert predicted_preservation_prob(s, U075) == pytest.approx(0.5069, abs=5e-5)


def test_set2_prediction_saturates():
    s = triple_stats(builtin_triple("set2", 10**4))
    assert zeta(s, U075) == pytest.approx(73.8, abs=0.05)
    assert predicted_preservation_prob(s, U075) == 1.0


def test_degenerate_noise_domain_error():
    s = triple_stats(builtin_triple("set1", 3))
    with pytest.raises(DomainError):
        zeta(s, make_zero_noise())


@given(triples(), noises())
def test_zeta_matches_oracle(t, noise):
    got = zeta(triple_stats(t), noise)
    want = zeta_oracle(t.x, t.y, t.z, noise.variance, noise.fourth_moment)
    assert got == pytest.approx(want, rel=1e-9, abs=1e-12)


@given(triples(), noises())
@settings(max_examples=200)
def test_zeta_antisymmetry(t, noise):
    a = zeta(triple_stats(t), noise)
    b = zeta(triple_stats(t.swapped()), noise)
    assert abs(a + b) <= 1e-12 * max(1.0, abs(a))
    pa = predicted_preservation_prob(triple_stats(t), noise)
    pb = predicted_preservation_prob(triple_stats(t.swapped()), noise)
    assert abs(pa + pb - 1.0) <= 1e-12


@given(triples(max_d=8), noises(), st.integers(0, 2**32 - 1))
@settings(max_examples=200)
def test_rigid_motion_invariance(t, noise, seed):
    rng = np.random.default_rng(seed)
    Q = random_rotation(t.d, rng)
    shift = rng.uniform(-5, 5, t.d)
    moved = TripleSignal(Q @ t.x + shift, Q @ t.y + shift, Q @ t.z + shift)
    s0, s1 = triple_stats(t), triple_stats(moved)
    scale = max(1.0, s0.dist_xy_sq, s0.dist_xz_sq)
    for f in ("dist_xy_sq", "dist_xz_sq", "cross_inner"):
        assert abs(getattr(s0, f) - getattr(s1, f)) <= 1e-9 * scale
    assert abs(zeta(s0, noise) - zeta(s1, noise)) <= 1e-9 * max(1.0, abs(zeta(s0, noise)))


@given(triples(), noises(), st.randoms(use_true_random=False))
def test_coordinate_permutation_invariance(t, noise, rnd):
    perm = list(range(t.d))
    rnd.shuffle(perm)
    p = TripleSignal(t.x[perm], t.y[perm], t.z[perm])
    assert zeta(triple_stats(p), noise) == pytest.approx(zeta(triple_stats(t), noise), rel=1e-12, abs=1e-15)


@given(triples(), st.floats(0.05, 3.0), st.floats(0.1, 10.0))
def test_noise_scaling_keeps_side_of_half(t, a, c):
    s = triple_stats(t)
    p1 = predicted_preservation_prob(s, make_uniform(a))
    p2 = predicted_preservation_prob(s, make_uniform(a * c))
    assert np.sign(p1 - 0.5) == np.sign(p2 - 0.5)


def test_noise_std_of_gap_matches_monte_carlo():
    # the variance formula against a brute-force empirical variance of z(d)
    rng = np.random.default_rng(1)
    d, R = 50, 40000
    x, y, z = rng.uniform(-1, 1, (3, d))
    stats = triple_stats(TripleSignal(x, y, z))
    N = rng.uniform(-1.25, 1.25, (3, R, d))
    zd = np.sum((x + N[0] - y - N[1]) ** 2, axis=1) - np.sum((x + N[0] - z - N[2]) ** 2, axis=1)
    assert np.var(zd) == pytest.approx(noise_std_of_gap(stats, U125) ** 2, rel=0.03)
    assert np.mean(zd) == pytest.approx(-stats.gap, abs=4 * np.std(zd) / math.sqrt(R))


# --- hyperharmonic ---------------------------------------------------------------


def test_hyperharmonic_values():
    assert np.array_equal(hyperharmonic_z(math.inf, 3), np.ones(3))
    np.testing.assert_allclose(hyperharmonic_z(4, 4), [1, 0.84090, 0.75984, 0.70711], atol=5e-6)
    for a in (2, 3, 4.5, 6, math.inf):
        assert hyperharmonic_z(a, 5)[0] == 1.0


@given(st.one_of(st.floats(2.0, 100.0), st.just(math.inf)), st.integers(1, 300))
def test_hyperharmonic_positive_nonincreasing(a, d):
    z = hyperharmonic_z(a, d)
    assert np.all(z > 0) and np.all(np.diff(z) <= 0)


def test_hyperharmonic_norms():
    assert hyperharmonic_norm_sq(math.inf, 10**4) == 10**4
    assert hyperharmonic_norm_sq(math.inf, 10**4, "approx") == 10**4
    assert hyperharmonic_norm_sq(4, 4) == pytest.approx(1 + 1 / math.sqrt(2) + 1 / math.sqrt(3) + 0.5, rel=1e-15)
    assert hyperharmonic_norm_sq(4, 4) == pytest.approx(2.78446, abs=1e-5)
    exact = hyperharmonic_norm_sq(4, 10**4)
    approx = hyperharmonic_norm_sq(4, 10**4, "approx")
    brute = sum(k ** -0.5 for k in range(1, 10**4 + 1))
    assert exact == pytest.approx(brute, rel=1e-12)
    assert exact == pytest.approx(198.5, abs=0.1)
    assert approx == pytest.approx(198.0, rel=1e-14)
    assert abs(exact - approx) / exact < 0.005


@pytest.mark.parametrize("alpha", [3, 4, 5, 6])
def test_norm_monotone_and_approx_gap_shrinks(alpha):
    dims = [10, 100, 1000, 10**4]
    exact = [hyperharmonic_norm_sq(alpha, d) for d in dims]
    assert all(b > a for a, b in zip(exact, exact[1:]))
    gaps = [abs(e - hyperharmonic_norm_sq(alpha, d, "approx")) / e for e, d in zip(exact, dims)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.05


def test_alpha_validation():
    for bad in (1.9, 0, -3, float("nan")):
        with pytest.raises(InvalidParameter):
            HyperharmonicSpec(bad)
    assert HyperharmonicSpec.parse("inf").is_infinite
    assert HyperharmonicSpec(6).growth_exponent == pytest.approx(2 / 3)
    with pytest.raises(InvalidParameter):
        hyperharmonic_norm_sq(4, 10, mode="other")


def test_limiting_probabilities():
    for noise in (U075, U125, make_gaussian(2.0)):
        assert limiting_probability(3, noise) == 0.5
        assert limiting_probability(5, noise) == 1.0
    assert U125.fourth_moment + 3 * U125.variance**2 == pytest.approx(8 * 1.25**4 / 15, rel=1e-14)
    target = std_normal_cdf(math.sqrt(2 / 1.3020833333333333))
    assert limiting_probability(4, U125) == pytest.approx(target, rel=1e-14)
    # quoted as about 0.8925; the exact value is 0.89239
    assert limiting_probability(4, U125) == pytest.approx(0.8925, abs=2e-4)


def test_alpha4_prediction_approaches_limit():
    lim = limiting_probability(4, U125)
    errs = []
    for d in (10**2, 10**3, 10**4, 10**5):
        p = predicted_preservation_prob(triple_stats(builtin_triple("hyper:4", d)), U125)
        errs.append(abs(p - lim))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_builtin_triples():
    t = builtin_triple("set3", 5)
    np.testing.assert_allclose(t.z, np.arange(1, 6) ** 0.24)
    assert np.array_equal(builtin_triple("hyper:inf", 4).z, np.ones(4))
    with pytest.raises(InvalidParameter):
        builtin_triple("set9", 4)


def test_tiny_gaps_do_not_underflow():
    t = TripleSignal(np.zeros(1), np.zeros(1), np.array([2.5e-166]))
    s = triple_stats(t)
    assert s.delta_inf == s.delta_two == 2.5e-166
