import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from spheredpp import geometry as g


def random_points(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@pytest.mark.parametrize(
    "p, zeta",
    [((0, 0, -1), 0j), ((1, 0, 0), 1 + 0j), ((0, 1, 0), 1j)],
)
def test_stereographic_examples(p, zeta):
    assert g.stereographic_south(np.array(p, float)) == pytest.approx(zeta, abs=1e-15)


def test_north_pole_is_chart_failure():
    with pytest.raises(g.ChartError):
        g.stereographic_south(np.array([0.0, 0.0, 1.0]))


@pytest.mark.parametrize("zeta, p", [(0j, (0, 0, -1)), (1 + 0j, (1, 0, 0))])
def test_inverse_stereographic_examples(zeta, p):
    np.testing.assert_allclose(g.inverse_stereographic(zeta), p, atol=1e-15)


@settings(max_examples=300, deadline=None)
@given(
    st.floats(-1e6, 1e6, allow_nan=False),
    st.floats(-1e6, 1e6, allow_nan=False),
)
def test_chart_round_trip_on_plane(a, b):
    zeta = complex(a, b)
    if abs(zeta) > 1e6:
        return
    back = g.stereographic_south(g.inverse_stereographic(zeta))
    # 1e-10 absolute, plus a few ulps once |zeta| is large enough that
    # its own spacing exceeds that
    assert abs(back - zeta) <= 1e-10 + 1e-15 * abs(zeta)


def test_chart_round_trip_on_sphere():
    rng = np.random.default_rng(0)
    p = random_points(rng, 10_000)
    p = p[p[:, 2] < 1 - 1e-6]
    back = g.inverse_stereographic(g.stereographic_south(p))
    assert np.max(np.abs(back - p)) < 1e-10


def test_inverse_stereographic_huge_modulus_is_finite():
    zeta = np.array([1e200 + 1e200j, -3e160, 1e-300j])
    p = g.inverse_stereographic(zeta)
    assert np.all(np.isfinite(p))
    np.testing.assert_allclose(np.linalg.norm(p, axis=1), 1.0, atol=1e-12)
    assert p[0, 2] == pytest.approx(1.0)
    assert p[2, 2] == pytest.approx(-1.0)


@pytest.mark.parametrize(
    "xy, p", [((1, 0), (0, 0, 1)), ((0, -1), (1, 0, 0)), ((0, 0), (-1, 0, 0))]
)
def test_square_to_sphere_examples(xy, p):
    np.testing.assert_allclose(g.square_to_sphere(*xy), p, atol=1e-15)


def test_square_pushforward_matches_sphere_rule():
    # product Gauss-Legendre on the square vs the spherical product rule,
    # for random polynomials of degree <= 6
    rng = np.random.default_rng(1)
    u, wu = np.polynomial.legendre.leggauss(64)
    X, Y = np.meshgrid(u, u, indexing="ij")
    W = np.outer(wu, wu)
    sq_pts = g.square_to_sphere(X, Y)
    sph_pts, sph_w = g.sphere_product_rule(32, 64)
    exps = [(a, b, c) for a in range(7) for b in range(7) for c in range(7) if a + b + c <= 6]
    for _ in range(10):
        coef = rng.standard_normal(len(exps))

        def poly(p):
            return sum(c * p[..., 0] ** a * p[..., 1] ** b * p[..., 2] ** d for c, (a, b, d) in zip(coef, exps))

        lhs = 0.25 * np.sum(W * poly(sq_pts))
        rhs = np.dot(sph_w, poly(sph_pts))
        assert abs(lhs - rhs) < 1e-8


def test_random_rotation_is_in_so3():
    rng = np.random.default_rng(2)
    for _ in range(100):
        R = g.random_rotation(rng)
        np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)


def test_random_rotation_deterministic():
    a = g.random_rotation(np.random.default_rng(5))
    b = g.random_rotation(np.random.default_rng(5))
    assert np.array_equal(a, b)


def test_random_rotation_haar_mean_and_ks():
    rng = np.random.default_rng(3)
    n = 100_000
    north = np.array([0.0, 0.0, 1.0])
    imgs = np.array([g.random_rotation(rng) @ north for _ in range(n)])
    assert np.linalg.norm(imgs.mean(axis=0)) < 0.02
    other = np.array([0.6, 0.0, 0.8])
    imgs2 = np.array([g.random_rotation(rng) @ other for _ in range(20_000)])
    assert stats.kstest(imgs2[:, 2], stats.uniform(-1, 2).cdf).pvalue > 1e-3
    assert stats.kstest(imgs[:, 2], stats.uniform(-1, 2).cdf).pvalue > 1e-3


def test_apply_rotation():
    p = np.array([1.0, 0.0, 0.0])
    np.testing.assert_allclose(g.apply_rotation(np.eye(3), p), p)
    np.testing.assert_allclose(g.apply_rotation(g.rotation_about_z(np.pi), p), [-1, 0, 0], atol=1e-12)
    rng = np.random.default_rng(4)
    pts = random_points(rng, 1000)
    out = g.apply_rotation(g.random_rotation(rng), pts)
    np.testing.assert_allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("z0, frac", [(-1, 1.0), (1, 0.0), (0, 0.5)])
def test_uniform_cap_fraction(z0, frac):
    assert g.uniform_cap_fraction(z0) == frac
