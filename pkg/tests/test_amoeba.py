import time

import numpy as np
import pytest

from amoebapuiseux.amoeba import (AMOEBA, COMPLEMENT, AmoebaProximityError, ScheduleExhausted,
                                  components, fiber_roots_slice, is_in_amoeba, order_at,
                                  order_integral, raster, representative_for_vertex)
from amoebapuiseux.laurent import newton_polytope, parse_polynomial
from amoebapuiseux.polyhedra import Cone

LINE = parse_polynomial("x + y - 1", ["x", "y"])
CUBIC = parse_polynomial("50*x^3+83*x^2*y+24*x*y^2+y^3+392*x^2+414*x*y+50*y^2-28*x+59*y-100")


@pytest.fixture(scope="module")
def line_raster():
    return raster(LINE, ((-4, 4), (-4, 4)), resolution=200)


def test_slice_roots():
    r = fiber_roots_slice(LINE, (3, 0), axis=1, angles=[0.0])
    assert r == pytest.approx([1 - np.exp(3)])
    r = fiber_roots_slice(LINE, (0, 0), axis=0, angles=[np.pi])
    assert r == pytest.approx([2])
    q = parse_polynomial("z^2 - 3", ["z"])
    assert sorted(fiber_roots_slice(q, (0,), 0, []).real) == pytest.approx([-np.sqrt(3), np.sqrt(3)],
                                                                            abs=1e-10)


def test_order_examples():
    assert order_at(LINE, (3, 0)) == (1, 0)
    assert order_at(LINE, (-3, -3)) == (0, 0)
    assert order_at(LINE, (0, 3)) == (0, 1)
    with pytest.raises(AmoebaProximityError):
        order_at(LINE, (0, 0))


def test_order_of_laurent_polynomial_uses_exponent_shift():
    f = parse_polynomial("x + y + x^-1*y^-1 - 5", ["x", "y"])
    assert order_at(f, (0, 0)) == (0, 0)
    assert order_at(f, (4, -1)) == (1, 0)
    assert order_at(f, (-4, -4)) == (-1, -1)


def test_order_integral_examples():
    assert order_integral(LINE, (3, 0)) == pytest.approx((1, 0), abs=1e-6)
    assert order_integral(LINE, (-3, -3)) == pytest.approx((0, 0), abs=1e-6)
    mono = parse_polynomial("x*y")
    assert order_integral(mono, (0.3, -2.0)) == pytest.approx((1, 1), abs=1e-12)
    assert order_at(mono, (0.3, -2.0)) == (1, 1)


def test_order_integral_agrees_with_root_count():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 20:
        x = rng.uniform(-5, 5, size=2)
        try:
            expected = order_at(LINE, x, tol=0.2)
        except AmoebaProximityError:
            continue
        assert np.abs(np.array(order_integral(LINE, x)) - expected).max() < 0.25
        checked += 1


def test_membership_examples():
    assert is_in_amoeba(LINE, (0, 0))
    assert not is_in_amoeba(LINE, (3, 0))
    assert not is_in_amoeba(parse_polynomial("x*y"), (0.5, 0.5))


def test_line_raster_labels(line_raster):
    assert line_raster.label_set() == [(0, 0), (0, 1), (1, 0)]
    assert line_raster.consistency_conflicts() == []
    assert (line_raster.status == AMOEBA).any()


def test_raster_is_deterministic():
    a = raster(LINE, ((-2, 2), (-2, 2)), resolution=40, seed=5)
    b = raster(LINE, ((-2, 2), (-2, 2)), resolution=40, seed=5)
    assert np.array_equal(a.status, b.status) and np.array_equal(a.labels, b.labels)


def test_monomial_raster_is_all_complement():
    ras = raster(parse_polynomial("x^2*y"), ((-1, 1), (-1, 1)), resolution=20)
    assert (ras.status == COMPLEMENT).all()
    assert ras.label_set() == [(2, 1)]


def test_raster_dimension_mismatch():
    with pytest.raises(ValueError):
        raster(LINE, ((-1, 1),), resolution=10)


def test_line_components(line_raster):
    comps = components(line_raster, newton_polytope(LINE))
    assert sorted(c.order for c in comps) == [(0, 0), (0, 1), (1, 0)]
    assert not any(c.bounded for c in comps)
    for c in comps:
        assert order_at(LINE, c.representative) == c.order
        assert c.recession_cone.equivalent(-Cone(c.support_cone.dual_generators, 2))


def test_cubic_components_include_vertices():
    ras = raster(CUBIC, ((-6, 8), (-6, 8)), resolution=200)
    comps = components(ras, newton_polytope(CUBIC))
    orders = {c.order for c in comps}
    assert {(0, 0), (3, 0), (0, 3)} <= orders
    assert len(orders) <= 10
    assert ras.consistency_conflicts() == []
    bounded = [c for c in comps if c.bounded]
    assert all(c.order == (1, 1) for c in bounded)


def test_representatives_for_vertices():
    np_ = newton_polytope(LINE)
    x = representative_for_vertex(LINE, np_, (1, 0))
    assert order_at(LINE, x) == (1, 0)
    assert Cone([(0, -1), (1, 1)]).contains_float(x)
    x = representative_for_vertex(LINE, np_, (0, 0))
    assert x[0] == x[1] < 0
    x = representative_for_vertex(LINE, np_, (0, 1))
    assert order_at(LINE, x) == (0, 1)
    with pytest.raises(ValueError):
        representative_for_vertex(CUBIC, newton_polytope(CUBIC), (1, 1))
    with pytest.raises(ScheduleExhausted):
        representative_for_vertex(LINE, np_, (1, 0), schedule=(0.01,))


def test_order_constant_along_recession_directions(line_raster):
    rng = np.random.default_rng(2)
    for c in components(line_raster, newton_polytope(LINE)):
        gens = np.array(c.recession_cone.generators, dtype=float)
        for _ in range(50):
            x = np.asarray(c.representative) + rng.uniform(0, 3, size=len(gens)) @ gens
            assert order_at(LINE, x) == c.order


def test_polyannulus_stays_in_component():
    x0 = representative_for_vertex(LINE, newton_polytope(LINE), (0, 0))
    rng = np.random.default_rng(4)
    for _ in range(100):
        x = x0 - rng.exponential(2.0, size=2)
        assert order_at(LINE, x) == (0, 0)
        assert not is_in_amoeba(LINE, x)


def test_log_cone_description():
    """|z|^v >= rho^v for every dual generator v iff mu(z) lies in p + sigma."""
    rng = np.random.default_rng(8)
    for _ in range(20):
        gens = [tuple(int(a) for a in rng.integers(-3, 4, size=2)) for _ in range(2)]
        gens = [g for g in gens if any(g)] or [(1, 0)]
        sigma = Cone(gens, 2)
        p = rng.uniform(-2, 2, size=2)
        rho = np.exp(p)
        for _ in range(100):
            z = np.exp(rng.uniform(-6, 6, size=2) + 1j * rng.uniform(0, 6.3, size=2))
            by_modulus = all(np.prod(np.abs(z) ** np.array(v)) >= np.prod(rho ** np.array(v)) * (1 - 1e-12)
                             for v in sigma.dual_generators)
            assert by_modulus == sigma.contains_float(np.log(np.abs(z)) - p, tol=1e-9)
        lam = rng.uniform(0, 3, size=(100, len(sigma.generators)))
        for row in lam:
            x = p + row @ np.array(sigma.generators, dtype=float)
            z = np.exp(x + 1j * rng.uniform(0, 6.3, size=2))
            for v in sigma.dual_generators:
                assert np.prod(np.abs(z) ** np.array(v)) >= np.prod(rho ** np.array(v)) * (1 - 1e-9)


def test_raster_speed():
    t = time.perf_counter()
    raster(LINE, ((-4, 4), (-4, 4)), resolution=200)
    assert time.perf_counter() - t < 30
