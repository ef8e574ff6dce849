import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypmetric import dmetric
from hypmetric.dmetric import (
    CANONICAL, HYPMOD, REAL_LINE, DBall, DInterval, DMetric, ball_mask, ball_membership,
    boundary_witness, check_axioms, component_metric, cover_greedy, d_canonical, d_hypmod,
    d_product, diameter, discrete, euclidean, is_embedding, is_isometry, product_metric,
    seq_analyze, seq_analyze_real, sphere_vertices, square_bounds, square_grid,
    summable_check, taxicab,
)
from hypmetric.errors import EmptySet, InvalidInterval, InvalidRadius
from hypmetric.hypnum import BC, ZERO, Hyp, from_array, strictly_precedes

reals = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
hyps = st.builds(Hyp, reals, reals)
complexes = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)
bcs = st.builds(BC, complexes, complexes)
dyadic = st.integers(-4096, 4096).map(lambda i: i / 64)
pos_dyadic = st.integers(1, 4096).map(lambda i: i / 64)


class TestMetrics:
    def test_canonical_examples(self):
        assert d_canonical(Hyp(1, 2), Hyp(4, 6)) == Hyp(3, 4)
        assert d_canonical(Hyp(7, -1), Hyp(7, -1)) == ZERO

    def test_hypmod_examples(self):
        assert d_hypmod(BC(1, 1), BC(1, 1)) == ZERO
        assert d_hypmod(BC(3 + 4j, 2), BC(0, 1)) == Hyp(5, 1)

    def test_product_examples(self):
        x = BC(1 + 1j, 2)
        assert d_product(discrete, euclidean, x, x) == ZERO
        assert d_product(discrete, euclidean, x, BC(5j, 2)) == Hyp(1, 0)

    def test_real_metrics(self):
        assert euclidean(3j, 4) == 5 and taxicab(3j, 4) == 7
        assert discrete(1, 1) == 0 and discrete(1, 2) == 1
        assert REAL_LINE(1.0, 3.5) == Hyp(2.5, 2.5)

    def test_component_metric(self):
        d1, d2 = component_metric(CANONICAL, 1), component_metric(CANONICAL, 2)
        assert d1(Hyp(0, 0), Hyp(3, 4)) == 3 and d2(Hyp(0, 0), Hyp(3, 4)) == 4
        with pytest.raises(ValueError):
            component_metric(CANONICAL, 3)

    def test_batched_distances_match(self):
        rng = np.random.default_rng(0)
        a, b = rng.normal(size=(50, 2)), rng.normal(size=(50, 2))
        fast = CANONICAL.distances(a, b)
        slow = np.array([[*d_canonical(x, y)] for x, y in zip(from_array(a), from_array(b))])
        assert np.array_equal(fast, slow)
        m1, m2 = CANONICAL.matrix(from_array(a[:5]))
        assert m1[1, 3] == abs(a[1, 0] - a[3, 0]) and m2[3, 1] == abs(a[1, 1] - a[3, 1])


class TestAxioms:
    @settings(max_examples=50)
    @given(st.lists(hyps, min_size=3, max_size=6, unique=True))
    def test_canonical(self, pts):
        assert check_axioms(CANONICAL, pts).passed

    @settings(max_examples=50)
    @given(st.lists(bcs, min_size=3, max_size=6, unique=True))
    def test_hypmod(self, pts):
        assert check_axioms(HYPMOD, pts).passed

    @pytest.mark.parametrize("d1", ["euclidean", "taxicab", "discrete"])
    @pytest.mark.parametrize("d2", ["euclidean", "taxicab", "discrete"])
    def test_products(self, d1, d2):
        rng = np.random.default_rng(len(d1) * 31 + len(d2))
        # a coarse lattice so repeated slot values (and zero-divisor distances) occur
        w = rng.integers(-2, 3, size=(12, 4)).astype(float)
        pts = list({BC(complex(a, b), complex(c, e)) for a, b, c, e in w})
        d = product_metric(dmetric.REAL_METRICS[d1], dmetric.REAL_METRICS[d2])
        assert check_axioms(d, pts).passed

    def test_broken_metric_fails_identity(self):
        broken = DMetric(lambda x, y: d_canonical(x, y) - Hyp(0.1, 0.1), "broken")
        rep = check_axioms(broken, [Hyp(0, 0), Hyp(1, 1), Hyp(2, 5)])
        assert not rep.identity_ok and not rep.passed
        assert "identity" in rep.counterexamples

    def test_asymmetric_and_non_triangle(self):
        lopsided = DMetric(lambda x, y: Hyp(max(x.u - y.u, 0) + 2 * max(y.u - x.u, 0),
                                            abs(x.v - y.v)), "lopsided")
        rep = check_axioms(lopsided, [Hyp(0, 0), Hyp(1, 0), Hyp(0, 1)])
        assert not rep.symmetry_ok
        squared = DMetric(lambda x, y: Hyp((x.u - y.u) ** 2, (x.v - y.v) ** 2), "squared")
        rep = check_axioms(squared, [Hyp(0, 0), Hyp(1, 1), Hyp(2, 2)])
        assert not rep.triangle_ok and rep.identity_ok and rep.symmetry_ok

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            check_axioms(CANONICAL, [Hyp(0, 0), Hyp(1, 1)])

    def test_isometry_predicates(self):
        pts = [Hyp(0, 0), Hyp(1, 2), Hyp(-3, 0.5)]
        assert is_isometry(lambda x: x + Hyp(5, -5), pts, CANONICAL, CANONICAL)
        assert not is_isometry(lambda x: x * 2, pts, CANONICAL, CANONICAL)
        assert not is_embedding(lambda x: ZERO, pts, CANONICAL, CANONICAL)


class TestBalls:
    center = Hyp(0, 0)
    r = Hyp(1, 2)

    def member(self, kind, x):
        return ball_membership(DBall(self.center, self.r, kind), CANONICAL, x)

    def test_examples(self):
        assert self.member("open", Hyp(0.5, 1))
        assert not self.member("open", Hyp(1.5, 1)) and not self.member("closed", Hyp(1.5, 1))
        x = Hyp(1, 2)
        assert self.member("sphere", x) and self.member("closed", x) and not self.member("open", x)

    def test_sphere_vertices_examples(self):
        assert set(sphere_vertices(Hyp(0, 0), Hyp(1, 2))) == {
            Hyp(1, 2), Hyp(1, -2), Hyp(-1, 2), Hyp(-1, -2)}
        assert set(sphere_vertices(Hyp(5, 5), Hyp(1, 1))) == {
            Hyp(6, 6), Hyp(6, 4), Hyp(4, 6), Hyp(4, 4)}

    @pytest.mark.parametrize("r", [Hyp(0, 1), Hyp(1, 0), Hyp(-1, 1), ZERO])
    def test_invalid_radius(self, r):
        with pytest.raises(InvalidRadius):
            sphere_vertices(ZERO, r)
        with pytest.raises(InvalidRadius):
            DBall(ZERO, r)
        with pytest.raises(InvalidRadius):
            boundary_witness(ZERO, r)

    def test_square_bounds(self):
        assert square_bounds(Hyp(1, 1), Hyp(1, 2)) == {
            "u_min": 0, "u_max": 2, "v_min": -1, "v_max": 3}

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            DBall(ZERO, Hyp(1, 1), "half-open")

    @given(st.builds(Hyp, dyadic, dyadic), st.builds(Hyp, pos_dyadic, pos_dyadic),
           st.builds(Hyp, dyadic, dyadic))
    def test_inclusions(self, c, r, x):
        kinds = {k: ball_membership(DBall(c, r, k), CANONICAL, x)
                 for k in ("open", "closed", "sphere")}
        if kinds["open"]:
            assert kinds["closed"] and not kinds["sphere"]
        if kinds["sphere"]:
            assert kinds["closed"]
            assert x in sphere_vertices(c, r)

    @given(st.builds(Hyp, dyadic, dyadic), st.builds(Hyp, pos_dyadic, pos_dyadic))
    def test_witness_in_closed_minus_open_off_sphere(self, c, r):
        w = boundary_witness(c, r)
        assert ball_membership(DBall(c, r, "closed"), CANONICAL, w)
        assert not ball_membership(DBall(c, r, "open"), CANONICAL, w)
        assert not ball_membership(DBall(c, r, "sphere"), CANONICAL, w)
        assert all(ball_membership(DBall(c, r, "sphere"), CANONICAL, v)
                   for v in sphere_vertices(c, r))

    @given(st.builds(Hyp, dyadic, dyadic), st.builds(Hyp, pos_dyadic, pos_dyadic),
           st.lists(st.builds(Hyp, dyadic, dyadic), min_size=1, max_size=20),
           st.sampled_from(["open", "closed", "sphere"]))
    def test_mask_matches_membership(self, c, r, xs, kind):
        b = DBall(c, r, kind)
        expected = [ball_membership(b, CANONICAL, x) for x in xs]
        assert list(ball_mask(b, CANONICAL, xs)) == expected
        arr = np.array([(x.u, x.v) for x in xs])
        assert list(ball_mask(b, CANONICAL, arr)) == expected

    def test_hypmod_ball(self):
        b = DBall(BC(0, 0), Hyp(1, 1), "open")
        assert ball_membership(b, HYPMOD, BC(0.5j, -0.5))
        assert not ball_membership(b, HYPMOD, BC(0.5j, 2))


class TestIntervals:
    def test_examples(self):
        closed = DInterval(ZERO, Hyp(1, 1), "closed")
        opened = DInterval(ZERO, Hyp(1, 1), "open")
        assert dmetric.interval_contains(closed, Hyp(0.3, 0.9))
        assert not dmetric.interval_contains(opened, Hyp(0, 0.5))
        assert dmetric.interval_contains(closed, Hyp(0, 0.5))

    @pytest.mark.parametrize("lo, hi", [(Hyp(0, 0), Hyp(1, 0)), (Hyp(1, 1), Hyp(0, 0)),
                                        (Hyp(0, 0), Hyp(0, 0))])
    def test_invalid(self, lo, hi):
        with pytest.raises(InvalidInterval):
            DInterval(lo, hi)


def _walk(steps, start=(0.0, 0.0)):
    arr = np.vstack([start, np.asarray(start) + np.cumsum(steps, axis=0)])
    return from_array(arr)


class TestSequences:
    schedule = [Hyp(a, b) for a in (1.0, 0.1, 0.03) for b in (1.0, 0.1, 0.03)]

    def test_harmonic_converges(self):
        xs = [Hyp(1 / n, 1 / n) for n in range(1, 201)]
        rep = seq_analyze(CANONICAL, xs, self.schedule, limit=ZERO)
        assert all(i is not None for i in rep.converge_index)
        assert all(rep.is_cauchy_up_to)
        # the first index with every later term strictly inside eps = 0.1 is n = 11
        assert rep.converge_index[self.schedule.index(Hyp(0.1, 0.1))] == 10

    def test_oscillation_not_cauchy(self):
        xs = [Hyp((-1.0) ** n, 0.0) for n in range(100)]
        rep = seq_analyze(CANONICAL, xs, [Hyp(1, 1)])
        assert rep.is_cauchy_up_to == [False]
        assert rep.cauchy_index == [None] and rep.limit_candidate is None

    def test_bad_schedule(self):
        with pytest.raises(ValueError):
            seq_analyze(CANONICAL, [ZERO, ZERO], [Hyp(0, 1)])
        with pytest.raises(ValueError):
            seq_analyze(CANONICAL, [ZERO, ZERO], [])

    def test_min_tail_rules_out_trivial_tail(self):
        xs = [Hyp(float(n), 0.0) for n in range(10)]
        assert seq_analyze(CANONICAL, xs, [Hyp(0.5, 0.5)]).is_cauchy_up_to == [False]
        assert seq_analyze(CANONICAL, xs, [Hyp(0.5, 0.5)], min_tail=1).cauchy_index == [9]

    def test_geometric_summable_and_cauchy(self):
        i = np.arange(1, 60)
        xs = _walk(np.column_stack([2.0 ** -i, 3.0 ** -i]))
        assert summable_check(CANONICAL, xs, Hyp(1e-6, 1e-6))
        rep = seq_analyze(CANONICAL, xs, [Hyp(1e-6, 1e-6), Hyp(1e-3, 1e-8)])
        assert all(rep.is_cauchy_up_to)

    def test_harmonic_steps_not_summable(self):
        i = np.arange(1, 200)
        xs = _walk(np.column_stack([1 / i, 1 / i]))
        assert not summable_check(CANONICAL, xs, Hyp(0.5, 0.5))

    def test_constant_summable(self):
        assert summable_check(CANONICAL, [Hyp(3, 3)] * 20, Hyp(1e-12, 1e-12))

    def test_summable_rejects_negative_steps(self):
        weird = DMetric(lambda x, y: Hyp(-1.0, 0.0) if x != y else ZERO, "weird")
        assert not summable_check(weird, [ZERO, Hyp(1, 1), ZERO], Hyp(1, 1))

    @settings(max_examples=60)
    @given(st.lists(st.tuples(st.floats(-2, 2), st.floats(-2, 2)), min_size=2, max_size=30),
           st.floats(0.6, 0.95), st.floats(0.6, 0.95))
    def test_cauchy_iff_components_cauchy(self, raw, ra, rb):
        # damped steps, so some schedules succeed and others fail
        steps = np.array(raw) * np.column_stack([ra ** np.arange(len(raw)),
                                                 rb ** np.arange(len(raw))])
        xs = _walk(steps)
        schedule = [Hyp(a, b) for a in (2.0, 0.5, 0.05) for b in (2.0, 0.2, 0.01)]
        rep = seq_analyze(CANONICAL, xs, schedule)
        c1 = seq_analyze_real(component_metric(CANONICAL, 1), xs, [e.u for e in schedule])
        c2 = seq_analyze_real(component_metric(CANONICAL, 2), xs, [e.v for e in schedule])
        assert rep.is_cauchy_up_to == [a is not None and b is not None for a, b in zip(c1, c2)]
        # the index is the later of the two component indices
        for idx, a, b in zip(rep.cauchy_index, c1, c2):
            if idx is not None:
                assert idx == max(a, b)

    @settings(max_examples=60)
    @given(st.floats(0.05, 0.8), st.floats(0.05, 0.8), st.integers(20, 60))
    def test_summable_implies_cauchy(self, a, b, n):
        i = np.arange(1, n)
        xs = _walk(np.column_stack([a ** i, -(b ** i)]))
        bound = Hyp(1e-3, 1e-3)
        if summable_check(CANONICAL, xs, bound):
            schedule = [bound, Hyp(1e-2, 1e-3), Hyp(1.0, 1e-3), Hyp(1.0, 1.0)]
            assert all(seq_analyze(CANONICAL, xs, schedule).is_cauchy_up_to)


class TestDiameterAndCover:
    def test_diameter_examples(self):
        assert diameter(CANONICAL, [ZERO, Hyp(1, 0), Hyp(0, 1)]) == Hyp(1, 1)
        assert diameter(CANONICAL, [Hyp(4, 4)]) == ZERO
        assert diameter(CANONICAL, [ZERO, Hyp(3, 4)]) == Hyp(3, 4)
        with pytest.raises(EmptySet):
            diameter(CANONICAL, [])

    @given(st.lists(hyps, min_size=1, max_size=8))
    def test_diameter_fast_path_matches_pairwise(self, pts):
        slow = DMetric(d_canonical, "slow")
        assert diameter(CANONICAL, pts) == diameter(slow, pts)

    def test_cover_examples(self):
        A = [ZERO, Hyp(1, 1)]
        assert cover_greedy(CANONICAL, A, Hyp(2, 2)) == [ZERO]
        assert cover_greedy(CANONICAL, A, Hyp(1, 1)) == [ZERO, Hyp(1, 1)]
        with pytest.raises(InvalidRadius):
            cover_greedy(CANONICAL, A, Hyp(1, 0))
        assert cover_greedy(CANONICAL, [], Hyp(1, 1)) == []

    def test_cover_grid_against_exact_optimum(self):
        grid = from_array(square_grid(0.0, 1.0, 10))
        assert len(grid) == 100
        eps = Hyp(0.3, 0.3)
        centers = cover_greedy(CANONICAL, grid, eps)
        assert len(centers) <= 16
        for x in grid:
            assert any(strictly_precedes(d_canonical(x, c), eps) for c in centers)
        best = _min_cover(grid, eps, limit=len(centers) + 1)
        assert best == 4 and len(centers) >= best

    def test_cover_deterministic_farthest_point(self):
        pts = [Hyp(0, 0), Hyp(0.5, 0), Hyp(3, 0), Hyp(10, 0), Hyp(9.5, 0)]
        # from the origin the farthest uncovered point is (10, 0), then (3, 0)
        assert cover_greedy(CANONICAL, pts, Hyp(1, 1)) == [Hyp(0, 0), Hyp(10, 0), Hyp(3, 0)]

    @settings(max_examples=40)
    @given(st.lists(st.builds(Hyp, dyadic, dyadic), min_size=1, max_size=40),
           st.builds(Hyp, pos_dyadic, pos_dyadic))
    def test_cover_covers(self, pts, eps):
        centers = cover_greedy(CANONICAL, pts, eps)
        assert all(c in pts for c in centers)
        for x in pts:
            assert any(strictly_precedes(d_canonical(x, c), eps) for c in centers)


def _min_cover(points, eps, limit):
    """Exact minimum number of open eps-balls centred on sample points."""
    n = len(points)
    masks = []
    for c in points:
        m = 0
        for j, x in enumerate(points):
            if strictly_precedes(d_canonical(x, c), eps):
                m |= 1 << j
        masks.append(m)
    full = (1 << n) - 1
    best = [limit]

    def search(covered, used):
        if covered == full:
            best[0] = min(best[0], used)
            return
        if used + 1 >= best[0]:
            return
        first = (~covered & -~covered).bit_length() - 1
        for m in masks:
            if m >> first & 1:
                search(covered | m, used + 1)

    search(0, 0)
    return best[0]


def test_square_grid_layout():
    g = square_grid(0.0, 1.0, 3)
    assert g.shape == (9, 2)
    assert g[1].tolist() == [0.0, 0.5] and g[3].tolist() == [0.5, 0.0]
    assert math.isclose(dmetric.grid_step(0, 1, 11), 0.1)
