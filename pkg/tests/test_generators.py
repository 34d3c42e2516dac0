"""Generator tests, backed by LP separability oracles (scipy) and sweeps."""

import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from shallowpack import kernels
from shallowpack.setsystem import (
    PointSet,
    build_balls,
    build_halfspaces,
    build_rectangle_grid_dual,
    build_slabs,
    clustered_points,
    convex_position_points,
    random_points,
)


def subset_strings(system):
    return set(v.bitstring() for v in system.vectors)


def halfplane_separable(P: np.ndarray, subset: tuple[int, ...]) -> bool:
    """LP oracle: conv(S) and conv(X-S) admit a separating hyperplane.

    Maximizes the margin gamma (capped at 1); realizable iff gamma > 0.
    """
    n, d = P.shape
    inside = np.zeros(n, dtype=bool)
    inside[list(subset)] = True
    if inside.all() or not inside.any():
        return True
    # variables: a (d), b, gamma; maximize gamma
    # inside:  a.x - b + gamma <= 0 ; outside: -a.x + b + gamma <= 0
    rows = []
    for i in range(n):
        sign = 1.0 if inside[i] else -1.0
        rows.append(np.concatenate([sign * P[i], [-sign], [1.0]]))
    A_ub = np.asarray(rows)
    b_ub = np.zeros(n)
    c = np.zeros(d + 2)
    c[-1] = -1.0
    bounds = [(-100, 100)] * d + [(-1000, 1000), (None, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    assert res.status == 0
    return -res.fun > 1e-7


def ball_separable(P: np.ndarray, subset: tuple[int, ...]) -> bool:
    """LP oracle in the lifted space: some ball contains exactly the subset.

    A ball constraint |x-c| <= r linearizes to |x|^2 - 2c.x <= t, so subsets
    are realizable iff the paraboloid heights are affinely separable with the
    lifted coordinate's coefficient fixed to one.
    """
    n, d = P.shape
    inside = np.zeros(n, dtype=bool)
    inside[list(subset)] = True
    if inside.all() or not inside.any():
        return True
    z = (P**2).sum(axis=1)
    scale = 1.0 + float(np.abs(z).max())
    rows = []
    b_ub = []
    for i in range(n):
        sign = 1.0 if inside[i] else -1.0
        # sign * (z_i - 2 c.x_i - t) + gamma <= 0
        rows.append(np.concatenate([sign * (-2.0) * P[i], [-sign], [1.0]]))
        b_ub.append(-sign * z[i])
    c = np.zeros(d + 2)
    c[-1] = -1.0
    bounds = [(-1000, 1000)] * d + [(-100000, 100000), (None, scale)]
    res = linprog(c, A_ub=np.asarray(rows), b_ub=np.asarray(b_ub), bounds=bounds, method="highs")
    assert res.status == 0
    return -res.fun > 1e-7 * scale


class TestHalfspaces:
    def test_triangle_shatters(self):
        got = build_halfspaces(PointSet.from_array([[0, 0], [1, 0], [0, 1]]))
        assert len(got) == 8

    def test_single_point(self):
        got = build_halfspaces(PointSet.from_array([[0.3, 0.7]]))
        assert sorted(v.bitstring() for v in got.vectors) == ["0", "1"]

    def test_square_excludes_diagonals(self):
        sq = PointSet.from_array([[0, 0], [1, 0], [1, 1], [0, 1]])
        strs = subset_strings(build_halfspaces(sq))
        assert len(strs) == 14
        assert "1010" not in strs and "0101" not in strs

    def test_matches_lp_oracle_planar(self, rng):
        P = rng.random((9, 2))
        strs = subset_strings(build_halfspaces(PointSet.from_array(P)))
        for subset in itertools.chain.from_iterable(
            itertools.combinations(range(9), r) for r in range(10)
        ):
            expected = halfplane_separable(P, subset)
            row = "".join("1" if i in subset else "0" for i in range(9))
            assert (row in strs) == expected, (subset, expected)

    def test_matches_lp_oracle_3d(self, rng):
        P = rng.random((7, 3))
        strs = subset_strings(build_halfspaces(PointSet.from_array(P)))
        for subset in itertools.chain.from_iterable(
            itertools.combinations(range(7), r) for r in range(8)
        ):
            expected = halfplane_separable(P, subset)
            row = "".join("1" if i in subset else "0" for i in range(7))
            assert (row in strs) == expected, (subset, expected)

    def test_collinear_points(self):
        got = build_halfspaces(PointSet.from_array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))
        # prefixes and suffixes of the line order only
        assert subset_strings(got) == {"000", "100", "110", "111", "001", "011"}

    def test_duplicate_points_flagged(self):
        with pytest.warns(UserWarning):
            got = build_halfspaces(PointSet.from_array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]))
        # duplicates are inseparable: they enter and leave together
        assert subset_strings(got) == {"000", "110", "001", "111"}

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            build_halfspaces(PointSet.from_array(np.zeros((2, 4))))
        with pytest.raises(ValueError):
            build_halfspaces(PointSet(2, ()))

    def test_known_count_in_general_position(self, rng):
        P = rng.random((30, 2))
        got = build_halfspaces(PointSet.from_array(P))
        assert len(got) == 30 * 29 + 2


class TestBalls:
    def test_two_points(self):
        got = build_balls(PointSet.from_array([[0.0], [1.0]]))
        assert subset_strings(got) == {"00", "10", "01", "11"}

    def test_three_collinear(self):
        got = build_balls(PointSet.from_array([[0.0], [1.0], [2.5]]))
        assert subset_strings(got) == {"000", "100", "010", "001", "110", "011", "111"}

    def test_cocircular_square_matches_lp_oracle(self):
        P = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        strs = subset_strings(build_balls(PointSet.from_array(P)))
        for subset in itertools.chain.from_iterable(
            itertools.combinations(range(4), r) for r in range(5)
        ):
            expected = ball_separable(P, subset)
            row = "".join("1" if i in subset else "0" for i in range(4))
            assert (row in strs) == expected, (subset, expected)

    def test_matches_lp_oracle_planar(self, rng):
        P = rng.random((8, 2))
        strs = subset_strings(build_balls(PointSet.from_array(P)))
        for subset in itertools.chain.from_iterable(
            itertools.combinations(range(8), r) for r in range(9)
        ):
            expected = ball_separable(P, subset)
            row = "".join("1" if i in subset else "0" for i in range(8))
            assert (row in strs) == expected, (subset, expected)

    def test_matches_lp_oracle_3d(self, rng):
        P = rng.random((7, 3))
        strs = subset_strings(build_balls(PointSet.from_array(P)))
        for subset in itertools.chain.from_iterable(
            itertools.combinations(range(7), r) for r in range(8)
        ):
            expected = ball_separable(P, subset)
            row = "".join("1" if i in subset else "0" for i in range(7))
            assert (row in strs) == expected, (subset, expected)

    def test_contains_halfspace_subsets(self, rng):
        pts = PointSet.from_array(rng.random((10, 2)))
        assert subset_strings(build_halfspaces(pts)) <= subset_strings(build_balls(pts))


class TestSlabs:
    def test_three_collinear(self):
        got = build_slabs(PointSet.from_array([[0.0], [1.0], [2.5]]))
        assert subset_strings(got) == {"000", "100", "010", "001", "110", "011", "111"}

    def test_single_point(self):
        assert len(build_slabs(PointSet.from_array([[2.0, 1.0]]))) == 2

    def test_superset_of_halfspaces(self, rng):
        for trial in range(3):
            pts = PointSet.from_array(rng.random((10, 2)))
            assert subset_strings(build_halfspaces(pts)) <= subset_strings(build_slabs(pts))

    def test_superset_of_halfspaces_3d(self, rng):
        pts = PointSet.from_array(rng.random((7, 3)))
        assert subset_strings(build_halfspaces(pts)) <= subset_strings(build_slabs(pts))

    def test_dense_direction_family_covered(self, rng):
        P = rng.random((9, 2))
        strs = subset_strings(build_slabs(PointSet.from_array(P)))
        for angle in np.linspace(0, np.pi, 500, endpoint=False):
            a = np.array([np.cos(angle), np.sin(angle)])
            order = np.argsort(P @ a)
            for lo in range(9):
                for hi in range(lo + 1, 10):
                    row = np.zeros(9, dtype=int)
                    row[order[lo:hi]] = 1
                    assert "".join(map(str, row)) in strs

    def test_interval_structure_on_line_3d(self):
        # collinear in 3-space: slab subsets are intervals along the line
        P = np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [3.0, 3.0, 3.0]])
        got = subset_strings(build_slabs(PointSet.from_array(P)))
        runs = {"0000"}
        for lo in range(4):
            for hi in range(lo, 4):
                row = ["0"] * 4
                for i in range(lo, hi + 1):
                    row[i] = "1"
                runs.add("".join(row))
        assert got == runs


class TestRectangleGrid:
    @pytest.mark.parametrize("n,delta", [(8, 2), (4, 2), (64, 4)])
    def test_counts_lengths_distances(self, n, delta):
        s = build_rectangle_grid_dual(n, delta)
        assert len(s) == (n // delta) ** 2
        assert (s.lengths == delta).all()
        if len(s) > 1:
            assert kernels.min_pairwise_distance(s.words) >= delta

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            build_rectangle_grid_dual(8, 3)
        with pytest.raises(ValueError):
            build_rectangle_grid_dual(9, 2)
        with pytest.raises(ValueError):
            build_rectangle_grid_dual(0, 2)

    def test_ground_set_layout(self):
        s = build_rectangle_grid_dual(8, 4)
        # 2x2 grid, stacks of 2: cell (0,0) = first vertical + first horizontal
        assert "11001100" in set(v.bitstring() for v in s.vectors)


class TestPointClouds:
    def test_random_points_deterministic(self):
        assert random_points(10, 2, 3) == random_points(10, 2, 3)
        assert random_points(10, 2, 3) != random_points(10, 2, 4)

    def test_convex_position(self):
        pts = convex_position_points(40, 7).to_array()
        assert np.allclose((pts**2).sum(axis=1), 1.0)

    def test_clustered_in_plane(self):
        pts = clustered_points(30, 2, 5)
        assert len(pts) == 30 and pts.dim == 2
