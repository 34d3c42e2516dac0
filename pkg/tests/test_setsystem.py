from fractions import Fraction

import numpy as np
import pytest

from conftest import random_system
from shallowpack.setsystem import (
    BudgetError,
    CsParams,
    IncidenceVector,
    IndexSample,
    PointSet,
    SetSystem,
    cs_profile,
    distance,
    project,
    projection_count,
    shatter_function_exact,
    unit_distance_density,
    vc_dimension_exact,
)


def vecs(*strings):
    return [IncidenceVector.from_string(s) for s in strings]


def system(*strings):
    return SetSystem.from_vectors(vecs(*strings))


class TestTypes:
    def test_incidence_vector_basics(self):
        v = IncidenceVector.from_string("0110")
        assert v.width == 4
        assert v.length == 2
        assert v.indices() == (1, 2)
        assert v.bitstring() == "0110"

    def test_vector_validation(self):
        with pytest.raises(ValueError):
            IncidenceVector(3, 0b1000)
        with pytest.raises(ValueError):
            IncidenceVector.from_bits([0, 2])
        with pytest.raises(ValueError):
            IncidenceVector.from_indices(2, [5])

    def test_pointset_validation(self):
        with pytest.raises(ValueError):
            PointSet(2, ((1.0,),))
        with pytest.raises(ValueError):
            PointSet(2, ((float("nan"), 0.0),))
        with pytest.raises(ValueError):
            PointSet(0, ())

    def test_index_sample_validation(self):
        with pytest.raises(ValueError):
            IndexSample(4, (2, 1))
        with pytest.raises(ValueError):
            IndexSample(4, (0, 4))
        assert IndexSample.from_iterable(5, [3, 1, 3]).indices == (1, 3)

    def test_cs_params_validation(self):
        with pytest.raises(ValueError):
            CsParams(d=2, d1=3, d0=1)
        with pytest.raises(ValueError):
            CsParams(d=2, d1=1, d0=0)

    def test_system_dedup_and_canonical_order(self):
        s = SetSystem.from_vectors(vecs("1100", "0011", "1100"))
        assert len(s) == 2
        assert [v.bitstring() for v in s.vectors] == ["0011", "1100"]

    def test_canonical_order_is_lexicographic(self, rng):
        s = random_system(rng, 12, 40)
        strings = [v.bitstring() for v in s.vectors]
        assert strings == sorted(strings)

    def test_mask_round_trip(self, rng):
        s = random_system(rng, 20, 15)
        for i in range(len(s)):
            v = s.vector(i)
            assert v.bitstring() == "".join(
                "1" if b else "0" for b in s.bool_matrix()[i]
            )


class TestDistance:
    def test_examples(self):
        u, v = vecs("1100", "1010")
        assert distance(u, v) == 2
        assert distance(u, u) == 0
        z, f = vecs("0000", "1111")
        assert distance(z, f) == 4

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            distance(IncidenceVector.from_string("10"), IncidenceVector.from_string("100"))

    def test_metric_on_random_triples(self, rng):
        for _ in range(200):
            a, b, c = (int(rng.integers(0, 2**12)) for _ in range(3))
            u, v, w = (IncidenceVector(12, m) for m in (a, b, c))
            assert distance(u, v) == distance(v, u)
            assert (distance(u, v) == 0) == (a == b)
            assert distance(u, w) <= distance(u, v) + distance(v, w)


class TestProjection:
    def test_single_coordinate(self):
        s = system("110", "101", "011")
        p = project(s, IndexSample(3, (0,)))
        assert sorted(v.bitstring() for v in p.vectors) == ["0", "1"]

    def test_identity_projection(self):
        s = system("110", "101", "011")
        p = project(s, IndexSample(3, (0, 1, 2)))
        assert p == s

    def test_coordinate_extraction(self):
        s = system("1100", "1010")
        p = project(s, IndexSample(4, (2, 3)))
        assert sorted(v.bitstring() for v in p.vectors) == ["00", "10"]

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            project(system("10"), IndexSample(3, (0,)))

    def test_size_bounds(self, rng):
        s = random_system(rng, 10, 30)
        for _ in range(20):
            k = int(rng.integers(0, 11))
            idx = IndexSample.from_iterable(10, rng.permutation(10)[:k])
            p = project(s, idx)
            assert len(p) <= len(s)
            assert len(p) <= 2 ** len(idx)
            assert len(p) == projection_count(s, np.asarray(idx.indices))


class TestShatter:
    def test_full_cube(self):
        s = SetSystem.from_masks(3, range(8))
        assert shatter_function_exact(s, 2) == 4
        assert vc_dimension_exact(s) == 3

    def test_single_vector(self):
        s = system("000")
        assert shatter_function_exact(s, 1) == 1
        assert shatter_function_exact(s, 3) == 1
        assert vc_dimension_exact(s) == 0

    def test_three_vectors(self):
        s = system("110", "101", "011")
        assert shatter_function_exact(s, 2) == 3

    def test_monotone_in_m(self, rng):
        s = random_system(rng, 8, 25)
        values = [shatter_function_exact(s, m) for m in range(0, 9)]
        assert values == sorted(values)

    def test_budget(self):
        s = SetSystem.from_masks(60, [0, 1])
        with pytest.raises(BudgetError):
            shatter_function_exact(s, 30, budget=1000)


class TestCsProfile:
    def test_identity_entry(self, rng):
        s = random_system(rng, 8, 20)
        prof = cs_profile(s, [8], [8], trials=3, seed=5)
        assert prof.entry(8, 8) == len(s)

    def test_zero_cap(self):
        s = system("0000", "1100")
        prof = cs_profile(s, [4], [0], trials=2, seed=1)
        assert prof.entry(4, 0) == 1
        s2 = system("1100", "1110")
        prof2 = cs_profile(s2, [4], [0], trials=2, seed=1)
        assert prof2.entry(4, 0) == 0

    def test_monotone_in_cap(self, rng):
        s = random_system(rng, 16, 60)
        prof = cs_profile(s, [8], [2, 4, 8], trials=4, seed=9)
        assert prof.entry(8, 2) <= prof.entry(8, 4) <= prof.entry(8, 8)

    def test_deterministic(self, rng):
        s = random_system(rng, 10, 25)
        a = cs_profile(s, [4, 6], [2, 5], trials=5, seed=3)
        b = cs_profile(s, [4, 6], [2, 5], trials=5, seed=3)
        assert a.entries == b.entries

    def test_halfplane_system_cap_ordering(self):
        from shallowpack.setsystem import build_halfspaces, random_points

        s = build_halfspaces(random_points(64, 2, seed=2))
        prof = cs_profile(s, [32], [4, 32], trials=3, seed=4)
        assert prof.entry(32, 4) <= prof.entry(32, 32)


class TestUnitDistanceDensity:
    def test_chain(self):
        assert unit_distance_density(system("000", "100", "110")) == Fraction(2, 3)

    def test_single(self):
        assert unit_distance_density(system("0")) == 0

    def test_full_square(self):
        assert unit_distance_density(SetSystem.from_masks(2, range(4))) == 1

    def test_density_bounded_by_vc(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 9))
            m = int(rng.integers(1, min(2**n, 40) + 1))
            s = random_system(rng, n, m)
            assert unit_distance_density(s) <= vc_dimension_exact(s)


class TestSerialization:
    def test_text_round_trip(self, rng):
        s = random_system(rng, 13, 17)
        assert SetSystem.from_text(s.to_text()) == s

    def test_header_format(self):
        text = system("10", "01").to_text()
        assert text.splitlines()[0] == "n=2 m=2"

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            SetSystem.from_text("nonsense")
        with pytest.raises(ValueError):
            SetSystem.from_text("n=2 m=1\n102")
        with pytest.raises(ValueError):
            SetSystem.from_text("n=2 m=2\n10")

    def test_pointset_csv_round_trip(self):
        p = PointSet.from_array([[0.5, 1.25], [-3.0, 2.0 / 3.0]])
        back = PointSet.from_csv(p.to_csv())
        assert back == p
        assert p.to_csv().splitlines()[0] == "dim=2"
