import math

import numpy as np
import pytest

from vecrad import IndexMap, multicategory_map, multitask_map, one_vs_one_map, overlap_factor


class TestMulticategory:
    def test_full_subsets(self):
        m = multicategory_map(2, 3)
        assert m.subsets == ((0, 1, 2), (0, 1, 2))

    def test_minimal(self):
        m = multicategory_map(1, 1)
        assert m.subsets == ((0,),)

    def test_support_size(self):
        assert multicategory_map(4, 2).support_size == 8

    def test_multiplicity_is_T(self):
        m = multicategory_map(5, 7)
        assert np.all(m.multiplicities() == 5)

    def test_invalid(self):
        with pytest.raises(ValueError):
            multicategory_map(0, 3)
        with pytest.raises(ValueError):
            multicategory_map(3, 0)


class TestMultitask:
    def test_blocks(self):
        m = multitask_map(2, 2)
        assert m.subsets == ((0, 1), (2, 3))

    def test_single_task(self):
        assert multitask_map(1, 4).subsets == ((0, 1, 2, 3),)

    def test_singletons(self):
        assert multitask_map(3, 1).subsets == ((0,), (1,), (2,))

    def test_partition(self):
        m = multitask_map(5, 3)
        assert m.is_multitask_partition()
        assert sorted(i for s in m.subsets for i in s) == list(range(15))

    def test_invalid(self):
        with pytest.raises(ValueError):
            multitask_map(0, 2)


class TestOneVsOne:
    def test_two_classes(self):
        m = one_vs_one_map([1, 2])
        assert m.T == 1
        assert m.subsets == ((0, 1),)

    def test_three_classes_single_examples(self):
        m = one_vs_one_map([1, 2, 3])
        assert m.T == 3
        assert all(len(s) == 2 for s in m.subsets)
        # every example sits in C-1 = 2 pairs
        assert np.all(m.multiplicities() == 2)

    def test_pair_count(self):
        labels = [(i % 4) + 1 for i in range(12)]
        m = one_vs_one_map(labels)
        assert m.T == 6
        assert np.all(m.multiplicities() == 3)

    def test_missing_class(self):
        with pytest.raises(ValueError, match="class 2 has no examples"):
            one_vs_one_map([1, 3, 3])

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="two classes"):
            one_vs_one_map([1, 1])


class TestOverlapFactor:
    def test_multicategory_sqrt_T(self):
        assert overlap_factor(multicategory_map(4, 5)) == pytest.approx(2.0, abs=0)

    def test_multitask_one(self):
        assert overlap_factor(multitask_map(7, 3)) == 1.0

    def test_one_vs_one(self):
        assert overlap_factor(one_vs_one_map([1, 2, 3])) == pytest.approx(math.sqrt(2.0))
        labels = [(i % 4) + 1 for i in range(8)]
        assert overlap_factor(one_vs_one_map(labels)) == pytest.approx(math.sqrt(3.0))

    def test_defining_inequality(self, rng):
        maps = [
            multicategory_map(3, 6),
            multitask_map(3, 2),
            one_vs_one_map([(i % 3) + 1 for i in range(9)]),
            IndexMap(T=3, N=5, subsets=((0, 1), (1, 2, 3), (1, 4))),
        ]
        for imap in maps:
            theta2 = overlap_factor(imap) ** 2
            for _ in range(1000):
                a = rng.random(imap.N)
                lhs = sum(a[list(s)].sum() for s in imap.subsets)
                assert lhs <= theta2 * a.sum() + 1e-12

    def test_tightness_at_busiest_indicator(self):
        imap = IndexMap(T=3, N=5, subsets=((0, 1), (1, 2, 3), (1, 4)))
        theta2 = overlap_factor(imap) ** 2
        a = np.zeros(5)
        a[int(np.argmax(imap.multiplicities()))] = 1.0
        lhs = sum(a[list(s)].sum() for s in imap.subsets)
        assert abs(lhs - theta2 * a.sum()) <= 1e-12


class TestValidation:
    def test_empty_subset(self):
        with pytest.raises(ValueError, match="empty"):
            IndexMap(T=1, N=2, subsets=((),))

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="outside"):
            IndexMap(T=1, N=2, subsets=((0, 2),))

    def test_custom_map_accepted(self):
        m = IndexMap(T=2, N=4, subsets=((3, 0), (2,)))
        assert m.subsets == ((0, 3), (2,))
        assert m.support_size == 3
