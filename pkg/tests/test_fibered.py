import math
import random
from collections import Counter
from fractions import Fraction as F

import pytest

from multipres import (
    Barcode,
    Grade,
    LineSpec,
    barcode,
    direct_sum,
    free,
    minimize,
    restrict,
    simplify,
    simplify_barcode,
    staircase_interval,
)
from multipres.experiments import incompleteness_pair, random_module
from multipres.presentation import Generator, Presentation, Relation

from oracles import barcode_by_rank_counts, dim_at

INF = math.inf


def g(*coords):
    return Grade(coords)


def one_param(gen_grades, rels, p=2):
    gens = tuple(Generator(f"g{i}", g(x)) for i, x in enumerate(gen_grades))
    rels = tuple(Relation(g(x), tuple(sorted(col.items()))) for x, col in rels)
    return Presentation(1, p, gens, rels)


def random_one_param(rng, max_gens=8, p=2):
    k = rng.randint(1, max_gens)
    gens = sorted(F(rng.randint(0, 40), 2) for _ in range(k))
    rels = []
    for _ in range(rng.randint(0, max_gens)):
        support = rng.sample(range(k), rng.randint(1, min(3, k)))
        grade = max(gens[i] for i in support) + F(rng.randint(0, 30), 2)
        col = {i: rng.randint(1, p - 1) for i in support}
        rels.append((grade, col))
    return one_param(gens, rels, p)


class TestRestrict:
    def test_free_on_slope_one(self):
        Q = restrict(free([g(0, 0)]), LineSpec.slope_one(g(0, 0)))
        assert Q.n == 1 and Q.gens[0].grade == g(0)
        assert barcode(Q).bars == ((F(0), INF, 1),)

    def test_rectangle_bar(self):
        P = staircase_interval([g(0, 0)], [g(2, 0), g(0, 3)])
        B = barcode(restrict(P, LineSpec.slope_one(g(0, 0))))
        assert B.bars == ((F(0), F(2), 1),)
        # pointwise dimension oracle along the line
        line = LineSpec.slope_one(g(0, 0))
        for t in (F(-1), F(0), F(1), F(3, 2), F(2), F(5, 2), F(3)):
            assert B.count_containing(t) == dim_at(P, line.point_at(t))

    def test_incompleteness_n(self):
        N, _ = incompleteness_pair()
        B = barcode(restrict(N, LineSpec.slope_one(g(0, 0))))
        assert B.bars == ((F(1), F(10), 2),)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            restrict(free([g(0, 0)]), LineSpec.slope_one(g(0, 0, 0)))


class TestBarcode:
    def test_free_at_zero(self):
        assert barcode(one_param([0], [])).bars == ((F(0), INF, 1),)

    def test_two_generators_with_mixing_column(self):
        Q = one_param([0, 0], [(1, {0: 1, 1: 1}), (3, {1: 1})])
        assert barcode(Q).as_counter() == Counter({(F(0), F(1)): 1, (F(0), F(3)): 1})
        assert barcode(Q).as_counter() == barcode_by_rank_counts(Q)

    def test_no_relations(self):
        Q = one_param([0, 1, 2], [])
        assert barcode(Q).as_counter() == Counter({(F(0), INF): 1, (F(1), INF): 1, (F(2), INF): 1})

    def test_rejects_multiparameter(self):
        with pytest.raises(ValueError):
            barcode(free([g(0, 0)]))

    def test_against_rank_count_oracle(self):
        rng = random.Random(31)
        for _ in range(40):
            Q = random_one_param(rng)
            assert barcode(Q).as_counter() == barcode_by_rank_counts(Q)
        for _ in range(10):
            Q = random_one_param(rng, p=5)
            assert barcode(Q).as_counter() == barcode_by_rank_counts(Q)

    def test_order_independence(self):
        rng = random.Random(32)
        for _ in range(25):
            Q = random_one_param(rng)
            reference = barcode(Q).as_counter()
            gens = list(Q.gens)
            rels = list(Q.rels)
            rng.shuffle(gens)
            remap = {Q.gens.index(gen): i for i, gen in enumerate(gens)}
            rels = [Relation(r.grade, tuple(sorted((remap[i], c) for i, c in r.col))) for r in rels]
            rng.shuffle(rels)
            shuffled = Presentation(1, Q.p, tuple(gens), tuple(rels))
            assert barcode(shuffled).as_counter() == reference


class TestSimplifyBarcode:
    def test_eps_zero(self):
        B = Barcode({(0, 3): 1, (5, INF): 2})
        assert simplify_barcode(B, 0).bars == B.bars

    def test_short_bars_die(self):
        B = Barcode({(0, 3): 1, (0, 1): 1})
        assert simplify_barcode(B, 1).as_counter() == Counter({(F(0), F(2)): 1})

    def test_infinite_bars_survive(self):
        B = Barcode({(5, INF): 1})
        assert simplify_barcode(B, 100).as_counter() == Counter({(F(5), INF): 1})


class TestBarcodeProperties:
    def test_direct_sum_additivity(self):
        rng = random.Random(33)
        for _ in range(10):
            P = random_module(rng)
            Q = random_module(rng)
            line = LineSpec.through(g(F(rng.randint(1, 8), 2), F(rng.randint(1, 8), 4)),
                                    [F(rng.randint(1, 8), 8), 1])
            left = barcode(restrict(direct_sum(P, Q), line))
            right = barcode(restrict(P, line)).union(barcode(restrict(Q, line)))
            assert left.as_counter() == right.as_counter()

    def test_pointwise_dimension_consistency(self):
        rng = random.Random(34)
        P = random_module(rng, summands=3)
        line = LineSpec.slope_one(g(3, 0))
        B = barcode(restrict(P, line))
        for _ in range(50):
            t = F(rng.randint(-20, 80), 4)
            assert B.count_containing(t) == P.hilbert(line.point_at(t))

    def test_slope_one_simplification_commutes(self):
        rng = random.Random(35)
        for _ in range(10):
            P = random_module(rng, summands=2)
            eps = F(rng.randint(0, 8), 4)
            for _ in range(10):
                anchor = g(F(rng.randint(0, 30), 2), F(rng.randint(0, 30), 2))
                line = LineSpec.slope_one(anchor)
                left = barcode(restrict(simplify(P, eps), line))
                right = simplify_barcode(barcode(restrict(P, line)), eps)
                assert left.as_counter() == right.as_counter()

    def test_minimal_generators_open_bars(self):
        from multipres.grades import push

        rng = random.Random(36)
        for _ in range(15):
            M = minimize(random_module(rng, summands=2))
            for gen in M.gens:
                line = LineSpec.slope_one(gen.grade)
                births = [b for b, d, m in barcode(restrict(M, line)).bars]
                assert push(line, gen.grade) in births
