import random

import pytest

from multipres import kernels

from oracles import dense_rank_mod_p


def random_columns(rng, nrows, ncols, p):
    cols = []
    for _ in range(ncols):
        col = {}
        for _ in range(rng.randint(0, nrows)):
            col[rng.randrange(nrows)] = rng.randint(1, p - 1)
        cols.append(col)
    return cols


def to_dense_rows(cols, nrows):
    rows = []
    for col in cols:
        row = [0] * nrows
        for i, c in col.items():
            row[i] = c
        rows.append(row)
    return rows


@pytest.mark.parametrize("name", sorted(kernels.backends()))
@pytest.mark.parametrize("p", [2, 3, 5, 13])
def test_rank_against_dense_oracle(name, p):
    impl = kernels.backends()[name]
    rng = random.Random(101)
    for _ in range(30):
        nrows = rng.randint(1, 12)
        cols = random_columns(rng, nrows, rng.randint(0, 16), p)
        expected = dense_rank_mod_p(to_dense_rows(cols, nrows), p) if cols else 0
        assert impl.rank(cols, p) == expected
        pivots = impl.reduce_pivots(cols, p)
        assert sum(1 for x in pivots if x >= 0) == expected


@pytest.mark.parametrize("p", [2, 7])
def test_backends_agree(p):
    backs = kernels.backends()
    if len(backs) < 2:
        pytest.skip("only one backend importable")
    rng = random.Random(102)
    for _ in range(40):
        nrows = rng.randint(1, 10)
        cols = random_columns(rng, nrows, rng.randint(0, 14), p)
        results = {name: impl.reduce_pivots(cols, p) for name, impl in backs.items()}
        vals = list(results.values())
        assert all(v == vals[0] for v in vals)
        vecs = random_columns(rng, nrows, 3, p)
        for vec in vecs:
            residuals = {
                name: impl.residual(vec, impl.echelonize(cols, p), p)
                for name, impl in backs.items()
            }
            empties = {name: not r for name, r in residuals.items()}
            assert len(set(empties.values())) == 1


@pytest.mark.parametrize("name", sorted(kernels.backends()))
def test_membership_semantics(name):
    impl = kernels.backends()[name]
    cols = [{0: 1, 1: 1}, {1: 1}]
    basis = impl.echelonize(cols, 2)
    assert not impl.residual({0: 1}, basis, 2)
    assert impl.residual({2: 1}, basis, 2)
    assert not impl.residual({}, basis, 2)
