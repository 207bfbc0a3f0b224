"""Finitely presented persistence modules over a prime field.

A Presentation is a graded generator set X plus homogeneous relation columns
R, standing for the module Free[X] / <R>.  Coefficients live in F_p (default
p = 2, any prime accepted) and are stored sparsely; grades are exact
rationals.  Homogeneity means every relation dominates the grades of the
generators it touches, so the monomial carrying each entry exists.

The operations here are construction and validation, minimization by
grade-ordered column reduction with generator/relation cancellation, Betti
multisets with their grid and controlling constant, the pointwise Hilbert
function, internal-morphism ranks, direct sums and grade shifts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import kernels
from .grades import (
    Grade,
    GridFunction,
    controlling_constant,
    grid_from_grades,
    rat,
)


class PresentationError(ValueError):
    """Structurally invalid presentation data."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Generator:
    label: str
    grade: Grade


@dataclass(frozen=True)
class Relation:
    """A homogeneous relation: its grade and a sparse column over generators."""

    grade: Grade
    col: tuple[tuple[int, int], ...]  # (generator index, coefficient mod p), sorted

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.col)

    def as_dict(self) -> dict[int, int]:
        return dict(self.col)


def make_column(entries: dict[int, int] | Iterable[tuple[int, int]], p: int) -> tuple[tuple[int, int], ...]:
    """Canonicalize a column: reduce mod p, drop zeros, sort by index."""
    d: dict[int, int] = {}
    items = entries.items() if isinstance(entries, dict) else entries
    for i, c in items:
        v = (d.get(i, 0) + c) % p
        if v:
            d[i] = v
        else:
            d.pop(i, None)
    return tuple(sorted(d.items()))


@dataclass(frozen=True)
class Presentation:
    n: int
    p: int
    gens: tuple[Generator, ...]
    rels: tuple[Relation, ...]

    def __post_init__(self):
        if self.n < 1:
            raise PresentationError("parameter count must be at least 1")
        if not _is_prime(self.p):
            raise PresentationError(f"field characteristic {self.p} is not prime")
        for g in self.gens:
            if g.grade.n != self.n:
                raise PresentationError(f"generator {g.label!r} has dimension {g.grade.n}, expected {self.n}")
        for k, r in enumerate(self.rels):
            if r.grade.n != self.n:
                raise PresentationError(f"relation {k} has dimension {r.grade.n}, expected {self.n}")
            for i, c in r.col:
                if not 0 <= i < len(self.gens):
                    raise PresentationError(f"relation {k} references generator index {i}")
                if not 0 < c < self.p:
                    raise PresentationError(f"relation {k} coefficient {c} out of range for F_{self.p}")
                if not self.gens[i].grade.leq(r.grade):
                    raise PresentationError(
                        f"relation {k} at grade ({r.grade}) lies below generator "
                        f"{self.gens[i].label!r} at ({self.gens[i].grade})"
                    )

    # -- pointwise linear algebra -------------------------------------------

    def gen_indices_leq(self, a: Grade) -> list[int]:
        return [i for i, g in enumerate(self.gens) if g.grade.leq(a)]

    def rel_columns_leq(self, a: Grade) -> list[dict[int, int]]:
        return [r.as_dict() for r in self.rels if r.grade.leq(a)]

    def hilbert(self, a: Grade) -> int:
        """dim M_a = #{generators <= a} - rank of the relation columns <= a."""
        if a.n != self.n:
            raise PresentationError(f"grade dimension {a.n} != {self.n}")
        k = len(self.gen_indices_leq(a))
        if k == 0:
            return 0
        return k - kernels.rank(self.rel_columns_leq(a), self.p)

    def rank_between(self, a: Grade, b: Grade) -> int:
        """Rank of the internal morphism M_a -> M_b for a <= b.

        Computed as rank([R_<=b | E_a]) - rank(R_<=b) where E_a is one unit
        column per generator born by a.
        """
        if not a.leq(b):
            raise PresentationError("rank_between needs a <= b")
        cols = self.rel_columns_leq(b)
        base = kernels.rank(cols, self.p)
        unit = [{i: 1} for i in self.gen_indices_leq(a)]
        return kernels.rank(cols + unit, self.p) - base

    # -- derived data --------------------------------------------------------

    def labels(self) -> list[str]:
        return [g.label for g in self.gens]

    def betti_grades(self) -> list[Grade]:
        return [g.grade for g in self.gens] + [r.grade for r in self.rels]


@dataclass(frozen=True)
class BettiData:
    """Betti multisets of a minimal presentation with their grid."""

    xi0: Counter
    xi1: Counter
    grid: GridFunction
    c: object  # exact rational, or math.inf

    @property
    def partial_complexity(self) -> int:
        """|xi0| + |xi1| with multiplicity (degrees 0 and 1 only)."""
        return sum(self.xi0.values()) + sum(self.xi1.values())


# -- constructors -------------------------------------------------------------


def free(grades: Sequence[Grade], p: int = 2, labels: Sequence[str] | None = None) -> Presentation:
    if labels is None:
        labels = [f"g{i}" for i in range(len(grades))]
    n = grades[0].n if grades else 1
    return Presentation(n, p, tuple(Generator(l, g) for l, g in zip(labels, grades)), ())


def zero_module(n: int = 2, p: int = 2) -> Presentation:
    return Presentation(n, p, (), ())


def _is_antichain(points: Sequence[Grade]) -> bool:
    for i, a in enumerate(points):
        for b in points[i + 1:]:
            if a.leq(b) or b.leq(a):
                return False
    return True


def staircase_interval(births: Sequence[Grade], deaths: Sequence[Grade] = (), p: int = 2) -> Presentation:
    """Presentation of the 2-d interval up(births) minus up(deaths).

    Generators sit at the birth corners; adjacent birth pairs get a merge
    relation at their join; each death bound contributes one relation on a
    generator below it.  Both corner sets must be antichains and every death
    must dominate some birth.
    """
    births = list(births)
    deaths = list(deaths)
    if not births:
        raise PresentationError("staircase needs at least one birth corner")
    if any(g.n != 2 for g in births + deaths):
        raise PresentationError("staircase intervals are 2-parameter only")
    if not _is_antichain(births):
        raise PresentationError("birth corners must form an antichain")
    if not _is_antichain(deaths):
        raise PresentationError("death bounds must form an antichain")
    order = sorted(range(len(births)), key=lambda i: (births[i].coords[0], births[i].coords[1]))
    births = [births[i] for i in order]
    gens = tuple(Generator(f"b{i}", g) for i, g in enumerate(births))
    rels: list[Relation] = []
    minus_one = p - 1
    for i in range(len(births) - 1):
        j = births[i].join(births[i + 1])
        rels.append(Relation(j, make_column({i: 1, i + 1: minus_one}, p)))
    for d in deaths:
        under = [i for i, g in enumerate(births) if g.leq(d)]
        if not under:
            raise PresentationError(f"death bound ({d}) dominates no birth corner")
        rels.append(Relation(d, make_column({under[0]: 1}, p)))
    return Presentation(2, p, gens, tuple(rels))


def construct(kind: str, **data) -> Presentation:
    """Dispatch for the three construction modes: free, staircase_interval, explicit."""
    if kind == "free":
        return free(**data)
    if kind == "staircase_interval":
        return staircase_interval(**data)
    if kind == "explicit":
        return Presentation(**data)
    raise PresentationError(f"unknown construction kind {kind!r}")


# -- structural operations -----------------------------------------------------


def shift(P: Presentation, v) -> Presentation:
    """Translate every generator and relation grade by +v (vector or scalar)."""
    if isinstance(v, (int, str, Fraction)):
        vec = [rat(v)] * P.n
    else:
        vec = [rat(c) for c in v]
    gens = tuple(Generator(g.label, g.grade.plus(vec)) for g in P.gens)
    rels = tuple(Relation(r.grade.plus(vec), r.col) for r in P.rels)
    return Presentation(P.n, P.p, gens, rels)


def direct_sum(P: Presentation, Q: Presentation) -> Presentation:
    if P.n != Q.n or P.p != Q.p:
        raise PresentationError("direct sum needs matching dimension and field")
    taken = set(P.labels())
    def qlabel(l: str) -> str:
        while l in taken:
            l = f"r.{l}"
        taken.add(l)
        return l
    gens = P.gens + tuple(Generator(qlabel(g.label), g.grade) for g in Q.gens)
    off = len(P.gens)
    rels = P.rels + tuple(
        Relation(r.grade, tuple((i + off, c) for i, c in r.col)) for r in Q.rels
    )
    return Presentation(P.n, P.p, gens, rels)


# -- minimization ---------------------------------------------------------------


def _reduction_pass(gens, rels, p):
    """One grade-ordered reduction sweep; returns (new rels, dropped-any flag).

    Relations are visited in (lexicographic grade, input index) order and
    reduced against already-kept relations of dominated grade, which are the
    only ones that may act on them through monomial-shifted column ops.
    """
    order = sorted(range(len(rels)), key=lambda i: (rels[i][0].lex_key(), i))
    kept: list[tuple[Grade, dict[int, int]]] = []
    dropped = False
    for i in order:
        grade, col = rels[i]
        usable = [c for (g2, c) in kept if g2.leq(grade)]
        basis = kernels.echelonize(usable, p)
        res = kernels.residual(col, basis, p)
        if res:
            kept.append((grade, res))
        else:
            dropped = True
    return kept, dropped


def _find_cancellation(gens, rels):
    for j, (grade, col) in enumerate(rels):
        hits = [i for i in sorted(col) if gens[i].grade == grade]
        if hits:
            return j, hits[0]
    return None


def _cancel(gens, rels, j, b, p):
    """Remove relation j and generator b, substituting b's expression everywhere."""
    grade, col = rels[j]
    c = col[b]
    cinv = pow(c, p - 2, p)
    rest = {i: v for i, v in col.items() if i != b}
    out = []
    for k, (g2, col2) in enumerate(rels):
        if k == j:
            continue
        d = col2.get(b)
        if d is None:
            new = dict(col2)
        else:
            new = {i: v for i, v in col2.items() if i != b}
            for i, v in rest.items():
                w = (new.get(i, 0) - d * cinv * v) % p
                if w:
                    new[i] = w
                else:
                    new.pop(i, None)
        out.append((g2, new))
    new_gens = [g for i, g in enumerate(gens) if i != b]
    remap = {i: (i if i < b else i - 1) for i in range(len(gens)) if i != b}
    out = [(g2, {remap[i]: v for i, v in col2.items()}) for g2, col2 in out]
    return new_gens, out


def minimize(P: Presentation) -> Presentation:
    """Minimal presentation of the same module.

    Alternates grade-ordered column reduction (dropping dependent relations)
    with generator/relation cancellation wherever a relation carries a unit
    pivot on a generator of equal grade, until neither applies.  The Hilbert
    function is preserved at every grade.
    """
    gens = list(P.gens)
    rels = [(r.grade, r.as_dict()) for r in P.rels]
    while True:
        rels, _ = _reduction_pass(gens, rels, P.p)
        hit = _find_cancellation(gens, rels)
        if hit is None:
            break
        j, b = hit
        gens, rels = _cancel(gens, rels, j, b, P.p)
    return Presentation(
        P.n,
        P.p,
        tuple(gens),
        tuple(Relation(g, make_column(col, P.p)) for g, col in rels),
    )


def betti_and_grid(P: Presentation) -> BettiData:
    """Betti multisets xi0/xi1 from a minimal presentation, plus grid and c."""
    M = minimize(P)
    xi0 = Counter(g.grade for g in M.gens)
    xi1 = Counter(r.grade for r in M.rels)
    grid = grid_from_grades(set(xi0) | set(xi1)) if (xi0 or xi1) else GridFunction([[]] * P.n)
    return BettiData(xi0, xi1, grid, controlling_constant(grid))


def homogeneity_violations(n, p, gens, rels) -> list[int]:
    """Indices of relations whose grade fails to dominate their support."""
    bad = []
    for k, (grade, col) in enumerate(rels):
        for i, _ in col:
            if not gens[i].grade.leq(grade):
                bad.append(k)
                break
    return bad
