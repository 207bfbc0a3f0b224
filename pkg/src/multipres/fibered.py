"""Restriction to positively sloped lines and 1-parameter barcodes.

Restricting a presentation to a line regrades every generator and relation
by its push parameter; the columns are untouched and stay homogeneous
because the push is order-preserving.  Barcodes then come out of the usual
left-to-right column reduction over F_p: a pivot pairs a relation with the
generator it kills, unpaired generators live forever, zero-length bars are
dropped.  Bars are half-open [b, d) multisets.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .grades import Grade, LineSpec, push, rat, rat_str
from .presentation import Generator, Presentation, Relation

INF = math.inf


@dataclass(frozen=True)
class Barcode:
    """Multiset of half-open intervals [birth, death), death possibly inf."""

    bars: tuple[tuple[Fraction, object, int], ...]  # (birth, death, multiplicity), sorted

    def __init__(self, bars):
        counts: Counter = Counter()
        if isinstance(bars, (Counter, dict)):
            items = bars.items()
        else:
            items = ((bar, 1) for bar in bars)
        for (b, d), m in items:
            b = rat(b)
            d = INF if d == INF else rat(d)
            if d < b:
                raise ValueError(f"bar death {d} before birth {b}")
            if m < 0:
                raise ValueError("negative multiplicity")
            if b != d and m:
                counts[(b, d)] += m
        ordered = tuple(sorted(((b, d, m) for (b, d), m in counts.items()),
                               key=lambda t: (t[0], t[1])))
        object.__setattr__(self, "bars", ordered)

    def as_counter(self) -> Counter:
        return Counter({(b, d): m for b, d, m in self.bars})

    def expand(self) -> list[tuple[Fraction, object]]:
        """Every bar repeated by multiplicity."""
        out = []
        for b, d, m in self.bars:
            out.extend([(b, d)] * m)
        return out

    def union(self, other: "Barcode") -> "Barcode":
        return Barcode(self.as_counter() + other.as_counter())

    def count_containing(self, t) -> int:
        tq = rat(t)
        return sum(m for b, d, m in self.bars if b <= tq and (d == INF or tq < d))

    def total(self) -> int:
        return sum(m for _, _, m in self.bars)

    def __str__(self) -> str:
        return "; ".join(f"[{rat_str(b)}, {rat_str(d)})x{m}" for b, d, m in self.bars) or "(empty)"


def restrict(P: Presentation, line: LineSpec) -> Presentation:
    """1-parameter presentation of the module along the line.

    Generators land at their push parameters, relations likewise, columns
    unchanged.  Bar endpoints are reported in the line's own parameter, with
    t = 0 at the base point on {x_n = 0}.
    """
    if line.n != P.n:
        raise ValueError(f"line dimension {line.n} != module dimension {P.n}")
    gens = tuple(Generator(g.label, Grade([push(line, g.grade)])) for g in P.gens)
    rels = tuple(Relation(Grade([push(line, r.grade)]), r.col) for r in P.rels)
    return Presentation(1, P.p, gens, rels)


def barcode(Q: Presentation) -> Barcode:
    """Barcode of a 1-parameter presentation by graded column reduction.

    Generators and relations are sorted by (parameter, input index);
    generators come first at ties, so a relation at a generator's own
    parameter kills it into a zero-length bar, which is dropped.  The bar
    multiset does not depend on the tie-breaking.
    """
    if Q.n != 1:
        raise ValueError("barcode extraction needs a 1-parameter presentation")
    gen_order = sorted(range(len(Q.gens)), key=lambda i: (Q.gens[i].grade.coords[0], i))
    row_of = {g: row for row, g in enumerate(gen_order)}
    rel_order = sorted(range(len(Q.rels)), key=lambda j: (Q.rels[j].grade.coords[0], j))
    columns = [{row_of[i]: c for i, c in Q.rels[j].col} for j in rel_order]
    pivots = kernels.reduce_pivots(columns, Q.p)
    bars: Counter = Counter()
    killed = set()
    for j, piv in zip(rel_order, pivots):
        if piv < 0:
            continue
        killed.add(piv)
        birth = Q.gens[gen_order[piv]].grade.coords[0]
        death = Q.rels[j].grade.coords[0]
        if death != birth:
            bars[(birth, death)] += 1
    for row, g in enumerate(gen_order):
        if row not in killed:
            bars[(Q.gens[g].grade.coords[0], INF)] += 1
    return Barcode(bars)


def simplify_barcode(B: Barcode, eps) -> Barcode:
    """Shorten every finite bar by eps from the top, dropping the short ones.

    [b, inf) is kept; [b, d) becomes [b, d - eps) when d - b > eps and is
    removed otherwise.
    """
    e = rat(eps)
    if e < 0:
        raise ValueError("eps must be nonnegative")
    out: Counter = Counter()
    for b, d, m in B.bars:
        if d == INF:
            out[(b, INF)] += m
        elif d - b > e:
            out[(b, d - e)] += m
    return Barcode(out)
