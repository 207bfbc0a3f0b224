"""Distances, certificates and the local-equivalence experiment.

The exact bottleneck distance between barcodes is solved by binary search
over the finite candidate-cost set with an augmenting-path feasibility
matching (infinite bars may only match infinite bars).  The matching
distance is approximated from below by sampling weighted lines, always
including the slope-1 lines through every Betti-grid point of both modules,
which witness diagonal translates exactly.

Interleaving witnesses are checked independently of how they were produced:
grade compatibility of every entry, relations mapped into the target's
relation submodule, and both 2-eps coherence identities, all modulo
relations via grade-bounded column reduction.  Rank conditions extracted
from the interleaving definition give certified lower bounds for the
interleaving distance.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import kernels
from .fibered import Barcode, barcode, restrict
from .functors import InterleavingWitness
from .grades import Grade, LineSpec, line_weight, rat, rat_str
from .presentation import Presentation, PresentationError, betti_and_grid

INF = math.inf


def thread_budget() -> int:
    """Value of MULTIPERS_THREADS (0 = auto); evaluation currently runs on one."""
    raw = os.environ.get("MULTIPERS_THREADS", "0")
    try:
        k = int(raw)
    except ValueError as exc:
        raise ValueError(f"MULTIPERS_THREADS must be an integer, got {raw!r}") from exc
    if k < 0:
        raise ValueError("MULTIPERS_THREADS must be nonnegative")
    return k if k else 1


# -- min-max assignment with deletions ------------------------------------------


def _feasible(cost, del_left, del_right, c) -> bool:
    """Perfect-matching feasibility at threshold c, diagonal slots included.

    Left side: items of A then one slot per item of B; right side: items of
    B then one slot per item of A.  An A item may take a B item (cost <= c)
    or its own slot (deletion <= c); slots pair with slots for free.
    """
    n1, n2 = len(del_left), len(del_right)
    size = n1 + n2
    adj: list[list[int]] = [[] for _ in range(size)]
    for i in range(n1):
        for j in range(n2):
            if cost[i][j] <= c:
                adj[i].append(j)
        if del_left[i] <= c:
            adj[i].append(n2 + i)
    for j in range(n2):
        if del_right[j] <= c:
            adj[n1 + j].append(j)
        for i in range(n1):
            adj[n1 + j].append(n2 + i)
    match_right = [-1] * size

    def augment(u: int, seen: list[bool]) -> bool:
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_right[v] < 0 or augment(match_right[v], seen):
                    match_right[v] = u
                    return True
        return False

    matched = 0
    for u in range(size):
        if augment(u, [False] * size):
            matched += 1
    return matched == size


def min_max_assignment(cost, del_left, del_right):
    """Least threshold admitting a partial matching; INF when none exists.

    cost[i][j], del_left[i], del_right[j] are exact rationals or INF.
    """
    cands = {c for row in cost for c in row if c != INF}
    cands |= {d for d in del_left if d != INF}
    cands |= {d for d in del_right if d != INF}
    cands.add(Fraction(0))
    ordered = sorted(cands)
    lo, hi = 0, len(ordered) - 1
    if not _feasible(cost, del_left, del_right, ordered[hi]):
        return INF
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(cost, del_left, del_right, ordered[mid]):
            hi = mid
        else:
            lo = mid + 1
    return ordered[lo]


def _bar_cost(x, y):
    (b1, d1), (b2, d2) = x, y
    if (d1 == INF) != (d2 == INF):
        return INF
    if d1 == INF:
        return abs(b1 - b2)
    return max(abs(b1 - b2), abs(d1 - d2))


def _bar_deletion(bar):
    b, d = bar
    return INF if d == INF else (d - b) / 2


def bottleneck(B1: Barcode, B2: Barcode):
    """Exact bottleneck distance between barcode multisets.

    Minimum over partial matchings of the max of matched l-infinity costs
    and unmatched half-lengths; infinite bars must match infinite bars, so
    mismatched infinite multiplicities give INF.
    """
    xs = B1.expand()
    ys = B2.expand()
    cost = [[_bar_cost(x, y) for y in ys] for x in xs]
    return min_max_assignment(cost, [_bar_deletion(x) for x in xs], [_bar_deletion(y) for y in ys])


def bottleneck_at_most(B1: Barcode, B2: Barcode, c) -> bool:
    """Single feasibility probe: is the bottleneck distance <= c?"""
    if c == INF:
        return True
    xs = B1.expand()
    ys = B2.expand()
    cost = [[_bar_cost(x, y) for y in ys] for x in xs]
    return _feasible(cost, [_bar_deletion(x) for x in xs], [_bar_deletion(y) for y in ys], c)


# -- line sampling ----------------------------------------------------------------


@dataclass(frozen=True)
class LineSample:
    lines: tuple[LineSpec, ...]
    strategy: str = "grid"
    bounds: tuple[Grade, Grade] | None = None

    def __post_init__(self):
        if not self.lines:
            raise ValueError("line sample is empty")


def _mediant_slopes(count: int) -> list[Fraction]:
    """Log-spaced rational slopes in [1/16, 16] by mediant subdivision.

    Subdivides until at least `count` slopes exist (slope 1 always present).
    """
    if count <= 1:
        return [Fraction(1)]
    slopes = [Fraction(1, 16), Fraction(1), Fraction(16)]
    while len(slopes) < count:
        refined = [slopes[0]]
        for a, b in zip(slopes, slopes[1:]):
            refined.append(Fraction(a.numerator + b.numerator, a.denominator + b.denominator))
            refined.append(b)
        slopes = refined
    return slopes


def _direction_for_slope(m: Fraction) -> tuple[Fraction, Fraction]:
    if m >= 1:
        return (Fraction(1) / m, Fraction(1))
    return (Fraction(1), m)


def _betti_points(P: Presentation) -> list[Grade]:
    data = betti_and_grid(P)
    return sorted(set(data.xi0) | set(data.xi1), key=lambda g: g.lex_key())


def sample_lines(P: Presentation, Q: Presentation, slopes: int = 64,
                 seed: int | None = None, extra: int = 0) -> LineSample:
    """Grid strategy sample anchored at both modules' Betti data.

    Slope-1 lines through every Betti-grid point of both modules are always
    present (they witness diagonal translates exactly).  For 2-parameter
    modules a mediant-spaced slope grid is crossed with offsets through
    every Betti point, midpoints between consecutive offsets, and the
    padded bounding-box edges.  A seed appends extra jittered lines
    reproducibly.
    """
    pts = sorted(set(_betti_points(P)) | set(_betti_points(Q)), key=lambda g: g.lex_key())
    n = P.n
    if not pts:
        pts = [Grade([0] * n)]
    anchors = set(pts)
    for M in (P, Q):
        grid = betti_and_grid(M).grid
        if 0 < grid.image_size() <= 64:
            anchors |= set(grid.points())
    lines: dict[tuple, LineSpec] = {}

    def add(line: LineSpec):
        lines.setdefault((line.direction, line.base.coords), line)

    for g in sorted(anchors, key=lambda x: x.lex_key()):
        add(LineSpec.slope_one(g))
    lo = Grade([min(p.coords[i] for p in pts) for i in range(n)])
    hi = Grade([max(p.coords[i] for p in pts) for i in range(n)])
    diam = lo.linf(hi)
    pad = diam if diam else Fraction(1)
    bounds = (Grade([c - pad for c in lo.coords]), Grade([c + pad for c in hi.coords]))
    if n == 2:
        for m in _mediant_slopes(slopes):
            d = _direction_for_slope(m)
            offsets = sorted({p.coords[0] - p.coords[1] * d[0] / d[1] for p in pts})
            mids = [(a + b) / 2 for a, b in zip(offsets, offsets[1:])]
            edges = [offsets[0] - pad, offsets[-1] + pad]
            for o in sorted(set(offsets) | set(mids) | set(edges)):
                add(LineSpec(d, Grade([o, 0])))
    if seed is not None and extra:
        import random

        rng = random.Random(seed)
        for _ in range(extra):
            d = [Fraction(rng.randint(1, 64), 64) for _ in range(n)]
            top = max(d)
            d = [c / top for c in d]
            anchor = pts[rng.randrange(len(pts))]
            jitter = Grade([c + Fraction(rng.randint(-64, 64), 128) for c in anchor.coords])
            add(LineSpec.through(jitter, d))
    ordered = tuple(lines[k] for k in sorted(lines))
    return LineSample(ordered, "grid", bounds)


@dataclass(frozen=True)
class DistanceReport:
    value: object  # exact rational or INF
    argmax_line: LineSpec | None
    kind: str  # exact | lower_bound | upper_bound
    certificate: InterleavingWitness | None = None

    def render(self) -> str:
        head = f"{rat_str(self.value)}"
        if self.value not in (INF, -INF):
            head += f" ({float(self.value):.6f})"
        out = f"{head} [{self.kind}]"
        if self.argmax_line is not None:
            out += f" argmax {self.argmax_line}"
        return out


def weighted_bottleneck(P: Presentation, Q: Presentation, line: LineSpec):
    """w(L) times the bottleneck of the two restricted barcodes."""
    return line_weight(line) * bottleneck(barcode(restrict(P, line)), barcode(restrict(Q, line)))


def _refine_near(line: LineSpec, pts: list[Grade]) -> list[LineSpec]:
    """Halved local slope/offset grid around a 2-d argmax line."""
    if line.n != 2:
        return []
    dx, dy = line.direction
    m = dy / dx
    out = []
    for factor in (Fraction(3, 4), Fraction(7, 8), Fraction(9, 8), Fraction(5, 4)):
        mm = m * factor
        if mm <= 0:
            continue
        d = _direction_for_slope(mm)
        for p in pts:
            out.append(LineSpec.through(p, d))
    base = line.base.coords[0]
    for shift in (Fraction(-1, 2), Fraction(-1, 4), Fraction(1, 4), Fraction(1, 2)):
        out.append(LineSpec(line.direction, Grade([base + shift, 0])))
    return out


def matching_distance(P: Presentation, Q: Presentation, sample: LineSample | None = None,
                      slopes: int = 16, adaptive_rounds: int = 0,
                      seed: int | None = None, extra: int = 0) -> DistanceReport:
    """Sampled matching distance: max over lines of w(L) * d_B of restrictions.

    A lower bound for the true supremum (and hence for the interleaving
    distance); adding lines never decreases it.  Adaptive rounds refine the
    sample around the current argmax.
    """
    if P.n != Q.n or P.p != Q.p:
        raise PresentationError("matching distance needs matching dimension and field")
    thread_budget()  # validates MULTIPERS_THREADS; line loop runs on one worker
    if sample is None:
        sample = sample_lines(P, Q, slopes=slopes, seed=seed, extra=extra)
    best = Fraction(0)
    arg = None
    for line in sample.lines:
        w = line_weight(line)
        b1 = barcode(restrict(P, line))
        b2 = barcode(restrict(Q, line))
        # cheap prune: a line cannot raise the max if its bottleneck stays
        # at or below best / w(L)
        if best and bottleneck_at_most(b1, b2, best / w):
            continue
        v = w * bottleneck(b1, b2)
        if v > best:
            best, arg = v, line
    if adaptive_rounds and arg is not None:
        pts = sorted(set(_betti_points(P)) | set(_betti_points(Q)), key=lambda g: g.lex_key())
        for _ in range(adaptive_rounds):
            improved = False
            for line in _refine_near(arg, pts):
                v = weighted_bottleneck(P, Q, line)
                if v > best:
                    best, arg, improved = v, line, True
            if not improved:
                break
    return DistanceReport(best, arg, "lower_bound")


# -- witness verification -----------------------------------------------------------


@dataclass(frozen=True)
class VerifyReport:
    accepted: bool
    epsilon: Fraction
    reason: str | None = None

    def render(self) -> str:
        if self.accepted:
            return f"accept at epsilon {rat_str(self.epsilon)}"
        return f"reject at epsilon {rat_str(self.epsilon)}: {self.reason}"


def _apply(matrix: dict[tuple[int, int], int], vec: dict[int, int], p: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for i, c in vec.items():
        for (i2, j), d in matrix.items():
            if i2 == i:
                v = (out.get(j, 0) + c * d) % p
                if v:
                    out[j] = v
                else:
                    out.pop(j, None)
    return out


def _in_relation_span(P: Presentation, vec: dict[int, int], grade: Grade) -> bool:
    cols = P.rel_columns_leq(grade)
    basis = kernels.echelonize(cols, P.p)
    return not kernels.residual(vec, basis, P.p)


def verify_interleaving(P: Presentation, Q: Presentation, w: InterleavingWitness) -> VerifyReport:
    """Accept iff w is a genuine epsilon-interleaving between P and Q.

    Checks, in order: entry sanity and grade compatibility, relations of
    each side landing in the other's relation submodule at the shifted
    grade, and both compositions agreeing with the 2-eps internal
    translation modulo relations.  The report names the first failure.
    """
    eps = rat(w.epsilon)
    if eps < 0:
        return VerifyReport(False, eps, "negative epsilon")
    if P.n != Q.n or P.p != Q.p:
        return VerifyReport(False, eps, "dimension or field mismatch")
    fd, gd = w.f_dict(), w.g_dict()
    for name, mat, src, dst in (("f", fd, P, Q), ("g", gd, Q, P)):
        for (i, j), c in mat.items():
            if not (0 <= i < len(src.gens) and 0 <= j < len(dst.gens)):
                return VerifyReport(False, eps, f"{name} entry ({i},{j}) out of range")
            if not 0 < c < P.p:
                return VerifyReport(False, eps, f"{name} coefficient {c} out of range")
            if not dst.gens[j].grade.leq(src.gens[i].grade.translate(eps)):
                return VerifyReport(
                    False, eps,
                    f"{name} entry {src.gens[i].label} -> {dst.gens[j].label} violates grades",
                )
    for name, mat, src, dst in (("f", fd, P, Q), ("g", gd, Q, P)):
        for k, r in enumerate(src.rels):
            image = _apply(mat, r.as_dict(), P.p)
            if image and not _in_relation_span(dst, image, r.grade.translate(eps)):
                return VerifyReport(
                    False, eps,
                    f"{name} sends relation {k} (grade {r.grade}) outside the relation submodule",
                )
    for name, first, second, side in (("g.f", fd, gd, P), ("f.g", gd, fd, Q)):
        for i, gen in enumerate(side.gens):
            vec = _apply(second, _apply(first, {i: 1}, P.p), P.p)
            vec[i] = (vec.get(i, 0) - 1) % P.p
            if not vec[i]:
                del vec[i]
            if vec and not _in_relation_span(side, vec, gen.grade.translate(2 * eps)):
                return VerifyReport(
                    False, eps,
                    f"coherence {name} fails at generator {gen.label}",
                )
    return VerifyReport(True, eps)


# -- rank-condition lower bound ------------------------------------------------------


def _default_probes(P: Presentation, Q: Presentation) -> list[Grade]:
    pts = set(_betti_points(P)) | set(_betti_points(Q))
    grids = [betti_and_grid(P).grid, betti_and_grid(Q).grid]
    for grid in grids:
        if 0 < grid.image_size() <= 128:
            pts |= set(grid.points())
    return sorted(pts, key=lambda g: g.lex_key())


def _rank_violation(P: Presentation, Q: Presentation, probes: Sequence[Grade], eps) -> bool:
    for a in probes:
        up = a.translate(2 * eps)
        mid = a.translate(eps)
        if P.rank_between(a, up) > Q.hilbert(mid):
            return True
        if Q.rank_between(a, up) > P.hilbert(mid):
            return True
    return False


def rank_lower_bound(P: Presentation, Q: Presentation,
                     probes: Iterable[Grade] | None = None) -> DistanceReport:
    """Certified interleaving-distance lower bound from rank conditions.

    An eps-interleaving forces rank(M_a -> M_{a+2eps}) <= dim N_{a+eps} and
    symmetrically; the bound is the largest eps0, from the halved and whole
    coordinate differences of both Betti grids, below which some probe
    violates that condition everywhere.
    """
    if P.n != Q.n or P.p != Q.p:
        raise PresentationError("rank bound needs matching dimension and field")
    probe_list = list(probes) if probes is not None else _default_probes(P, Q)
    if not probe_list:
        return DistanceReport(Fraction(0), None, "lower_bound")
    axes_vals: list[set] = [set() for _ in range(P.n)]
    for M in (P, Q):
        grid = betti_and_grid(M).grid
        for i, axis in enumerate(grid.axes):
            axes_vals[i] |= set(axis)
    for a in probe_list:
        for i, c in enumerate(a.coords):
            axes_vals[i].add(c)
    diffs = {Fraction(0)}
    for vals in axes_vals:
        ordered = sorted(vals)
        for i, v in enumerate(ordered):
            for w_ in ordered[i + 1:]:
                d = w_ - v
                diffs.add(d)
                diffs.add(d / 2)
    cands = sorted(diffs)
    prev = Fraction(0)
    if not _rank_violation(P, Q, probe_list, Fraction(0)):
        return DistanceReport(Fraction(0), None, "lower_bound")
    for c in cands[1:]:
        mid = (prev + c) / 2
        if not _rank_violation(P, Q, probe_list, mid):
            return DistanceReport(prev, None, "lower_bound")
        if not _rank_violation(P, Q, probe_list, c):
            return DistanceReport(c, None, "lower_bound")
        prev = c
    beyond = cands[-1] + 1 if cands else Fraction(1)
    if _rank_violation(P, Q, probe_list, beyond):
        return DistanceReport(INF, None, "lower_bound")
    return DistanceReport(cands[-1], None, "lower_bound")


# -- intrinsic-metric estimate and the local equivalence experiment -------------------


def path_length_d0(path: Sequence[Presentation], sample: LineSample | None = None,
                   slopes: int = 16) -> Fraction:
    """Sum of sampled matching distances over consecutive waypoints.

    A lower bound for the d0-length of any continuous path through them.
    """
    if len(path) < 2:
        raise ValueError("path length needs at least two modules")
    total = Fraction(0)
    for A, B in zip(path, path[1:]):
        total += matching_distance(A, B, sample=sample, slopes=slopes).value
    return total


KAPPA_MAX = Fraction(1, 34)


@dataclass(frozen=True)
class LocalEquivalenceReport:
    kappa: Fraction
    c_m: object
    eps_lower: object
    eps_upper: object
    eps_exact: object  # rational or None
    hypothesis_ok: bool
    hypothesis_note: str
    d0: object
    threshold: object  # kappa * eps-hat, or None
    strict_holds: object  # bool or None
    nonstrict_holds: object
    status: str  # PASS | FAIL | HYPOTHESIS-FAIL

    def render(self) -> str:
        def fmt(x):
            if x is None:
                return "unknown"
            if x in (INF, -INF):
                return rat_str(x)
            return f"{rat_str(x)} ({float(x):.6f})"

        lines = [
            f"kappa              {fmt(self.kappa)}",
            f"controlling const  {fmt(self.c_m)}",
            f"d_I lower bound    {fmt(self.eps_lower)}",
            f"d_I upper bound    {fmt(self.eps_upper)}",
            f"d_I exact          {fmt(self.eps_exact)}",
            f"hypothesis         {'holds' if self.hypothesis_ok else 'FAILS'} ({self.hypothesis_note})",
            f"d0 sampled         {fmt(self.d0)}",
            f"threshold kappa*e  {fmt(self.threshold)}",
            f"d0 >  kappa*eps    {self.strict_holds}",
            f"d0 >= kappa*eps    {self.nonstrict_holds}",
            f"status             {self.status}",
        ]
        return "\n".join(lines)


def local_equivalence_experiment(M: Presentation, N: Presentation, kappa, *,
                                 certified_eps=None, witness: InterleavingWitness | None = None,
                                 sample: LineSample | None = None, slopes: int = 16) -> LocalEquivalenceReport:
    """Check d0(M, N) > kappa * eps under eps < c_M / (2 (34 kappa + 1)).

    eps-hat is exact when a certified value is supplied (and consistent with
    the verifier), otherwise the [rank lower bound, witness upper bound]
    interval is used; a hypothesis failure is reported, never silently
    passed.  The sampled d0 under-approximates the supremum, so PASS is
    sound while FAIL only means the sampling did not find a witness line.
    """
    k = rat(kappa)
    if not (0 <= k < KAPPA_MAX):
        raise ValueError(f"kappa must lie in [0, 1/34), got {k}")
    c_m = betti_and_grid(M).c
    lower = rank_lower_bound(M, N).value
    upper = None
    if witness is not None:
        check = verify_interleaving(M, N, witness)
        if check.accepted:
            upper = rat(witness.epsilon)
    exact = None
    if certified_eps is not None:
        exact = rat(certified_eps)
    elif upper is not None and upper == lower:
        exact = upper
    eps_hat = exact if exact is not None else upper
    if eps_hat is None:
        hyp_ok = False
        note = "no certified interleaving estimate; inequality not claimed for this pair"
    else:
        bound = c_m / (2 * (34 * k + 1)) if c_m != INF else INF
        hyp_ok = eps_hat < bound
        note = (
            f"eps {rat_str(eps_hat)} vs c_M/(2(34k+1)) {rat_str(bound)}"
            if c_m != INF else f"c_M infinite, any eps qualifies"
        )
    d0 = matching_distance(M, N, sample=sample, slopes=slopes).value
    threshold = None if eps_hat is None else k * eps_hat
    strict = None if threshold is None else d0 > threshold
    nonstrict = None if threshold is None else d0 >= threshold
    if not hyp_ok:
        status = "HYPOTHESIS-FAIL"
    else:
        status = "PASS" if strict else "FAIL"
    return LocalEquivalenceReport(
        kappa=k, c_m=c_m, eps_lower=lower, eps_upper=upper, eps_exact=exact,
        hypothesis_ok=hyp_ok, hypothesis_note=note, d0=d0, threshold=threshold,
        strict_holds=strict, nonstrict_holds=nonstrict, status=status,
    )
