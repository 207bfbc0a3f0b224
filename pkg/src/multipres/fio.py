"""Text formats: FPRES presentations, BLOCKS, barcodes, witnesses, joints.

All formats are line-based with '#' comments and blank lines ignored, one
datum per line, rationals as 'num/den' (plain integer when den = 1).
Parsers report the offending line number; serializers round-trip bit-exact
through their own grammar.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .blocks import Block
from .fibered import Barcode
from .functors import InterleavingWitness, JointPresentation
from .grades import Grade, rat, rat_str
from .presentation import Generator, Presentation, PresentationError, Relation

INF = math.inf


class FormatError(ValueError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_rational(tok: str, lineno: int = 0):
    if tok == "inf":
        return INF
    if tok == "-inf":
        return -INF
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(lineno, f"bad rational {tok!r}") from exc


def _lines(text: str):
    """Meaningful lines as (lineno, tokens)."""
    for k, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield k, body.split()


class _Cursor:
    def __init__(self, text: str):
        self.items = list(_lines(text))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self, what: str):
        if self.pos >= len(self.items):
            raise FormatError(self.items[-1][0] if self.items else 1, f"unexpected end of file, wanted {what}")
        item = self.items[self.pos]
        self.pos += 1
        return item


# -- FPRES -------------------------------------------------------------------------


def serialize_fpres(P: Presentation) -> str:
    out = ["fpres 1", f"field {P.p}", f"params {P.n}", f"generators {len(P.gens)}"]
    for g in P.gens:
        out.append(f"g {g.label} {g.grade}")
    out.append(f"relations {len(P.rels)}")
    for r in P.rels:
        entries = " ".join(f"{c}:{i}" for i, c in r.col)
        out.append(f"r {r.grade} ; {entries}".rstrip())
    return "\n".join(out) + "\n"


def _parse_header(cur: _Cursor, key: str, what: str) -> tuple[int, list[str]]:
    lineno, toks = cur.next(what)
    if toks[0] != key:
        raise FormatError(lineno, f"expected {what}, got {' '.join(toks)!r}")
    return lineno, toks


def _parse_fpres_block(cur: _Cursor, rel_gen_limit: int | None = None):
    """One fpres block; relation gen-indices may exceed the local generator
    count up to rel_gen_limit (used by joint files)."""
    lineno, toks = _parse_header(cur, "fpres", "'fpres 1' header")
    if toks[1:] != ["1"]:
        raise FormatError(lineno, "unsupported fpres version")
    lineno, toks = _parse_header(cur, "field", "'field <p>'")
    p = int(toks[1])
    lineno, toks = _parse_header(cur, "params", "'params <n>'")
    n = int(toks[1])
    lineno, toks = _parse_header(cur, "generators", "'generators <k>'")
    k = int(toks[1])
    gens = []
    for _ in range(k):
        lineno, toks = cur.next("generator line")
        if toks[0] != "g" or len(toks) != 2 + n:
            raise FormatError(lineno, f"expected 'g <label> <{n} rationals>'")
        grade = Grade([parse_rational(t, lineno) for t in toks[2:]])
        gens.append(Generator(toks[1], grade))
    lineno, toks = _parse_header(cur, "relations", "'relations <m>'")
    m = int(toks[1])
    limit = rel_gen_limit if rel_gen_limit is not None else k
    rels = []
    for idx in range(m):
        lineno, toks = cur.next("relation line")
        if toks[0] != "r" or ";" not in toks:
            raise FormatError(lineno, "expected 'r <rationals> ; <coeff>:<gen-index> ...'")
        sep = toks.index(";")
        if sep != 1 + n:
            raise FormatError(lineno, f"relation needs {n} grade coordinates before ';'")
        grade = Grade([parse_rational(t, lineno) for t in toks[1:sep]])
        col = []
        for ent in toks[sep + 1:]:
            try:
                c_s, i_s = ent.split(":")
                c, i = int(c_s), int(i_s)
            except ValueError as exc:
                raise FormatError(lineno, f"bad column entry {ent!r}") from exc
            if not 0 <= i < limit:
                raise FormatError(lineno, f"relation {idx}: generator index {i} out of range")
            if not 0 <= c < p:
                raise FormatError(lineno, f"relation {idx}: coefficient {c} out of range for F_{p}")
            if c:
                col.append((i, c))
        rels.append((lineno, idx, Relation(grade, tuple(sorted(col)))))
    return n, p, gens, rels


def parse_fpres(text: str) -> Presentation:
    cur = _Cursor(text)
    n, p, gens, rels = _parse_fpres_block(cur)
    left = cur.peek()
    if left is not None:
        raise FormatError(left[0], f"trailing content {' '.join(left[1])!r}")
    for lineno, idx, r in rels:
        for i, _ in r.col:
            if not gens[i].grade.leq(r.grade):
                raise FormatError(lineno, f"relation {idx} lies below generator {gens[i].label!r}")
    try:
        return Presentation(n, p, tuple(gens), tuple(r for _, _, r in rels))
    except PresentationError as exc:
        raise FormatError(1, str(exc)) from exc


# -- joint presentations -------------------------------------------------------------


def serialize_joint(J: JointPresentation) -> str:
    """An 'epsilon' header then two fpres blocks; relation columns index the
    concatenation of both generator lists (first block's generators first)."""
    out = [f"epsilon {rat_str(J.epsilon)}"]
    for gens, rels in ((J.x_m, J.r_m), (J.x_n, J.r_n)):
        out += ["fpres 1", f"field {J.p}", f"params {J.n}", f"generators {len(gens)}"]
        for g in gens:
            out.append(f"g {g.label} {g.grade}")
        out.append(f"relations {len(rels)}")
        for r in rels:
            entries = " ".join(f"{c}:{i}" for i, c in r.col)
            out.append(f"r {r.grade} ; {entries}".rstrip())
    return "\n".join(out) + "\n"


def parse_joint(text: str) -> JointPresentation:
    cur = _Cursor(text)
    lineno, toks = _parse_header(cur, "epsilon", "'epsilon <rational>' header")
    eps = parse_rational(toks[1], lineno)
    if eps in (INF, -INF):
        raise FormatError(lineno, "epsilon must be finite")
    unbounded = 1 << 30
    n1, p1, gens_m, rels_m = _parse_fpres_block(cur, rel_gen_limit=unbounded)
    n2, p2, gens_n, rels_n = _parse_fpres_block(cur, rel_gen_limit=unbounded)
    if (n1, p1) != (n2, p2):
        raise FormatError(1, "joint blocks disagree on field or parameter count")
    left = cur.peek()
    if left is not None:
        raise FormatError(left[0], f"trailing content {' '.join(left[1])!r}")
    total = len(gens_m) + len(gens_n)
    for lineno_, idx, r in list(rels_m) + list(rels_n):
        for i, _ in r.col:
            if i >= total:
                raise FormatError(lineno_, f"relation {idx}: generator index {i} out of range")
    try:
        return JointPresentation(
            n1, p1, rat(eps),
            tuple(gens_m), tuple(gens_n),
            tuple(r for _, _, r in rels_m), tuple(r for _, _, r in rels_n),
        )
    except PresentationError as exc:
        raise FormatError(1, str(exc)) from exc


# -- barcodes ------------------------------------------------------------------------


def serialize_barcode(B: Barcode) -> str:
    out = [f"bar {rat_str(b)} {rat_str(d)} {m}" for b, d, m in B.bars]
    return "\n".join(out) + ("\n" if out else "")


def parse_barcode(text: str) -> Barcode:
    from collections import Counter

    bars: Counter = Counter()
    for lineno, toks in _lines(text):
        if toks[0] != "bar" or len(toks) != 4:
            raise FormatError(lineno, "expected 'bar <birth> <death|inf> <multiplicity>'")
        b = parse_rational(toks[1], lineno)
        d = parse_rational(toks[2], lineno)
        try:
            m = int(toks[3])
        except ValueError as exc:
            raise FormatError(lineno, f"bad multiplicity {toks[3]!r}") from exc
        if b == INF or b == -INF or d == -INF:
            raise FormatError(lineno, "births must be finite and deaths above -inf")
        if d != INF and d < b:
            raise FormatError(lineno, "bar dies before it is born")
        if m < 0:
            raise FormatError(lineno, "negative multiplicity")
        bars[(b, d)] += m
    return Barcode(bars)


# -- blocks --------------------------------------------------------------------------


def serialize_blocks(blocks: list[Block]) -> str:
    out = ["blocks 1"] + [f"blk {b.kind} {rat_str(b.a)} {rat_str(b.b)}" for b in blocks]
    return "\n".join(out) + "\n"


def parse_blocks(text: str) -> list[Block]:
    cur = _Cursor(text)
    lineno, toks = _parse_header(cur, "blocks", "'blocks 1' header")
    if toks[1:] != ["1"]:
        raise FormatError(lineno, "unsupported blocks version")
    out = []
    while cur.peek() is not None:
        lineno, toks = cur.next("block line")
        if toks[0] != "blk" or len(toks) != 4:
            raise FormatError(lineno, "expected 'blk <kind> <a> <b|inf>'")
        a = parse_rational(toks[2], lineno)
        b = parse_rational(toks[3], lineno)
        try:
            out.append(Block(toks[1], a, b))
        except ValueError as exc:
            raise FormatError(lineno, str(exc)) from exc
    return out


# -- witnesses -----------------------------------------------------------------------


def serialize_witness(w: InterleavingWitness, P: Presentation, Q: Presentation) -> str:
    out = [f"witness {rat_str(w.epsilon)}"]
    fd, gd = w.f_dict(), w.g_dict()
    for i, g in enumerate(P.gens):
        entries = " ".join(
            f"{c}:{Q.gens[j].label}" for (i2, j), c in sorted(fd.items()) if i2 == i
        )
        out.append(f"f {g.label} -> {entries}".rstrip())
    for j, g in enumerate(Q.gens):
        entries = " ".join(
            f"{c}:{P.gens[i].label}" for (j2, i), c in sorted(gd.items()) if j2 == j
        )
        out.append(f"g {g.label} -> {entries}".rstrip())
    return "\n".join(out) + "\n"


def parse_witness(text: str, P: Presentation, Q: Presentation) -> InterleavingWitness:
    p_index = {g.label: i for i, g in enumerate(P.gens)}
    q_index = {g.label: i for i, g in enumerate(Q.gens)}
    if len(p_index) != len(P.gens) or len(q_index) != len(Q.gens):
        raise FormatError(1, "witness files need unique generator labels on both sides")
    cur = _Cursor(text)
    lineno, toks = _parse_header(cur, "witness", "'witness <epsilon>' header")
    eps = parse_rational(toks[1], lineno)
    if eps in (INF, -INF):
        raise FormatError(lineno, "witness epsilon must be finite")
    f: dict[tuple[int, int], int] = {}
    g: dict[tuple[int, int], int] = {}
    while cur.peek() is not None:
        lineno, toks = cur.next("witness row")
        if toks[0] not in ("f", "g") or len(toks) < 3 or toks[2] != "->":
            raise FormatError(lineno, "expected 'f|g <label> -> <coeff>:<label> ...'")
        src_index, dst_index, store = (p_index, q_index, f) if toks[0] == "f" else (q_index, p_index, g)
        if toks[1] not in src_index:
            raise FormatError(lineno, f"unknown source generator {toks[1]!r}")
        i = src_index[toks[1]]
        for ent in toks[3:]:
            try:
                c_s, label = ent.split(":", 1)
                c = int(c_s)
            except ValueError as exc:
                raise FormatError(lineno, f"bad entry {ent!r}") from exc
            if label not in dst_index:
                raise FormatError(lineno, f"unknown target generator {label!r}")
            store[(i, dst_index[label])] = c
    return InterleavingWitness(
        rat(eps),
        tuple((i, j, c) for (i, j), c in sorted(f.items())),
        tuple((i, j, c) for (i, j), c in sorted(g.items())),
    )
