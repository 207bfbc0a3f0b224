"""Pure-Python sparse column reduction over a prime field F_p.

Columns are dicts {row index: nonzero coefficient mod p}.  Reduction is the
standard left-to-right scheme with max-index pivots, which serves three
masters: persistence pairing (pivot row = paired row), rank computation
(count of nonzero pivots) and span membership (residual after reducing
against an echelon basis).

A compiled twin of this module lives in _fp_core_cy.pyx; multipres.kernels
picks whichever is importable.
"""

from __future__ import annotations


def _inv_mod(c: int, p: int) -> int:
    return pow(c, p - 2, p)


def reduce_pivots(columns, p):
    """Reduce columns in order; return the pivot row of each (-1 if zeroed).

    Each column is reduced against the previously committed columns sharing
    its current max-index row until the row is fresh or the column dies.
    """
    piv: dict[int, dict[int, int]] = {}
    out = []
    if p == 2:
        sets = [set(c) for c in columns]
        pivs: dict[int, set] = {}
        for col in sets:
            while col:
                low = max(col)
                other = pivs.get(low)
                if other is None:
                    break
                col ^= other
            if col:
                pivs[max(col)] = col
                out.append(max(col))
            else:
                out.append(-1)
        return out
    for col in columns:
        c = dict(col)
        while c:
            low = max(c)
            other = piv.get(low)
            if other is None:
                break
            factor = (c[low] * _inv_mod(other[low], p)) % p
            for row, val in other.items():
                new = (c.get(row, 0) - factor * val) % p
                if new:
                    c[row] = new
                else:
                    c.pop(row, None)
        if c:
            piv[max(c)] = c
            out.append(max(c))
        else:
            out.append(-1)
    return out


def echelonize(columns, p):
    """Echelon basis of the column span: list of (pivot row, reduced column)."""
    basis: list[tuple[int, dict[int, int]]] = []
    piv: dict[int, dict[int, int]] = {}
    for col in columns:
        c = _residual_dict(dict(col), piv, p)
        if c:
            low = max(c)
            piv[low] = c
            basis.append((low, c))
    return basis


def _residual_dict(c, piv, p):
    while c:
        low = max(c)
        other = piv.get(low)
        if other is None:
            return c
        factor = (c[low] * _inv_mod(other[low], p)) % p if p != 2 else 1
        for row, val in other.items():
            new = (c.get(row, 0) - factor * val) % p
            if new:
                c[row] = new
            else:
                c.pop(row, None)
    return c


def rank(columns, p):
    return len(echelonize(columns, p))


def residual(vector, basis, p):
    """Reduce a vector against an echelon basis; {} means it lies in the span."""
    piv = {low: col for low, col in basis}
    return _residual_dict(dict(vector), piv, p)
