# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _fp_core: sparse column reduction over F_p.

Same contract as the pure module; columns come in as {row: coeff} dicts and
are expanded into dense C buffers internally.  Selected by multipres.kernels
when importable.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc


cdef long _inv_mod(long c, long p):
    cdef long result = 1
    cdef long base = c % p
    cdef long exp = p - 2
    while exp > 0:
        if exp & 1:
            result = (result * base) % p
        base = (base * base) % p
        exp >>= 1
    return result


cdef long _nrows_of(columns):
    cdef long nrows = 0
    for col in columns:
        for row in col:
            if row + 1 > nrows:
                nrows = row + 1
    return nrows


def reduce_pivots(columns, p):
    """Reduce columns in order; return the pivot row of each (-1 if zeroed)."""
    cdef long nrows = _nrows_of(columns)
    cdef long ncols = len(columns)
    cdef long P = p
    out = []
    if nrows == 0 or ncols == 0:
        return [-1] * ncols
    cdef long* work = <long*> PyMem_Malloc(nrows * sizeof(long))
    cdef long* store = <long*> PyMem_Malloc(nrows * nrows * sizeof(long))
    cdef long* owner = <long*> PyMem_Malloc(nrows * sizeof(long))
    if not work or not store or not owner:
        raise MemoryError()
    cdef long i, low, factor, v, slot
    try:
        for i in range(nrows):
            owner[i] = -1
        for col in columns:
            for i in range(nrows):
                work[i] = 0
            for row, coeff in col.items():
                work[<long> row] = (<long> coeff) % P
            low = nrows - 1
            while low >= 0:
                if work[low] == 0:
                    low -= 1
                    continue
                slot = owner[low]
                if slot < 0:
                    break
                factor = (work[low] * _inv_mod(store[slot * nrows + low], P)) % P
                for i in range(low + 1):
                    v = (work[i] - factor * store[slot * nrows + i]) % P
                    work[i] = v + P if v < 0 else v
            if low >= 0:
                slot = low
                owner[low] = slot
                for i in range(nrows):
                    store[slot * nrows + i] = work[i]
                out.append(low)
            else:
                out.append(-1)
        return out
    finally:
        PyMem_Free(work)
        PyMem_Free(store)
        PyMem_Free(owner)


def echelonize(columns, p):
    """Echelon basis of the column span: list of (pivot row, reduced column)."""
    cdef long nrows = _nrows_of(columns)
    cdef long P = p
    basis = []
    if nrows == 0:
        return basis
    cdef long* work = <long*> PyMem_Malloc(nrows * sizeof(long))
    if not work:
        raise MemoryError()
    piv = {}
    cdef long i, low, factor, v
    try:
        for col in columns:
            for i in range(nrows):
                work[i] = 0
            for row, coeff in col.items():
                work[<long> row] = (<long> coeff) % P
            low = nrows - 1
            while low >= 0:
                if work[low] == 0:
                    low -= 1
                    continue
                other = piv.get(low)
                if other is None:
                    break
                factor = (work[low] * _inv_mod(<long> other[low], P)) % P
                for row, coeff in other.items():
                    v = (work[<long> row] - factor * <long> coeff) % P
                    work[<long> row] = v + P if v < 0 else v
            if low >= 0:
                reduced = {}
                for i in range(low + 1):
                    if work[i]:
                        reduced[i] = work[i]
                piv[low] = reduced
                basis.append((low, reduced))
        return basis
    finally:
        PyMem_Free(work)


def rank(columns, p):
    return len(echelonize(columns, p))


def residual(vector, basis, p):
    """Reduce a vector against an echelon basis; {} means it lies in the span."""
    cdef long P = p
    piv = {low: col for low, col in basis}
    c = {}
    for row, coeff in vector.items():
        v = (<long> coeff) % P
        if v:
            c[row] = v
    cdef long factor, w
    while c:
        low = max(c)
        other = piv.get(low)
        if other is None:
            return c
        factor = (<long> c[low] * _inv_mod(<long> other[low], P)) % P
        for row, coeff in other.items():
            w = (<long> c.get(row, 0) - factor * <long> coeff) % P
            if w < 0:
                w += P
            if w:
                c[row] = w
            else:
                c.pop(row, None)
    return c
