# cython: language_level=3
"""Compiled twin of _pykernels. Same exact semantics on Python big integers;
Cython removes the interpreter loop overhead on the hot paths.
"""

BACKEND = "compiled"


def imat_mul(list a, list b, Py_ssize_t n, Py_ssize_t k, Py_ssize_t m):
    """Multiply an n*k by a k*m integer matrix, both row-major flat lists."""
    cdef Py_ssize_t i, j, t, base, arow, brow
    cdef object aij
    cdef list out = [0] * (n * m)
    for i in range(n):
        arow = i * k
        base = i * m
        for j in range(k):
            aij = a[arow + j]
            if aij != 0:
                brow = j * m
                for t in range(m):
                    out[base + t] = out[base + t] + aij * b[brow + t]
    return out


def berkowitz_charpoly(list a, Py_ssize_t n):
    """Coefficients of det(x*I - A) for an integer n*n matrix, lowest degree
    first, computed division-free so every intermediate stays an integer.
    """
    cdef Py_ssize_t size, k, step, i, j, jmax
    cdef object s
    cdef list poly, items, v, w, new
    if n == 0:
        return [1]
    poly = [1, -a[0]]
    for size in range(2, n + 1):
        k = size - 1
        items = [1, -a[k * n + k]]
        v = [a[j * n + k] for j in range(k)]
        for step in range(size - 1):
            if step > 0:
                w = []
                for i in range(k):
                    s = 0
                    for j in range(k):
                        s = s + a[i * n + j] * v[j]
                    w.append(s)
                v = w
            s = 0
            for j in range(k):
                s = s + a[k * n + j] * v[j]
            items.append(-s)
        new = []
        for i in range(size + 1):
            jmax = min(i, size - 1)
            s = 0
            for j in range(jmax + 1):
                s = s + items[i - j] * poly[j]
            new.append(s)
        poly = new
    poly.reverse()
    return poly


def poly_sign_at(list coeffs, object p, object q):
    """Sign of sum(c_i * (p/q)**i) for integer coeffs (lowest first), q > 0."""
    cdef Py_ssize_t d = len(coeffs) - 1
    cdef Py_ssize_t i
    cdef object acc, qpow
    if d < 0:
        return 0
    acc = coeffs[d]
    qpow = 1
    for i in range(d - 1, -1, -1):
        qpow = qpow * q
        acc = acc * p + coeffs[i] * qpow
    if acc > 0:
        return 1
    if acc < 0:
        return -1
    return 0


def sign_variations(signs):
    """Number of sign changes in a sequence of -1/0/1, zeros skipped."""
    cdef int count = 0
    cdef int prev = 0
    cdef int s
    for s in signs:
        if s != 0:
            if prev != 0 and s != prev:
                count += 1
            prev = s
    return count
