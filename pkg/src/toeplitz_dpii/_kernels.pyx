# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term kernels; same API as :mod:`toeplitz_dpii._kernels_py`."""


cpdef tuple merge_pairs(tuple a, tuple b):
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t la = len(a), lb = len(b)
    cdef list out
    cdef tuple ta, tb
    if la == 0:
        return b
    if lb == 0:
        return a
    out = []
    while i < la and j < lb:
        ta = <tuple>a[i]
        tb = <tuple>b[j]
        ka = ta[0]
        kb = tb[0]
        if ka < kb:
            out.append(ta)
            i += 1
        elif kb < ka:
            out.append(tb)
            j += 1
        else:
            out.append((ka, ta[1] + tb[1]))
            i += 1
            j += 1
    while i < la:
        out.append(a[i])
        i += 1
    while j < lb:
        out.append(b[j])
        j += 1
    return tuple(out)


cpdef tuple mono_mul(tuple m1, tuple m2):
    return (merge_pairs(<tuple>m1[0], <tuple>m2[0]),
            merge_pairs(<tuple>m1[1], <tuple>m2[1]),
            m1[2] + m2[2])


cpdef dict mul_terms(dict a, dict b):
    """Product of two term dictionaries ``{monomial: coefficient}``."""
    cdef dict out = {}
    cdef tuple m1, m2, m
    if len(a) < len(b):
        a, b = b, a
    for m2, c2 in b.items():
        xs2 = <tuple>m2[0]
        th2 = <tuple>m2[1]
        n2 = m2[2]
        for m1, c1 in a.items():
            m = (merge_pairs(<tuple>m1[0], xs2), merge_pairs(<tuple>m1[1], th2), m1[2] + n2)
            c = out.get(m)
            if c is None:
                out[m] = c1 * c2
            else:
                out[m] = c + c1 * c2
    return {k: v for k, v in out.items() if v}


cpdef dict add_terms(dict a, dict b, scale=1):
    """Return ``a + scale*b`` as a new dictionary."""
    cdef dict out = dict(a)
    for m, c in b.items():
        s = out.get(m)
        if s is None:
            out[m] = scale * c
        else:
            s = s + scale * c
            if s:
                out[m] = s
            else:
                del out[m]
    return out


cpdef dict shift_xs(dict terms, s):
    """Shift every x index by ``s``; the ``n`` powers are left untouched."""
    cdef dict out = {}
    cdef tuple xs
    if s == 0:
        return dict(terms)
    for key, c in terms.items():
        xs = <tuple>key[0]
        out[(tuple([(p[0] + s, p[1]) for p in xs]), key[1], key[2])] = c
    return out
