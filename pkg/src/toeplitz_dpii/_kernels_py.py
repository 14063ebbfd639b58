"""Pure-Python term kernels for :mod:`toeplitz_dpii.shiftpoly`.

A monomial is a triple ``(xs, ths, npow)``:

* ``xs``  -- tuple of ``(shift, power)`` pairs sorted by shift, meaning
  ``prod x_{n+shift}**power``;
* ``ths`` -- tuple of ``(index, power)`` pairs sorted by index;
* ``npow`` -- power of the affine symbol ``n``.

The compiled module ``_kernels`` exposes exactly the same functions.
"""


def merge_pairs(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        ka, pa = a[i]
        kb, pb = b[j]
        if ka < kb:
            out.append(a[i])
            i += 1
        elif kb < ka:
            out.append(b[j])
            j += 1
        else:
            out.append((ka, pa + pb))
            i += 1
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


def mono_mul(m1, m2):
    return (merge_pairs(m1[0], m2[0]), merge_pairs(m1[1], m2[1]), m1[2] + m2[2])


def mul_terms(a, b):
    """Product of two term dictionaries ``{monomial: coefficient}``."""
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    for m2, c2 in b.items():
        xs2, th2, n2 = m2
        for m1, c1 in a.items():
            m = (merge_pairs(m1[0], xs2), merge_pairs(m1[1], th2), m1[2] + n2)
            c = get(m)
            if c is None:
                out[m] = c1 * c2
            else:
                out[m] = c + c1 * c2
    return {m: c for m, c in out.items() if c}


def add_terms(a, b, scale=1):
    """Return ``a + scale*b`` as a new dictionary."""
    out = dict(a)
    get = out.get
    for m, c in b.items():
        s = get(m)
        if s is None:
            out[m] = scale * c
        else:
            s = s + scale * c
            if s:
                out[m] = s
            else:
                del out[m]
    return out


def shift_xs(terms, s):
    """Shift every x index by ``s``; the ``n`` powers are left untouched."""
    if s == 0:
        return dict(terms)
    out = {}
    for (xs, ths, npow), c in terms.items():
        out[(tuple((j + s, p) for j, p in xs), ths, npow)] = c
    return out
