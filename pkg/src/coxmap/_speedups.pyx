# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of _kernel_py: sparse polynomial multiply and exact divide.

Same contracts as the pure versions; coefficients stay exact Fractions, only
the tuple bookkeeping is pushed down to C loops.
"""


cdef tuple _add_exps(tuple a, tuple b):
    cdef Py_ssize_t i, n = len(a)
    cdef list out = [0] * n
    for i in range(n):
        out[i] = a[i] + b[i]
    return tuple(out)


cdef tuple _sub_exps(tuple a, tuple b, bint *ok):
    cdef Py_ssize_t i, n = len(a)
    cdef list out = [0] * n
    cdef object d
    ok[0] = True
    for i in range(n):
        d = a[i] - b[i]
        if d < 0:
            ok[0] = False
            return ()
        out[i] = d
    return tuple(out)


cdef tuple _deglex_max(dict p):
    cdef tuple best = None
    cdef object best_deg = None
    cdef tuple e
    cdef object deg
    for e in p:
        deg = sum(e)
        if best is None or deg > best_deg or (deg == best_deg and e > best):
            best = e
            best_deg = deg
    return best


def poly_mul(dict a, dict b):
    cdef dict out = {}
    cdef tuple ea, eb, e
    cdef object ca, cb, c
    if not a or not b:
        return out
    if len(b) < len(a):
        a, b = b, a
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _add_exps(ea, eb)
            c = out.get(e)
            if c is None:
                out[e] = ca * cb
            else:
                c = c + ca * cb
                if c:
                    out[e] = c
                else:
                    del out[e]
    return out


def poly_exact_div(dict f, dict g):
    cdef dict r, q
    cdef tuple lt_g, lt_r, e, m, eg
    cdef object cg, c, cgg, nc
    cdef bint ok
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    if not f:
        return {}
    lt_g = _deglex_max(g)
    cg = g[lt_g]
    r = dict(f)
    q = {}
    while r:
        lt_r = _deglex_max(r)
        e = _sub_exps(lt_r, lt_g, &ok)
        if not ok:
            return None
        c = r[lt_r] / cg
        q[e] = c
        for eg, cgg in g.items():
            m = _add_exps(e, eg)
            nc = r.get(m)
            if nc is None:
                r[m] = -c * cgg
            else:
                nc = nc - c * cgg
                if nc:
                    r[m] = nc
                else:
                    del r[m]
    return q
