# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixed-point datapath kernel.

Same semantics as ``_pykernel`` (round to nearest, ties away from zero;
saturate on overflow; count nonzero-to-zero flushes as underflow), with
128-bit intermediates so no format up to 62 total bits can wrap.
"""

import numpy as np

BACKEND = "compiled"

ctypedef long long i64

cdef extern from *:
    ctypedef long long int128 "__int128"

# fmts row indices, fxrange.analysis.VARIABLES order
DEF X = 0
DEF T = 1
DEF ALPHA = 2
DEF B = 3
DEF E = 4
DEF H = 5
DEF G1 = 6
DEF G2 = 7
DEF G3 = 8
DEF G4 = 9
DEF G5 = 10
DEF G6 = 11
DEF G7 = 12
DEF G8 = 13
DEF G9 = 14
DEF G10 = 15
DEF P_ = 16
DEF BETA = 17
DEF Y = 18

DEF OVF = 0
DEF UNF = 1
DEF ADD = 2
DEF MUL = 3
DEF DIV = 4


cdef inline i64 _requant(int128 exact, int fe, int fo, i64 mn, i64 mx, i64* cnt) nogil:
    cdef int shift = fe - fo
    cdef int128 raw, half
    if shift > 0:
        half = (<int128>1) << (shift - 1)
        if exact >= 0:
            raw = (exact + half) >> shift
        else:
            raw = -((-exact + half) >> shift)
    elif shift < 0:
        raw = exact << (-shift)
    else:
        raw = exact
    if raw > <int128>mx:
        cnt[OVF] += 1
        return mx
    if raw < <int128>mn:
        cnt[OVF] += 1
        return mn
    if raw == 0 and exact != 0:
        cnt[UNF] += 1
    return <i64>raw


cdef inline i64 _fxadd(i64 a, int fa, i64 b, int fb, int fo, i64 mn, i64 mx, i64* cnt) nogil:
    cdef int f = fa if fa >= fb else fb
    cdef int128 exact = ((<int128>a) << (f - fa)) + ((<int128>b) << (f - fb))
    cnt[ADD] += 1
    return _requant(exact, f, fo, mn, mx, cnt)


cdef inline i64 _fxmul(i64 a, int fa, i64 b, int fb, int fo, i64 mn, i64 mx, i64* cnt) nogil:
    cnt[MUL] += 1
    return _requant((<int128>a) * (<int128>b), fa + fb, fo, mn, mx, cnt)


cdef inline i64 _fxdiv(i64 a, int fa, i64 b, int fb, int fo, i64 mn, i64 mx, i64* cnt) nogil:
    cdef int128 num, den, raw
    cdef int shift
    cnt[DIV] += 1
    if b == 0:
        cnt[OVF] += 1
        return mx if a >= 0 else mn
    shift = fo + fb - fa
    num = <int128>a
    den = <int128>b
    if shift >= 0:
        num = num << shift
    else:
        den = den << (-shift)
    if den < 0:
        num = -num
        den = -den
    if num >= 0:
        raw = (2 * num + den) // (2 * den)
    else:
        raw = -((-2 * num + den) // (2 * den))
    if raw > <int128>mx:
        cnt[OVF] += 1
        return mx
    if raw < <int128>mn:
        cnt[OVF] += 1
        return mn
    if raw == 0 and a != 0:
        cnt[UNF] += 1
    return <i64>raw


cdef void _mm(i64* A, i64* Bm, i64* out, int u, int v, int w,
              int fa, int fb, int fo, i64 mn, i64 mx, i64* cnt) nogil:
    cdef int i, j, k
    cdef i64 acc, prod
    for i in range(u):
        for j in range(w):
            acc = 0
            for k in range(v):
                prod = _fxmul(A[i * v + k], fa, Bm[k * w + j], fb, fo, mn, mx, cnt)
                acc = _fxadd(acc, fo, prod, fo, fo, mn, mx, cnt)
            out[i * w + j] = acc


cdef void _step(i64* x, i64* t, i64* alpha, i64* b, i64* P, i64* beta,
                i64[:, ::1] fmts, i64* cnt, int nh, int n, int m,
                i64* e, i64* h, i64* g1, i64* g2, i64* g3,
                i64* g7, i64* g8, i64* g9, i64* g10) nogil:
    cdef int i, j
    cdef i64 g4, g5, g6
    _mm(x, alpha, e, 1, n, nh, <int>fmts[X, 0], <int>fmts[ALPHA, 0],
        <int>fmts[E, 0], fmts[E, 1], fmts[E, 2], cnt)
    for j in range(nh):
        h[j] = _fxadd(e[j], <int>fmts[E, 0], b[j], <int>fmts[B, 0],
                      <int>fmts[H, 0], fmts[H, 1], fmts[H, 2], cnt)
    _mm(P, h, g1, nh, nh, 1, <int>fmts[P_, 0], <int>fmts[H, 0],
        <int>fmts[G1, 0], fmts[G1, 1], fmts[G1, 2], cnt)
    _mm(h, P, g2, 1, nh, nh, <int>fmts[H, 0], <int>fmts[P_, 0],
        <int>fmts[G2, 0], fmts[G2, 1], fmts[G2, 2], cnt)
    _mm(g1, g2, g3, nh, 1, nh, <int>fmts[G1, 0], <int>fmts[G2, 0],
        <int>fmts[G3, 0], fmts[G3, 1], fmts[G3, 2], cnt)
    _mm(g2, h, &g4, 1, nh, 1, <int>fmts[G2, 0], <int>fmts[H, 0],
        <int>fmts[G4, 0], fmts[G4, 1], fmts[G4, 2], cnt)
    g5 = _fxadd(g4, <int>fmts[G4, 0], (<i64>1) << (<int>fmts[G5, 0]), <int>fmts[G5, 0],
                <int>fmts[G5, 0], fmts[G5, 1], fmts[G5, 2], cnt)
    for i in range(nh * nh):
        g6 = _fxdiv(g3[i], <int>fmts[G3, 0], g5, <int>fmts[G5, 0],
                    <int>fmts[G6, 0], fmts[G6, 1], fmts[G6, 2], cnt)
        P[i] = _fxadd(P[i], <int>fmts[P_, 0], -g6, <int>fmts[G6, 0],
                      <int>fmts[P_, 0], fmts[P_, 1], fmts[P_, 2], cnt)
    _mm(P, h, g7, nh, nh, 1, <int>fmts[P_, 0], <int>fmts[H, 0],
        <int>fmts[G7, 0], fmts[G7, 1], fmts[G7, 2], cnt)
    _mm(h, beta, g8, 1, nh, m, <int>fmts[H, 0], <int>fmts[BETA, 0],
        <int>fmts[G8, 0], fmts[G8, 1], fmts[G8, 2], cnt)
    for j in range(m):
        g9[j] = _fxadd(t[j], <int>fmts[T, 0], -g8[j], <int>fmts[G8, 0],
                       <int>fmts[G9, 0], fmts[G9, 1], fmts[G9, 2], cnt)
    _mm(g7, g9, g10, nh, 1, m, <int>fmts[G7, 0], <int>fmts[G9, 0],
        <int>fmts[G10, 0], fmts[G10, 1], fmts[G10, 2], cnt)
    for i in range(nh * m):
        beta[i] = _fxadd(beta[i], <int>fmts[BETA, 0], g10[i], <int>fmts[G10, 0],
                         <int>fmts[BETA, 0], fmts[BETA, 1], fmts[BETA, 2], cnt)


cdef void _pred(i64* x, i64* alpha, i64* b, i64* beta, i64[:, ::1] fmts,
                i64* cnt, int nh, int n, int m, i64* e, i64* h, i64* y) nogil:
    cdef int j
    _mm(x, alpha, e, 1, n, nh, <int>fmts[X, 0], <int>fmts[ALPHA, 0],
        <int>fmts[E, 0], fmts[E, 1], fmts[E, 2], cnt)
    for j in range(nh):
        h[j] = _fxadd(e[j], <int>fmts[E, 0], b[j], <int>fmts[B, 0],
                      <int>fmts[H, 0], fmts[H, 1], fmts[H, 2], cnt)
    _mm(h, beta, y, 1, nh, m, <int>fmts[H, 0], <int>fmts[BETA, 0],
        <int>fmts[Y, 0], fmts[Y, 1], fmts[Y, 2], cnt)


def train_step(x, t, alpha, b, P, beta, fmts, counters):
    """One in-place training step on raw int64 arrays (P, beta updated)."""
    cdef int n = alpha.shape[0], nh = alpha.shape[1], m = beta.shape[1]
    cdef i64[::1] xv = np.ascontiguousarray(x), tv = np.ascontiguousarray(t)
    cdef i64[::1] av = np.ascontiguousarray(alpha.reshape(-1))
    cdef i64[::1] bv = np.ascontiguousarray(b)
    cdef i64[::1] Pv = P.reshape(-1)
    cdef i64[::1] Bv = beta.reshape(-1)
    cdef i64[:, ::1] fv = np.ascontiguousarray(fmts)
    cdef i64[::1] cv = counters
    scratch = np.zeros(5 * nh + nh * nh + 2 * m + nh * m, dtype=np.int64)
    cdef i64[::1] s = scratch
    cdef i64* e = &s[0]
    cdef i64* h = &s[nh]
    cdef i64* g1 = &s[2 * nh]
    cdef i64* g2 = &s[3 * nh]
    cdef i64* g3 = &s[4 * nh]
    cdef i64* g7 = &s[4 * nh + nh * nh]
    cdef i64* g8 = &s[5 * nh + nh * nh]
    cdef i64* g9 = &s[5 * nh + nh * nh + m]
    cdef i64* g10 = &s[5 * nh + nh * nh + 2 * m]
    _step(&xv[0], &tv[0], &av[0], &bv[0], &Pv[0], &Bv[0], fv, &cv[0],
          nh, n, m, e, h, g1, g2, g3, g7, g8, g9, g10)


def predict(x, alpha, b, beta, fmts, counters, y_out):
    cdef int n = alpha.shape[0], nh = alpha.shape[1], m = beta.shape[1]
    cdef i64[::1] xv = np.ascontiguousarray(x)
    cdef i64[::1] av = np.ascontiguousarray(alpha.reshape(-1))
    cdef i64[::1] bv = np.ascontiguousarray(b)
    cdef i64[::1] Bv = np.ascontiguousarray(beta.reshape(-1))
    cdef i64[:, ::1] fv = np.ascontiguousarray(fmts)
    cdef i64[::1] cv = counters
    cdef i64[::1] yv = y_out
    scratch = np.zeros(2 * nh, dtype=np.int64)
    cdef i64[::1] s = scratch
    _pred(&xv[0], &av[0], &bv[0], &Bv[0], fv, &cv[0], nh, n, m,
          &s[0], &s[nh], &yv[0])


def probe_batch(XS, TS, alpha, b, P, beta, fmts, counters):
    """Probe runs on copies of (P, beta); state arrays are left untouched."""
    cdef int n = alpha.shape[0], nh = alpha.shape[1], m = beta.shape[1]
    cdef Py_ssize_t nprobes = XS.shape[0], p
    cdef i64[:, ::1] Xv = np.ascontiguousarray(XS)
    cdef i64[:, ::1] Tv = np.ascontiguousarray(TS)
    cdef i64[::1] av = np.ascontiguousarray(alpha.reshape(-1))
    cdef i64[::1] bv = np.ascontiguousarray(b)
    cdef i64[::1] P0 = np.ascontiguousarray(P.reshape(-1))
    cdef i64[::1] B0 = np.ascontiguousarray(beta.reshape(-1))
    cdef i64[:, ::1] fv = np.ascontiguousarray(fmts)
    cdef i64[::1] cv = counters
    Pc_arr = np.zeros(nh * nh, dtype=np.int64)
    Bc_arr = np.zeros(nh * m, dtype=np.int64)
    scratch = np.zeros(5 * nh + nh * nh + 3 * m + nh * m, dtype=np.int64)
    cdef i64[::1] Pc = Pc_arr, Bc = Bc_arr, s = scratch
    cdef i64* e = &s[0]
    cdef i64* h = &s[nh]
    cdef i64* g1 = &s[2 * nh]
    cdef i64* g2 = &s[3 * nh]
    cdef i64* g3 = &s[4 * nh]
    cdef i64* g7 = &s[4 * nh + nh * nh]
    cdef i64* g8 = &s[5 * nh + nh * nh]
    cdef i64* g9 = &s[5 * nh + nh * nh + m]
    cdef i64* g10 = &s[5 * nh + nh * nh + 2 * m]
    cdef i64* y = &s[5 * nh + nh * nh + 2 * m + nh * m]
    with nogil:
        for p in range(nprobes):
            Pc[:] = P0
            Bc[:] = B0
            _step(&Xv[p, 0], &Tv[p, 0], &av[0], &bv[0], &Pc[0], &Bc[0], fv,
                  &cv[0], nh, n, m, e, h, g1, g2, g3, g7, g8, g9, g10)
            _pred(&Xv[p, 0], &av[0], &bv[0], &Bc[0], fv, &cv[0], nh, n, m,
                  e, h, y)
