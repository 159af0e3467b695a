"""Pure-Python fixed-point datapath kernel.

Fallback for the compiled extension; same entry points, bit-identical
results.  Arithmetic is done on Python ints (intermediates exceed 64
bits), with results written back into the callers' int64 arrays.

Variable format indices (rows of the ``fmts`` array) follow
``fxrange.analysis.VARIABLES`` order.
"""

from __future__ import annotations

BACKEND = "python"

# fmts row indices
X, T, ALPHA, B, E, H = 0, 1, 2, 3, 4, 5
G1, G2, G3, G4, G5, G6, G7, G8, G9, G10 = 6, 7, 8, 9, 10, 11, 12, 13, 14, 15
P_, BETA, Y = 16, 17, 18

OVF, UNF, ADD, MUL, DIV = 0, 1, 2, 3, 4


def _requant(exact: int, fe: int, fo: int, mn: int, mx: int, cnt) -> int:
    shift = fe - fo
    if shift > 0:
        half = 1 << (shift - 1)
        raw = (exact + half) >> shift if exact >= 0 else -((-exact + half) >> shift)
    elif shift < 0:
        raw = exact << (-shift)
    else:
        raw = exact
    if raw > mx:
        cnt[OVF] += 1
        return mx
    if raw < mn:
        cnt[OVF] += 1
        return mn
    if raw == 0 and exact != 0:
        cnt[UNF] += 1
    return raw


def _add(a, fa, b, fb, fo, mn, mx, cnt):
    cnt[ADD] += 1
    f = fa if fa >= fb else fb
    return _requant((a << (f - fa)) + (b << (f - fb)), f, fo, mn, mx, cnt)


def _mul(a, fa, b, fb, fo, mn, mx, cnt):
    cnt[MUL] += 1
    return _requant(a * b, fa + fb, fo, mn, mx, cnt)


def _div(a, fa, b, fb, fo, mn, mx, cnt):
    cnt[DIV] += 1
    if b == 0:
        cnt[OVF] += 1
        return mx if a >= 0 else mn
    shift = fo + fb - fa
    num, den = a, b
    if shift >= 0:
        num <<= shift
    else:
        den <<= -shift
    if den < 0:
        num, den = -num, -den
    raw = (2 * num + den) // (2 * den) if num >= 0 else -((-2 * num + den) // (2 * den))
    if raw > mx:
        cnt[OVF] += 1
        return mx
    if raw < mn:
        cnt[OVF] += 1
        return mn
    if raw == 0 and a != 0:
        cnt[UNF] += 1
    return raw


def _matmul(A, B, u, v, w, fa, fb, fo, mn, mx, cnt):
    """Row-major (u x v) @ (v x w) with one shared accumulator in the
    destination format; each element costs v muls and v adds."""
    out = [0] * (u * w)
    for i in range(u):
        for j in range(w):
            acc = 0
            for k in range(v):
                prod = _mul(A[i * v + k], fa, B[k * w + j], fb, fo, mn, mx, cnt)
                acc = _add(acc, fo, prod, fo, fo, mn, mx, cnt)
            out[i * w + j] = acc
    return out


def _fmt(fmts, idx):
    row = fmts[idx]
    return int(row[0]), int(row[1]), int(row[2])


def _step_lists(x, t, alpha, b, P, beta, fmts, cnt, nh, n, m):
    fx, _, _ = _fmt(fmts, X)
    ft, _, _ = _fmt(fmts, T)
    falpha, _, _ = _fmt(fmts, ALPHA)
    fb_, _, _ = _fmt(fmts, B)
    fe, emn, emx = _fmt(fmts, E)
    fh, hmn, hmx = _fmt(fmts, H)
    f1, mn1, mx1 = _fmt(fmts, G1)
    f2, mn2, mx2 = _fmt(fmts, G2)
    f3, mn3, mx3 = _fmt(fmts, G3)
    f4, mn4, mx4 = _fmt(fmts, G4)
    f5, mn5, mx5 = _fmt(fmts, G5)
    f6, mn6, mx6 = _fmt(fmts, G6)
    f7, mn7, mx7 = _fmt(fmts, G7)
    f8, mn8, mx8 = _fmt(fmts, G8)
    f9, mn9, mx9 = _fmt(fmts, G9)
    f10, mn10, mx10 = _fmt(fmts, G10)
    fP, Pmn, Pmx = _fmt(fmts, P_)
    fB, Bmn, Bmx = _fmt(fmts, BETA)

    e = _matmul(x, alpha, 1, n, nh, fx, falpha, fe, emn, emx, cnt)
    h = [_add(e[j], fe, b[j], fb_, fh, hmn, hmx, cnt) for j in range(nh)]
    g1 = _matmul(P, h, nh, nh, 1, fP, fh, f1, mn1, mx1, cnt)
    g2 = _matmul(h, P, 1, nh, nh, fh, fP, f2, mn2, mx2, cnt)
    g3 = _matmul(g1, g2, nh, 1, nh, f1, f2, f3, mn3, mx3, cnt)
    g4 = _matmul(g2, h, 1, nh, 1, f2, fh, f4, mn4, mx4, cnt)[0]
    g5 = _add(g4, f4, 1 << f5, f5, f5, mn5, mx5, cnt)
    for i in range(nh * nh):
        g6 = _div(g3[i], f3, g5, f5, f6, mn6, mx6, cnt)
        P[i] = _add(P[i], fP, -g6, f6, fP, Pmn, Pmx, cnt)
    g7 = _matmul(P, h, nh, nh, 1, fP, fh, f7, mn7, mx7, cnt)
    g8 = _matmul(h, beta, 1, nh, m, fh, fB, f8, mn8, mx8, cnt)
    g9 = [_add(t[j], ft, -g8[j], f8, f9, mn9, mx9, cnt) for j in range(m)]
    g10 = _matmul(g7, g9, nh, 1, m, f7, f9, f10, mn10, mx10, cnt)
    for i in range(nh * m):
        beta[i] = _add(beta[i], fB, g10[i], f10, fB, Bmn, Bmx, cnt)
    return h


def _predict_lists(x, alpha, b, beta, fmts, cnt, nh, n, m):
    fx, _, _ = _fmt(fmts, X)
    falpha, _, _ = _fmt(fmts, ALPHA)
    fb_, _, _ = _fmt(fmts, B)
    fe, emn, emx = _fmt(fmts, E)
    fh, hmn, hmx = _fmt(fmts, H)
    fB, _, _ = _fmt(fmts, BETA)
    fy, ymn, ymx = _fmt(fmts, Y)
    e = _matmul(x, alpha, 1, n, nh, fx, falpha, fe, emn, emx, cnt)
    h = [_add(e[j], fe, b[j], fb_, fh, hmn, hmx, cnt) for j in range(nh)]
    return _matmul(h, beta, 1, nh, m, fh, fB, fy, ymn, ymx, cnt)


def train_step(x, t, alpha, b, P, beta, fmts, counters):
    """One in-place training step on raw int64 arrays (P, beta updated)."""
    n, nh = alpha.shape
    m = beta.shape[1]
    cnt = counters.tolist()
    Pl = P.reshape(-1).tolist()
    Bl = beta.reshape(-1).tolist()
    _step_lists(
        x.tolist(), t.tolist(), alpha.reshape(-1).tolist(), b.tolist(),
        Pl, Bl, fmts, cnt, nh, n, m,
    )
    P.reshape(-1)[:] = Pl
    beta.reshape(-1)[:] = Bl
    counters[:] = cnt


def predict(x, alpha, b, beta, fmts, counters, y_out):
    n, nh = alpha.shape
    m = beta.shape[1]
    cnt = counters.tolist()
    y = _predict_lists(
        x.tolist(), alpha.reshape(-1).tolist(), b.tolist(),
        beta.reshape(-1).tolist(), fmts, cnt, nh, n, m,
    )
    y_out[:] = y
    counters[:] = cnt


def probe_batch(XS, TS, alpha, b, P, beta, fmts, counters):
    """Probe runs: each probe trains on a copy of (P, beta), then predicts
    with the probe-updated weights.  State arrays are left untouched."""
    n, nh = alpha.shape
    m = beta.shape[1]
    cnt = counters.tolist()
    al = alpha.reshape(-1).tolist()
    bl = b.tolist()
    Pl = P.reshape(-1).tolist()
    Bl = beta.reshape(-1).tolist()
    for x, t in zip(XS.tolist(), TS.tolist()):
        Pc, Bc = list(Pl), list(Bl)
        _step_lists(x, t, al, bl, Pc, Bc, fmts, cnt, nh, n, m)
        _predict_lists(x, al, bl, Bc, fmts, cnt, nh, n, m)
    counters[:] = cnt
