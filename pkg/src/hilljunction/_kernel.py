"""Compiled propagators for -y'' + q(x) y = lam y written as Y' = A Y, A = [[0, 1], [q - lam, 0]].

The fundamental matrix Y = [[theta, phi], [theta_x, phi_x]] is carried together with
dY/dlam.  Both the exact constant-coefficient step and the sixth-order Magnus step are
exponentials of traceless 2x2 matrices; differentiating that exponential in lam is the
same as integrating the variational system y_lam'' = (q - lam) y_lam - y with the same
scheme.
"""
import math

import numpy as np
from numba import njit

SQ15 = math.sqrt(15.0)
GC1 = 0.5 - SQ15 / 10.0
GC3 = 0.5 + SQ15 / 10.0


@njit(cache=True)
def _cs(s):
    """C(s) = cosh(sqrt s), S(s) = sinh(sqrt s)/sqrt s and dS/ds, entire in s."""
    if abs(s) < 0.1:
        C = 1.0
        S = 1.0
        dS = 0.0
        term_c = 1.0
        term_s = 1.0
        for k in range(1, 9):
            term_c *= s / ((2 * k - 1) * (2 * k))
            term_s *= s / ((2 * k) * (2 * k + 1))
            C += term_c
            S += term_s
            dS += k * term_s / s if s != 0.0 else (1.0 / 6.0 if k == 1 else 0.0)
        return C, S, dS
    if s > 0.0:
        r = math.sqrt(s)
        C = math.cosh(r)
        S = math.sinh(r) / r
    else:
        r = math.sqrt(-s)
        C = math.cos(r)
        S = math.sin(r) / r
    return C, S, (C - S) / (2.0 * s)


@njit(cache=True)
def expm2(u, v, w, du, dv, dw):
    """exp(O) and dexp(O) for O = [[u, v], [w, -u]] with derivative O' = [[du, dv], [dw, -du]]."""
    s = u * u + v * w
    ds = 2.0 * u * du + dv * w + v * dw
    C, S, dS = _cs(s)
    dC = 0.5 * S
    e00 = C + S * u
    e01 = S * v
    e10 = S * w
    e11 = C - S * u
    a = dC * ds
    b = dS * ds
    d00 = a + b * u + S * du
    d01 = b * v + S * dv
    d10 = b * w + S * dw
    d11 = a - b * u - S * du
    return e00, e01, e10, e11, d00, d01, d10, d11


@njit(cache=True)
def _apply(Y, D, e00, e01, e10, e11, d00, d01, d10, d11):
    """Y <- E Y, D <- E' Y + E D (in place, row-major 4-vectors)."""
    y0, y1, y2, y3 = Y[0], Y[1], Y[2], Y[3]
    z0, z1, z2, z3 = D[0], D[1], D[2], D[3]
    Y[0] = e00 * y0 + e01 * y2
    Y[1] = e00 * y1 + e01 * y3
    Y[2] = e10 * y0 + e11 * y2
    Y[3] = e10 * y1 + e11 * y3
    D[0] = d00 * y0 + d01 * y2 + e00 * z0 + e01 * z2
    D[1] = d00 * y1 + d01 * y3 + e00 * z1 + e01 * z3
    D[2] = d10 * y0 + d11 * y2 + e10 * z0 + e11 * z2
    D[3] = d10 * y1 + d11 * y3 + e10 * z1 + e11 * z3


@njit(cache=True)
def propagate_segments(lengths, values, lam, Y, D):
    """Exact product of constant-coefficient propagators."""
    for i in range(lengths.shape[0]):
        L = lengths[i]
        e = expm2(0.0, L, L * (values[i] - lam), 0.0, 0.0, -L)
        _apply(Y, D, e[0], e[1], e[2], e[3], e[4], e[5], e[6], e[7])


@njit(cache=True)
def pot_eval(code, T, off, K, x):
    """Fourier rows (n, a, b) when code == 2, else periodic cubic spline rows (descending powers)."""
    u = (x + off) % T
    if code == 2:
        acc = 0.0
        for i in range(K.shape[1]):
            arg = 2.0 * math.pi * K[0, i] * u / T
            acc += K[1, i] * math.cos(arg) + K[2, i] * math.sin(arg)
        return acc
    n = K.shape[1]
    h = T / n
    k = int(u / h)
    if k >= n:
        k = n - 1
    d = u - k * h
    return ((K[0, k] * d + K[1, k]) * d + K[2, k]) * d + K[3, k]


@njit(cache=True)
def _comm(a, b):
    """[a, b] for 2x2 matrices stored as 4-tuples."""
    p00 = a[0] * b[0] + a[1] * b[2]
    p01 = a[0] * b[1] + a[1] * b[3]
    p10 = a[2] * b[0] + a[3] * b[2]
    p11 = a[2] * b[1] + a[3] * b[3]
    q00 = b[0] * a[0] + b[1] * a[2]
    q01 = b[0] * a[1] + b[1] * a[3]
    q10 = b[2] * a[0] + b[3] * a[2]
    q11 = b[2] * a[1] + b[3] * a[3]
    return (p00 - q00, p01 - q01, p10 - q10, p11 - q11)


@njit(cache=True)
def _lin(ca, a, cb, b):
    return (ca * a[0] + cb * b[0], ca * a[1] + cb * b[1], ca * a[2] + cb * b[2], ca * a[3] + cb * b[3])


@njit(cache=True)
def magnus_step(q1, q2, q3, h):
    """Sixth-order Magnus exponent, its lam-derivative and the gap to the fourth-order exponent."""
    a1 = (0.0, h, h * q2, 0.0)
    da1 = (0.0, 0.0, -h, 0.0)
    a2 = (0.0, 0.0, SQ15 * h / 3.0 * (q3 - q1), 0.0)
    a3 = (0.0, 0.0, 10.0 * h / 3.0 * (q1 - 2.0 * q2 + q3), 0.0)
    C1 = _comm(a1, a2)
    dC1 = _comm(da1, a2)
    inner = _lin(2.0, a3, 1.0, C1)
    C2 = _lin(-1.0 / 60.0, _comm(a1, inner), 0.0, inner)
    dC2 = _lin(-1.0 / 60.0, _comm(da1, inner), -1.0 / 60.0, _comm(a1, dC1))
    X = (-20.0 * a1[0] - a3[0] + C1[0], -20.0 * a1[1] - a3[1] + C1[1],
         -20.0 * a1[2] - a3[2] + C1[2], -20.0 * a1[3] - a3[3] + C1[3])
    dX = _lin(-20.0, da1, 1.0, dC1)
    Yv = _lin(1.0, a2, 1.0, C2)
    XY = _comm(X, Yv)
    dXY = _lin(1.0, _comm(dX, Yv), 1.0, _comm(X, dC2))
    om = (a1[0] + a3[0] / 12.0 + XY[0] / 240.0, a1[1] + a3[1] / 12.0 + XY[1] / 240.0,
          a1[2] + a3[2] / 12.0 + XY[2] / 240.0)
    dom = (da1[0] + dXY[0] / 240.0, da1[1] + dXY[1] / 240.0, da1[2] + dXY[2] / 240.0)
    # fourth-order exponent a1 + a3/12 - C1/12 differs by XY/240 + C1/12
    err = 0.0
    for i in range(4):
        e = abs(XY[i] / 240.0 + C1[i] / 12.0)
        if e > err:
            err = e
    return om, dom, err


@njit(cache=True)
def magnus_integrate(code, T, off, K, lam, x0, x1, Y, D, tol, h0, max_steps):
    """Adaptive Magnus integration of Y, dY/dlam from x0 to x1 (potential evaluated at x)."""
    x = x0
    span = x1 - x0
    if span <= 0.0:
        return 0, h0
    h = min(h0, span)
    hmax = T / 16.0
    nsteps = 0
    while x < x1 and nsteps < max_steps:
        last = False
        if x + h >= x1:
            h = x1 - x
            last = True
        q1 = pot_eval(code, T, off, K, x + GC1 * h) - lam
        q2 = pot_eval(code, T, off, K, x + 0.5 * h) - lam
        q3 = pot_eval(code, T, off, K, x + GC3 * h) - lam
        om, dom, err = magnus_step(q1, q2, q3, h)
        tiny = h < 1e-9 * T
        ratio = 0.0 if tiny else err / (tol * h)
        if ratio <= 1.0 or tiny:
            e = expm2(om[0], om[1], om[2], dom[0], dom[1], dom[2])
            _apply(Y, D, e[0], e[1], e[2], e[3], e[4], e[5], e[6], e[7])
            x = x1 if last else x + h
            nsteps += 1
            fac = 4.0 if ratio < 1e-6 else min(4.0, 0.9 * ratio ** (-0.2))
            if not last:
                h = min(h * fac, hmax)
        else:
            h = h * max(0.2, 0.9 * ratio ** (-0.2))
    return nsteps, h


@njit(cache=True)
def magnus_grid(code, T, off, K, lam, xs, tol, out):
    """Fundamental matrix at the increasing points xs (xs[0] is the start), rows of out."""
    Y = np.array([1.0, 0.0, 0.0, 1.0])
    D = np.zeros(4)
    h = T / 64.0
    for j in range(4):
        out[0, j] = Y[j]
        out[0, 4 + j] = D[j]
    for i in range(1, xs.shape[0]):
        n, h = magnus_integrate(code, T, off, K, lam, xs[i - 1], xs[i], Y, D, tol, h, 10_000_000)
        for j in range(4):
            out[i, j] = Y[j]
            out[i, 4 + j] = D[j]
