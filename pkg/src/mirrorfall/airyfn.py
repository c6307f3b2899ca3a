"""Real-argument Airy functions Ai, Bi and first derivatives.

Strategy: on [-9, 9] the functions are evaluated from Taylor series centered
on a ladder of anchor points spaced 0.5 apart.  The anchors are generated at
import time by marching the Airy recurrence

    (n+2)(n+1) c_{n+2} = x0 c_n + c_{n-1}        (y'' = x y about x0)

from the exact origin values Ai(0) = 3^(-2/3)/Gamma(2/3) etc.  The decaying
solution Ai on the positive axis is instead seeded at x = +9 from the
asymptotic expansion and marched downward, the direction in which Ai grows
relative to Bi, so admixture of the growing solution is never amplified.
Beyond |x| = 9 the standard asymptotic expansions in zeta = (2/3)|x|^{3/2}
are used; at the seam their optimal-truncation error is ~e^{-2 zeta} ~ 1e-15.

Everything is vectorized; large inputs are processed in chunks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["AiryPair", "AiryRangeError", "airy", "airy_values", "wronskian",
           "airy_solution_check", "AIRY_MAX_ARG"]

# Bi(x) ~ e^{(2/3) x^{3/2}} overflows IEEE doubles just above x = 104.
AIRY_MAX_ARG = 80.0

_SQRT_PI = math.sqrt(math.pi)

# Exact origin values.
_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)
_BI0 = 3.0 ** (-1.0 / 6.0) / math.gamma(2.0 / 3.0)
_BIP0 = 3.0 ** (1.0 / 6.0) / math.gamma(1.0 / 3.0)

_LADDER_MAX = 9.0
_STEP = 0.5
_N_ANCHORS = int(round(2 * _LADDER_MAX / _STEP)) + 1   # 37, x = -9 .. 9
_N_COEF = 30

# Asymptotic series coefficients u_k, v_k (DLMF 9.7.2).
_N_ASYM = 17
_U = np.empty(_N_ASYM)
_V = np.empty(_N_ASYM)
_U[0] = _V[0] = 1.0
for _k in range(1, _N_ASYM):
    _U[_k] = _U[_k - 1] * (6 * _k - 5) * (6 * _k - 3) * (6 * _k - 1) \
        / (216.0 * _k * (2 * _k - 1))
    _V[_k] = -_U[_k] * (6 * _k + 1) / (6 * _k - 1)

_ALT = np.where(np.arange(_N_ASYM) % 2 == 0, 1.0, -1.0)
_U_ALT = _U * _ALT            # sum (-1)^k u_k w^k
_V_ALT = _V * _ALT
# Even/odd splits with alternating signs, as polynomials in w^2.
_PU = _U[0::2] * _ALT[: (_N_ASYM + 1) // 2]   # u_{2k} (-1)^k
_QU = _U[1::2] * _ALT[: _N_ASYM // 2]         # u_{2k+1} (-1)^k
_PV = _V[0::2] * _ALT[: (_N_ASYM + 1) // 2]
_QV = _V[1::2] * _ALT[: _N_ASYM // 2]


def _horner(coef: np.ndarray, w: np.ndarray) -> np.ndarray:
    """In-place Horner sum of coef[k] w^k (coef given low-to-high order)."""
    acc = np.full_like(w, coef[-1])
    for c in coef[-2::-1]:
        acc *= w
        acc += c
    return acc


class AiryRangeError(ValueError):
    """Argument outside the representable range of the kernel."""


@dataclass(frozen=True)
class AiryPair:
    """Ai, Bi and their derivatives at a common real argument."""

    ai: np.ndarray | float
    bi: np.ndarray | float
    ai_prime: np.ndarray | float
    bi_prime: np.ndarray | float


def wronskian(pair: AiryPair):
    """Ai Bi' - Ai' Bi; identically 1/pi."""
    return pair.ai * pair.bi_prime - pair.ai_prime * pair.bi


def _taylor_coeffs(x0: float, y: float, yp: float, n: int = _N_COEF) -> np.ndarray:
    c = np.empty(n)
    c[0], c[1] = y, yp
    c[2] = x0 * c[0] / 2.0
    for k in range(1, n - 2):
        c[k + 2] = (x0 * c[k] + c[k - 1]) / ((k + 2) * (k + 1))
    return c


def _taylor_eval(c: np.ndarray, u):
    y = np.full_like(u, c[-1])
    yp = np.full_like(u, (len(c) - 1) * c[-1])
    for k in range(len(c) - 2, 0, -1):
        y *= u
        y += c[k]
        yp *= u
        yp += k * c[k]
    y *= u
    y += c[0]
    return y, yp


def _march(x0: float, y: float, yp: float, steps: int, h: float):
    """Taylor-step (y, y') of the Airy equation; yields states after each step."""
    out = []
    x = x0
    for _ in range(steps):
        c = _taylor_coeffs(x, y, yp)
        y, yp = _taylor_eval(c, h)
        y, yp = float(y), float(yp)
        x += h
        out.append((x, y, yp))
    return out


def _asym_pos_scalar(x: float):
    """Asymptotic Ai, Ai', Bi, Bi' at large positive x (used to seed the ladder)."""
    zeta = (2.0 / 3.0) * x ** 1.5
    w = 1.0 / zeta
    s_ai = s_aip = s_bi = s_bip = 0.0
    for k in range(_N_ASYM - 1, -1, -1):
        sgn = -1.0 if k % 2 else 1.0
        s_ai = s_ai * w + sgn * _U[k]
        s_aip = s_aip * w + sgn * _V[k]
        s_bi = s_bi * w + _U[k]
        s_bip = s_bip * w + _V[k]
    q = x ** 0.25
    ai = math.exp(-zeta) * s_ai / (2.0 * _SQRT_PI * q)
    aip = -q * math.exp(-zeta) * s_aip / (2.0 * _SQRT_PI)
    bi = math.exp(zeta) * s_bi / (_SQRT_PI * q)
    bip = q * math.exp(zeta) * s_bip / _SQRT_PI
    return ai, aip, bi, bip


def _build_ladder():
    nsteps = int(round(_LADDER_MAX / _STEP))
    ai = np.empty(_N_ANCHORS)
    aip = np.empty(_N_ANCHORS)
    bi = np.empty(_N_ANCHORS)
    bip = np.empty(_N_ANCHORS)
    mid = nsteps  # index of x = 0
    ai[mid], aip[mid], bi[mid], bip[mid] = _AI0, _AIP0, _BI0, _BIP0

    # Negative axis: both solutions oscillate, marching is neutral.
    for i, (_, y, yp) in enumerate(_march(0.0, _AI0, _AIP0, nsteps, -_STEP)):
        ai[mid - 1 - i], aip[mid - 1 - i] = y, yp
    for i, (_, y, yp) in enumerate(_march(0.0, _BI0, _BIP0, nsteps, -_STEP)):
        bi[mid - 1 - i], bip[mid - 1 - i] = y, yp

    # Bi grows to the right: marching up is stable.
    for i, (_, y, yp) in enumerate(_march(0.0, _BI0, _BIP0, nsteps, _STEP)):
        bi[mid + 1 + i], bip[mid + 1 + i] = y, yp

    # Ai decays to the right: seed at the top from asymptotics, march down.
    ai9, aip9, _, _ = _asym_pos_scalar(_LADDER_MAX)
    ai[-1], aip[-1] = ai9, aip9
    for i, (_, y, yp) in enumerate(_march(_LADDER_MAX, ai9, aip9, nsteps, -_STEP)):
        ai[_N_ANCHORS - 2 - i], aip[_N_ANCHORS - 2 - i] = y, yp

    # The downward march must land on the exact origin value.
    if abs(ai[mid] - _AI0) > 1e-12 * _AI0 or abs(aip[mid] - _AIP0) > 1e-12 * abs(_AIP0):
        raise AssertionError("Airy ladder self-check failed at the origin")
    ai[mid], aip[mid] = _AI0, _AIP0

    anchors_x = np.linspace(-_LADDER_MAX, _LADDER_MAX, _N_ANCHORS)
    cai = np.empty((_N_ANCHORS, _N_COEF))
    cbi = np.empty((_N_ANCHORS, _N_COEF))
    for k in range(_N_ANCHORS):
        cai[k] = _taylor_coeffs(anchors_x[k], ai[k], aip[k])
        cbi[k] = _taylor_coeffs(anchors_x[k], bi[k], bip[k])
    return anchors_x, cai, cbi


_ANCHOR_X, _CAI, _CBI = _build_ladder()


def _eval_ladder(x, ai, bi, aip, bip):
    idx = np.rint(x / _STEP).astype(np.intp) + (_N_ANCHORS - 1) // 2
    u = x - _ANCHOR_X[idx]
    for k in np.unique(idx):
        m = idx == k
        uu = u[m]
        y, yp = _taylor_eval(_CAI[k], uu)
        ai[m], aip[m] = y, yp
        y, yp = _taylor_eval(_CBI[k], uu)
        bi[m], bip[m] = y, yp


def _eval_asym_pos(x, ai, bi, aip, bip):
    rt = np.sqrt(x)
    zeta = (2.0 / 3.0) * x * rt
    w = 1.0 / zeta
    s_ai = _horner(_U_ALT, w)
    s_aip = _horner(_V_ALT, w)
    s_bi = _horner(_U, w)
    s_bip = _horner(_V, w)
    q = np.sqrt(rt)
    em = np.exp(-zeta)
    ep = np.exp(zeta)
    ai[...] = em * s_ai / (2.0 * _SQRT_PI * q)
    aip[...] = -q * em * s_aip / (2.0 * _SQRT_PI)
    bi[...] = ep * s_bi / (_SQRT_PI * q)
    bip[...] = q * ep * s_bip / _SQRT_PI


def _eval_asym_neg(x, ai, bi, aip, bip, n_terms: int):
    y = -x
    rt = np.sqrt(y)
    zeta = (2.0 / 3.0) * y * rt
    w2 = 1.0 / (zeta * zeta)
    # P,R: even coefficients; Q,S: odd; signs folded in (DLMF 9.7.9-9.7.12).
    n_even = (n_terms + 1) // 2
    n_odd = n_terms // 2
    P = _horner(_PU[:n_even], w2)
    R = _horner(_PV[:n_even], w2)
    Q = _horner(_QU[:n_odd], w2)
    S = _horner(_QV[:n_odd], w2)
    Q /= zeta
    S /= zeta
    q = np.sqrt(rt)
    phase = zeta - 0.25 * math.pi
    c = np.cos(phase)
    s = np.sin(phase)
    ai[...] = (c * P + s * Q) / (_SQRT_PI * q)
    aip[...] = q * (s * R - c * S) / _SQRT_PI
    bi[...] = (-s * P + c * Q) / (_SQRT_PI * q)
    bip[...] = q * (c * R + s * S) / _SQRT_PI


_CHUNK = 2_000_000


def airy(x) -> AiryPair:
    """Ai(x), Bi(x), Ai'(x), Bi'(x) for real x (scalar or array).

    Raises AiryRangeError for x > 80, where Bi approaches double overflow.
    The negative axis is unrestricted (the oscillatory expansions only gain
    accuracy with depth).
    """
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    if flat.size and np.max(flat) > AIRY_MAX_ARG:
        raise AiryRangeError(
            f"argument {np.max(flat):g} exceeds {AIRY_MAX_ARG:g}; Bi would "
            "overflow double range")
    ai = np.empty_like(flat)
    bi = np.empty_like(flat)
    aip = np.empty_like(flat)
    bip = np.empty_like(flat)
    for lo in range(0, flat.size, _CHUNK):
        sl = slice(lo, min(lo + _CHUNK, flat.size))
        _airy_chunk(flat[sl], ai[sl], bi[sl], aip[sl], bip[sl])
    if scalar:
        return AiryPair(float(ai[0]), float(bi[0]), float(aip[0]), float(bip[0]))
    shape = arr.shape
    return AiryPair(ai.reshape(shape), bi.reshape(shape),
                    aip.reshape(shape), bip.reshape(shape))


def _airy_chunk(x, ai, bi, aip, bip):
    in_ladder = np.abs(x) <= _LADDER_MAX
    if np.any(in_ladder):
        xs = x[in_ladder]
        a = np.empty_like(xs)
        b = np.empty_like(xs)
        ap = np.empty_like(xs)
        bp = np.empty_like(xs)
        _eval_ladder(xs, a, b, ap, bp)
        ai[in_ladder] = a
        bi[in_ladder] = b
        aip[in_ladder] = ap
        bip[in_ladder] = bp
    pos = x > _LADDER_MAX
    if np.any(pos):
        xs = x[pos]
        a = np.empty_like(xs)
        b = np.empty_like(xs)
        ap = np.empty_like(xs)
        bp = np.empty_like(xs)
        _eval_asym_pos(xs, a, b, ap, bp)
        ai[pos] = a
        bi[pos] = b
        aip[pos] = ap
        bip[pos] = bp
    # Two negative bands: close to the seam the series needs most of its
    # terms; past -30 a short sum already reaches machine accuracy.
    for mask, n_terms in (((x < -_LADDER_MAX) & (x >= -30.0), _N_ASYM),
                          (x < -30.0, 9)):
        if np.any(mask):
            xs = x[mask]
            a = np.empty_like(xs)
            b = np.empty_like(xs)
            ap = np.empty_like(xs)
            bp = np.empty_like(xs)
            _eval_asym_neg(xs, a, b, ap, bp, n_terms)
            ai[mask] = a
            bi[mask] = b
            aip[mask] = ap
            bip[mask] = bp


def _taylor_eval_value(c: np.ndarray, u):
    y = np.full_like(u, c[-1])
    for k in range(len(c) - 2, -1, -1):
        y *= u
        y += c[k]
    return y


def airy_values(x: np.ndarray):
    """(Ai, Bi) only; ~40% cheaper than airy() on large arrays."""
    flat = np.asarray(x, dtype=np.float64).ravel()
    if flat.size and np.max(flat) > AIRY_MAX_ARG:
        raise AiryRangeError(
            f"argument {np.max(flat):g} exceeds {AIRY_MAX_ARG:g}; Bi would "
            "overflow double range")
    ai = np.empty_like(flat)
    bi = np.empty_like(flat)
    for lo in range(0, flat.size, _CHUNK):
        sl = slice(lo, min(lo + _CHUNK, flat.size))
        _airy_values_chunk(flat[sl], ai[sl], bi[sl])
    shape = np.asarray(x).shape
    return ai.reshape(shape), bi.reshape(shape)


def _airy_values_chunk(x, ai, bi):
    in_ladder = np.abs(x) <= _LADDER_MAX
    if np.any(in_ladder):
        xs = x[in_ladder]
        idx = np.rint(xs / _STEP).astype(np.intp) + (_N_ANCHORS - 1) // 2
        u = xs - _ANCHOR_X[idx]
        a = np.empty_like(xs)
        b = np.empty_like(xs)
        for k in np.unique(idx):
            m = idx == k
            uu = u[m]
            a[m] = _taylor_eval_value(_CAI[k], uu)
            b[m] = _taylor_eval_value(_CBI[k], uu)
        ai[in_ladder] = a
        bi[in_ladder] = b
    pos = x > _LADDER_MAX
    if np.any(pos):
        xs = x[pos]
        rt = np.sqrt(xs)
        zeta = (2.0 / 3.0) * xs * rt
        w = 1.0 / zeta
        q = np.sqrt(rt)
        ai[pos] = np.exp(-zeta) * _horner(_U_ALT, w) / (2.0 * _SQRT_PI * q)
        bi[pos] = np.exp(zeta) * _horner(_U, w) / (_SQRT_PI * q)
    for mask, n_terms in (((x < -_LADDER_MAX) & (x >= -30.0), _N_ASYM),
                          (x < -30.0, 9)):
        if np.any(mask):
            y = -x[mask]
            rt = np.sqrt(y)
            zeta = (2.0 / 3.0) * y * rt
            w2 = 1.0 / (zeta * zeta)
            n_even = (n_terms + 1) // 2
            n_odd = n_terms // 2
            P = _horner(_PU[:n_even], w2)
            Q = _horner(_QU[:n_odd], w2)
            Q /= zeta
            q = np.sqrt(rt)
            phase = zeta - 0.25 * math.pi
            c = np.cos(phase)
            s = np.sin(phase)
            ai[mask] = (c * P + s * Q) / (_SQRT_PI * q)
            bi[mask] = (c * Q - s * P) / (_SQRT_PI * q)


def airy_solution_check(x: float, pair: AiryPair, h: float) -> float:
    """|Ai''_numeric - x Ai| with a central second difference of step h.

    The residual is O(h^2); h must sit where truncation dominates roundoff.
    """
    if not (1e-4 <= h <= 1e-2):
        raise ValueError(f"step h = {h:g} outside [1e-4, 1e-2]")
    lo = airy(x - h)
    hi = airy(x + h)
    d2 = (hi.ai - 2.0 * pair.ai + lo.ai) / (h * h)
    return float(abs(d2 - x * pair.ai))
