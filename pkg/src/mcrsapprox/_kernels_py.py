"""Pure-Python versions of the compiled scans (same contract, same output)."""
from __future__ import annotations

from math import ceil, floor, gcd, inf, sqrt

import numpy as np


def _complex_rho(s, r, u, al, be):
    s2 = (al * al + be * be) / (2.0 * be)
    r2 = al / be
    u2 = 1.0 / (2.0 * be)
    diff = max(abs(s - s2), abs(r - r2), abs(u - u2))
    plus = max(s + s2, abs(r + r2), u + u2)
    return diff if diff <= plus else plus


def _scan_rect(g1, g2, G, N2, alo, ahi, blo, bhi, s, r, u, state, rel, absm, rows, vals):
    w1max = sqrt(N2)
    w1lo = max(alo * g1 - bhi * g2, -w1max)
    w1hi = min(ahi * g1 - blo * g2, w1max)
    for w1 in range(ceil(w1lo - 1e-9), floor(w1hi + 1e-9) + 1):
        lo2 = ceil((blo * G + w1 * g2) / g1 - 1e-9)
        hi2 = floor((bhi * G + w1 * g2) / g1 + 1e-9)
        if g2 > 0:
            lo2 = max(lo2, ceil((alo * G - w1 * g1) / g2 - 1e-9))
            hi2 = min(hi2, floor((ahi * G - w1 * g1) / g2 + 1e-9))
        for w2 in range(lo2, hi2 + 1):
            if w1 * w1 + w2 * w2 > N2:
                continue
            be = (w2 * g1 - w1 * g2) / G
            if be <= 0:
                continue
            al = (w1 * g1 + w2 * g2) / G
            rho = _complex_rho(s, r, u, al, be)
            if rho <= state[0] * (1.0 + rel) + absm:
                rows.append((g1, g2, w1, w2))
                vals.append(rho)
                if rho < state[0]:
                    state[0] = rho


def _gauss_shell(k, N, s, r, u, state, rel, absm, rows, vals):
    N2 = N * N
    for i in range(2 * k):
        g1, g2 = (k, i) if i <= k else (2 * k - i, k)
        G = g1 * g1 + g2 * g2
        if G > N2:
            continue
        Rw = state[0] * (1.0 + rel) + absm
        blo = 1.0 / (2.0 * (u + Rw))
        bhi = 2.0 * (s + Rw)
        if Rw < u:
            bhi = min(bhi, 1.0 / (2.0 * (u - Rw)))
        if blo <= bhi:
            alo = min(blo * (r - Rw), bhi * (r - Rw))
            ahi = max(blo * (r + Rw), bhi * (r + Rw))
            _scan_rect(g1, g2, G, N2, alo, ahi, blo, bhi, s, r, u, state, rel, absm, rows, vals)
        Rw = state[0] * (1.0 + rel) + absm
        if Rw > u and Rw > s:
            blo = 1.0 / (2.0 * (Rw - u))
            bhi = 2.0 * (Rw - s)
            if blo <= bhi:
                alo = min(blo * (-r - Rw), bhi * (-r - Rw))
                ahi = max(blo * (-r + Rw), bhi * (-r + Rw))
                _scan_rect(g1, g2, G, N2, alo, ahi, blo, bhi, s, r, u, state, rel, absm, rows, vals)


def _export(rows, vals, width):
    return (np.array(rows, dtype=np.int64).reshape(-1, width),
            np.array(vals, dtype=np.float64))


def gauss_scan(N, shells, s, r, u, R0, rel, absm):
    rows, vals = [], []
    state = [R0]
    for k in shells:
        _gauss_shell(int(k), N, s, r, u, state, rel, absm, rows, vals)
    return (*_export(rows, vals, 4), state[0])


# ---------------------------------------------------------------------------

def _simul_rho(beta, gamma, a, b, c):
    bb, cc = b / a, c / a
    diff = max(abs(beta - bb), abs(gamma - cc),
               abs((beta - bb) * (beta + bb) + (gamma - cc) * (gamma + cc)) * 0.5)
    plus = max(1.0, abs(beta + bb), abs(gamma + cc),
               (beta * beta + gamma * gamma + bb * bb + cc * cc) * 0.5)
    return diff if diff <= plus else plus


def _slope_range(x, B, a, s):
    lo, hi = a * (x - B), a * (x + B)
    if B >= 1.0:
        lo, hi = min(lo, a * (-x - B)), max(hi, a * (-x + B))
    lo, hi = max(lo, -s), min(hi, s)
    return ceil(lo - 1e-9), floor(hi + 1e-9)


def _face_a_range(x, Bw, s):
    ab = abs(x) + Bw
    alo = max(ceil(s / ab - 1e-9), 1) if ab > 0 and s / ab - 1e-9 < s else s
    ahi = s - 1
    bm = abs(x) - Bw
    if bm > 0 and s / bm + 1e-9 < ahi:
        ahi = floor(s / bm + 1e-9)
    return alo, ahi


def _simul_shell(s, beta, gamma, B, rel, absm, rows, vals, best):
    Bw = B * (1.0 + rel) + absm

    def attempt(a, b, c):
        rho = _simul_rho(beta, gamma, a, b, c)
        if rho <= B * (1.0 + rel) + absm and gcd(gcd(a, b), c) == 1:
            rows.append((a, b, c))
            vals.append(rho)
            if rho < best[0]:
                best[0] = rho

    blo, bhi = _slope_range(beta, Bw, s, s)
    clo, chi = _slope_range(gamma, Bw, s, s)
    for b in range(blo, bhi + 1):
        for c in range(clo, chi + 1):
            attempt(s, b, c)
    alo, ahi = _face_a_range(beta, Bw, s)
    for b in (s, -s):
        for a in range(alo, ahi + 1):
            clo, chi = _slope_range(gamma, Bw, a, s)
            for c in range(clo, chi + 1):
                attempt(a, b, c)
    alo, ahi = _face_a_range(gamma, Bw, s)
    for c in (s, -s):
        for a in range(alo, ahi + 1):
            blo, bhi = _slope_range(beta, Bw, a, s - 1)
            for b in range(blo, bhi + 1):
                attempt(a, b, c)


def simul_scan(beta, gamma, shells, mode, B0, thr_sizes, thr_vals, rel, absm):
    if mode == 2 and len(thr_sizes) == 0:
        raise ValueError("threshold mode needs at least one step")
    rows, vals = [], []
    best = [B0]
    for k in shells:
        k = int(k)
        if mode == 0:
            _simul_shell(k, beta, gamma, best[0], rel, absm, rows, vals, best)
        elif mode == 1:
            shell_best = [best[0]]
            _simul_shell(k, beta, gamma, best[0], rel, absm, rows, vals, shell_best)
            best[0] = shell_best[0]
        else:
            bound = thr_vals[0]
            for sz, v in zip(thr_sizes, thr_vals):
                if sz <= k:
                    bound = v
                else:
                    break
            _simul_shell(k, beta, gamma, float(bound), rel, absm, rows, vals, [inf])
    return (*_export(rows, vals, 3), best[0])
