"""Slow, loop-based reference implementations.

Nothing here imports the package's game code; each quantity is written out
from its definition with plain Python loops over users, channels and
profiles so the vectorized kernels can be checked against it.
"""

import itertools
import math


def ewaij(P, Pj, H, Hj, chans, cj):
    N = len(chans)
    total = 0.0
    for n in range(N):
        for m in range(N):
            if m != n and chans[m] == chans[n]:
                total += P[n] * P[m] * H[m][n][chans[n]]
        if chans[n] == cj:
            total += P[n] * Pj * Hj[n][chans[n]]
    return total


def user_utility(L, P, Pj, H, Hj, chans, cj, n):
    u = L
    for m in range(len(chans)):
        if m != n and chans[m] == chans[n]:
            u -= P[n] * P[m] * H[m][n][chans[n]]
    if chans[n] == cj:
        u -= P[n] * Pj * Hj[n][chans[n]]
    return u


def jammer_utility(P, Pj, Hj, chans, cj):
    return sum(P[n] * Pj * Hj[n][cj] for n in range(len(chans)) if chans[n] == cj)


def potential(P, Pj, H, Hj, chans, cj):
    N = len(chans)
    phi = 0.0
    for n in range(N):
        for m in range(n + 1, N):
            if chans[m] == chans[n]:
                phi -= P[n] * P[m] * H[m][n][chans[n]]
        if chans[n] == cj:
            phi -= P[n] * Pj * Hj[n][chans[n]]
    return phi


def rates(P, Pj, H, Hj, D, B, N0, chans, cj):
    out = []
    for n in range(len(chans)):
        c = chans[n]
        interf = sum(P[m] * H[m][n][c] for m in range(len(chans)) if m != n and chans[m] == c)
        jam = Pj * Hj[n][c] if c == cj else 0.0
        out.append(B * math.log2(1.0 + P[n] * D[n][c] / (B * N0 + interf + jam)))
    return out


def nash_profiles(L, P, Pj, H, Hj, M, cj, tol=1e-12):
    N = len(P)
    found = []
    for chans in itertools.product(range(M), repeat=N):
        stable = True
        for n in range(N):
            here = user_utility(L, P, Pj, H, Hj, chans, cj, n)
            for c in range(M):
                alt = list(chans)
                alt[n] = c
                if user_utility(L, P, Pj, H, Hj, alt, cj, n) > here + tol * L:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            found.append(chans)
    return found


def stackelberg(L, P, Pj, H, Hj, M, tol=1e-12):
    """Jammer maximizes its utility against the follower potential maximizer."""
    N = len(P)
    best = None
    for cj in range(M):
        top, arg = -math.inf, None
        for chans in itertools.product(range(M), repeat=N):
            phi = potential(P, Pj, H, Hj, chans, cj)
            if phi > top + tol * L:
                top, arg = phi, chans
        uj = jammer_utility(P, Pj, Hj, arg, cj)
        if best is None or uj > best[2] + tol * L:
            best = (cj, arg, uj)
    return best


# -- power game -------------------------------------------------------------

def expected_user_utility(ps, pj, hs_vals, hs_probs, hj_vals, hj_probs, sigma2, cs):
    total = 0.0
    for a, pa in zip(hs_vals, hs_probs):
        for b, pb in zip(hj_vals, hj_probs):
            total += pa * pb * ps * a / (sigma2 + pj * b)
    return total - cs * ps


def expected_jammer_utility(ps_hat, pj, hs_vals, hs_probs, hj_vals, hj_probs, sigma2, cj):
    return -expected_user_utility(ps_hat, pj, hs_vals, hs_probs, hj_vals, hj_probs, sigma2, 0.0) - cj * pj


def expected_rate(ps, pj, hs_vals, hs_probs, hj_vals, hj_probs, sigma2):
    total = 0.0
    for a, pa in zip(hs_vals, hs_probs):
        for b, pb in zip(hj_vals, hj_probs):
            total += pa * pb * math.log2(1.0 + ps * a / (sigma2 + pj * b))
    return total


def closed_form_response(ps_hat, hs, hj, sigma2, cj, pj_max):
    x = (math.sqrt(ps_hat * hs * hj / cj) - sigma2) / hj
    return min(max(x, 0.0), pj_max)


def scan_max(f, lo, hi, points):
    """Best of an evenly spaced scan; returns (x, f(x))."""
    best = (lo, f(lo))
    for i in range(1, points + 1):
        x = lo + (hi - lo) * i / points
        fx = f(x)
        if fx > best[1]:
            best = (x, fx)
    return best


# -- hierarchical learning replay ---------------------------------------------

def hla_replay(L, P, Pj, H, Hj, M, epochs, K, b, alpha, eps0, decay, eps_floor, floor, seed):
    """Scalar re-implementation of the learning loop, consuming the same draws.

    Returns the per-epoch jammer channels, the per-epoch mean jammer utility
    and the final user strategies.
    """
    import numpy as np

    rng = np.random.default_rng(seed)
    N = len(P)
    q = [[1.0 / M] * M for _ in range(N)]
    Q = [0.0] * M
    jam_path, uj_path = [], []
    for k in range(epochs):
        eps = max(eps0 * decay**k, eps_floor)
        if rng.random() < eps:
            cj = int(rng.integers(M))
        else:
            cj = max(range(M), key=lambda c: (Q[c], -c))
        draws = rng.random((K, N))
        uj_sum = 0.0
        for t in range(K):
            chans = []
            for n in range(N):
                acc, pick = 0.0, M - 1
                for c in range(M):
                    acc += q[n][c]
                    if draws[t][n] < acc:
                        pick = c
                        break
                chans.append(pick)
            for n in range(N):
                r = min(max(user_utility(L, P, Pj, H, Hj, chans, cj, n) / L, 0.0), 1.0)
                a = chans[n]
                new = [x - b * r * x for x in q[n]]
                new[a] = q[n][a] + b * r * (1.0 - q[n][a])
                new = [max(x, floor) for x in new]
                s = sum(new)
                q[n] = [x / s for x in new]
            uj_sum += jammer_utility(P, Pj, Hj, chans, cj)
        Q[cj] = (1 - alpha) * Q[cj] + alpha * uj_sum / K
        jam_path.append(cj)
        uj_path.append(uj_sum / K)
    return jam_path, uj_path, q
