"""Independent oracle for the frozen numbers in the test suite.

Uses only the standard library: binomial pmfs via math.comb, the normal
quantile from statistics.NormalDist, plain loops for grid scans and a
pure-Python Monte Carlo. Nothing from the gean package is imported.

    python scripts/derive_oracle_values.py
"""

import math
import random
from statistics import NormalDist, pvariance


def pmf(t, x, y):
    return math.comb(t, y) * x**y * (1 - x) ** (t - y)


def slot_probs(t, p, f):
    x = p / f
    p0, p1 = pmf(t, x, 0), pmf(t, x, 1)
    return p0, p1, 1 - p0 - p1


def g_zo(t, p, f):
    p0 = pmf(t, p / f, 0)
    return (1 - p0) - p0


def g_zoe(t, p, f):
    p0, p1, pe = slot_probs(t, p, f)
    return pe - p1


def var_zo(t, p, f):
    p0 = pmf(t, p / f, 0)
    pn = 1 - p0
    return (pn + p0 - (pn - p0) ** 2) / f


def g_zo_real(t, p, f):
    return 1 - 2 * math.exp(t * math.log(1 - p / f))


def k_zo(r):
    e = math.exp(-r)
    return max(e / (1 - e), (1 - e) / e)


def k_zoe(r):
    E, a, b = math.exp(r), 1 + 2 * r, 1 + 4 * r
    k1 = 1 / (abs(-E * b / a**2) - 1)
    k2 = abs((E**2 + a * (0.25 - E)) / (0.25 * a**2 - r * E))
    k3 = abs((E**2 - 2 * E * a + a**2) / (a**2 - E * b))
    return max(k1, k2, k3)


def rounds(f, p, tm, alpha, beta, eps):
    z = NormalDist().inv_cdf(1 - (1 - alpha - eps) / 2)
    mu = g_zo_real(tm, p, f)
    p0 = math.exp(tm * math.log(1 - p / f))
    var = (1 - (1 - 2 * p0) ** 2) / f
    nl = z * z * var / (g_zo_real((1 - beta) * tm, p, f) - mu) ** 2
    nr = z * z * var / (g_zo_real((1 + beta) * tm, p, f) - mu) ** 2
    return nl, nr, math.ceil(max(nl, nr))


def bisect(fn, lo, hi, tol=1e-10):
    # fn(lo) true, fn(hi) false
    while hi - lo > tol:
        m = (lo + hi) / 2
        lo, hi = (m, hi) if fn(m) else (lo, m)
    return lo


def main():
    print("slot_probs(1200,1,1000)      ", slot_probs(1200, 1, 1000))
    print("g_zo(168,1,200)              ", g_zo(168, 1, 200))
    print("var_zo(168,1,200)            ", var_zo(168, 1, 200))
    grid = {t: g_zoe(t, 1, 200) for t in range(0, 1000)}
    print("argmin_t g_zoe(t,1,200)      ", min(grid, key=grid.get))
    g1 = g_zoe(1, 1, 1000)
    tb = bisect(lambda t: g_zoe_real(t, 1, 1000) < g1, 500, 3000)
    print("r_min at f=1000              ", tb / 1000)
    print("k_zo(0.84)                   ", k_zo(0.84), math.expm1(0.84))
    print("eps(200,0.84), eps(1000,0.84)", math.sqrt(k_zo(0.84) / 200), math.sqrt(k_zo(0.84) / 1000))
    print("k_zoe(1.2564), t_ml(0.92)    ", k_zoe(1.2564), k_zoe(1.2564) * 1.2564 / 0.08**2)
    print("t_ml(0.95)                   ", k_zoe(1.2564) * 1.2564 / 0.05**2)
    print("frame bounds r=.84 tm=2400   ", math.floor(2400 / 0.84), math.ceil(k_zo(0.84) / 0.05**2))
    print("r_max(2400,.05,zo)           ", bisect(lambda r: 0.05**2 * 2400 / r >= k_zo(r), 0.6931, 5))
    print("rounds(1000,.35,2400,.95,.05,.0363)", rounds(1000, 0.35, 2400, 0.95, 0.05, 0.0363))

    # Monte Carlo, independent-per-slot law: each slot ~ Binomial(300, 1/200)
    rng = random.Random(1)
    zs = []
    for _ in range(20000):
        n1 = ne = 0
        for _ in range(200):
            y = _binom(rng, 300, 1 / 200)
            n1 += y == 1
            ne += y > 1
        zs.append((ne - n1) / 200)
    p0, p1, pe = slot_probs(300, 1, 200)
    print("var (Ne-N1)/f t=300 f=200    ", (pe + p1 - (pe - p1) ** 2) / 200)
    print("MC var, 20000 frames         ", pvariance(zs))


def g_zoe_real(t, p, f):
    x = p / f
    q = 1 - x
    return 1 - q**t - 2 * t * x * q ** (t - 1)


def _binom(rng, n, x):
    # inversion sampling of Binomial(n, x); fine for small n * x
    u = rng.random()
    k, prob = 0, (1 - x) ** n
    cdf = prob
    while u > cdf and k < n:
        prob *= (n - k) / (k + 1) * x / (1 - x)
        k += 1
        cdf += prob
    return k


if __name__ == "__main__":
    main()
