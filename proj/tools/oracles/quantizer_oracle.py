#!/usr/bin/env python3
"""Independent cross-check: optimal quantizers of the base measures and the
two-point quantizer of the condensation measure, by brute force / DP in exact
rational arithmetic. Outputs are frozen into the C++ test suite.
"""
from fractions import Fraction as F
from itertools import combinations

# ---------------------------------------------------------------- discrete nu
# atoms a_j = 3/5 - (2/5) 2^-j, mass 2^-j.  Exact prefix sums let us cost any
# contiguous atom group and the infinite tail in closed form.


def atom(j):
    return F(3, 5) - F(2, 5) / 2 ** j


def sums_range(i, j):
    """(mass, first, second) moments of atoms i..j inclusive."""
    m = f = s = F(0)
    for t in range(i, j + 1):
        a = atom(t)
        w = F(1, 2) ** t
        m += w
        f += w * a
        s += w * a * a
    return m, f, s


def sums_tail(k):
    """closed-form (mass, first, second) of atoms k..infinity"""
    m = F(1, 2) ** (k - 1)
    # geometric series: sum_{j>=k} 4^-j = (4/3)4^-k, sum_{j>=k} 8^-j = (8/7)8^-k
    f = F(3, 5) * m - F(2, 5) * F(4, 3) * F(1, 4) ** k
    s = (F(9, 25) * m
         - F(12, 25) * F(4, 3) * F(1, 4) ** k
         + F(4, 25) * F(8, 7) * F(1, 8) ** k)
    return m, f, s


def group_cost(moments, c=None):
    m, f, s = moments
    if m == 0:
        return F(0), None
    cc = f / m if c is None else c
    return s - 2 * cc * f + cc * cc * m, cc


def nu_discrete_optimal(n, tail_window=64):
    """exact n-point quantizer: contiguous groups over atoms + one tail group"""
    best = None
    for t in range(n, n + tail_window):  # tail starts at atom t
        # DP over partitions of atoms 1..t-1 into n-1 contiguous groups
        import functools

        @functools.lru_cache(maxsize=None)
        def dp(i, g):
            # atoms i..t-1 into g groups
            if g == 0:
                return (F(0), ()) if i == t else (None, ())
            if i == t:
                return (None, ())
            out = (None, ())
            for j in range(i, t):
                c0, ctr = group_cost(sums_range(i, j))
                rest = dp(j + 1, g - 1)
                if rest[0] is None:
                    continue
                tot = c0 + rest[0]
                if out[0] is None or tot < out[0]:
                    out = (tot, (ctr,) + rest[1])
            return out

        tail_c, tail_ctr = group_cost(sums_tail(t))
        head = dp(1, n - 1)
        dp.cache_clear()
        if head[0] is None:
            continue
        tot = head[0] + tail_c
        if best is None or tot < best[0]:
            best = (tot, head[1] + (tail_ctr,), t)
    return best


# ----------------------------------------------------------------- uniform nu
def nu_uniform_optimal(n):
    pts = [F(2, 5) + F(2 * i - 1, 10 * n) for i in range(1, n + 1)]
    return F(1, 300) / n ** 2, pts


# ------------------------------------------------- two-point quantizer of P
def p_moments(kind):
    if kind == "discrete":
        n1, n2 = F(7, 15), F(39, 175)
    else:
        n1, n2 = F(1, 2), F(19, 75)
    e1 = (F(1, 3) * F(4, 5) + F(1, 3) * n1) / (1 - F(2, 15))
    e2 = (F(1, 3) * (2 * F(1, 5) * F(4, 5) * e1 + F(16, 25)) + F(1, 3) * n2) \
        / (1 - F(2, 75))
    return e1, e2


def j_interval_stats(side, kind):
    """(mass, first, second) of P restricted to J_side, side in {1,2}"""
    e1, e2 = p_moments(kind)
    s, t = F(1, 5), F(0) if side == 1 else F(4, 5)
    m = F(1, 3)
    f = m * (s * e1 + t)
    sec = m * (s * s * e2 + 2 * s * t * e1 + t * t)
    return m, f, sec


def two_means_discrete():
    """enumerate split structures: left = J1 + atoms 1..t, right = rest"""
    best = None
    for t in range(0, 30):
        mj, fj, sj = j_interval_stats(1, "discrete")
        ma, fa, sa = sums_range(1, t) if t >= 1 else (F(0), F(0), F(0))
        left = (mj + ma / 3, fj + fa / 3, sj + sa / 3)
        mt, ft, st = sums_tail(t + 1)
        mj2, fj2, sj2 = j_interval_stats(2, "discrete")
        right = (mj2 + mt / 3, fj2 + ft / 3, sj2 + st / 3)
        lc, lctr = group_cost(left)
        rc, rctr = group_cost(right)
        # centroid/boundary consistency: boundary between atom t and t+1
        mid = (lctr + rctr) / 2
        lo = atom(t) if t >= 1 else F(1, 5)
        hi = atom(t + 1)
        ok = lo <= mid <= hi
        cand = (lc + rc, lctr, rctr, t, ok, lc, rc)
        if best is None or cand[0] < best[0]:
            best = cand
    return best


def two_means_uniform():
    # symmetric split at 1/2: left = J1 + nu on [2/5,1/2]
    mj, fj, sj = j_interval_stats(1, "uniform")
    # nu-part: mass 1/2 of nu, i.e. P-mass 1/6, uniform on [2/5,1/2]
    m, lo, hi = F(1, 6), F(2, 5), F(1, 2)
    f = m * (lo + hi) / 2
    s = m * ((hi - lo) ** 2 / 12 + ((lo + hi) / 2) ** 2)
    left = (mj + m, fj + f, sj + s)
    lc, lctr = group_cost(left)
    return 2 * lc, lctr, 1 - lctr, lc


def main():
    print("== discrete nu optimal quantizers (cost, centers, tail start) ==")
    for n in range(1, 9):
        cost, ctrs, t = nu_discrete_optimal(n)
        conj = F(64, 1575) / 8 ** n
        print(f" n={n}: V={cost} (== (64/1575)/8^n: {cost == conj}) tail@{t} "
              f"centers={[str(c) for c in ctrs]}")
    print("== uniform nu: lattice W/n^2 ==")
    for n in (1, 2, 3, 5, 50):
        v, pts = nu_uniform_optimal(n)
        print(f" n={n}: V={v} pts[0..2]={[str(p) for p in pts[:3]]}")
    print("== two-means of P ==")
    tot, c1, c2, t, ok, vl, vr = two_means_discrete()
    print(f" discrete: V2={tot} c=({c1},{c2}) split after atom {t} boundary-ok={ok}")
    print(f"           V21={vl} V22={vr}")
    tot, c1, c2, half = two_means_uniform()
    print(f" uniform:  V2={tot} c=({c1},{c2}) half={half}")


if __name__ == "__main__":
    main()
