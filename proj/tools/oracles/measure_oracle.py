#!/usr/bin/env python3
"""Independent cross-check: moments and region integrals of the condensation
measure, computed by adaptive measure decomposition in exact rational
arithmetic. Used to freeze expected values for the C++ test suite.

The measure P on [0,1] satisfies  P = (1/3) P S1^-1 + (1/3) P S2^-1 + (1/3) nu
with S1(x) = x/5, S2(x) = x/5 + 4/5 and nu one of:
  discrete: atoms a_j = 3/5 - (2/5) 2^-j with mass 2^-j  (j >= 1)
  uniform:  U([2/5, 3/5])
"""
from fractions import Fraction as F
import sys

S = [(F(1, 5), F(0)), (F(1, 5), F(4, 5))]  # (ratio, offset)
P_MAPS = F(1, 3)   # weight of each similarity image
P_NU = F(1, 3)     # weight of the base measure copy

ATOM_CUT = 64      # discrete-base atoms kept explicitly before tail grouping
DEPTH_CAP = 40     # adaptive recursion cap; leftover mass 3^-40 ~ 8e-20


def nu_moments(kind):
    if kind == "discrete":
        # closed geometric sums of sum 2^-j a_j^k
        m1 = F(3, 5) - F(2, 5) * F(1, 3)
        m2 = F(9, 25) - F(12, 25) * F(1, 3) + F(4, 25) * F(1, 7)
    else:
        m1 = F(1, 2)
        m2 = (F(3, 5) ** 3 - F(2, 5) ** 3) / (3 * F(1, 5))
    return m1, m2


def p_moments(kind):
    n1, n2 = nu_moments(kind)
    # first and second moment fixed points of the self-similarity relation
    num1 = sum(P_MAPS * t for (s, t) in S) + P_NU * n1
    e1 = num1 / (1 - sum(P_MAPS * s for (s, t) in S))
    num2 = sum(P_MAPS * (2 * s * t * e1 + t * t) for (s, t) in S) + P_NU * n2
    e2 = num2 / (1 - sum(P_MAPS * s * s for (s, t) in S))
    return e1, e2


def atoms(kind):
    if kind != "discrete":
        raise ValueError
    return [(F(3, 5) - F(2, 5) / 2 ** j, F(1, 2) ** j) for j in range(1, ATOM_CUT + 1)]


def apply_map(word, x):
    # word: string over {1,2}, outermost letter first
    for c in reversed(word):
        s, t = S[int(c) - 1]
        x = s * x + t
    return x


def sq_cost_interval(lo, hi, mass, c):
    """Exact integral of (x-c)^2 against the uniform distribution on [lo,hi]
    carrying total mass `mass`."""
    mid = (lo + hi) / 2
    return mass * ((hi - lo) ** 2 / 12 + (mid - c) ** 2)


def nearest(centers, x):
    return min(centers, key=lambda c: abs(c - x))


def distortion(kind, centers, depth_cap=DEPTH_CAP):
    """Exact-to-tail-mass integral of min_c (x-c)^2 dP via adaptive descent:
    a similarity region is split until it fits inside one Voronoi cell."""
    e1, e2 = p_moments(kind)
    var_p = e2 - e1 * e1
    n1, n2 = nu_moments(kind)
    bounds = sorted((a + b) / 2 for a, b in zip(centers, centers[1:]))
    total = F(0)

    def cell_of(lo, hi):
        # index of the Voronoi cell wholly containing [lo,hi], else None
        if any(lo < b < hi for b in bounds):
            return None
        return nearest(centers, (lo + hi) / 2)

    def add_nu_copy(word, scale_mass):
        # base-measure copy supported on word-image of [2/5,3/5]
        nonlocal total
        s = F(1, 5) ** len(word)
        if kind == "uniform":
            cuts = [F(2, 5)] + [b for b in
                                sorted((apply_word_inv(word, b) for b in bounds))
                                if F(2, 5) < b < F(3, 5)] + [F(3, 5)]
            for lo, hi in zip(cuts, cuts[1:]):
                c = nearest(centers, apply_map(word, (lo + hi) / 2))
                # pull the center back through the affine map
                total += scale_mass * s * s * sq_cost_interval(
                    lo, hi, (hi - lo) * 5, (c - apply_map(word, F(0))) / s)
        else:
            tail_lo = F(3, 5) - F(2, 5) / 2 ** ATOM_CUT
            for a, m in atoms(kind):
                c = nearest(centers, apply_map(word, a))
                total += scale_mass * m * (apply_map(word, a) - c) ** 2
            # tail group: mass 2^-ATOM_CUT clustered within 2^-ATOM_CUT of 3/5
            c = nearest(centers, apply_map(word, F(3, 5)))
            total += scale_mass * F(1, 2) ** ATOM_CUT * \
                (apply_map(word, tail_lo) - c) ** 2  # crude; below tail slack

    def apply_word_inv(word, x):
        for c in word:
            s, t = S[int(c) - 1]
            x = (x - t) / s
        return x

    def rec(word, mass):
        nonlocal total
        lo, hi = apply_map(word, F(0)), apply_map(word, F(1))
        cell = cell_of(lo, hi)
        if cell is not None:
            k = len(word)
            center_img = apply_map(word, e1)
            total += mass * (F(1, 25) ** k * var_p + (center_img - cell) ** 2)
            return
        if len(word) >= depth_cap:
            total += mass  # worst-case slop 3^-40 ~ 8e-20, below print precision
            return
        add_nu_copy(word, mass * P_NU)
        rec(word + "1", mass * P_MAPS)
        rec(word + "2", mass * P_MAPS)

    rec("", F(1))
    return total


def main():
    for kind in ("discrete", "uniform"):
        n1, n2 = nu_moments(kind)
        e1, e2 = p_moments(kind)
        print(f"[{kind}] E(nu)={n1}  E(nu^2)={n2}  V(nu)={n2 - n1 * n1}")
        print(f"[{kind}] E(P)={e1}   E(P^2)={e2}  V(P)={e2 - e1 * e1}")

    # region integrals fixed points: word-image means and the parallel-axis law
    e1, e2 = p_moments("discrete")
    print("[discrete] S_21([0,1]) =", apply_map("21", F(0)), apply_map("21", F(1)))
    # integral over J_1 of (x - 2/5)^2 dP = (1/3)(V/25 + (S1(E)-2/5)^2)
    v = e2 - e1 * e1
    j1 = F(1, 3) * (v / 25 + (e1 / 5 - F(2, 5)) ** 2)
    print("[discrete] int_J1 (x-2/5)^2 dP =", j1)
    e1u, e2u = p_moments("uniform")
    vu = e2u - e1u * e1u
    j1u = F(1, 3) * (vu / 25 + (e1u / 5 - F(1, 5)) ** 2)
    print("[uniform] int_J1 (x-1/5)^2 dP =", j1u)

    # two-piece uniform interval example: [2/5,1/2] to 9/20 and [1/2,3/5] to 11/20,
    # unit-density measure of total mass 1/5 each piece scaled to nu-mass
    c = sq_cost_interval(F(2, 5), F(1, 2), F(1, 2), F(9, 20)) + \
        sq_cost_interval(F(1, 2), F(3, 5), F(1, 2), F(11, 20))
    print("[uniform] two-piece cost at {9/20,11/20} =", c)

    # distortion of published codebooks (adaptive exact descent)
    checks = [
        ("discrete", [F(19, 39)]),
        ("discrete", [F(659, 2730), F(1621, 1950)]),
        ("discrete", [F(19, 195), F(7, 15), F(35, 39)]),
        ("discrete", [F(19, 195), F(2, 5), F(8, 15), F(35, 39)]),
        ("uniform", [F(1, 2)]),
        ("uniform", [F(13, 60), F(47, 60)]),
        ("uniform", [F(1, 10), F(1, 2), F(9, 10)]),
        ("uniform", [F(1, 10), F(9, 20), F(11, 20), F(9, 10)]),
    ]
    for kind, cb in checks:
        d = distortion(kind, cb)
        print(f"[{kind}] distortion {[str(c) for c in cb]} = {d} ~ {float(d):.15g}")


if __name__ == "__main__":
    sys.setrecursionlimit(10000)
    main()
