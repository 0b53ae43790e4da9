#!/usr/bin/env python3
"""Independent cross-check: quantization exponent, dimension extrapolation and
coefficient limits, at 60-digit precision with mpmath. Outputs are frozen into
the C++ test suite.
"""
from fractions import Fraction as F
import mpmath as mp

mp.mp.dps = 60

W = F(1, 300)


def v_f_closed(kind, n):
    if kind == "discrete":
        return F(769208, 5884749) * F(2, 75) ** n - F(64, 3339) * F(1, 64) ** n
    if n == 0:
        return F(89, 21900)
    if n == 1:
        return F(2537, 6570000)
    return F(1, 129) * F(1, 16) ** n - F(3473, 941700) * F(2, 75) ** n


def seq_F(kind, n):
    return 5 * 2 ** n - 2 * n - 4 if kind == "discrete" else 4 ** n + 2 ** (n + 1)


def exponent(r):
    """root x of 2*((1/3)(1/5)^r)^(x/(r+x)) = 1, via bisection"""
    c = mp.mpf(1) / 75 if r == 2 else mp.mpf(1) / 15
    f = lambda x: 2 * mp.power(c, x / (r + x)) - 1
    lo, hi = mp.mpf(1e-9), mp.mpf(10)
    for _ in range(300):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def dims(kind, levels):
    out = []
    for n in levels:
        fn = seq_F(kind, n)
        v = v_f_closed(kind, n)
        d = 2 * mp.log(fn) / (-mp.log(mp.mpf(v.numerator) / v.denominator))
        out.append((fn, d))
    return out


def main():
    kappa = exponent(2)
    print(f"kappa (r=2) = {mp.nstr(kappa, 30)}")
    print(f"closed form 2ln2/ln37.5  = {mp.nstr(2 * mp.log(2) / mp.log(mp.mpf('37.5')), 30)}")
    print(f"exponent (r=1) = {mp.nstr(exponent(1), 30)}")
    print(f"closed form ln2/ln7.5 = {mp.nstr(mp.log(2) / mp.log(mp.mpf('7.5')), 30)}")

    # dimension extrapolation: d_n = D - c/log F(n); two-point elimination
    for kind, target in (("discrete", kappa), ("uniform", mp.mpf(1))):
        (f1, d1), (f2, d2) = dims(kind, [100, 200])
        l1, l2 = mp.log(f1), mp.log(f2)
        dhat = (d2 * l2 - d1 * l1) / (l2 - l1)
        print(f"[{kind}] d_100={mp.nstr(d1, 12)} d_200={mp.nstr(d2, 12)} "
              f"extrapolated={mp.nstr(dhat, 12)} |err|={mp.nstr(abs(dhat - target), 3)}")

    # coefficient checks
    C = F(769208, 5884749)
    n = 30
    val = mp.power(seq_F("discrete", n), 2 / kappa) * \
        mp.mpf(v_f_closed("discrete", n).numerator) / v_f_closed("discrete", n).denominator
    lim = mp.power(5, 2 / kappa) * mp.mpf(C.numerator) / C.denominator
    print(f"[discrete] F(30)^(2/k)V = {mp.nstr(val, 20)} limit 5^(2/k)C = "
          f"{mp.nstr(lim, 20)} rel = {mp.nstr(abs(val - lim) / lim, 3)}")
    n = 20
    exact = seq_F("uniform", n) ** 2 * v_f_closed("uniform", n) - F(1, 129)
    print(f"[uniform] F(20)^2 V - 1/129 = {mp.nstr(mp.mpf(exact.numerator) / exact.denominator, 3)}")
    cnt = F(3, 2) * 4 ** n + 2 ** (n + 1)
    vim = v_f_closed("uniform", n) - W / 16 ** n
    exact2 = cnt * cnt * vim - F(171, 17200)
    print(f"[uniform] count^2 V_int - 171/17200 = "
          f"{mp.nstr(mp.mpf(exact2.numerator) / exact2.denominator, 3)}")

    # brackets
    lo_u, hi_u = F(1, 2064), F(16, 129)
    print(f"[uniform] bracket [{lo_u}, {hi_u}] = [{float(lo_u):.6g}, {float(hi_u):.6g}]")
    lob = mp.power(mp.mpf(25) / 4, 1 / kappa) * mp.mpf(C.numerator) / C.denominator
    hib = mp.power(100, 1 / kappa) * mp.mpf(C.numerator) / C.denominator
    print(f"[discrete] bracket = [{mp.nstr(lob, 20)}, {mp.nstr(hib, 20)}]")

    # intermediate-subsequence limit, discrete: exact count prefactor
    c6 = 6 + F(2 ** 13 + 1, 2 ** 30)
    corr = (F(128, 3975) * F(75, 128) ** 31
            + F(1024, 35775) * (F(75, 128) ** 18 - F(75, 128) ** 31)
            + F(450241, 5323500))
    lim2 = mp.power(mp.mpf(c6.numerator) / c6.denominator, 2 / kappa) * \
        (mp.mpf(C.numerator) / C.denominator - mp.mpf(corr.numerator) / corr.denominator)
    lim2_paper = mp.power(6, 2 / kappa) * \
        (mp.mpf(C.numerator) / C.denominator - mp.mpf(corr.numerator) / corr.denominator)
    print(f"[discrete] intermediate limit = {mp.nstr(lim2, 20)} "
          f"(prefactor-6 version {mp.nstr(lim2_paper, 20)}) vs F-limit {mp.nstr(lim, 20)}")
    print(f"[uniform] intermediate limit 171/17200 = {float(F(171, 17200)):.10g} "
          f"vs F-limit 1/129 = {float(F(1, 129)):.10g}")


if __name__ == "__main__":
    main()
