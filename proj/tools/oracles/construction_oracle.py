#!/usr/bin/env python3
"""Independent oracle for the block-construction machinery.

Models the greedy block-refinement at single-region granularity:
  * blocks: nu-copy (C-region, size m), P-center / P-pair (J-region)
  * pop = +1 point: nu m->m+1, center->pair, pair->split {nu@1, 2 child centers}
  * pop selection: maximal block total error; ties by (word, size)
  * transition discipline: within F(T)->F(T+1), each block is capped at its
    size in the target family; caps re-arm when the count crosses F(T+1)
All arithmetic exact (fractions).
"""
from fractions import Fraction as Fr
import sys

D, U = 'discrete', 'uniform'

V  = {D: Fr(86696, 777231),  U: Fr(97, 876)}     # one-mean error of P
V2 = {D: Fr(499067, 18505500), U: Fr(8003, 262800)}  # two-mean error of P
V3 = {D: Fr(30232, 6476925),   U: Fr(89, 21900)}     # three-mean error of P


def v_nu(case, m):
    """Optimal m-point error of the companion measure nu."""
    if case == D:
        return Fr(64, 1575) / 8**m
    return Fr(1, 300) / m**2


def a_size(case, j):
    """nu-copy size in family j (j=0 admissible for uniform only: size 1)."""
    if case == D:
        return 2 * j
    return 1 if j == 0 else 2**(2 * j - 1)


def F(case, n):
    return 5 * 2**n - 2 * n - 4 if case == D else 4**n + 2**(n + 1)


def p_level(case, t):
    """Level of the poppable P-blocks in family t."""
    return t if case == D else t + 1


# ---------- blocks ----------
# block = (kind, word, size)   kind in {'nu','c','p'}; size only for 'nu'
# word = tuple of digits 1/2; nu at word w occupies C_w, c/p occupy J_w.

def block_error(case, b):
    kind, w, size = b
    k = len(w)
    if kind == 'nu':
        return Fr(1, 3) * v_nu(case, size) / 75**k
    if kind == 'c':
        return V[case] / 75**k
    return V2[case] / 75**k


def family_blocks(case, n):
    """Blocks of the structured F(n)-point family."""
    out = []
    top = n - 1 if case == D else n
    for k in range(top + 1):
        for w in words(k):
            out.append(('nu', w, a_size(case, n - k)))
    for w in words(p_level(case, n)):
        out.append(('c', w, 0))
    return out


def words(k):
    if k == 0:
        return [()]
    return [w + (d,) for w in words(k - 1) for d in (1, 2)]


def family_count(case, blocks):
    tot = 0
    for kind, w, size in blocks:
        tot += size if kind == 'nu' else (1 if kind == 'c' else 2)
    return tot


def family_error(case, blocks):
    return sum(block_error(case, b) for b in blocks)


def v_f_closed(case, n):
    if case == D:
        return Fr(769208, 5884749) * Fr(2, 75)**n - Fr(64, 3339) * Fr(1, 64)**n
    if n == 0:
        return Fr(89, 21900)
    return Fr(1, 129) / 16**n - Fr(3473, 941700) * Fr(2, 75)**n


# ---------- greedy ----------

def nu_cap(case, t, level):
    """Size cap of a nu-block at `level` during transition t -> t+1."""
    j = t + 1 - level
    if case == D:
        return a_size(case, max(j, 1)) if j >= 1 else a_size(case, 1)
    return a_size(case, j) if j >= 0 else 1


def poppable(case, t, b):
    kind, w, size = b
    if kind == 'nu':
        return size < nu_cap(case, t, len(w))
    return len(w) == p_level(case, t)


def pop(case, blocks, i):
    """Pop block i in place; returns (delta_error, delta_count)."""
    kind, w, size = blocks[i]
    old = block_error(case, blocks[i])
    if kind == 'nu':
        blocks[i] = ('nu', w, size + 1)
        return block_error(case, blocks[i]) - old, 1
    if kind == 'c':
        blocks[i] = ('p', w, 0)
        return block_error(case, blocks[i]) - old, 1
    # pair -> {nu singleton on C_w, centers on J_w1, J_w2}
    new = [('nu', w, 1), ('c', w + (1,), 0), ('c', w + (2,), 0)]
    blocks[i:i + 1] = new
    return sum(block_error(case, b) for b in new) - old, 1


def greedy(case, n0, target, record=None):
    """Refine the F(n0) family to `target` points. Returns (blocks, error)."""
    blocks = family_blocks(case, n0)
    count = family_count(case, blocks)
    err = family_error(case, blocks)
    assert count == F(case, n0)
    t = n0
    while count < target:
        if count == F(case, t + 1):
            for b in blocks:  # boundary: everything must sit at its cap
                assert not poppable(case, t, b), (t, b)
            t += 1
        best, bkey = None, None
        for i, b in enumerate(blocks):
            if not poppable(case, t, b):
                continue
            key = (-block_error(case, b), b[1], b[2])
            if bkey is None or key < bkey:
                best, bkey = i, key
        assert best is not None, (case, t, count)
        d_err, d_cnt = pop(case, blocks, best)
        err += d_err
        count += d_cnt
        if record is not None:
            record.append((count, err))
    return blocks, err


def canon(blocks):
    return sorted(blocks)


# ---------- checks ----------

def main():
    ok = True

    def check(name, cond):
        nonlocal ok
        print(('PASS' if cond else 'FAIL'), name)
        ok = ok and cond

    # structural families still agree with the closed forms
    for case, lo, hi in ((D, 1, 10), (U, 0, 9)):
        good = all(
            family_count(case, family_blocks(case, n)) == F(case, n)
            and family_error(case, family_blocks(case, n)) == v_f_closed(case, n)
            for n in range(lo, hi + 1))
        check(f'{case} family error == closed form, n={lo}..{hi}', good)

    # greedy endpoint fidelity
    for case, lo, hi in ((D, 1, 6), (U, 0, 5)):
        for n in range(lo, hi + 1):
            blocks, err = greedy(case, n, F(case, n + 1))
            check(f'{case} greedy F({n})->F({n + 1}) blocks match',
                  canon(blocks) == canon(family_blocks(case, n + 1)))
            check(f'{case} greedy F({n})->F({n + 1}) error match',
                  err == v_f_closed(case, n + 1))

    # uniform intermediates: F(n)+2^(2n-1) hits the displayed closed form
    for n in range(1, 7):
        target = F(U, n) + 2**(2 * n - 1)
        _, err = greedy(U, n, target)
        formula = Fr(19, 4300) / 16**n - Fr(3473, 941700) * Fr(2, 75)**n
        check(f'uniform intermediate n={n} count={target} == formula',
              err == formula)

    # uniform count 28 (partial root ladder): root 8->12
    _, err28 = greedy(U, 2, 28)
    manual = v_f_closed(U, 2) - Fr(1, 900) * (Fr(1, 64) - Fr(1, 144))
    check('uniform greedy 24->28 == V_F(2) - (W/3)(1/64-1/144)', err28 == manual)
    print('   frozen: greedy(uniform,2,28) =', err28)

    # discrete pinned intermediates
    _, err6 = greedy(D, 1, 6)
    check('discrete greedy 4->6 == 13564657/14573081250',
          err6 == Fr(13564657, 14573081250))
    _, err8 = greedy(D, 1, 8)
    check('discrete greedy 4->8 == 489817/1457308125',
          err8 == Fr(489817, 1457308125))

    # order chains at n=40 under region-total keys (child-center key for the
    # two mixed upgrade states)
    n = 40
    snu = lambda l, m: Fr(1, 3) * v_nu(D, m) / 75**(n - l)
    S  = lambda l: snu(l, 2 * l)
    S2 = lambda l: snu(l, 2 * l + 1)
    S22 = lambda l: snu(l, 2 * l + 2)
    cen, pair, child = V[D] / 75**n, V2[D] / 75**n, V[D] / 75**(n + 1)
    c1 = all(S(n - k) > S2(n - k + 13) > S22(n - k + 26) > S(n - k - 1)
             for k in range(14, n - 2))
    check('discrete n=40 chain (i)', c1)
    check('discrete n=40 chain (ii)', S(14) > S2(27) > S22(40) > cen > S(13))
    check('discrete n=40 chain (iii)', S(5) > S2(18) > S22(31) > pair > S(4))
    check('discrete n=40 chain (iv)',
          S22(13) > child and child >= child and child > S22(12))

    # uniform bracket containment over [F(2), F(5)]
    rec = []
    greedy(U, 2, F(U, 5), record=rec)
    lo, hi = Fr(1, 2064), Fr(16, 129)
    bad = [(c, e) for c, e in rec if not (lo <= c * c * e <= hi)]
    b0 = v_f_closed(U, 2) * F(U, 2)**2
    check('uniform n^2 V_n in [1/2064,16/129] for n in [F(2),F(5)]',
          not bad and lo <= b0 <= hi)
    if bad:
        print('   first violation:', bad[0])

    print('ALL OK' if ok else 'FAILURES PRESENT')
    return 0 if ok else 1


if __name__ == '__main__':
    sys.exit(main())
