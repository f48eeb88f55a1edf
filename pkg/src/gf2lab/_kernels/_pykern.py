"""Pure-Python kernel backend: big-int bitsets and popcounts.

Mirrors the Cython extension's API exactly; selected at import time
when the extension is unavailable (or forced via GF2LAB_BACKEND).
Scan order inside every sweep is (subspace, shift, direction), and the
first strict maximizer wins, so witnesses match across backends.
"""
from __future__ import annotations

from typing import Sequence

BACKEND = "python"


def _to_int_rows(bases) -> list[tuple[int, ...]]:
    return [tuple(int(w) for w in row) for row in bases]


def _words_to_int(words) -> int:
    acc = 0
    for i, w in enumerate(words):
        acc |= int(w) << (64 * i)
    return acc


def rank_words(rows: Sequence[int], width: int) -> int:
    piv = [0] * (width + 1)
    rank = 0
    for v in rows:
        v = int(v)
        while v:
            b = v.bit_length() - 1
            if piv[b]:
                v ^= piv[b]
            else:
                piv[b] = v
                rank += 1
                break
    return rank


def _span_points(rows: tuple[int, ...]) -> list[int]:
    pts = [0]
    cur = 0
    for i in range(1, 1 << len(rows)):
        cur ^= rows[(i & -i).bit_length() - 1]
        pts.append(cur)
    return pts


def _free_positions(rows: tuple[int, ...], n: int) -> list[int]:
    pivot_mask = 0
    for r in rows:
        pivot_mask |= r & -r
    return [j for j in range(n) if not (pivot_mask >> j) & 1]


def _shift_values(rows: tuple[int, ...], n: int, with_shifts: bool) -> list[int]:
    if not with_shifts:
        return [0]
    free = _free_positions(rows, n)
    shifts = []
    for idx in range(1 << len(free)):
        v = 0
        for t, j in enumerate(free):
            if (idx >> t) & 1:
                v |= 1 << j
        shifts.append(v)
    return shifts


def condenser_sweep(bases, map_cols, m_out: int, threshold: int):
    """Min over subspaces of (max over row maps of image rank).

    bases: (ns, k) packed basis rows; map_cols: (n_maps, n) packed
    columns (column j of map M as an m_out-bit int).  Returns
    (min_best, argmin_index, count_below_threshold).
    """
    rows_list = _to_int_rows(bases)
    cols_list = _to_int_rows(map_cols)
    min_best = -1
    argmin = -1
    below = 0
    for si, rows in enumerate(rows_list):
        best = 0
        for cols in cols_list:
            imgs = []
            for r in rows:
                img = 0
                t = r
                while t:
                    img ^= cols[(t & -t).bit_length() - 1]
                    t &= t - 1
                imgs.append(img)
            rk = rank_words(imgs, m_out)
            if rk > best:
                best = rk
                if best == m_out:
                    break
        if best < threshold:
            below += 1
        if min_best < 0 or best < min_best:
            min_best = best
            argmin = si
    return min_best, argmin, below


def _xor_shift_masks(n: int) -> list[tuple[int, int]]:
    """For each bit j: (low_mask, j) so that permuting a 2^n-bit set S by
    x -> x ^ (1<<j) is ((S & low) << 2^j) | ((S >> 2^j) & low)."""
    size = 1 << n
    out = []
    for j in range(n):
        blk = 1 << j
        pat = (1 << blk) - 1
        low = 0
        pos = 0
        while pos < size:
            low |= pat << pos
            pos += 2 * blk
        out.append((low, blk))
    return out


def _permute_by_xor(f: int, a: int, masks) -> int:
    """Bitset of x -> f[x ^ a]."""
    out = f
    t = a
    while t:
        j = (t & -t).bit_length() - 1
        low, blk = masks[j]
        out = ((out & low) << blk) | ((out >> blk) & low)
        t &= t - 1
    return out


def affine_sweep_m1(f_words, n: int, bases, with_shifts: bool):
    """Max over (subspace, shift) of |S - 2*|coset ∩ f||; Δ = num/(2S)."""
    f = _words_to_int(f_words)
    rows_list = _to_int_rows(bases)
    best_num, best_si, best_shift = -1, -1, -1
    for si, rows in enumerate(rows_list):
        pts = _span_points(rows)
        size = len(pts)
        for s in _shift_values(rows, n, with_shifts):
            mask = 0
            for p in pts:
                mask |= 1 << (p ^ s)
            num = abs(size - 2 * (mask & f).bit_count())
            if num > best_num:
                best_num, best_si, best_shift = num, si, s
                if best_num == size:
                    return best_num, best_si, best_shift
    return best_num, best_si, best_shift


def xor_sweep_m1(f_words, n: int, bases, with_shifts: bool):
    """Max over (subspace, shift, a != 0) of |sum over coset of (-1)^(f(x)+f(x+a))|.

    Returned num satisfies bias = num / 2^k.
    """
    f = _words_to_int(f_words)
    masks = _xor_shift_masks(n)
    gs = [0] + [f ^ _permute_by_xor(f, a, masks) for a in range(1, 1 << n)]
    rows_list = _to_int_rows(bases)
    best = (-1, -1, -1, -1)
    for si, rows in enumerate(rows_list):
        pts = _span_points(rows)
        size = len(pts)
        for s in _shift_values(rows, n, with_shifts):
            mask = 0
            for p in pts:
                mask |= 1 << (p ^ s)
            num_best = -1
            a_best = -1
            for a in range(1, 1 << n):
                num = abs(size - 2 * (mask & gs[a]).bit_count())
                if num > num_best:
                    num_best, a_best = num, a
                    if num == size:
                        break
            if num_best > best[0]:
                best = (num_best, si, s, a_best)
                if best[0] == size:
                    return best
    return best


def joint_sweep_m1(f_words, n: int, bases, with_shifts: bool):
    """Max over (subspace, shift, a != 0) of sum_v |c_0v - c_1v|; Δ = num/(2S)."""
    f = _words_to_int(f_words)
    masks = _xor_shift_masks(n)
    fas = [0] + [_permute_by_xor(f, a, masks) for a in range(1, 1 << n)]
    rows_list = _to_int_rows(bases)
    best = (-1, -1, -1, -1)
    for si, rows in enumerate(rows_list):
        pts = _span_points(rows)
        for s in _shift_values(rows, n, with_shifts):
            mask = 0
            for p in pts:
                mask |= 1 << (p ^ s)
            m1 = mask & f
            m0 = mask & ~f
            pc1 = m1.bit_count()
            pc0 = m0.bit_count()
            num_best = -1
            a_best = -1
            for a in range(1, 1 << n):
                fa = fas[a]
                c11 = (m1 & fa).bit_count()
                c01 = (m0 & fa).bit_count()
                num = abs(pc0 - c01 - (pc1 - c11)) + abs(c01 - c11)
                if num > num_best:
                    num_best, a_best = num, a
            if num_best > best[0]:
                best = (num_best, si, s, a_best)
                if best[0] == len(pts):
                    return best
    return best
