"""Numpy implementations of the hot loops, used when the extension is absent."""

import numpy as np


def _view(psi, n, cmask, cval, fixed):
    """Index tuple selecting the sub-tensor of psi with the control bits and
    the extra `fixed` {qubit: bit} assignments applied."""
    index = [slice(None)] * n
    for q in range(n):
        bit = 1 << (n - 1 - q)
        if cmask & bit:
            index[q] = 1 if cval & bit else 0
    for q, v in fixed.items():
        index[q] = v
    return tuple(index)


def apply_matrix(psi, n, target, m00, m01, m10, m11, cmask, cval):
    t = psi.reshape((2,) * n)
    i0 = _view(psi, n, cmask, cval, {target: 0})
    i1 = _view(psi, n, cmask, cval, {target: 1})
    a = t[i0].copy()
    b = t[i1]
    t[i0] = m00 * a + m01 * b
    t[i1] = m10 * a + m11 * b


def apply_swap(psi, n, qa, qb, cmask, cval):
    t = psi.reshape((2,) * n)
    i01 = _view(psi, n, cmask, cval, {qa: 0, qb: 1})
    i10 = _view(psi, n, cmask, cval, {qa: 1, qb: 0})
    tmp = t[i01].copy()
    t[i01] = t[i10]
    t[i10] = tmp


def mcx_rows(bits, target, ctrl_cols, ctrl_vals):
    if len(ctrl_cols):
        fire = np.all(bits[:, ctrl_cols] == ctrl_vals, axis=1)
        bits[fire, target] ^= 1
    else:
        bits[:, target] ^= 1


def count_band_sequences(n_tilde, length, kmin, kmax, chunk=1 << 18):
    total_words = n_tilde**length
    total = 0
    powers = [n_tilde**p for p in range(length)]
    for start in range(0, total_words, chunk):
        idx = np.arange(start, min(start + chunk, total_words), dtype=np.int64)
        counts = np.zeros((n_tilde, idx.size), dtype=np.int64)
        for pw in powers:
            digit = (idx // pw) % n_tilde
            for s in range(n_tilde):
                counts[s] += digit == s
        ok = np.all((counts >= kmin) & (counts <= kmax), axis=0)
        total += int(ok.sum())
    return total
