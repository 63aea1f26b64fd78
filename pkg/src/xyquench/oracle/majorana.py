"""Majorana-word algebra and Wick contraction via Pfaffians.

Conventions: Majorana operators c_m obey {c_m, c_n} = 2 delta_mn.  A Gaussian
state is described by the real antisymmetric covariance

    Gamma_mn = (i/2) <[c_m, c_n]>,   so  <c_m c_n> = -i Gamma_mn  (m != n).

For distinct, ascending indices m_1 < ... < m_2k Wick's theorem gives

    <c_m1 ... c_m2k> = (-i)^k Pf(Gamma[m, m]).
"""
from __future__ import annotations

import numpy as np


def pfaffian(a):
    """Pfaffian of a real or complex antisymmetric matrix.

    Parlett-Reid style elimination with partial pivoting, O(n^3).
    """
    a = np.array(a, dtype=complex if np.iscomplexobj(a) else float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("pfaffian needs a square matrix")
    if n % 2:
        return a.dtype.type(0)
    if n == 0:
        return a.dtype.type(1)
    result = a.dtype.type(1)
    for k in range(0, n - 1, 2):
        # bring the largest entry of column k (below the diagonal) to row k+1
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            result = -result
        pivot = a[k, k + 1]
        if pivot == 0:
            return a.dtype.type(0)
        result = result * pivot
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            # eliminate row/column k against k+1 (rank-2 update on the trailing block)
            upd = np.outer(tau, a[k + 2:, k + 1])
            a[k + 2:, k + 2:] += upd - upd.T
    return result


def canonical_word(word):
    """Reduce a product of Majorana operators to ascending order.

    Returns ``(sign, indices)`` with repeated operators cancelled (c^2 = 1).
    """
    w = list(word)
    sign = 1
    # insertion sort counting transpositions
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            w[j - 1], w[j] = w[j], w[j - 1]
            sign = -sign
            j -= 1
    out = []
    for m in w:
        if out and out[-1] == m:
            out.pop()
        else:
            out.append(m)
    return sign, tuple(out)


def word_expectation(gamma, word):
    """<c_w1 c_w2 ...> for a Gaussian state with covariance ``gamma``."""
    sign, idx = canonical_word(word)
    k2 = len(idx)
    if k2 == 0:
        return complex(sign)
    if k2 % 2:
        return 0j
    sub = gamma[np.ix_(idx, idx)]
    return sign * (-1j) ** (k2 // 2) * complex(pfaffian(sub))


def parity_word(n_sites):
    """P = prod_j sigma^z_j = (-i)^N c_0 c_1 ... c_{2N-1}."""
    return (-1j) ** n_sites, tuple(range(2 * n_sites))
