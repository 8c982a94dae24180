"""Brute-force references that share no code with the package."""

import itertools
import math

import numpy as np


def configs(n):
    """Spin tuples in basis-index order (spin 0 is the least-significant bit, bit 0 -> +1)."""
    for index in range(1 << n):
        yield index, tuple(1 - 2 * ((index >> i) & 1) for i in range(n))


def brute_weights(n, energy_fn, beta):
    return np.array([math.exp(-beta * energy_fn(s)) for _, s in configs(n)])


def brute_probs(n, energy_fn, beta):
    w = brute_weights(n, energy_fn, beta)
    return w / w.sum()


def brute_log_z(n, energy_fn, beta):
    return math.log(brute_weights(n, energy_fn, beta).sum())


def triangle_energy(J):
    return lambda s: J * (s[0] * s[1] + s[0] * s[2] + s[1] * s[2])


def tetrahedron_energy(J):
    return lambda s: J * sum(s[i] * s[j] for i, j in itertools.combinations(range(4), 2))


def chain_energy(J, L, h):
    def f(s):
        n = len(s)
        e = sum(h[i] * s[i] for i in range(n))
        e += sum(J[i] * s[i] * s[i + 1] for i in range(n - 1))
        e += sum(L[i] * s[i] * s[i + 2] for i in range(n - 2))
        return e

    return f


def lattice_energy(N, row_J, col_J, h):
    def f(s):
        at = lambda r, c: s[r * N + c]
        e = sum(h[r][c] * at(r, c) for r in range(N) for c in range(N))
        e += sum(row_J[r][c] * at(r, c) * at(r, c + 1) for r in range(N) for c in range(N - 1))
        e += sum(col_J[r][c] * at(r, c) * at(r + 1, c) for r in range(N - 1) for c in range(N))
        return e

    return f


def overlap_fidelity(a, b):
    return abs(np.vdot(a, b)) ** 2
