"""Block construction for finite-range models.

Spins are grouped into consecutive blocks. Each block couples only to itself
and to the block before it. A backward message pass computes, for every
configuration ``s`` of block ``b``,

    gamma_b(s) = sum_t gamma_{b+1}(t) exp(-beta (H_t(t) + H_st(s, t)))

with ``gamma`` of the last block identically one. Block ``b+1`` is then
prepared, conditioned on ``s``, with amplitudes
``sqrt(exp(-beta (H_t + H_st)) gamma_{b+1}(t) / gamma_b(s))``; these columns
are normalized exactly because of the recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import ConsistencyError, ResourceLimitError, TopologyError
from .plan import BlockRotationGate, PreparationPlan, RotationGate
from .spin_model import (
    CouplingTerm,
    Hamiltonian,
    check_beta,
    gibbs_table,
    lattice_hamiltonian,
    spin_columns,
    term_energies,
)

MAX_BLOCK_SIZE = 12
MAX_LATTICE_N = 4
COLUMN_TOL = 1e-8


@dataclass(frozen=True)
class SpinBlock:
    indices: tuple[int, ...]
    internal: tuple[CouplingTerm, ...] = ()
    inter: tuple[CouplingTerm, ...] = ()

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass
class GammaTable:
    """``log gamma`` for every configuration of one block, plus the number of summand evaluations spent."""

    log_values: np.ndarray
    work: int = 0


def _check_blocks(blocks: Sequence[SpinBlock]) -> None:
    if not blocks:
        raise ValueError("need at least one block")
    for b, block in enumerate(blocks):
        if block.size > MAX_BLOCK_SIZE:
            raise ResourceLimitError(f"block {b} has {block.size} spins, cap is {MAX_BLOCK_SIZE}")
        own = set(block.indices)
        prev = set(blocks[b - 1].indices) if b > 0 else set()
        for t in block.internal:
            if not set(t.sites) <= own:
                raise TopologyError(f"internal term {t.sites} leaves block {b}")
        for t in block.inter:
            if b == 0 or not set(t.sites) <= own | prev:
                raise TopologyError(f"inter-block term {t.sites} of block {b} reaches beyond the previous block")


def _local_energy(block: SpinBlock, prev: SpinBlock | None) -> np.ndarray:
    """``H_t + H_st`` as a ``(2**|prev|, 2**|block|)`` matrix (a single row when ``prev`` is None)."""
    prev_idx = prev.indices if prev is not None else ()
    joint = tuple(prev_idx) + tuple(block.indices)
    position = {site: k for k, site in enumerate(joint)}
    sigma = spin_columns(len(joint))
    e = term_energies(block.internal, sigma, position) + term_energies(block.inter, sigma, position)
    # joint index = s + 2**|prev| * t
    return e.reshape(1 << len(block.indices), 1 << len(prev_idx)).T


def gamma_backward(blocks: Sequence[SpinBlock], beta: float) -> list[GammaTable]:
    """Message tables ordered first to last block."""
    beta = check_beta(beta)
    _check_blocks(blocks)
    tables = [GammaTable(np.zeros(1 << blocks[-1].size))]
    for b in range(len(blocks) - 1, 0, -1):
        e = _local_energy(blocks[b], blocks[b - 1])
        log_next = tables[0].log_values
        log_gamma = logsumexp(-beta * e + log_next[None, :], axis=1)
        tables.insert(0, GammaTable(log_gamma, work=e.size))
    return tables


def log_partition_from_gamma(blocks: Sequence[SpinBlock], gammas: Sequence[GammaTable], beta: float) -> float:
    """``log sum_s exp(-beta H_s(s)) gamma_0(s)`` over the first block."""
    e0 = _local_energy(blocks[0], None)[0]
    return float(logsumexp(-beta * e0 + gammas[0].log_values))


def block_rotation(blocks: Sequence[SpinBlock], gammas: Sequence[GammaTable], beta: float) -> PreparationPlan:
    beta = check_beta(beta)
    _check_blocks(blocks)
    if len(gammas) != len(blocks):
        raise ValueError("one gamma table per block required")
    n_spins = 1 + max(i for blk in blocks for i in blk.indices)

    e0 = _local_energy(blocks[0], None)[0]
    log_w = -beta * e0 + gammas[0].log_values
    log_M = float(logsumexp(log_w))
    gates = [BlockRotationGate(blocks[0].indices, (), np.exp(0.5 * (log_w - log_M))[None, :])]

    for b in range(1, len(blocks)):
        e = _local_energy(blocks[b], blocks[b - 1])
        log_amp2 = -beta * e + gammas[b].log_values[None, :] - gammas[b - 1].log_values[:, None]
        amps = np.exp(0.5 * log_amp2)
        norms = np.linalg.norm(amps, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > COLUMN_TOL:
            raise ConsistencyError(f"block {b} column norm off by {worst:.3e}; gamma tables are inconsistent")
        gates.append(BlockRotationGate(blocks[b].indices, blocks[b - 1].indices, amps))

    return PreparationPlan(n_spins, gates, log_M)


def blocks_from_hamiltonian(h: Hamiltonian, block_size: int) -> list[SpinBlock]:
    """Cut spins ``0..n-1`` into consecutive blocks of ``block_size``.

    Each term is filed under the block of its highest site and must not reach
    further back than the previous block.
    """
    if block_size < 1:
        raise ValueError("block_size must be positive")
    if block_size > MAX_BLOCK_SIZE:
        raise ResourceLimitError(f"block size {block_size} exceeds cap {MAX_BLOCK_SIZE}")
    n = h.n_spins
    groups = [tuple(range(s, min(s + block_size, n))) for s in range(0, n, block_size)]
    internal: list[list[CouplingTerm]] = [[] for _ in groups]
    inter: list[list[CouplingTerm]] = [[] for _ in groups]
    for t in h.terms:
        hi, lo = t.sites[-1] // block_size, t.sites[0] // block_size
        if hi - lo > 1:
            raise TopologyError(f"term {t.sites} spans more than two blocks of size {block_size}")
        (internal if hi == lo else inter)[hi].append(t)
    return [SpinBlock(g, tuple(i), tuple(x)) for g, i, x in zip(groups, internal, inter)]


def minimal_block_size(h: Hamiltonian) -> int:
    """Smallest block size for which every term fits in two consecutive blocks."""
    for z in range(1, MAX_BLOCK_SIZE + 1):
        try:
            blocks_from_hamiltonian(h, z)
        except TopologyError:
            continue
        return z
    raise TopologyError(f"no block size up to {MAX_BLOCK_SIZE} keeps every term within adjacent blocks")


def blocks_plan(h: Hamiltonian, beta: float, block_size: int | None = None) -> PreparationPlan:
    blocks = blocks_from_hamiltonian(h, block_size or minimal_block_size(h))
    plan = block_rotation(blocks, gamma_backward(blocks, beta), beta)
    plan.n_spins = h.n_spins
    return plan


def lattice_blocks(N: int, row_J, col_J, h) -> list[SpinBlock]:
    """One block per row, bottom row first."""
    return blocks_from_hamiltonian(lattice_hamiltonian(N, row_J, col_J, h), N)


def lattice2d_plan(N: int, row_J, col_J, h, beta: float, max_n: int = MAX_LATTICE_N) -> PreparationPlan:
    if N > max_n:
        raise ResourceLimitError(f"{N}x{N} lattice exceeds the {max_n}x{max_n} cap")
    blocks = lattice_blocks(N, row_J, col_J, h)
    return block_rotation(blocks, gamma_backward(blocks, beta), beta)


def gamma_work(tables: Sequence[GammaTable]) -> int:
    return sum(t.work for t in tables)


def full_control_table_size(n_spins: int) -> int:
    """Amplitudes a fully-controlled sequential preparation must tabulate: ``2**n``."""
    return 1 << n_spins


def full_control_plan(h: Hamiltonian, beta: float) -> PreparationPlan:
    """Reference plan where spin ``k`` is controlled by all of spins ``0..k-1``.

    Angles come from exact marginals of the enumerated Gibbs distribution, so
    cost is exponential in ``n``; used as a baseline.
    """
    g = gibbs_table(h, beta)
    n = h.n_spins
    gates = []
    for k in range(n):
        marg = g.probs.reshape(1 << (n - k - 1), 1 << (k + 1)).sum(axis=0)
        p0, p1 = marg[: 1 << k], marg[1 << k :]
        gates.append(_marginal_gate(k, p0, p1))
    return PreparationPlan(n, gates, g.log_Z)


def _marginal_gate(k: int, p0: np.ndarray, p1: np.ndarray) -> RotationGate:
    angles = np.where(p0 + p1 > 0, np.arctan2(np.sqrt(p1), np.sqrt(p0)), np.pi / 4)
    return RotationGate(k, tuple(range(k)), angles)
