"""Classical spin Hamiltonians and the brute-force Gibbs oracle.

Configurations are addressed by an integer basis index. Bit ``i`` of the index
is the state of spin ``i`` (little-endian: spin 0 is the least-significant
bit), and a bit maps to a spin value through ``sigma = 1 - 2*bit``, so bit 0
is spin up (+1) and bit 1 is spin down (-1).

A Hamiltonian is a sum of k-local terms ``coupling * prod(sigma_i for i in sites)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import ResourceLimitError

MAX_ORACLE_SPINS = 20
MAX_SPINS = 30


@dataclass(frozen=True)
class CouplingTerm:
    sites: tuple[int, ...]
    coupling: float

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        if not sites:
            raise ValueError("a coupling term needs at least one site")
        if len(set(sites)) != len(sites):
            raise ValueError(f"duplicate site in term {sites}")
        if any(s < 0 for s in sites):
            raise ValueError(f"negative site index in term {sites}")
        object.__setattr__(self, "sites", tuple(sorted(sites)))
        object.__setattr__(self, "coupling", float(self.coupling))

    @property
    def arity(self) -> int:
        return len(self.sites)

    @property
    def span(self) -> int:
        return self.sites[-1] - self.sites[0]


@dataclass(frozen=True)
class Hamiltonian:
    """Sparse k-local Ising Hamiltonian over ``n_spins`` classical spins."""

    n_spins: int
    terms: tuple[CouplingTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not 1 <= self.n_spins <= MAX_SPINS:
            raise ValueError(f"n_spins must be in [1, {MAX_SPINS}], got {self.n_spins}")
        terms = tuple(t if isinstance(t, CouplingTerm) else CouplingTerm(*t) for t in self.terms)
        seen = set()
        for t in terms:
            if t.sites[-1] >= self.n_spins:
                raise ValueError(f"term {t.sites} references a spin >= n_spins={self.n_spins}")
            if t.sites in seen:
                raise ValueError(f"more than one term on sites {t.sites}")
            seen.add(t.sites)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_terms(cls, n_spins: int, terms: Iterable[tuple[Sequence[int], float]]) -> "Hamiltonian":
        """Build a Hamiltonian, summing couplings that share a site set and dropping zeros."""
        merged: dict[tuple[int, ...], float] = {}
        for sites, coupling in terms:
            key = tuple(sorted(int(s) for s in sites))
            merged[key] = merged.get(key, 0.0) + float(coupling)
        return cls(n_spins, tuple(CouplingTerm(k, v) for k, v in merged.items() if v != 0.0))

    def coupling(self, *sites: int) -> float:
        key = tuple(sorted(sites))
        for t in self.terms:
            if t.sites == key:
                return t.coupling
        return 0.0

    @property
    def max_arity(self) -> int:
        return max((t.arity for t in self.terms), default=0)

    @property
    def bandwidth(self) -> int:
        return max((t.span for t in self.terms), default=0)

    def to_dict(self, beta: float | None = None) -> dict:
        out: dict = {"n_spins": self.n_spins}
        if beta is not None:
            out["beta"] = beta
        out["terms"] = [{"sites": list(t.sites), "coupling": t.coupling} for t in self.terms]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Hamiltonian":
        n = data["n_spins"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValueError("n_spins must be an integer")
        return cls(n, tuple(CouplingTerm(t["sites"], t["coupling"]) for t in data["terms"]))


@dataclass(frozen=True)
class GibbsTable:
    beta: float
    probs: np.ndarray
    log_Z: float

    @property
    def n_spins(self) -> int:
        return int(self.probs.size).bit_length() - 1


def check_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0:
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    return beta


def index_bits(index: int, n: int) -> list[int]:
    """Bits of a basis index, spin 0 first."""
    return [(index >> i) & 1 for i in range(n)]


def bits_index(bits: Sequence[int]) -> int:
    return sum(int(b) << i for i, b in enumerate(bits))


def bitstring(index: int, n: int) -> str:
    """Render a configuration as text, spin 0 leftmost."""
    return "".join(str(b) for b in index_bits(index, n))


def spin_columns(n: int, indices: np.ndarray | None = None) -> np.ndarray:
    """Spin values (+1/-1) of every configuration, shape ``(len(indices), n)``."""
    if indices is None:
        indices = np.arange(1 << n, dtype=np.int64)
    bits = (indices[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int8)


def energy(h: Hamiltonian, config: Sequence[int] | str) -> float:
    """Energy of one configuration given as a bit sequence (spin 0 first)."""
    bits = [int(b) for b in config]
    if len(bits) != h.n_spins:
        raise ValueError(f"configuration has {len(bits)} bits, Hamiltonian has {h.n_spins} spins")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("configuration bits must be 0 or 1")
    total = 0.0
    for t in h.terms:
        prod = 1
        for i in t.sites:
            prod *= 1 - 2 * bits[i]
        total += t.coupling * prod
    return total


def term_energies(terms: Iterable[CouplingTerm], sigma: np.ndarray, position: dict[int, int] | None = None) -> np.ndarray:
    """Sum of ``terms`` over rows of a spin-value matrix.

    ``position`` maps a global site index to a column of ``sigma``; identity if omitted.
    """
    out = np.zeros(sigma.shape[0])
    for t in terms:
        cols = [position[s] if position is not None else s for s in t.sites]
        prod = np.prod(sigma[:, cols], axis=1, dtype=np.int64)
        out += t.coupling * prod
    return out


def energies(h: Hamiltonian) -> np.ndarray:
    """Energy of every basis configuration, indexed by basis index."""
    if h.n_spins > MAX_ORACLE_SPINS:
        raise ResourceLimitError(f"enumeration capped at {MAX_ORACLE_SPINS} spins, got {h.n_spins}")
    return term_energies(h.terms, spin_columns(h.n_spins))


def gibbs_table(h: Hamiltonian, beta: float) -> GibbsTable:
    beta = check_beta(beta)
    log_w = -beta * energies(h)
    log_Z = float(logsumexp(log_w))
    return GibbsTable(beta, np.exp(log_w - log_Z), log_Z)


def exact_cets(h: Hamiltonian, beta: float) -> np.ndarray:
    """Coherent encoding of the thermal state: real amplitudes ``sqrt(p(s))``."""
    return np.sqrt(gibbs_table(h, beta).probs).astype(np.complex128)


# -- model families ---------------------------------------------------------


def triangle_hamiltonian(J: float) -> Hamiltonian:
    return Hamiltonian.from_terms(3, [((0, 1), J), ((0, 2), J), ((1, 2), J)])


def tetrahedron_hamiltonian(J: float) -> Hamiltonian:
    pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    return Hamiltonian.from_terms(4, [(p, J) for p in pairs])


def nnn_chain_hamiltonian(J: Sequence[float], L: Sequence[float], h: Sequence[float]) -> Hamiltonian:
    """Chain with nearest-neighbour bonds ``J``, next-nearest ``L`` and fields ``h``."""
    n = len(h)
    if len(J) != n - 1 or len(L) != max(n - 2, 0):
        raise ValueError(f"need len(J)=n-1 and len(L)=n-2 for n={n}, got {len(J)}, {len(L)}")
    terms = [((i,), h[i]) for i in range(n)]
    terms += [((i, i + 1), J[i]) for i in range(n - 1)]
    terms += [((i, i + 2), L[i]) for i in range(n - 2)]
    return Hamiltonian.from_terms(n, terms)


def lattice_site(N: int, row: int, col: int) -> int:
    """Site index on an ``N x N`` open lattice; rows bottom to top, columns left to right."""
    return row * N + col


def lattice_hamiltonian(N: int, row_J, col_J, h) -> Hamiltonian:
    """Open-boundary square lattice.

    ``row_J[r][c]`` couples ``(r, c)`` to ``(r, c+1)``, ``col_J[r][c]`` couples
    ``(r, c)`` to ``(r+1, c)`` and ``h[r][c]`` is the local field.
    """
    row_J, col_J, h = (np.asarray(a, dtype=float) for a in (row_J, col_J, h))
    if row_J.shape != (N, N - 1) or col_J.shape != (N - 1, N) or h.shape != (N, N):
        raise ValueError(
            f"lattice arrays must have shapes ({N},{N - 1}), ({N - 1},{N}), ({N},{N}); "
            f"got {row_J.shape}, {col_J.shape}, {h.shape}"
        )
    site = lambda r, c: lattice_site(N, r, c)
    terms = [((site(r, c),), h[r, c]) for r in range(N) for c in range(N)]
    terms += [((site(r, c), site(r, c + 1)), row_J[r, c]) for r in range(N) for c in range(N - 1)]
    terms += [((site(r, c), site(r + 1, c)), col_J[r, c]) for r in range(N - 1) for c in range(N)]
    return Hamiltonian.from_terms(N * N, terms)


# -- files --------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeSpec:
    N: int
    row_J: np.ndarray
    col_J: np.ndarray
    h: np.ndarray

    def hamiltonian(self) -> Hamiltonian:
        return lattice_hamiltonian(self.N, self.row_J, self.col_J, self.h)

    def to_dict(self, beta: float | None = None) -> dict:
        out: dict = {"N": self.N}
        if beta is not None:
            out["beta"] = beta
        out.update(row_J=self.row_J.tolist(), col_J=self.col_J.tolist(), h=self.h.tolist())
        return out


@dataclass(frozen=True)
class Model:
    """A parsed model file: the Hamiltonian, its inverse temperature and, for lattice files, the grid."""

    hamiltonian: Hamiltonian
    beta: float
    lattice: LatticeSpec | None = None


def parse_model(data: dict) -> Model:
    if not isinstance(data, dict):
        raise ValueError("model file must contain a JSON object")
    beta = check_beta(data.get("beta", 1.0))
    if "N" in data:
        N = data["N"]
        if not isinstance(N, int) or isinstance(N, bool) or N < 1:
            raise ValueError("lattice N must be a positive integer")
        spec = LatticeSpec(
            N,
            np.asarray(data.get("row_J", np.zeros((N, N - 1))), dtype=float).reshape(N, N - 1),
            np.asarray(data.get("col_J", np.zeros((N - 1, N))), dtype=float).reshape(N - 1, N),
            np.asarray(data.get("h", np.zeros((N, N))), dtype=float).reshape(N, N),
        )
        if N * N > MAX_SPINS:
            raise ResourceLimitError(f"{N}x{N} lattice exceeds {MAX_SPINS} spins")
        return Model(spec.hamiltonian(), beta, spec)
    return Model(Hamiltonian.from_dict(data), beta)


def load_model(path: str | Path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(json.load(fh))


def save_model(path: str | Path, h: Hamiltonian, beta: float) -> None:
    Path(path).write_text(json.dumps(h.to_dict(beta), indent=2) + "\n", encoding="utf-8")
