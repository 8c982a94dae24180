"""Rotation angles, renormalized couplings and closed-form preparation plans.

Adding spin ``k`` with a rotation whose angle is set by a local field ``m_s``
(a function of already-prepared spins) multiplies the amplitude weight of
the earlier spins by ``W_s = 2 cosh(beta m_s)``. Writing
``W_s = Lambda_k * exp(-beta * dH(s))`` with ``dH`` free of a constant term
makes ``Lambda_k`` the geometric mean of ``W_s`` over control
configurations, and the partition function grows as ``Z_{k+1} = Lambda_k Z_k``.
The planners below pre-compensate the couplings of earlier spins by ``dH`` so
that the final state encodes the requested Hamiltonian exactly.

All internal arithmetic is in reduced units ``x = beta * m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import TopologyError
from .plan import BlockRotationGate, PreparationPlan, RotationGate
from .spin_model import Hamiltonian, check_beta, spin_columns

LN2 = math.log(2.0)


def log_two_cosh(x):
    """``log(2 cosh x)`` without overflow."""
    return np.logaddexp(x, -x)


def log_cosh(x):
    return log_two_cosh(x) - LN2


def angle_from_reduced_field(x):
    """Angle with ``cos^2 = 1 / (1 + exp(2x))`` for reduced field ``x = beta*m``.

    Uses ``arctan(exp(x)) = pi/4 + arctan(tanh(x/2))``, which stays accurate
    near both ends of ``[0, pi/2]``.
    """
    return np.pi / 4 + np.arctan(np.tanh(np.asarray(x, dtype=float) / 2))


def rotation_angle(m, beta: float):
    """Angle ``theta`` with ``cos^2(theta) = e^{-beta m} / (e^{-beta m} + e^{beta m})``."""
    return angle_from_reduced_field(float(beta) * np.asarray(m, dtype=float))


def log_lambda(reduced_fields) -> float:
    """Log of the geometric mean of ``2 cosh(x)`` over all control configurations."""
    return float(np.mean(log_two_cosh(np.asarray(reduced_fields, dtype=float))))


def gate_from_fields(target: int, controls: Sequence[int], reduced_fields) -> tuple[RotationGate, float]:
    """Rotation gate for ``reduced_fields[c] = beta * m_s`` and its ``log Lambda``."""
    fields = np.asarray(reduced_fields, dtype=float).reshape(-1)
    return RotationGate(target, tuple(controls), angle_from_reduced_field(fields)), log_lambda(fields)


def control_spins(n_controls: int) -> np.ndarray:
    """Spin values of the control configurations, shape ``(2**n, n)``, little-endian."""
    return spin_columns(n_controls).astype(float)


@dataclass(frozen=True)
class PairwiseRenorm:
    """Decomposition ``2cosh(beta m) = Lambda e^{beta(B s' s'' + C s' + D s'')}``.

    ``m = L s'' + J s' + h`` with ``s'`` the previous spin and ``s''`` the one before it.
    """

    log_Lambda: float
    B: float
    C: float
    D: float

    @property
    def Lambda(self) -> float:
        return math.exp(self.log_Lambda)


def pairwise_decompose(h_i: float, J_prev: float, L_prev: float, beta: float) -> PairwiseRenorm:
    beta = check_beta(beta)
    if beta == 0.0:
        return PairwiseRenorm(LN2, 0.0, 0.0, 0.0)
    # lg[a][b]: log g with sign a on J_prev and sign b on L_prev; index 0 is "+".
    lg = [[float(log_two_cosh(beta * (h_i + a * J_prev + b * L_prev))) for b in (1, -1)] for a in (1, -1)]
    (pp, pm), (mp, mm) = lg
    return PairwiseRenorm(
        log_Lambda=(pp + pm + mp + mm) / 4,
        B=(pp + mm - mp - pm) / (4 * beta),
        C=(pm + pp - mm - mp) / (4 * beta),
        D=(mp + pp - mm - pm) / (4 * beta),
    )


# -- triangle and tetrahedron --------------------------------------------------


def triangle_renorm(J: float, beta: float) -> tuple[float, float]:
    """``(Lambda, B)`` with ``2cosh(beta J (s1+s2)) = Lambda e^{beta B s1 s2}``."""
    beta = check_beta(beta)
    if beta == 0.0:
        return 2.0, 0.0
    lc = float(log_cosh(2 * beta * J))
    return 2.0 * math.exp(lc / 2), lc / (2 * beta)


def tetrahedron_renorm(J: float, beta: float) -> tuple[float, float]:
    """``(Lambda, K)`` with ``2cosh(beta J (s1+s2+s3)) = Lambda e^{beta K (s1s2+s2s3+s1s3)}``."""
    beta = check_beta(beta)
    if beta == 0.0:
        return 2.0, 0.0
    c1, c3 = float(log_cosh(beta * J)), float(log_cosh(3 * beta * J))
    return 2.0 * math.exp((3 * c1 + c3) / 4), (c3 - c1) / (4 * beta)


def _triangle_gates(J: float, beta: float) -> tuple[list[RotationGate], float]:
    _, B = triangle_renorm(J, beta)
    sig = control_spins(2)
    g0, l0 = gate_from_fields(0, (), [0.0])
    g1, l1 = gate_from_fields(1, (0,), beta * (J - B) * control_spins(1)[:, 0])
    g2, l2 = gate_from_fields(2, (0, 1), beta * J * (sig[:, 0] + sig[:, 1]))
    return [g0, g1, g2], l0 + l1 + l2


def triangle_plan(J: float, beta: float) -> PreparationPlan:
    """Three-spin plaquette ``J (s1 s2 + s1 s3 + s2 s3)``.

    Spin 2 is added with a bond ``J - B`` to spin 1; the rotation on spin 3,
    driven by ``m = J (s1 + s2)``, then supplies the missing ``B``.
    """
    beta = check_beta(beta)
    gates, total = _triangle_gates(J, beta)
    return PreparationPlan(3, gates, total)


def tetrahedron_plan(J: float, beta: float) -> PreparationPlan:
    """Four mutually coupled spins (the spin-ice tetrahedron) with six equal bonds ``J``."""
    beta = check_beta(beta)
    _, K = tetrahedron_renorm(J, beta)
    gates, total = _triangle_gates(J - K, beta)
    sig = control_spins(3)
    g3, l3 = gate_from_fields(3, (0, 1, 2), beta * J * sig.sum(axis=1))
    return PreparationPlan(4, gates + [g3], total + l3)


# -- next-nearest-neighbour chain -------------------------------------------------


@dataclass
class CompensatedChain:
    """Working couplings after the backward elimination pass.

    ``steps[i]`` holds the decomposition computed when spin ``i`` was eliminated.
    """

    J: np.ndarray
    L: np.ndarray
    h: np.ndarray
    beta: float
    steps: dict


def _check_chain(J, L, h) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    J, L, h = (np.asarray(a, dtype=float).reshape(-1) for a in (J, L, h))
    n = h.size
    if n < 3:
        raise ValueError(f"chain needs at least 3 spins, got {n}")
    if J.size != n - 1 or L.size != n - 2:
        raise ValueError(f"need len(J)=n-1={n - 1} and len(L)=n-2={n - 2}, got {J.size}, {L.size}")
    return J, L, h


def compensate_chain(J, L, h, beta: float) -> CompensatedChain:
    """Backward pass: eliminate spins ``n-1 .. 1`` and subtract their induced terms.

    For ``i >= 2`` the step uses the working ``(h[i], J[i-1], L[i-2])`` and
    updates ``J[i-2] -= B``, ``h[i-1] -= C``, ``h[i-2] -= D``. Spin 1 has no
    next-nearest partner, so its step only shifts ``h[0]``.
    """
    beta = check_beta(beta)
    J, L, h = (a.copy() for a in _check_chain(J, L, h))
    steps = {}
    for i in range(h.size - 1, 1, -1):
        r = pairwise_decompose(h[i], J[i - 1], L[i - 2], beta)
        J[i - 2] -= r.B
        h[i - 1] -= r.C
        h[i - 2] -= r.D
        steps[i] = r
    r = pairwise_decompose(h[1], J[0], 0.0, beta)
    h[0] -= r.C
    steps[1] = r
    return CompensatedChain(J, L, h, beta, steps)


def uncompensate(chain: CompensatedChain) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Undo :func:`compensate_chain` using its recorded steps."""
    J, L, h = chain.J.copy(), chain.L.copy(), chain.h.copy()
    h[0] += chain.steps[1].C
    for i in range(2, h.size):
        r = chain.steps[i]
        J[i - 2] += r.B
        h[i - 1] += r.C
        h[i - 2] += r.D
    return J, L, h


def nnn_chain_plan(J, L, h, beta: float) -> PreparationPlan:
    """Plan for ``sum J_i s_i s_{i+1} + sum L_i s_i s_{i+2} + sum h_i s_i``.

    Every rotation is controlled by at most the two preceding spins.
    """
    chain = compensate_chain(J, L, h, beta)
    beta = chain.beta
    Jc, Lc, hc = chain.J, chain.L, chain.h
    n = hc.size
    gates = []
    g, total = gate_from_fields(0, (), [beta * hc[0]])
    gates.append(g)
    s1 = control_spins(1)[:, 0]
    g, lam = gate_from_fields(1, (0,), beta * (Jc[0] * s1 + hc[1]))
    gates.append(g)
    total += lam
    sig = control_spins(2)
    for i in range(2, n):
        # controls (i-2, i-1): column 0 is s_{i-2}, column 1 is s_{i-1}
        fields = beta * (Lc[i - 2] * sig[:, 0] + Jc[i - 1] * sig[:, 1] + hc[i])
        g, lam = gate_from_fields(i, (i - 2, i - 1), fields)
        gates.append(g)
        total += lam
    return PreparationPlan(n, gates, total)


def chain_couplings(h: Hamiltonian) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Extract ``(J, L, h)`` from a Hamiltonian with 1- and 2-body terms of span at most 2."""
    n = h.n_spins
    if n < 3:
        raise TopologyError(f"chain planner needs at least 3 spins, got {n}")
    J, L, f = np.zeros(n - 1), np.zeros(n - 2), np.zeros(n)
    for t in h.terms:
        if t.arity == 1:
            f[t.sites[0]] = t.coupling
        elif t.arity == 2 and t.span == 1:
            J[t.sites[0]] = t.coupling
        elif t.arity == 2 and t.span == 2:
            L[t.sites[0]] = t.coupling
        else:
            raise TopologyError(f"term on sites {t.sites} is outside the next-nearest-neighbour chain class")
    return J, L, f


# -- partition function --------------------------------------------------------------


def plan_partition_function(plan: PreparationPlan) -> float:
    """``log Z`` accumulated by the planner as the sum of ``log Lambda_k``."""
    return plan.log_lambda_total


def log_z_from_angles(plan: PreparationPlan) -> float:
    """Recompute ``log Z`` from the angle tables alone.

    Each angle satisfies ``cos(theta) sin(theta) = 1 / W_s``, so
    ``log Lambda_k = mean(log(2 / sin(2 theta)))``. Loses relative precision
    when angles sit within ~1e-8 of 0 or pi/2.
    """
    total = 0.0
    for g in plan.gates:
        if isinstance(g, BlockRotationGate):
            raise TypeError("angle-based recomputation only applies to rotation-gate plans")
        total += float(np.mean(LN2 - np.log(np.sin(2 * g.angles))))
    return total
