"""Compare simulated plans against the brute-force Gibbs oracle."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .circuit import n_qubits, run, sample
from .errors import ResourceLimitError
from .plan import PreparationPlan
from .spin_model import MAX_ORACLE_SPINS, GibbsTable, Hamiltonian, gibbs_table

DEFAULT_TOL_F = 1e-9
DEFAULT_TOL_Z = 1e-9


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|^2``, bitwise symmetric in its arguments."""
    if a.shape != b.shape:
        raise ValueError(f"state sizes differ: {a.shape} vs {b.shape}")
    ar, ai, br, bi = a.real, a.imag, b.real, b.imag
    re = float(np.sum(ar * br + ai * bi))
    im = float(np.sum(ar * bi - ai * br))
    return re * re + im * im


def tv_distance(samples, gibbs: GibbsTable) -> float:
    """Total variation distance between the empirical histogram of basis indices and ``gibbs.probs``."""
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size == 0:
        raise ValueError("need at least one sample")
    freq = np.bincount(samples, minlength=gibbs.probs.size) / samples.size
    return 0.5 * float(np.sum(np.abs(freq - gibbs.probs)))


def tv_bound(n_spins: int, n_samples: int) -> float:
    """Loose 99%-confidence bound on the TV distance of an exact sampler."""
    return 3.0 * math.sqrt((1 << n_spins) / n_samples)


@dataclass
class VerificationReport:
    fidelity: float
    log_Z_plan: float
    log_Z_oracle: float
    max_amp_abs_err: float
    tol_f: float
    tol_z: float
    n_spins: int
    beta: float
    tv_distance: float | None = None
    n_samples: int | None = None
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = self.check()

    def check(self) -> bool:
        dz = abs(self.log_Z_plan - self.log_Z_oracle)
        return (1.0 - self.fidelity <= self.tol_f) and (dz <= self.tol_z * max(1.0, abs(self.log_Z_oracle)))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d["tolerances"] = {"tol_f": d.pop("tol_f"), "tol_z": d.pop("tol_z")}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def verify_plan(
    plan: PreparationPlan,
    h: Hamiltonian,
    beta: float,
    tol_f: float = DEFAULT_TOL_F,
    tol_z: float = DEFAULT_TOL_Z,
    n_samples: int = 0,
    seed: int = 0,
) -> VerificationReport:
    if h.n_spins > MAX_ORACLE_SPINS:
        raise ResourceLimitError(f"oracle unavailable above {MAX_ORACLE_SPINS} spins")
    if plan.n_spins != h.n_spins:
        raise ValueError(f"plan has {plan.n_spins} spins, Hamiltonian has {h.n_spins}")
    state = run(plan)
    g = gibbs_table(h, beta)
    exact = np.sqrt(g.probs)
    report = VerificationReport(
        fidelity=fidelity(state, exact.astype(np.complex128)),
        log_Z_plan=plan.log_lambda_total,
        log_Z_oracle=g.log_Z,
        max_amp_abs_err=float(np.max(np.abs(state - exact))),
        tol_f=tol_f,
        tol_z=tol_z,
        n_spins=n_qubits(state),
        beta=float(beta),
    )
    if n_samples > 0:
        report.tv_distance = tv_distance(sample(state, n_samples, seed), g)
        report.n_samples = n_samples
    return report


def perturb_angle(plan: PreparationPlan, gate: int, entry: int, delta: float) -> PreparationPlan:
    """Copy of ``plan`` with one angle moved by ``|delta|``, inward if it would leave ``[0, pi/2]``."""
    out = plan.copy()
    angles = out.gates[gate].angles
    step = abs(delta) if angles[entry] + abs(delta) <= np.pi / 2 else -abs(delta)
    angles[entry] += step
    return out
