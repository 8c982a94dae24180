"""Acceptance criteria, one check per criterion.

Run ``pytest tests/test_acceptance.py -s`` (or ``python tests/test_acceptance.py``)
to see one PASS/FAIL line per criterion.
"""

import itertools
import math
import sys

import numpy as np
import pytest

from cets.block_bp import (
    gamma_backward,
    gamma_work,
    lattice2d_plan,
    lattice_blocks,
    log_partition_from_gamma,
    full_control_plan,
    full_control_table_size,
)
from cets.circuit import purify_copy, reduced_density_matrix, run, sample
from cets.renorm import (
    nnn_chain_plan,
    pairwise_decompose,
    plan_partition_function,
    tetrahedron_plan,
    triangle_plan,
)
from cets.spin_model import (
    Hamiltonian,
    gibbs_table,
    lattice_hamiltonian,
    nnn_chain_hamiltonian,
    tetrahedron_hamiltonian,
    triangle_hamiltonian,
)
from cets.verify import fidelity, perturb_angle, tv_distance, verify_plan

TOL_F = 1e-9
TOL_Z = 1e-9
J_GRID = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
BETA_GRID = (0.0, 0.5, 1.0, 3.0)


def _fid(plan, h, beta):
    return fidelity(run(plan), np.sqrt(gibbs_table(h, beta).probs).astype(complex))


def _rel_z(log_z_a, log_z_b):
    """Relative error of ``Z`` itself."""
    return abs(math.expm1(log_z_a - log_z_b))


def _random_chain(rng, n):
    return rng.uniform(-2, 2, n - 1), rng.uniform(-2, 2, n - 2), rng.uniform(-2, 2, n)


def _random_lattice(rng, N):
    return rng.uniform(-1, 1, (N, N - 1)), rng.uniform(-1, 1, (N - 1, N)), rng.uniform(-1, 1, (N, N))


def criterion_1():
    worst_f, worst_z = 0.0, 0.0
    for J, beta in itertools.product(J_GRID, BETA_GRID):
        plan, h = triangle_plan(J, beta), triangle_hamiltonian(J)
        worst_f = max(worst_f, 1 - _fid(plan, h, beta))
        worst_z = max(worst_z, abs(plan_partition_function(plan) - gibbs_table(h, beta).log_Z))
    ok = worst_f <= TOL_F and worst_z <= TOL_Z
    return ok, f"triangle grid: max(1-F)={worst_f:.2e}, max|dlogZ|={worst_z:.2e}"


def criterion_2():
    worst_f = 0.0
    for J, beta in itertools.product(J_GRID, BETA_GRID):
        worst_f = max(worst_f, 1 - _fid(tetrahedron_plan(J, beta), tetrahedron_hamiltonian(J), beta))
    J, beta = 1.0, 10.0
    h = tetrahedron_hamiltonian(J)
    g = gibbs_table(h, beta)
    e = np.array([sum(J * s[i] * s[k] for i, k in itertools.combinations(range(4), 2))
                  for s in ([1 - 2 * ((x >> q) & 1) for q in range(4)] for x in range(16))])
    ground = np.flatnonzero(e == e.min())
    p_plan = np.abs(run(tetrahedron_plan(J, beta))) ** 2
    mass_plan, mass_oracle = p_plan[ground].sum(), g.probs[ground].sum()
    per_config = float(np.max(np.abs(p_plan - g.probs)))
    ok = worst_f <= TOL_F and mass_plan >= 0.999 and mass_oracle >= 0.999 and per_config <= 1e-8
    return ok, (f"tetrahedron grid max(1-F)={worst_f:.2e}; beta*J=10 ground manifold ({ground.size} configs) "
                f"mass plan={mass_plan:.10f} oracle={mass_oracle:.10f}, max per-config diff={per_config:.2e}")


def criterion_3():
    rng = np.random.default_rng(2024)
    worst_f, worst_z = 0.0, 0.0
    for k in range(50):
        n = 3 + k % 10
        beta = (0.3, 1.0, 3.0)[k % 3]
        J, L, f = _random_chain(rng, n)
        plan, h = nnn_chain_plan(J, L, f, beta), nnn_chain_hamiltonian(J, L, f)
        g = gibbs_table(h, beta)
        worst_f = max(worst_f, 1 - _fid(plan, h, beta))
        worst_z = max(worst_z, abs(plan.log_lambda_total - g.log_Z) / max(1.0, abs(g.log_Z)))
    # L = 0 against a Hamiltonian that only has nearest-neighbour bonds and fields
    worst_nn = 0.0
    for k in range(10):
        n = 3 + k
        J, f = rng.uniform(-2, 2, n - 1), rng.uniform(-2, 2, n)
        h = Hamiltonian.from_terms(n, [((i,), f[i]) for i in range(n)] + [((i, i + 1), J[i]) for i in range(n - 1)])
        worst_nn = max(worst_nn, 1 - _fid(nnn_chain_plan(J, np.zeros(n - 2), f, 1.0), h, 1.0))
    ok = worst_f <= TOL_F and worst_z <= TOL_Z and worst_nn <= TOL_F
    return ok, f"50 NNN chains: max(1-F)={worst_f:.2e}, max rel dlogZ={worst_z:.2e}; L=0 chains max(1-F)={worst_nn:.2e}"


def criterion_4():
    rng = np.random.default_rng(18)
    worst = 0.0
    for _ in range(10_000):
        h, J, L = rng.uniform(-2, 2, 3)
        beta = rng.uniform(0.05, 3.0)
        r = pairwise_decompose(h, J, L, beta)
        for sp, spp in itertools.product((1, -1), repeat=2):
            m = L * spp + J * sp + h
            lhs = math.exp(-beta * m) + math.exp(beta * m)
            rhs = r.Lambda * math.exp(beta * r.B * sp * spp) * math.exp(beta * r.C * sp) * math.exp(beta * r.D * spp)
            worst = max(worst, abs(lhs - rhs) / lhs)
    return worst <= 1e-10, f"10^4 pairwise decompositions: max relative violation={worst:.2e}"


def criterion_5():
    rng = np.random.default_rng(55)
    worst_f, worst_z, worst_col = 0.0, 0.0, 0.0
    for N in (2, 3, 4):
        for _ in range(3):
            beta = rng.uniform(0.3, 1.5)
            rJ, cJ, f = _random_lattice(rng, N)
            h = lattice_hamiltonian(N, rJ, cJ, f)
            blocks = lattice_blocks(N, rJ, cJ, f)
            gammas = gamma_backward(blocks, beta)
            g = gibbs_table(h, beta)
            plan = lattice2d_plan(N, rJ, cJ, f, beta)
            worst_f = max(worst_f, 1 - _fid(plan, h, beta))
            worst_z = max(worst_z, _rel_z(log_partition_from_gamma(blocks, gammas, beta), g.log_Z))
            worst_col = max(worst_col, max(float(np.max(np.abs(gate.column_norms() - 1))) for gate in plan.gates))
    ok = worst_f <= TOL_F and worst_z <= 1e-9 and worst_col <= 1e-10
    return ok, f"lattices N=2..4: max(1-F)={worst_f:.2e}, max rel dZ={worst_z:.2e}, max |col norm-1|={worst_col:.2e}"


def criterion_6():
    rng = np.random.default_rng(66)
    cases = []
    for beta in (0.5, 1.0, 3.0):
        cases.append((triangle_plan(1.5, beta), triangle_hamiltonian(1.5), beta))
        cases.append((tetrahedron_plan(-0.8, beta), tetrahedron_hamiltonian(-0.8), beta))
        J, L, f = _random_chain(rng, 9)
        cases.append((nnn_chain_plan(J, L, f, beta), nnn_chain_hamiltonian(J, L, f), beta))
        rJ, cJ, f2 = _random_lattice(rng, 3)
        cases.append((lattice2d_plan(3, rJ, cJ, f2, beta), lattice_hamiltonian(3, rJ, cJ, f2), beta))
    worst = max(_rel_z(plan.log_lambda_total, gibbs_table(h, beta).log_Z) for plan, h, beta in cases)
    J, L, f = _random_chain(rng, 7)
    rJ, cJ, f2 = _random_lattice(rng, 4)
    zero = [(triangle_plan(2.0, 0.0), 3), (tetrahedron_plan(2.0, 0.0), 4),
            (nnn_chain_plan(J, L, f, 0.0), 7), (lattice2d_plan(4, rJ, cJ, f2, 0.0), 16)]
    worst0 = max(abs(plan.log_lambda_total - n * math.log(2)) for plan, n in zero)
    ok = worst <= 1e-9 and worst0 <= 1e-12
    return ok, f"all planner families: max rel dZ={worst:.2e}; beta=0 max |logZ - N ln2|={worst0:.2e}"


def criterion_7():
    psi = run(triangle_plan(1.0, 1.0))
    rho = reduced_density_matrix(purify_copy(psi), 3)
    probs = gibbs_table(triangle_hamiltonian(1.0), 1.0).probs
    diag_err = float(np.max(np.abs(np.diag(rho) - probs)))
    off_err = float(np.max(np.abs(rho - np.diag(np.diag(rho)))))
    ok = diag_err <= 1e-12 and off_err <= 1e-12
    return ok, f"purified triangle: max diag err={diag_err:.2e}, max off-diag={off_err:.2e}"


def criterion_8():
    psi = run(triangle_plan(1.0, 1.0))
    g = gibbs_table(triangle_hamiltonian(1.0), 1.0)
    a = sample(psi, 1_000_000, seed=20240601)
    b = sample(psi, 1_000_000, seed=20240601)
    tv = tv_distance(a, g)
    same = bool(np.array_equal(a, b))
    return tv <= 0.005 and same, f"10^6 samples: TV={tv:.2e}, bitwise reproducible={same}"


def criterion_9():
    rng = np.random.default_rng(99)
    Ns = (2, 3, 4)
    work = []
    for N in Ns:
        blocks = lattice_blocks(N, *_random_lattice(rng, N))
        work.append(gamma_work(gamma_backward(blocks, 1.0)))
    ratios = np.array(work) / np.array([4.0**N for N in Ns])
    c = float(np.exp(np.mean(np.log(ratios))))
    fits = bool(np.all(ratios / c <= 2) and np.all(c / ratios <= 2))
    full_control = []
    for N in (2, 3):
        plan = full_control_plan(lattice_hamiltonian(N, *_random_lattice(rng, N)), 1.0)
        # the full-control tables hold one angle per prefix configuration: 2^(N^2) - 1 angles for 2^(N^2) amplitudes
        full_control.append(sum(gate.angles.size for gate in plan.gates) + 1 == 2 ** (N * N))
    full_control.append(full_control_table_size(16) == 2**16)
    ok = fits and all(full_control)
    return ok, (f"gamma work {dict(zip(Ns, work))}, work/4^N={ratios.tolist()}, fitted c={c:.3f}, "
                f"within 2x={fits}; full-control table sizes 2^(N^2) exact={all(full_control)}")


def _negative_control_fixtures():
    rng = np.random.default_rng(10)
    out = []
    for beta in (0.5, 1.0):
        out.append((triangle_plan(1.0, beta), triangle_hamiltonian(1.0), beta))
        out.append((tetrahedron_plan(1.0, beta), tetrahedron_hamiltonian(1.0), beta))
        J, L, f = rng.uniform(-1, 1, 5), rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 6)
        out.append((nnn_chain_plan(J, L, f, beta), nnn_chain_hamiltonian(J, L, f), beta))
    return out


def criterion_10():
    total, survived = 0, []
    for idx, (plan, h, beta) in enumerate(_negative_control_fixtures()):
        assert verify_plan(plan, h, beta).passed
        for k, gate in enumerate(plan.gates):
            for e in range(gate.angles.size):
                total += 1
                if verify_plan(perturb_angle(plan, k, e, 1e-3), h, beta).passed:
                    survived.append((idx, k, e))
    return not survived, f"{total} single-angle perturbations of 1e-3 rad; undetected={survived}"


CRITERIA = [
    (1, "triangle plaquette", criterion_1),
    (2, "spin-ice tetrahedron", criterion_2),
    (3, "NNN chain with fields", criterion_3),
    (4, "pairwise identity", criterion_4),
    (5, "block belief propagation", criterion_5),
    (6, "Lambda bookkeeping", criterion_6),
    (7, "purification", criterion_7),
    (8, "sampling", criterion_8),
    (9, "scaling spot-check", criterion_9),
    (10, "negative control", criterion_10),
]


@pytest.mark.parametrize("number,name,check", CRITERIA, ids=[f"C{n}-{name.replace(' ', '_')}" for n, name, _ in CRITERIA])
def test_criterion(number, name, check):
    ok, detail = check()
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number} ({name}): {detail}")
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for number, name, check in CRITERIA:
        ok, detail = check()
        failures += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number} ({name}): {detail}")
    sys.exit(1 if failures else 0)
