"""Command-line entry point.

Exit codes: 0 success / verification passed, 1 verification failed,
2 input error, 3 resource or topology error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import block_bp, circuit, renorm
from .errors import ResourceLimitError, TopologyError
from .plan import PreparationPlan, load_plan
from .spin_model import MAX_ORACLE_SPINS, Hamiltonian, Model, bitstring, gibbs_table, load_model
from .verify import DEFAULT_TOL_F, DEFAULT_TOL_Z, verify_plan

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
BUILDERS = ("auto", "triangle", "tetrahedron", "nnn-chain", "blocks", "lattice2d")


class InputError(Exception):
    pass


def _uniform_pair_coupling(h: Hamiltonian, n: int, name: str) -> float:
    if h.n_spins != n:
        raise TopologyError(f"{name} builder needs {n} spins, model has {h.n_spins}")
    pairs = {(i, j) for i in range(n) for j in range(i + 1, n)}
    couplings = {t.coupling for t in h.terms}
    if any(t.sites not in pairs for t in h.terms) or len(couplings) > 1 or (
        couplings and len(h.terms) != len(pairs)
    ):
        raise TopologyError(f"{name} builder needs all {len(pairs)} pair bonds equal and nothing else")
    return couplings.pop() if couplings else 0.0


def choose_builder(model: Model) -> str:
    if model.lattice is not None:
        return "lattice2d"
    h = model.hamiltonian
    if h.n_spins >= 3 and h.max_arity <= 2 and h.bandwidth <= 2:
        return "nnn-chain"
    return "blocks"


def build_plan(model: Model, builder: str = "auto", beta: float | None = None, block_size: int | None = None) -> PreparationPlan:
    beta = model.beta if beta is None else beta
    h = model.hamiltonian
    if builder == "auto":
        builder = choose_builder(model)
    if builder == "triangle":
        return renorm.triangle_plan(_uniform_pair_coupling(h, 3, "triangle"), beta)
    if builder == "tetrahedron":
        return renorm.tetrahedron_plan(_uniform_pair_coupling(h, 4, "tetrahedron"), beta)
    if builder == "nnn-chain":
        return renorm.nnn_chain_plan(*renorm.chain_couplings(h), beta)
    if builder == "lattice2d":
        lat = model.lattice
        if lat is None:
            raise TopologyError("lattice2d builder needs a lattice model file")
        return block_bp.lattice2d_plan(lat.N, lat.row_J, lat.col_J, lat.h, beta)
    if builder == "blocks":
        return block_bp.blocks_plan(h, beta, block_size)
    raise InputError(f"unknown builder {builder!r}")


def _load_model(args) -> Model | None:
    if not args.model:
        return None
    try:
        return load_model(args.model)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read model {args.model}: {exc}") from exc


def _plan_for(args, model: Model | None) -> PreparationPlan:
    if getattr(args, "plan", None):
        try:
            return load_plan(args.plan)
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"cannot read plan {args.plan}: {exc}") from exc
    if model is None:
        raise InputError("need --model or --plan")
    return build_plan(model, args.builder, args.beta, args.block_size)


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_plan(args) -> int:
    model = _load_model(args)
    if model is None:
        raise InputError("plan needs --model")
    plan = _plan_for(args, model)
    text = plan.to_json() + "\n"
    if args.out:
        _write(args.out, text)
        print(f"log_lambda_total {plan.log_lambda_total!r}")
    else:
        _write(None, text)
        print(f"log_lambda_total {plan.log_lambda_total!r}", file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    plan = _plan_for(args, _load_model(args))
    state = circuit.run(plan)
    if args.json or not args.out:
        _write(args.out, circuit.state_to_json(state) + "\n")
    else:
        circuit.save_state(args.out, state)
    return EXIT_OK


def cmd_verify(args) -> int:
    model = _load_model(args)
    if model is None:
        raise InputError("verify needs --model for the oracle")
    beta = model.beta if args.beta is None else args.beta
    if model.hamiltonian.n_spins > MAX_ORACLE_SPINS:
        _write(args.out, json.dumps({"pass": False, "oracle": "unavailable"}, indent=2) + "\n")
        return EXIT_RESOURCE
    plan = _plan_for(args, model)
    report = verify_plan(plan, model.hamiltonian, beta, args.tol_f, args.tol_z, args.samples or 0, args.seed)
    _write(args.out, report.to_json() + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_sample(args) -> int:
    plan = _plan_for(args, _load_model(args))
    n = args.samples if args.samples is not None else 1000
    idx = circuit.sample(circuit.run(plan), n, args.seed) if n > 0 else []
    _write(args.out, "".join(bitstring(int(i), plan.n_spins) + "\n" for i in idx))
    return EXIT_OK


def cmd_partition(args) -> int:
    model = _load_model(args)
    plan = _plan_for(args, model)
    out = {"log_Z_plan": renorm.plan_partition_function(plan)}
    if model is not None and model.hamiltonian.n_spins <= MAX_ORACLE_SPINS:
        beta = model.beta if args.beta is None else args.beta
        out["log_Z_oracle"] = gibbs_table(model.hamiltonian, beta).log_Z
    _write(args.out, json.dumps(out, indent=2) + "\n")
    return EXIT_OK


COMMANDS = {
    "plan": cmd_plan,
    "run": cmd_run,
    "verify": cmd_verify,
    "sample": cmd_sample,
    "partition": cmd_partition,
}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cets",
        description="Prepare coherent encodings of classical thermal states with locally controlled rotations.",
    )
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--model", help="Hamiltonian or lattice JSON file")
    ap.add_argument("--plan", help="plan JSON file (instead of building one from --model)")
    ap.add_argument("--builder", choices=BUILDERS, default="auto")
    ap.add_argument("--block-size", type=int, default=None, help="block size for the blocks builder")
    ap.add_argument("--beta", type=float, default=None, help="override the model's inverse temperature")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=None)
    ap.add_argument("--out", help="output path (stdout if omitted)")
    ap.add_argument("--json", action="store_true", help="run: write the JSON amplitude dump")
    ap.add_argument("--tol-f", type=float, default=DEFAULT_TOL_F)
    ap.add_argument("--tol-z", type=float, default=DEFAULT_TOL_Z)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if args.beta is not None and not args.beta >= 0:
            raise InputError("--beta must be >= 0")
        if args.samples is not None and args.samples < 0:
            raise InputError("--samples must be >= 0")
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ResourceLimitError, TopologyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
