"""Gate and plan containers plus their JSON encoding.

Control configurations index angle and amplitude tables little-endian over
the listed control spins: entry ``c`` corresponds to control ``j`` holding
bit ``(c >> j) & 1``. Block targets are indexed the same way.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np


@dataclass(eq=False)
class RotationGate:
    """Y rotation on a fresh qubit whose angle depends on the control configuration."""

    target: int
    controls: tuple[int, ...]
    angles: np.ndarray

    def __post_init__(self):
        self.controls = tuple(int(c) for c in self.controls)
        self.angles = np.asarray(self.angles, dtype=float).reshape(-1)
        if self.angles.size != 1 << len(self.controls):
            raise ValueError(
                f"gate on spin {self.target} has {len(self.controls)} controls "
                f"but {self.angles.size} angles"
            )
        if self.target in self.controls:
            raise ValueError(f"target {self.target} is also a control")

    @property
    def targets(self) -> tuple[int, ...]:
        return (self.target,)

    def to_dict(self) -> dict:
        return {"target": self.target, "controls": list(self.controls), "angles": self.angles.tolist()}


@dataclass(eq=False)
class BlockRotationGate:
    """Controlled isometry preparing a block of fresh qubits.

    ``amplitudes[c]`` is the normalized target-register state written when the
    controls are in configuration ``c``.
    """

    targets: tuple[int, ...]
    controls: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        self.targets = tuple(int(t) for t in self.targets)
        self.controls = tuple(int(c) for c in self.controls)
        self.amplitudes = np.asarray(self.amplitudes, dtype=float)
        shape = (1 << len(self.controls), 1 << len(self.targets))
        if self.amplitudes.shape != shape:
            raise ValueError(f"block amplitudes must have shape {shape}, got {self.amplitudes.shape}")
        if set(self.targets) & set(self.controls):
            raise ValueError("block targets and controls overlap")

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.amplitudes, axis=1)

    def to_dict(self) -> dict:
        return {
            "targets": list(self.targets),
            "controls": list(self.controls),
            "amplitudes": self.amplitudes.tolist(),
        }


Gate = Union[RotationGate, BlockRotationGate]


@dataclass(eq=False)
class PreparationPlan:
    n_spins: int
    gates: list = field(default_factory=list)
    log_lambda_total: float = 0.0

    def validate(self) -> None:
        """Check fresh-qubit discipline: every target is new and every control already prepared."""
        prepared: set[int] = set()
        for k, g in enumerate(self.gates):
            for t in g.targets:
                if not 0 <= t < self.n_spins:
                    raise ValueError(f"gate {k} targets spin {t} outside [0, {self.n_spins})")
                if t in prepared:
                    raise ValueError(f"gate {k} targets spin {t}, which is already prepared")
            missing = [c for c in g.controls if c not in prepared]
            if missing:
                raise ValueError(f"gate {k} is controlled by unprepared spins {missing}")
            prepared.update(g.targets)

    @property
    def is_sequential(self) -> bool:
        """True when gate ``k`` is a rotation on spin ``k`` for every ``k``."""
        return all(isinstance(g, RotationGate) and g.target == k for k, g in enumerate(self.gates))

    def copy(self) -> "PreparationPlan":
        return plan_from_dict(self.to_dict())

    def to_dict(self) -> dict:
        return {
            "n_spins": self.n_spins,
            "log_lambda_total": self.log_lambda_total,
            "gates": [g.to_dict() for g in self.gates],
        }

    def to_json(self, path: str | Path | None = None, indent: int | None = 2) -> str:
        text = json.dumps(self.to_dict(), indent=indent)
        if path is not None:
            Path(path).write_text(text + "\n", encoding="utf-8")
        return text


def gate_from_dict(d: dict) -> Gate:
    if "amplitudes" in d:
        return BlockRotationGate(tuple(d["targets"]), tuple(d["controls"]), np.asarray(d["amplitudes"], dtype=float))
    return RotationGate(int(d["target"]), tuple(d["controls"]), np.asarray(d["angles"], dtype=float))


def plan_from_dict(data: dict) -> PreparationPlan:
    plan = PreparationPlan(
        int(data["n_spins"]),
        [gate_from_dict(g) for g in data["gates"]],
        float(data["log_lambda_total"]),
    )
    plan.validate()
    return plan


def load_plan(path: str | Path) -> PreparationPlan:
    with open(path, encoding="utf-8") as fh:
        return plan_from_dict(json.load(fh))
