"""Dense statevector execution of preparation plans.

A state on ``n`` qubits is a complex128 vector of length ``2**n`` indexed
little-endian (qubit 0 is the least-significant bit). Reshaped to ``(2,)*n``
in C order, qubit ``q`` sits on axis ``n - 1 - q``.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, PreconditionError, ResourceLimitError
from .plan import BlockRotationGate, PreparationPlan, RotationGate

MAX_QUBITS = 26
FRESH_TOL = 1e-10
NORM_TOL = 1e-10


def n_qubits(state: np.ndarray) -> int:
    n = int(state.size).bit_length() - 1
    if state.ndim != 1 or state.size != 1 << n:
        raise ValueError(f"state length {state.size} is not a power of two")
    return n


def zero_state(n: int) -> np.ndarray:
    if not 0 <= n <= MAX_QUBITS:
        raise ResourceLimitError(f"statevector capped at {MAX_QUBITS} qubits, got {n}")
    state = np.zeros(1 << n, dtype=np.complex128)
    state[0] = 1.0
    return state


def basis_state(index: int, n: int) -> np.ndarray:
    state = np.zeros(1 << n, dtype=np.complex128)
    state[index] = 1.0
    return state


def _gather(state: np.ndarray, n: int, controls: Sequence[int], targets: Sequence[int]):
    """View ``state`` as ``(rest, 2**len(controls), 2**len(targets))``.

    Returns the array and the axis permutation needed to undo the reshuffle.
    """
    for q in (*controls, *targets):
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} outside a {n}-qubit register")
    # last axis varies fastest, so list the most-significant control/target first
    moved = [n - 1 - q for q in reversed(controls)] + [n - 1 - q for q in reversed(targets)]
    rest = [a for a in range(n) if a not in moved]
    perm = rest + moved
    tensor = state.reshape((2,) * n).transpose(perm)
    return tensor.reshape(-1, 1 << len(controls), 1 << len(targets)), perm


def _scatter(block: np.ndarray, n: int, perm: list[int]) -> np.ndarray:
    return block.reshape((2,) * n).transpose(np.argsort(perm)).reshape(-1)


def target_mass(state: np.ndarray, targets: Sequence[int]) -> float:
    """Probability that any of ``targets`` reads 1."""
    n = n_qubits(state)
    view, _ = _gather(state, n, (), targets)
    return float(np.sum(np.abs(view[:, :, 1:]) ** 2))


def _check_fresh(state: np.ndarray, targets: Sequence[int]) -> None:
    mass = target_mass(state, targets)
    if mass > FRESH_TOL:
        raise PreconditionError(f"target qubits {tuple(targets)} are not in |0>: mass {mass:.3e} on |1>")


def apply_rotation(state: np.ndarray, gate: RotationGate) -> np.ndarray:
    """Apply ``[[cos, -sin], [sin, cos]]`` on the target with the angle picked by the controls."""
    n = n_qubits(state)
    _check_fresh(state, gate.targets)
    view, perm = _gather(state, n, gate.controls, (gate.target,))
    c, s = np.cos(gate.angles), np.sin(gate.angles)
    a0, a1 = view[:, :, 0], view[:, :, 1]
    out = np.empty_like(view)
    out[:, :, 0] = c * a0 - s * a1
    out[:, :, 1] = s * a0 + c * a1
    return _scatter(out, n, perm)


def apply_block_rotation(state: np.ndarray, gate: BlockRotationGate) -> np.ndarray:
    """Write ``amplitudes[c]`` into the (fresh) target register for control configuration ``c``."""
    n = n_qubits(state)
    _check_fresh(state, gate.targets)
    view, perm = _gather(state, n, gate.controls, gate.targets)
    out = view[:, :, :1] * gate.amplitudes[None, :, :]
    return _scatter(out, n, perm)


def apply_gate(state: np.ndarray, gate) -> np.ndarray:
    if isinstance(gate, BlockRotationGate):
        return apply_block_rotation(state, gate)
    return apply_rotation(state, gate)


def run(plan: PreparationPlan, check_norm: bool = True) -> np.ndarray:
    """Start from ``|0...0>`` and apply the plan's gates in order."""
    plan.validate()
    state = zero_state(plan.n_spins)
    for k, gate in enumerate(plan.gates):
        state = apply_gate(state, gate)
        if check_norm:
            norm = np.linalg.norm(state)
            if abs(norm - 1.0) > NORM_TOL:
                raise ConsistencyError(f"norm {norm!r} after gate {k}")
    return state


# -- purification --------------------------------------------------------------------------


def apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    n = n_qubits(state)
    view, perm = _gather(state, n, (control,), (target,))
    out = view.copy()
    out[:, 1, 0], out[:, 1, 1] = view[:, 1, 1], view[:, 1, 0]
    return _scatter(out, n, perm)


def purify_copy(state: np.ndarray) -> np.ndarray:
    """Append ``n`` ancillas and CNOT-copy each system qubit ``i`` onto ancilla ``n + i``.

    The result is ``sum_s a_s |s>|s>``; tracing out the ancillas leaves the
    diagonal mixed state ``sum_s |a_s|^2 |s><s|``.
    """
    n = n_qubits(state)
    if 2 * n > MAX_QUBITS:
        raise ResourceLimitError(f"purification needs {2 * n} qubits, cap is {MAX_QUBITS}")
    doubled = np.zeros(1 << (2 * n), dtype=np.complex128)
    doubled[: 1 << n] = state  # ancillas are the high qubits, all |0>
    for i in range(n):
        doubled = apply_cnot(doubled, i, n + i)
    return doubled


def reduced_density_matrix(state: np.ndarray, n_keep: int) -> np.ndarray:
    """Trace out every qubit at position ``>= n_keep``."""
    n = n_qubits(state)
    m = state.reshape(1 << (n - n_keep), 1 << n_keep)
    return m.T @ m.conj()


# -- sampling ----------------------------------------------------------------------------------


def probabilities(state: np.ndarray) -> np.ndarray:
    return np.abs(state) ** 2


def sample(state: np.ndarray, n_samples: int, seed: int) -> np.ndarray:
    """Draw basis indices i.i.d. from ``|amplitude|^2``.

    Inverse-CDF lookup on uniforms from NumPy's PCG64 generator seeded with
    ``seed mod 2**64``, so a given seed always yields the same sequence.
    """
    if n_samples < 0:
        raise ValueError("n_samples must be non-negative")
    rng = np.random.Generator(np.random.PCG64(int(seed) % (1 << 64)))
    cdf = np.cumsum(probabilities(state))
    u = rng.random(n_samples) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, state.size - 1)


# -- state files -----------------------------------------------------------------------------


def save_state(path: str | Path, state: np.ndarray) -> None:
    """Binary dump: little-endian uint64 qubit count, then (re, im) float64 pairs."""
    n = n_qubits(state)
    pairs = np.empty((state.size, 2), dtype="<f8")
    pairs[:, 0], pairs[:, 1] = state.real, state.imag
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", n))
        fh.write(pairs.tobytes())


def load_state(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    (n,) = struct.unpack("<Q", raw[:8])
    if n > MAX_QUBITS:
        raise ResourceLimitError(f"state file claims {n} qubits")
    pairs = np.frombuffer(raw[8:], dtype="<f8")
    if pairs.size != 2 << n:
        raise ValueError(f"state file for {n} qubits has {pairs.size // 2} amplitudes")
    pairs = pairs.reshape(-1, 2)
    return pairs[:, 0] + 1j * pairs[:, 1]


def state_to_json(state: np.ndarray, max_qubits: int = 10) -> str:
    n = n_qubits(state)
    if n > max_qubits:
        raise ResourceLimitError(f"JSON amplitude dump limited to {max_qubits} qubits, state has {n}")
    return json.dumps({"n_qubits": n, "amplitudes": [[a.real, a.imag] for a in state.tolist()]})


def state_from_json(text: str) -> np.ndarray:
    data = json.loads(text)
    amps = np.asarray(data["amplitudes"], dtype=float).reshape(-1, 2)
    state = amps[:, 0] + 1j * amps[:, 1]
    if state.size != 1 << int(data["n_qubits"]):
        raise ValueError("amplitude count does not match n_qubits")
    return state
