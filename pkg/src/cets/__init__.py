"""Coherent encodings of classical thermal states via locally controlled rotations."""

from .block_bp import (
    GammaTable,
    SpinBlock,
    block_rotation,
    blocks_from_hamiltonian,
    blocks_plan,
    gamma_backward,
    lattice2d_plan,
    full_control_plan,
)
from .circuit import apply_block_rotation, apply_rotation, purify_copy, run, sample
from .errors import ConsistencyError, PreconditionError, ResourceLimitError, TopologyError
from .plan import BlockRotationGate, PreparationPlan, RotationGate, load_plan
from .renorm import (
    nnn_chain_plan,
    pairwise_decompose,
    plan_partition_function,
    rotation_angle,
    tetrahedron_plan,
    triangle_plan,
)
from .spin_model import CouplingTerm, GibbsTable, Hamiltonian, energy, exact_cets, gibbs_table, load_model
from .verify import VerificationReport, fidelity, tv_distance, verify_plan

__version__ = "0.1.0"

from pathlib import Path as _Path

FIXTURES = _Path(__file__).parent / "fixtures"
