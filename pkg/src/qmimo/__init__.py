"""Hybrid quantum-classical MIMO detection benchmark suite.

Pipeline: i.i.d. Rayleigh channel instances are lifted to a real
quadratic objective, compiled through Gray-coded symbol polynomials
into a diagonal Z-string Hamiltonian, warm-started from a low-rank SDR
solved by block coordinate descent, and detected by linear-ramp QAOA on
an exact statevector simulator (optionally a noisy density-matrix
path). The bench harness reproduces SER sweeps and cost-landscape
grids at desk scale.
"""

from .channel import (
    ConstellationSpec,
    DetectionInstance,
    RngStream,
    build_lifted_Q,
    generate_instance,
    noise_variance,
    objective_f,
)
from .detectors import (
    BmBcdConfig,
    BmBcdResult,
    bcd_detect,
    bm_bcd_solve,
    ml_detect,
    mmse_detect,
    quantize_to_pam,
    zf_detect,
)
from .hubo import (
    PauliHamiltonian,
    PauliTerm,
    QubitLayout,
    build_cost_hamiltonian,
    evaluate_energy,
    gray_map_bits_to_pam,
    gray_unmap_pam_to_bits,
    parse_hamiltonian,
    poly_multiply,
    scale_hamiltonian,
    serialize_hamiltonian,
    symbol_as_z_polynomial,
)
from .noise import EAGLE_R3, NoiseParams, noisy_execute
from .qaoa import (
    Schedule,
    TrialRecord,
    VariantConfig,
    WarmStart,
    decode_bitstring,
    flat_schedule,
    linear_ramp,
    run_variant,
    ser_of,
    soft_bits,
)
from .simulator import (
    QaoaCircuit,
    StateVector,
    apply_cost_phase,
    apply_rx_mixer,
    apply_ws_mixer,
    execute_circuit,
    expectation,
    prepare_uniform,
    prepare_warm_start,
    sample,
)
from .bench import (
    ExperimentConfig,
    LandscapeReport,
    SerReport,
    emit_report,
    run_landscape,
    run_ser_experiment,
    run_single,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
