"""Detector variants: schedules, warm starts, the delta sweep, decoding.

Six variants cover the cross product of {flat, linear-ramp} schedules,
{uniform, warm} initial states and {transverse-X, warm-start} mixers.
Ramp variants sweep a small set of slopes Delta and keep the sampled
winner with the lowest classical objective; flat variants sweep a
coarse (gamma, beta) grid over [0, 3]^2 in the same keep-the-best way
(no per-instance parameter choice is prescribed for them, so the grid
convention mirrors the landscape methodology).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from .channel import ConstellationSpec, DetectionInstance, RngStream, objective_f
from .detectors import BmBcdConfig, bm_bcd_solve
from .hubo import (
    PauliHamiltonian,
    QubitLayout,
    build_cost_hamiltonian,
    gray_map_bits_to_pam,
    gray_unmap_pam_to_bits,
    scale_hamiltonian,
)
from .noise import NoiseParams, noisy_execute
from .simulator import QaoaCircuit, evolve_schedules, initial_amplitudes, _sample_indices

CLIP_LO, CLIP_HI = 0.01, 0.99


@dataclass(frozen=True)
class Schedule:
    gammas: np.ndarray
    betas: np.ndarray
    kind: str   # "flat" | "linear_ramp"

    def __post_init__(self):
        if len(self.gammas) != len(self.betas):
            raise ValueError("schedule arrays must have equal length")


def linear_ramp(p: int, delta: float) -> Schedule:
    """gamma_k = (k/p) Delta rising, beta_k = (1-(k-1)/p) Delta falling."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if not delta > 0:
        raise ValueError("delta must be > 0")
    s = ramp_schedule(p, delta, delta)
    return Schedule(s.gammas, s.betas, "linear_ramp")


def ramp_schedule(p: int, gamma_max: float, beta_max: float) -> Schedule:
    """Two-parameter ramp used by the landscape grid; linear_ramp sets both to Delta."""
    k = np.arange(1, p + 1, dtype=float)
    return Schedule((k / p) * gamma_max, (1.0 - (k - 1.0) / p) * beta_max, "linear_ramp")


def flat_schedule(p: int, gamma_max: float, beta_max: float) -> Schedule:
    """Constant gamma_k = gamma_max, beta_k = beta_max across all layers."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return Schedule(np.full(p, float(gamma_max)), np.full(p, float(beta_max)), "flat")


def soft_bits(r_star: np.ndarray, temperature: float, width: int) -> np.ndarray:
    """Per-qubit P(bit = 1) from the relaxed estimate, folded per bit level.

    Bit 1 is the sign bit sigma(r*/T); deeper bits fold the residual,
    d_1 = -r*, d_i = |d_{i-1}| - 2^(W-i+1), x_i = sigma(-d_i / T).
    Output is symbol-major (qubit q = k*W + i), clipped to [0.01, 0.99].
    """
    if not temperature > 0:
        raise ValueError("temperature must be > 0")
    r_star = np.asarray(r_star, dtype=float)
    x = np.empty((r_star.size, width))
    x[:, 0] = expit(r_star / temperature)
    d = -r_star
    for i in range(1, width):
        d = np.abs(d) - float(1 << (width - i))
        x[:, i] = expit(-d / temperature)
    return np.clip(x.ravel(), CLIP_LO, CLIP_HI)


@dataclass(frozen=True)
class WarmStart:
    """BM-BCD soft information mapped to qubit probabilities and RY angles."""

    r_star: np.ndarray
    x_star: np.ndarray       # clipped to [0.01, 0.99], one entry per qubit
    theta: np.ndarray        # 2 arcsin(sqrt(x*))


def warm_start_from(r_star: np.ndarray, temperature: float, width: int) -> WarmStart:
    x = soft_bits(r_star, temperature, width)
    return WarmStart(np.asarray(r_star, dtype=float), x, 2.0 * np.arcsin(np.sqrt(x)))


# name -> (init, mixer, schedule kind); fixed stream tags keep per-detector
# RNG streams stable regardless of which detectors run together.
VARIANTS: dict[str, tuple[str, str, str]] = {
    "stdqaoa": ("uniform", "x", "flat"),
    "ws-rx": ("warm", "x", "flat"),
    "ws-ws": ("warm", "ws", "flat"),
    "lr-qaoa": ("uniform", "x", "linear_ramp"),
    "wslr-rx": ("warm", "x", "linear_ramp"),
    "wslr-w": ("warm", "ws", "linear_ramp"),
}


@dataclass(frozen=True)
class VariantConfig:
    name: str
    init: str
    mixer: str
    schedule_kind: str
    p: int = 5
    shots: int = 1024
    delta_set: tuple[float, ...] = (0.25, 0.75)
    temperature: float = 0.2
    flat_grid: int = 9          # flat variants: grid resolution over [0, flat_span]^2
    flat_span: float = 3.0
    bcd: BmBcdConfig | None = None

    @classmethod
    def of(cls, name: str, **overrides) -> "VariantConfig":
        key = name.lower()
        if key not in VARIANTS:
            raise ValueError(f"unknown variant {name!r}; choose from {sorted(VARIANTS)}")
        init, mixer, kind = VARIANTS[key]
        return replace(cls(key, init, mixer, kind), **overrides)


@dataclass
class ScheduleOutcome:
    """Sampled winner of one schedule in the sweep."""

    param: tuple[float, ...]    # (delta,) for ramps, (gamma_max, beta_max) for flat
    bitstring: int
    count: int
    energy: float               # classical objective of the decoded winner


@dataclass
class TrialRecord:
    variant: str
    bitstring: int
    s_hat: np.ndarray
    symbols: np.ndarray
    energy: float
    selected_param: tuple[float, ...]
    outcomes: list[ScheduleOutcome] = field(default_factory=list)
    errors: int = 0
    total: int = 0
    instance_checksum: int = 0
    warm_start: WarmStart | None = None


def decode_bitstring(
    index: int,
    layout: QubitLayout,
    spec: ConstellationSpec,
) -> tuple[np.ndarray, np.ndarray]:
    """Basis index -> (complex symbols, real PAM vector) via inverse Gray map."""
    half = layout.n_components // 2
    s_hat = np.empty(layout.n_components)
    for k in range(layout.n_components):
        s_hat[k] = gray_map_bits_to_pam(layout.component_bits(index, k))
    return s_hat[:half] + 1j * s_hat[half:], s_hat


def encode_pam_vector(s: np.ndarray, layout: QubitLayout) -> int:
    """Real PAM vector -> basis index (Gray encode each component)."""
    w = layout.bits_per_component
    index = 0
    for k, level in enumerate(s):
        for i, b in enumerate(gray_unmap_pam_to_bits(int(level), w)):
            index |= b << (k * w + i)
    return index


def ser_of(symbols_hat: np.ndarray, x_true: np.ndarray) -> tuple[int, int]:
    """(symbol errors, symbols compared); an error is any complex mismatch."""
    symbols_hat = np.asarray(symbols_hat)
    if symbols_hat.shape != x_true.shape:
        raise ValueError("symbol vectors must have equal length")
    return int(np.count_nonzero(symbols_hat != x_true)), x_true.size


def _most_frequent(counts: dict[int, int]) -> tuple[int, int]:
    """Winning basis index; ties resolve to the smallest index."""
    best_b, best_c = None, -1
    for b in sorted(counts):
        if counts[b] > best_c:
            best_b, best_c = b, counts[b]
    return best_b, best_c


def _schedule_params(variant: VariantConfig) -> tuple[list[tuple[float, ...]], np.ndarray, np.ndarray]:
    """Parameter list plus stacked (batch, p) gamma/beta arrays for the sweep."""
    if variant.schedule_kind == "linear_ramp":
        params = [(float(d),) for d in variant.delta_set]
        scheds = [linear_ramp(variant.p, d) for (d,) in params]
    else:
        axis = np.linspace(0.0, variant.flat_span, variant.flat_grid)
        params = [(float(gm), float(bm)) for gm in axis for bm in axis]
        scheds = [flat_schedule(variant.p, gm, bm) for gm, bm in params]
    return params, np.stack([s.gammas for s in scheds]), np.stack([s.betas for s in scheds])


def build_warm_start(
    instance: DetectionInstance,
    variant: VariantConfig,
    rng: np.random.Generator,
) -> WarmStart:
    cfg = variant.bcd or BmBcdConfig(bound=instance.spec.levels_per_dim - 1)
    result = bm_bcd_solve(instance.q, cfg, rng)
    return warm_start_from(result.r_star, variant.temperature, instance.spec.bits_per_dim)


def run_variant(
    instance: DetectionInstance,
    variant: VariantConfig,
    rng: RngStream | np.random.Generator,
    noise: NoiseParams | None = None,
) -> TrialRecord:
    """Execute one QAOA detector variant on one instance.

    Builds and scales the cost Hamiltonian, prepares the initial state,
    sweeps the variant's schedule set, samples each final state, keeps
    the sampled winner with the strictly lowest classical objective
    (first schedule wins ties), and Gray-decodes it.
    """
    gen = rng.generator(0) if isinstance(rng, RngStream) else rng
    spec = instance.spec
    layout = QubitLayout(2 * instance.nt, spec.bits_per_dim)
    ham = build_cost_hamiltonian(instance.g, instance.c, spec, layout)
    scaled, _ = scale_hamiltonian(ham)

    warm = None
    x_star = None
    if variant.init == "warm" or variant.mixer == "ws":
        warm = build_warm_start(instance, variant, gen)
        x_star = warm.x_star

    params, gammas, betas = _schedule_params(variant)
    outcomes: list[ScheduleOutcome] = []
    if noise is None:
        circuit = QaoaCircuit(layout.n_qubits, variant.init, scaled,
                              gammas[0], betas[0], variant.mixer, x_star)
        finals = evolve_schedules(initial_amplitudes(circuit), scaled,
                                  gammas, betas, variant.mixer, x_star)
        for param, amps in zip(params, finals):
            probs = np.abs(amps) ** 2
            idx = _sample_indices(probs, variant.shots, gen)
            vals, cnts = np.unique(idx, return_counts=True)
            counts = {int(v): int(cnt) for v, cnt in zip(vals, cnts)}
            outcomes.append(_outcome(param, counts, instance, layout))
    else:
        for param, gam, bet in zip(params, gammas, betas):
            circuit = QaoaCircuit(layout.n_qubits, variant.init, scaled,
                                  gam, bet, variant.mixer, x_star)
            counts = noisy_execute(circuit, noise, variant.shots, gen)
            outcomes.append(_outcome(param, counts, instance, layout))

    best = outcomes[0]
    for oc in outcomes[1:]:
        if oc.energy < best.energy:
            best = oc
    symbols, s_hat = decode_bitstring(best.bitstring, layout, spec)
    errors, total = ser_of(symbols, instance.x_true)
    return TrialRecord(
        variant=variant.name, bitstring=best.bitstring, s_hat=s_hat,
        symbols=symbols, energy=best.energy, selected_param=best.param,
        outcomes=outcomes, errors=errors, total=total,
        instance_checksum=instance.checksum(), warm_start=warm,
    )


def _outcome(param, counts, instance, layout) -> ScheduleOutcome:
    b_star, count = _most_frequent(counts)
    _, s_hat = decode_bitstring(b_star, layout, instance.spec)
    return ScheduleOutcome(param, b_star, count,
                           objective_f(instance.g, instance.c, s_hat))
