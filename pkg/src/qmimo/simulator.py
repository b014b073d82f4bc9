"""Exact statevector simulation of the QAOA circuit family.

The cost unitary is diagonal in the computational basis, so it is
applied as exact per-basis-state phases rather than a gate-by-gate
product (identical result since every Z-string commutes, and much
faster). Mixers are applied as single-qubit 2x2 unitaries.

Basis convention: index b carries qubit q in bit q (qubit 0 is the
least-significant bit); bitstring displays read q_{n-1}...q_0.

The private ``_*`` helpers accept an arbitrary leading batch axis so a
whole schedule sweep evolves as one array program; the public
operations wrap them for a single :class:`StateVector`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hubo import PauliHamiltonian

MAX_STATEVECTOR_QUBITS = 24
_EVOLVE_CHUNK = 32   # schedule rows evolved per batch (memory cap)


@dataclass
class StateVector:
    """2^n normalized complex amplitudes, owned by one execution."""

    n_qubits: int
    amps: np.ndarray

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def bitstring_str(index: int, n_qubits: int) -> str:
    """Display form q_{n-1}...q_0 of a basis index."""
    return format(index, f"0{n_qubits}b")


def _check_n(n: int):
    if not (1 <= n <= MAX_STATEVECTOR_QUBITS):
        raise ValueError(f"qubit count {n} outside [1, {MAX_STATEVECTOR_QUBITS}]")


def prepare_uniform(n_qubits: int) -> StateVector:
    """Uniform superposition |+>^n (every amplitude 2^(-n/2))."""
    _check_n(n_qubits)
    dim = 1 << n_qubits
    return StateVector(n_qubits, np.full(dim, dim**-0.5, dtype=complex))


def prepare_warm_start(x_star: np.ndarray) -> StateVector:
    """Product state with P(qubit q = 1) = x_star[q] exactly.

    Equivalent to applying RY(2 arcsin sqrt(x*)) to each |0>.
    """
    x_star = np.asarray(x_star, dtype=float)
    _check_n(x_star.size)
    if np.any(x_star < 0) or np.any(x_star > 1):
        raise ValueError("warm-start probabilities must lie in [0, 1]")
    amps = np.ones(1, dtype=complex)
    for x in x_star:  # qubit q becomes the most-significant bit so far
        amps = np.kron(np.array([np.sqrt(1.0 - x), np.sqrt(x)], dtype=complex), amps)
    return StateVector(x_star.size, amps)


def _apply_1q(amps: np.ndarray, n: int, q: int, u00, u01, u10, u11) -> np.ndarray:
    """2x2 unitary on qubit q; entries may broadcast over leading axes."""
    lead = amps.shape[:-1]
    hi, lo = 1 << (n - q - 1), 1 << q
    v = amps.reshape(lead + (hi, 2, lo))
    a0 = v[..., 0, :]
    a1 = v[..., 1, :]
    n0 = u00 * a0 + u01 * a1
    v[..., 1, :] = u10 * a0 + u11 * a1
    v[..., 0, :] = n0
    return amps


def _apply_rx_all(amps: np.ndarray, n: int, beta) -> np.ndarray:
    """exp(-i beta X) on every qubit; beta scalar or (batch,) array."""
    beta = np.asarray(beta, dtype=float)
    shape = beta.shape + (1, 1)
    c = np.cos(beta).reshape(shape)
    ms = -1j * np.sin(beta).reshape(shape)
    for q in range(n):
        _apply_1q(amps, n, q, c, ms, ms, c)
    return amps


def _apply_ws_all(amps: np.ndarray, n: int, beta, x_star: np.ndarray) -> np.ndarray:
    """exp(-i beta P_q) per qubit with P = 2 sqrt(x(1-x)) X + (1-2x) Z.

    P^2 = I, so the closed form cos(beta) I - i sin(beta) P applies.
    """
    beta = np.asarray(beta, dtype=float)
    shape = beta.shape + (1, 1)
    c = np.cos(beta).reshape(shape)
    s = np.sin(beta).reshape(shape)
    for q in range(n):
        x = x_star[q]
        pz = 1.0 - 2.0 * x
        px = 2.0 * np.sqrt(x * (1.0 - x))
        _apply_1q(amps, n, q, c - 1j * s * pz, -1j * s * px, -1j * s * px, c + 1j * s * pz)
    return amps


def apply_cost_phase(state: StateVector, ham: PauliHamiltonian, gamma: float) -> StateVector:
    """Multiply each amplitude by exp(-i gamma E(b)); offset is a global phase."""
    if ham.n_qubits != state.n_qubits:
        raise ValueError("Hamiltonian/state qubit mismatch")
    state.amps *= np.exp(-1j * gamma * ham.diagonal())
    return state


def apply_rx_mixer(state: StateVector, beta: float) -> StateVector:
    _apply_rx_all(state.amps, state.n_qubits, beta)
    return state


def apply_ws_mixer(state: StateVector, beta: float, x_star: np.ndarray) -> StateVector:
    x_star = np.asarray(x_star, dtype=float)
    if x_star.size != state.n_qubits:
        raise ValueError("x* length must match qubit count")
    _apply_ws_all(state.amps, state.n_qubits, beta, x_star)
    return state


def sample(state: StateVector, shots: int, rng: np.random.Generator) -> dict[int, int]:
    """Basis-index counts from ``shots`` i.i.d. draws of |amp|^2."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    idx = _sample_indices(state.probabilities(), shots, rng)
    vals, counts = np.unique(idx, return_counts=True)
    return {int(v): int(cnt) for v, cnt in zip(vals, counts)}


def _sample_indices(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    return np.searchsorted(cdf, rng.random(shots), side="right")


def expectation(state: StateVector, ham: PauliHamiltonian) -> float:
    """<psi| H |psi>, offset included."""
    if ham.n_qubits != state.n_qubits:
        raise ValueError("Hamiltonian/state qubit mismatch")
    return float(state.probabilities() @ ham.diagonal()) + ham.offset


@dataclass(frozen=True)
class QaoaCircuit:
    """One concrete QAOA execution: init, scaled Hamiltonian, schedule, mixer.

    ``x_star`` doubles as the warm-start preparation probabilities and
    the warm-start mixer axis (the mixer is built once from x* and kept
    fixed across layers).
    """

    n_qubits: int
    init: str                   # "uniform" | "warm"
    hamiltonian: PauliHamiltonian
    gammas: np.ndarray          # (p,)
    betas: np.ndarray           # (p,)
    mixer: str                  # "x" | "ws"
    x_star: np.ndarray | None = None

    def __post_init__(self):
        if self.init not in ("uniform", "warm"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.mixer not in ("x", "ws"):
            raise ValueError(f"unknown mixer {self.mixer!r}")
        if (self.init == "warm" or self.mixer == "ws") and self.x_star is None:
            raise ValueError("warm init / ws mixer require x_star")
        if len(self.gammas) != len(self.betas):
            raise ValueError("schedule length mismatch")


def initial_amplitudes(circuit: QaoaCircuit) -> np.ndarray:
    if circuit.init == "uniform":
        return prepare_uniform(circuit.n_qubits).amps
    return prepare_warm_start(circuit.x_star).amps


def execute_circuit(circuit: QaoaCircuit) -> StateVector:
    """Noiseless evolution of one circuit to its final state."""
    out = evolve_schedules(
        initial_amplitudes(circuit), circuit.hamiltonian,
        circuit.gammas[None, :], circuit.betas[None, :],
        circuit.mixer, circuit.x_star,
    )
    return StateVector(circuit.n_qubits, out[0])


def evolve_schedules(
    psi0: np.ndarray,
    ham: PauliHamiltonian,
    gammas: np.ndarray,
    betas: np.ndarray,
    mixer: str,
    x_star: np.ndarray | None = None,
) -> np.ndarray:
    """Evolve one initial state under a batch of (gamma, beta) schedules.

    ``gammas``/``betas`` have shape (batch, p); returns (batch, 2^n)
    final amplitudes. Layer order follows the QAOA product: cost phase
    first, mixer second.
    """
    gammas = np.atleast_2d(np.asarray(gammas, dtype=float))
    betas = np.atleast_2d(np.asarray(betas, dtype=float))
    if gammas.shape != betas.shape:
        raise ValueError("gamma/beta batch shapes differ")
    n = ham.n_qubits
    diag = ham.diagonal()
    batch, p = gammas.shape
    out = np.empty((batch, diag.size), dtype=complex)
    for start in range(0, batch, _EVOLVE_CHUNK):
        sl = slice(start, min(start + _EVOLVE_CHUNK, batch))
        amps = np.broadcast_to(psi0, (sl.stop - sl.start, diag.size)).copy()
        g_chunk, b_chunk = gammas[sl], betas[sl]
        prev_g, phases = None, None
        for k in range(p):
            gk = g_chunk[:, k]
            if prev_g is None or not np.array_equal(gk, prev_g):
                phases = np.exp(diag * (-1j * gk[:, None]))
                prev_g = gk
            amps *= phases
            if mixer == "x":
                _apply_rx_all(amps, n, b_chunk[:, k])
            else:
                _apply_ws_all(amps, n, b_chunk[:, k], x_star)
        out[sl] = amps
    return out
