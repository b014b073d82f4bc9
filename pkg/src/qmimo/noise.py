"""Density-matrix execution with depolarizing and readout noise.

Gate-count accounting convention: every single-qubit gate (Hadamard/RY
preparation, each mixer rotation, and each Z-rotation realizing a
Hamiltonian term) is followed by single-qubit depolarizing noise with
probability ``p_1q`` on its target. A weight-w Z-string (w >= 2) is
charged as a CNOT ladder: two-qubit depolarizing with ``p_2q`` on each
consecutive support pair going down and back up (2(w-1) applications)
plus the single-qubit charge on the ladder root. Readout applies an
independent bit flip with ``p_ro`` per qubit before counting. The ideal
part of the cost unitary is still applied exactly (diagonal phases);
only the noise bookkeeping follows the ladder decomposition.

T1/T2 are recorded for provenance; no thermal-relaxation channel is
applied (the noise model is depolarizing + readout only).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulator import QaoaCircuit, _sample_indices

MAX_DENSITY_QUBITS = 10

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True)
class NoiseParams:
    p_1q: float
    p_2q: float
    p_ro: float
    t1: float | None = None    # recorded only
    t2: float | None = None    # recorded only

    def __post_init__(self):
        for name in ("p_1q", "p_2q", "p_ro"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{name}={p} outside [0, 1]")

    def as_dict(self) -> dict:
        return {"p_1q": self.p_1q, "p_2q": self.p_2q, "p_ro": self.p_ro,
                "t1": self.t1, "t2": self.t2}


# IBM Eagle r3 calibration-derived parameters (coherence times recorded only).
EAGLE_R3 = NoiseParams(p_1q=2.639e-4, p_2q=8.401e-3, p_ro=2.76e-2,
                       t1=247.6e-6, t2=105.29e-6)


def initial_density(n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def _axes_views(rho: np.ndarray, n: int, q: int):
    """Reshape rho so qubit q's row and column indices become axes 1 and 4."""
    hi, lo = 1 << (n - q - 1), 1 << q
    return rho.reshape(hi, 2, lo, hi, 2, lo)


def apply_unitary_1q(rho: np.ndarray, n: int, q: int, u: np.ndarray) -> np.ndarray:
    """rho -> U rho U^dagger for a 2x2 unitary on qubit q."""
    v = _axes_views(rho, n, q)
    v2 = np.einsum("ab,hbljcm->haljcm", u, v)
    v3 = np.einsum("haljcm,dc->haljdm", v2, u.conj())
    return v3.reshape(rho.shape)


def apply_phase_diagonal(rho: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Conjugate by a diagonal unitary given its phase vector."""
    rho *= phases[:, None]
    rho *= phases.conj()[None, :]
    return rho


def _replace_with_mixed(rho: np.ndarray, n: int, q: int) -> np.ndarray:
    """(I/2 on qubit q) tensor Tr_q(rho)."""
    v = _axes_views(rho, n, q)
    tr = v[:, 0, :, :, 0, :] + v[:, 1, :, :, 1, :]
    out = np.zeros_like(v)
    out[:, 0, :, :, 0, :] = 0.5 * tr
    out[:, 1, :, :, 1, :] = 0.5 * tr
    return out.reshape(rho.shape)


def depolarize_1q(rho: np.ndarray, n: int, q: int, p: float) -> np.ndarray:
    """(1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z).

    Implemented via the Bloch-contraction identity: the channel equals
    (1 - 4p/3) rho + (4p/3) (I/2 tensor Tr_q rho).
    """
    if p == 0.0:
        return rho
    lam = 4.0 * p / 3.0
    return (1.0 - lam) * rho + lam * _replace_with_mixed(rho, n, q)


def depolarize_2q(rho: np.ndarray, n: int, q1: int, q2: int, p: float) -> np.ndarray:
    """Two-qubit depolarizing: uniform over the 15 non-identity Paulis."""
    if p == 0.0:
        return rho
    lam = 16.0 * p / 15.0
    mixed = _replace_with_mixed(_replace_with_mixed(rho, n, q1), n, q2)
    return (1.0 - lam) * rho + lam * mixed


def readout_flip_probs(probs: np.ndarray, n: int, p_ro: float) -> np.ndarray:
    """Push the outcome distribution through per-qubit bit-flip channels."""
    if p_ro == 0.0:
        return probs
    out = probs.copy()
    for q in range(n):
        hi, lo = 1 << (n - q - 1), 1 << q
        v = out.reshape(hi, 2, lo)
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        v[:, 0, :] = (1.0 - p_ro) * a0 + p_ro * a1
        v[:, 1, :] = p_ro * a0 + (1.0 - p_ro) * a1
    return out


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _mixer_unitary(kind: str, beta: float, x: float | None) -> np.ndarray:
    c, s = np.cos(beta), np.sin(beta)
    if kind == "x":
        return np.array([[c, -1j * s], [-1j * s, c]])
    pz = 1.0 - 2.0 * x
    px = 2.0 * np.sqrt(x * (1.0 - x))
    return np.array([[c - 1j * s * pz, -1j * s * px], [-1j * s * px, c + 1j * s * pz]])


def _charge_cost_noise(rho: np.ndarray, n: int, ham, noise: NoiseParams) -> np.ndarray:
    for term in ham.terms:
        support = term.support
        if len(support) == 1:
            rho = depolarize_1q(rho, n, support[0], noise.p_1q)
            continue
        pairs = list(zip(support[:-1], support[1:]))
        for a, b in pairs:                      # ladder down
            rho = depolarize_2q(rho, n, a, b, noise.p_2q)
        rho = depolarize_1q(rho, n, support[-1], noise.p_1q)   # rotation at the root
        for a, b in reversed(pairs):            # ladder back up
            rho = depolarize_2q(rho, n, a, b, noise.p_2q)
    return rho


def noisy_final_probs(circuit: QaoaCircuit, noise: NoiseParams) -> np.ndarray:
    """Outcome distribution of the noisy circuit (readout included)."""
    n = circuit.n_qubits
    if n > MAX_DENSITY_QUBITS:
        raise ValueError(f"density-matrix path limited to {MAX_DENSITY_QUBITS} qubits, got {n}")
    rho = initial_density(n)
    for q in range(n):
        if circuit.init == "uniform":
            rho = apply_unitary_1q(rho, n, q, _HADAMARD)
        else:
            theta = 2.0 * np.arcsin(np.sqrt(circuit.x_star[q]))
            rho = apply_unitary_1q(rho, n, q, _ry(theta))
        rho = depolarize_1q(rho, n, q, noise.p_1q)

    diag = circuit.hamiltonian.diagonal()
    for gamma, beta in zip(circuit.gammas, circuit.betas):
        rho = apply_phase_diagonal(rho, np.exp(-1j * gamma * diag))
        rho = _charge_cost_noise(rho, n, circuit.hamiltonian, noise)
        for q in range(n):
            x = None if circuit.mixer == "x" else circuit.x_star[q]
            rho = apply_unitary_1q(rho, n, q, _mixer_unitary(circuit.mixer, beta, x))
            rho = depolarize_1q(rho, n, q, noise.p_1q)

    probs = np.real(np.diagonal(rho)).copy()
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    return readout_flip_probs(probs, n, noise.p_ro)


def noisy_execute(
    circuit: QaoaCircuit,
    noise: NoiseParams,
    shots: int,
    rng: np.random.Generator,
) -> dict[int, int]:
    """Sample ``shots`` measurement outcomes of the noisy circuit."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = noisy_final_probs(circuit, noise)
    idx = _sample_indices(probs, shots, rng)
    vals, counts = np.unique(idx, return_counts=True)
    return {int(v): int(cnt) for v, cnt in zip(vals, counts)}
