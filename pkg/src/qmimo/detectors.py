"""Classical baselines: exhaustive ML, ZF, MMSE, and the BM-BCD SDR solver.

All detectors operate on the real lift of a :class:`~qmimo.channel.DetectionInstance`
and return hard PAM decisions s_hat of length 2Nt. BM-BCD additionally
returns the relaxed vector r* that seeds the QAOA warm start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channel import ConstellationSpec, DetectionInstance, objective_f

# Exhaustive search guard: L^(2Nt) = 2^(2Nt*W) candidates.
ML_MAX_BITS = 24


def quantize_to_pam(v: np.ndarray, spec: ConstellationSpec) -> np.ndarray:
    """Per-coordinate nearest PAM level, clipped to +-(L-1).

    Midpoints (even integers) round toward the level nearer zero; an
    exact 0.0 maps to +1.
    """
    v = np.asarray(v, dtype=float)
    lvl = spec.levels_per_dim
    # magnitude index j solves level = 2j+1; ceil((a-2)/2) rounds midpoints down
    j = np.ceil((np.abs(v) - 2.0) / 2.0)
    j = np.clip(j, 0, lvl // 2 - 1)
    mag = 2.0 * j + 1.0
    return np.where(v < 0, -mag, mag)


@lru_cache(maxsize=8)
def _pam_candidates(levels: int, dim: int) -> np.ndarray:
    """All PAM^dim vectors in lexicographic order, shape (levels^dim, dim)."""
    pts = np.arange(-(levels - 1), levels, 2, dtype=float)
    grids = np.meshgrid(*([pts] * dim), indexing="ij")
    out = np.stack([g.ravel() for g in grids], axis=1)
    out.flags.writeable = False
    return out


def ml_detect(instance: DetectionInstance) -> tuple[np.ndarray, float]:
    """Exhaustive maximum-likelihood search over PAM^(2Nt).

    Returns the minimizing real vector and its objective value; ties go
    to the lexicographically smallest candidate.
    """
    spec = instance.spec
    dim = 2 * instance.nt
    bits = dim * spec.bits_per_dim
    if bits > ML_MAX_BITS:
        raise ValueError(f"ML search space 2^{bits} exceeds guard 2^{ML_MAX_BITS}")
    cand = _pam_candidates(spec.levels_per_dim, dim)
    energies = np.einsum("ij,ij->i", cand @ instance.g, cand) - 2.0 * (cand @ instance.c)
    best = int(np.argmin(energies))
    return cand[best].copy(), float(energies[best])


def zf_estimate(instance: DetectionInstance) -> np.ndarray:
    """Unquantized zero-forcing (least-squares) estimate G^-1 c."""
    return np.linalg.solve(instance.g, instance.c)


def zf_detect(instance: DetectionInstance) -> np.ndarray:
    """Zero-forcing: pseudoinverse solution quantized to the PAM grid.

    Raises ``numpy.linalg.LinAlgError`` when M_real is rank deficient.
    """
    return quantize_to_pam(zf_estimate(instance), instance.spec)


def mmse_estimate(instance: DetectionInstance) -> np.ndarray:
    """Unquantized MMSE estimate with per-real-dimension energy Es/2."""
    dim = instance.g.shape[0]
    reg = instance.sigma2 / (instance.spec.symbol_energy / 2.0)
    return np.linalg.solve(instance.g + reg * np.eye(dim), instance.c)


def mmse_detect(instance: DetectionInstance) -> np.ndarray:
    """Regularized linear estimate quantized to the PAM grid."""
    return quantize_to_pam(mmse_estimate(instance), instance.spec)


@dataclass(frozen=True)
class BmBcdConfig:
    """Low-rank SDR solver knobs.

    ``bound`` is the outer radius B of the row-norm annulus; the inner
    radius is always 1 and the homogenization row is pinned to norm 1.
    """

    rank: int | None = None          # default ceil(sqrt(N))
    bound: float = 3.0               # B = L - 1 for the detection SDR
    max_sweeps: int = 500
    tol_rel: float = 1e-6

    def __post_init__(self):
        if self.rank is not None and self.rank < 2:
            raise ValueError("rank must be >= 2")
        if self.bound < 1:
            raise ValueError("bound must be >= 1")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if not self.tol_rel > 0:
            raise ValueError("tol_rel must be > 0")


@dataclass
class BmBcdResult:
    r_mat: np.ndarray                 # (N, K) factor, X = R R'
    objective_trace: np.ndarray       # Tr(Q R R') after init and each sweep
    r_star: np.ndarray                # (N-1,) inner products <row_i, row_N>
    converged: bool
    sweeps: int
    # feasibility per sweep: (min, max) norm over rows 1..N-1 and |norm(row_N)-1|
    row_norm_trace: np.ndarray = field(default=None)  # type: ignore[assignment]
    last_row_dev_trace: np.ndarray = field(default=None)  # type: ignore[assignment]


def _project_annulus(row: np.ndarray, bound: float) -> np.ndarray:
    nrm = float(np.linalg.norm(row))
    if nrm < 1e-300:
        e1 = np.zeros_like(row)
        e1[0] = 1.0
        return e1
    if nrm < 1.0:
        return row / nrm
    if nrm > bound:
        return row * (bound / nrm)
    return row


def bm_bcd_solve(
    q: np.ndarray,
    config: BmBcdConfig,
    rng: np.random.Generator,
) -> BmBcdResult:
    """Cyclic row-wise block coordinate descent on Tr(Q R R').

    Each row's unconstrained minimizer -(1/Q_ii) sum_{j!=i} Q_ij r_j is
    projected radially back onto its feasible set (annulus for rows
    1..N-1, unit sphere for the homogenization row N). With Q_ii > 0 the
    radial projection is the exact constrained minimizer of the row
    subproblem, so the objective is non-increasing row by row. Rows with
    |Q_ii| < 1e-12 (always row N, whose diagonal is 0 by construction)
    skip the 1/Q_ii scaling; the projection makes the scale irrelevant.
    """
    q = np.asarray(q, dtype=float)
    n = q.shape[0]
    if q.ndim != 2 or q.shape != (n, n) or not np.allclose(q, q.T, atol=1e-10):
        raise ValueError("Q must be square symmetric")
    k = config.rank if config.rank is not None else max(2, math.isqrt(n - 1) + 1)

    r = rng.standard_normal((n, k))
    for i in range(n - 1):
        r[i] = _project_annulus(r[i], config.bound)
    r[n - 1] /= np.linalg.norm(r[n - 1])

    obj = float(np.einsum("ij,ik,jk->", q, r, r))
    trace = [obj]
    norm_trace = []
    dev_trace = []
    converged = False
    sweeps = 0
    for _ in range(config.max_sweeps):
        prev = obj
        for i in range(n):
            g_i = q[i] @ r - q[i, i] * r[i]
            new = -g_i if abs(q[i, i]) < 1e-12 else -g_i / q[i, i]
            if i < n - 1:
                new = _project_annulus(new, config.bound)
            else:
                nrm = float(np.linalg.norm(new))
                new = new / nrm if nrm > 1e-300 else r[i]
            # incremental objective update for the changed row
            obj += q[i, i] * (new @ new - r[i] @ r[i]) + 2.0 * ((new - r[i]) @ g_i)
            r[i] = new
        if not np.isfinite(obj):
            raise RuntimeError("BM-BCD objective became non-finite")
        sweeps += 1
        trace.append(obj)
        norms = np.linalg.norm(r[:-1], axis=1)
        norm_trace.append((float(norms.min()), float(norms.max())))
        dev_trace.append(abs(float(np.linalg.norm(r[-1])) - 1.0))
        if (prev - obj) < config.tol_rel * max(1.0, abs(prev)):
            converged = True
            break

    r_star = r[:-1] @ r[-1]
    return BmBcdResult(
        r_mat=r,
        objective_trace=np.asarray(trace),
        r_star=r_star,
        converged=converged,
        sweeps=sweeps,
        row_norm_trace=np.asarray(norm_trace),
        last_row_dev_trace=np.asarray(dev_trace),
    )


def bcd_detect(
    instance: DetectionInstance,
    rng: np.random.Generator,
    config: BmBcdConfig | None = None,
) -> np.ndarray:
    """Hard decision from the SDR relaxation: quantize r* to the PAM grid."""
    cfg = config or BmBcdConfig(bound=instance.spec.levels_per_dim - 1)
    res = bm_bcd_solve(instance.q, cfg, rng)
    return quantize_to_pam(res.r_star, instance.spec)


def symbol_errors(s_hat: np.ndarray, instance: DetectionInstance) -> int:
    """Complex-symbol mismatches between a real decision vector and x_true."""
    nt = instance.nt
    sym = s_hat[:nt] + 1j * s_hat[nt:]
    return int(np.count_nonzero(sym != instance.x_true))


def detection_objective(instance: DetectionInstance, s_hat: np.ndarray) -> float:
    return objective_f(instance.g, instance.c, s_hat)
