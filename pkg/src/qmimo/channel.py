"""Channel instances and the complex-to-real MIMO reformulation.

Everything downstream (classical detectors, the HUBO compiler, the QAOA
pipeline) consumes the real-valued lift produced here: a complex system
y = Hx + n becomes z = M s + noise with the stacking convention
s = [Re(x); Im(x)], and the quadratic objective f(s) = s'Gs - 2c's with
G = M'M and c = M'z.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class ConstellationSpec:
    """Square M-QAM constellation described per real dimension.

    The per-dimension alphabet is the L-level PAM set {+-1, +-3, ...,
    +-(L-1)} with L = sqrt(M); a complex symbol pairs one PAM point for
    the real part with one for the imaginary part.
    """

    order: int

    def __post_init__(self):
        m = self.order
        if m < 4 or (m & (m - 1)) != 0 or m.bit_length() % 2 == 0:
            # even power of two: 4, 16, 64, 256, ... (bit_length is odd)
            raise ValueError(f"modulation order must be an even power of 2, got {m}")

    @property
    def levels_per_dim(self) -> int:
        return int(round(np.sqrt(self.order)))

    @property
    def bits_per_dim(self) -> int:
        return self.levels_per_dim.bit_length() - 1

    @cached_property
    def pam_points(self) -> np.ndarray:
        lvl = self.levels_per_dim
        pts = np.arange(-(lvl - 1), lvl, 2, dtype=float)
        pts.flags.writeable = False
        return pts

    @property
    def symbol_energy(self) -> float:
        """Average complex-symbol energy Es (= 10 for 16-QAM)."""
        return 2.0 * float(np.mean(self.pam_points**2))


@dataclass(frozen=True)
class RngStream:
    """Deterministic (seed, stream) coordinate for one Monte-Carlo trial.

    Independent generators are derived per role so that the draws of one
    consumer (instance generation, a given detector, ...) never shift the
    draws of another, regardless of execution order or parallelism.
    """

    seed: int
    stream: int = 0

    def generator(self, role: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, role))
        return np.random.default_rng(ss)


@dataclass(frozen=True)
class DetectionInstance:
    """One channel realization plus its real-valued lift.

    Arrays are frozen after construction; instances are safe to share
    across worker processes/threads.
    """

    spec: ConstellationSpec
    nt: int
    nr: int
    snr_db: float
    sigma2: float
    h: np.ndarray        # complex (nr, nt)
    x_true: np.ndarray   # complex (nt,)
    y: np.ndarray        # complex (nr,)
    m_real: np.ndarray   # (2nr, 2nt)
    z: np.ndarray        # (2nr,)
    s_true: np.ndarray   # (2nt,) real lift of x_true
    g: np.ndarray        # (2nt, 2nt) = m_real' m_real
    c: np.ndarray        # (2nt,)    = m_real' z
    q: np.ndarray        # (2nt+1, 2nt+1) lifted matrix

    def checksum(self) -> int:
        """Cheap content hash used to assert paired-trial discipline."""
        import zlib

        return zlib.crc32(self.h.tobytes() + self.y.tobytes() + self.x_true.tobytes())


def real_lift_matrix(h: np.ndarray) -> np.ndarray:
    """Real 2Nr x 2Nt block matrix [[Re H, -Im H], [Im H, Re H]]."""
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def real_lift_vector(v: np.ndarray) -> np.ndarray:
    """Stack [Re(v); Im(v)]."""
    return np.concatenate([v.real, v.imag])


def noise_variance(spec: ConstellationSpec, nr: int, snr_db: float) -> float:
    """Per-real-dimension noise variance from SNR = Nr*Es / (2 sigma^2)."""
    snr_lin = 10.0 ** (snr_db / 10.0)
    if not np.isfinite(snr_lin) or snr_lin <= 0:
        raise ValueError(f"SNR {snr_db} dB gives non-positive linear SNR")
    return nr * spec.symbol_energy / (2.0 * snr_lin)


def build_lifted_Q(g: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Homogenize the quadratic s'Gs - 2c's into r'Qr with r = [s; 1].

    Q = [[G, -c], [-c', 0]], size N = dim(G) + 1.
    """
    g = np.asarray(g, dtype=float)
    c = np.asarray(c, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"G must be square, got shape {g.shape}")
    if c.shape != (g.shape[0],):
        raise ValueError(f"c has shape {c.shape}, expected ({g.shape[0]},)")
    if not np.allclose(g, g.T, rtol=1e-10, atol=1e-12):
        raise ValueError("G must be symmetric")
    n = g.shape[0] + 1
    q = np.zeros((n, n))
    q[:-1, :-1] = g
    q[:-1, -1] = -c
    q[-1, :-1] = -c
    return q


def objective_f(g: np.ndarray, c: np.ndarray, s: np.ndarray) -> float:
    """Quadratic detection objective f(s) = s'Gs - 2c's.

    Equals ||z - M s||^2 - z'z for the instance that produced (G, c).
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (g.shape[0],):
        raise ValueError(f"s has shape {s.shape}, expected ({g.shape[0]},)")
    return float(s @ g @ s - 2.0 * (c @ s))


def generate_instance(
    spec: ConstellationSpec,
    nt: int,
    nr: int,
    snr_db: float,
    rng: RngStream | np.random.Generator,
) -> DetectionInstance:
    """Draw one i.i.d. Rayleigh channel realization and lift it.

    H entries are CN(0, 1) (two real Gaussians of variance 1/2), symbols
    are uniform over the constellation, and the complex noise has
    variance 2 sigma^2 per entry with sigma^2 set by ``noise_variance``.
    """
    if nt < 1 or nr < nt:
        raise ValueError(f"need Nt >= 1 and Nr >= Nt, got Nt={nt}, Nr={nr}")
    gen = rng.generator(0) if isinstance(rng, RngStream) else rng
    sigma2 = noise_variance(spec, nr, snr_db)

    h = (gen.standard_normal((nr, nt)) + 1j * gen.standard_normal((nr, nt))) * np.sqrt(0.5)
    re = gen.choice(spec.pam_points, size=nt)
    im = gen.choice(spec.pam_points, size=nt)
    x = re + 1j * im
    n = np.sqrt(sigma2) * (gen.standard_normal(nr) + 1j * gen.standard_normal(nr))
    y = h @ x + n

    m = real_lift_matrix(h)
    z = real_lift_vector(y)
    s = real_lift_vector(x)
    g = m.T @ m
    c = m.T @ z
    q = build_lifted_Q(g, c)
    for arr in (h, x, y, m, z, s, g, c, q):
        arr.flags.writeable = False
    return DetectionInstance(
        spec=spec, nt=nt, nr=nr, snr_db=snr_db, sigma2=sigma2,
        h=h, x_true=x, y=y, m_real=m, z=z, s_true=s, g=g, c=c, q=q,
    )
