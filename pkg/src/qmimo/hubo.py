"""Gray-coded symbol polynomials and HUBO cost-Hamiltonian compilation.

A PAM symbol with W bits per dimension is a degree-W polynomial in
bipolar variables u_i = 2b_i - 1; substituting u = -Z turns it into a
Pauli-Z polynomial. Expanding the quadratic detection objective
s'Gs - 2c's through those polynomials yields a diagonal Hamiltonian
whose basis-state eigenvalues reproduce the classical objective exactly
(the identity component is kept in ``offset`` rather than dropped, so
``evaluate_energy`` agrees with ``objective_f`` bit for bit).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .channel import ConstellationSpec

PRUNE_TOL = 1e-12


@dataclass(frozen=True)
class QubitLayout:
    """Symbol-major, bit-minor qubit assignment: q = k*W + i."""

    n_components: int     # 2*Nt real symbol components
    bits_per_component: int

    @property
    def n_qubits(self) -> int:
        return self.n_components * self.bits_per_component

    def qubit(self, component: int, bit: int) -> int:
        if not (0 <= component < self.n_components):
            raise ValueError(f"component {component} out of range")
        if not (0 <= bit < self.bits_per_component):
            raise ValueError(f"bit {bit} out of range")
        return component * self.bits_per_component + bit

    def component_bits(self, index: int, component: int) -> tuple[int, ...]:
        """Extract this component's bits (b_1..b_W) from a basis index."""
        w = self.bits_per_component
        base = component * w
        return tuple((index >> (base + i)) & 1 for i in range(w))


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    support: tuple[int, ...]   # sorted qubit indices carrying a Z each


def _mask(support) -> int:
    m = 0
    for qq in support:
        m |= 1 << qq
    return m


def _support(mask: int) -> tuple[int, ...]:
    out = []
    q = 0
    while mask:
        if mask & 1:
            out.append(q)
        mask >>= 1
        q += 1
    return tuple(out)


class PauliHamiltonian:
    """Sum of Z-string terms plus a scalar offset; immutable after build.

    Terms are stored keyed by a support bitmask; unique supports and a
    |coefficient| >= 1e-12 pruning threshold keep the form canonical.
    """

    __slots__ = ("n_qubits", "offset", "_terms", "_diag")

    def __init__(self, n_qubits: int, terms: dict[int, float] | None = None, offset: float = 0.0):
        self.n_qubits = int(n_qubits)
        pruned: dict[int, float] = {}
        for mask, coeff in (terms or {}).items():
            if mask == 0:
                offset += coeff
                continue
            if mask >> self.n_qubits:
                raise ValueError(f"support {_support(mask)} outside {self.n_qubits} qubits")
            if abs(coeff) >= PRUNE_TOL:
                pruned[mask] = float(coeff)
        self._terms = pruned
        self.offset = float(offset)
        self._diag = None

    @property
    def terms(self) -> list[PauliTerm]:
        """Non-constant terms, ordered by support size then lexicographic support."""
        items = [(len(s), s, c) for s, c in ((_support(m), c) for m, c in self._terms.items())]
        return [PauliTerm(c, s) for _, s, c in sorted(items, key=lambda t: (t[0], t[1]))]

    def coefficient(self, support) -> float:
        return self._terms.get(_mask(support), 0.0)

    def term_map(self) -> dict[tuple[int, ...], float]:
        return {_support(m): c for m, c in self._terms.items()}

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliHamiltonian)
            and self.n_qubits == other.n_qubits
            and self._terms == other._terms
            and self.offset == other.offset
        )

    def __repr__(self) -> str:
        return f"PauliHamiltonian(n={self.n_qubits}, terms={len(self._terms)}, offset={self.offset:g})"

    def allclose(self, other: "PauliHamiltonian", tol: float = 1e-10) -> bool:
        if self.n_qubits != other.n_qubits:
            return False
        keys = set(self._terms) | set(other._terms)
        if any(abs(self._terms.get(k, 0.0) - other._terms.get(k, 0.0)) > tol for k in keys):
            return False
        return abs(self.offset - other.offset) <= tol

    def diagonal(self, include_offset: bool = False) -> np.ndarray:
        """Eigenvalue of each computational basis state, index-ordered.

        Basis index b carries qubit q in bit q; a Z on qubit q
        contributes the factor (1 - 2 b_q).
        """
        if self._diag is None:
            idx = np.arange(1 << self.n_qubits, dtype=np.uint64)
            diag = np.zeros(idx.shape, dtype=float)
            for mask, coeff in self._terms.items():
                parity = np.bitwise_count(idx & np.uint64(mask)) & 1
                diag += coeff * (1.0 - 2.0 * parity)
            self._diag = diag
        return self._diag + self.offset if include_offset else self._diag


def poly_scale(a: PauliHamiltonian, factor: float) -> PauliHamiltonian:
    return PauliHamiltonian(a.n_qubits, {m: factor * c for m, c in a._terms.items()},
                            factor * a.offset)


def poly_add(a: PauliHamiltonian, b: PauliHamiltonian) -> PauliHamiltonian:
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch")
    terms = dict(a._terms)
    for m, c in b._terms.items():
        terms[m] = terms.get(m, 0.0) + c
    return PauliHamiltonian(a.n_qubits, terms, a.offset + b.offset)


def poly_multiply(a: PauliHamiltonian, b: PauliHamiltonian) -> PauliHamiltonian:
    """Product of two Z-polynomials; Z^2 = I merges supports by XOR."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch")
    terms: dict[int, float] = {}
    for ma, ca in list(a._terms.items()) + [(0, a.offset)]:
        if ma == 0 and ca == 0.0:
            continue
        for mb, cb in list(b._terms.items()) + [(0, b.offset)]:
            if mb == 0 and cb == 0.0:
                continue
            m = ma ^ mb
            terms[m] = terms.get(m, 0.0) + ca * cb
    return PauliHamiltonian(a.n_qubits, terms)


def gray_map_bits_to_pam(bits) -> int:
    """Gray-coded bits (b_1..b_W) -> PAM level in {+-1, ..., +-(2^W - 1)}.

    s = u_1 * (2^(W-1) - sum_{i=2..W} 2^(W-i) * prod_{j=2..i} u_j) with
    u = 2b - 1; W = 1 degenerates to s = u_1.
    """
    u = [2 * int(b) - 1 for b in bits]
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"bits must be 0/1, got {tuple(bits)}")
    w = len(u)
    inner = 1 << (w - 1)
    run = 1
    for i in range(1, w):
        run *= u[i]
        inner -= (1 << (w - 1 - i)) * run
    return u[0] * inner


def _gray_tables(w: int) -> tuple[dict[tuple[int, ...], int], dict[int, tuple[int, ...]]]:
    fwd = {}
    for bits in product((0, 1), repeat=w):
        fwd[bits] = gray_map_bits_to_pam(bits)
    return fwd, {lvl: bits for bits, lvl in fwd.items()}


_GRAY_INVERSE: dict[int, dict[int, tuple[int, ...]]] = {}


def gray_unmap_pam_to_bits(level: int, w: int) -> tuple[int, ...]:
    """Exact inverse of ``gray_map_bits_to_pam`` (inverse Gray mapping)."""
    if w not in _GRAY_INVERSE:
        _GRAY_INVERSE[w] = _gray_tables(w)[1]
    inv = _GRAY_INVERSE[w]
    lvl = int(level)
    if lvl not in inv:
        raise ValueError(f"{level} is not a {2**w}-level PAM point")
    return inv[lvl]


def symbol_as_z_polynomial(component: int, layout: QubitLayout) -> PauliHamiltonian:
    """Z-polynomial of one symbol component via u = -Z substitution.

    For W = 2 this is -2 Z_{k,1} - Z_{k,1} Z_{k,2}.
    """
    w = layout.bits_per_component
    n = layout.n_qubits

    def z(i):  # u_{k,i} = -Z_{k,i}
        return PauliHamiltonian(n, {1 << layout.qubit(component, i): -1.0})

    inner = PauliHamiltonian(n, {}, float(1 << (w - 1)))
    run = PauliHamiltonian(n, {}, 1.0)
    for i in range(1, w):
        run = poly_multiply(run, z(i))
        inner = poly_add(inner, poly_scale(run, -float(1 << (w - 1 - i))))
    return poly_multiply(z(0), inner)


def build_cost_hamiltonian(
    g: np.ndarray,
    c: np.ndarray,
    spec: ConstellationSpec,
    layout: QubitLayout,
) -> PauliHamiltonian:
    """Expand sum_{l,k} G_lk P_l P_k - 2 sum_k c_k P_k into Z-strings.

    The identity component (5 * sum_k G_kk for W = 2) lands in
    ``offset`` so the Hamiltonian reproduces the classical objective on
    every bitstring, not just up to a shift.
    """
    g = np.asarray(g, dtype=float)
    c = np.asarray(c, dtype=float)
    d = layout.n_components
    if g.shape != (d, d) or c.shape != (d,):
        raise ValueError(f"G/c shapes {g.shape}/{c.shape} do not match layout ({d} components)")
    if layout.bits_per_component != spec.bits_per_dim:
        raise ValueError("layout bit width does not match constellation")
    if not np.allclose(g, g.T, rtol=1e-10, atol=1e-12):
        raise ValueError("G must be symmetric")

    polys = [symbol_as_z_polynomial(k, layout) for k in range(d)]
    total = PauliHamiltonian(layout.n_qubits)
    for l in range(d):
        for k in range(l, d):
            w = g[l, k] if l == k else 2.0 * g[l, k]   # symmetric pair l<k collected
            if w == 0.0:
                continue
            total = poly_add(total, poly_scale(poly_multiply(polys[l], polys[k]), w))
    for k in range(d):
        if c[k] != 0.0:
            total = poly_add(total, poly_scale(polys[k], -2.0 * c[k]))
    return total


def evaluate_energy(ham: PauliHamiltonian, bitstring) -> float:
    """Energy of one computational basis state, offset included.

    ``bitstring`` is either a basis index (qubit q in bit q) or a
    sequence of 0/1 values indexed by qubit.
    """
    if isinstance(bitstring, (int, np.integer)):
        index = int(bitstring)
        if index >> ham.n_qubits:
            raise ValueError("basis index out of range")
    else:
        bits = list(bitstring)
        if len(bits) != ham.n_qubits:
            raise ValueError(f"need {ham.n_qubits} bits, got {len(bits)}")
        index = 0
        for q, b in enumerate(bits):
            index |= (int(b) & 1) << q
    total = ham.offset
    for mask, coeff in ham._terms.items():
        total += coeff if (index & mask).bit_count() % 2 == 0 else -coeff
    return total


def scale_hamiltonian(ham: PauliHamiltonian) -> tuple[PauliHamiltonian, float]:
    """Normalize so the largest non-constant |coefficient| becomes 1.

    Returns (alpha * H, alpha) with alpha = 1 / max|coefficient|; the
    argmin bitstring is unchanged.
    """
    if len(ham) == 0:
        raise ValueError("cannot scale a constant Hamiltonian")
    alpha = 1.0 / max(abs(cf) for cf in ham._terms.values())
    return poly_scale(ham, alpha), alpha


def serialize_hamiltonian(ham: PauliHamiltonian) -> str:
    """Line-oriented text form: header lines, then one `coeff q1 q2 ...` per term."""
    lines = [f"n_qubits {ham.n_qubits}", f"offset {ham.offset!r}"]
    for term in ham.terms:
        lines.append(" ".join([repr(term.coefficient)] + [str(qb) for qb in term.support]))
    return "\n".join(lines) + "\n"


def parse_hamiltonian(text: str) -> PauliHamiltonian:
    n_qubits = None
    offset = 0.0
    terms: dict[int, float] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "n_qubits":
            n_qubits = int(parts[1])
        elif parts[0] == "offset":
            offset = float(parts[1])
        else:
            coeff = float(parts[0])
            mask = _mask(int(p) for p in parts[1:])
            terms[mask] = terms.get(mask, 0.0) + coeff
    if n_qubits is None:
        raise ValueError("missing n_qubits header")
    return PauliHamiltonian(n_qubits, terms, offset)
