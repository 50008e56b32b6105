"""Exact dense simulation of pulse sequences on chain states.

Pure states are 2^n amplitude vectors, mixed NMR states are tracked through
their deviation matrix (the full state being 1 + p * deviation; the identity
part never evolves observably).  Diagonal primitives are applied as
elementwise phase kernels computed from bit parities; only genuinely
non-diagonal pulses touch a 2x2 tensor contraction.

Hard caps: 14 spins for state vectors, 10 for deviation matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    Axis,
    BondCZ,
    ByproductRecord,
    CZLayer,
    EdgeRot,
    End,
    GlobalH,
    GlobalRot,
    IsingEvolve,
    MaskedCZLayer,
    PauliString,
    Primitive,
    PulseSequence,
    SiteReadout,
    SiteRot,
    SpectrumReport,
    validate_sequence,
)

MAX_PURE_SPINS = 14
MAX_DEVIATION_SPINS = 10

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {Axis.X: _X, Axis.Y: _Y, Axis.Z: _Z}
HADAMARD = (_X + _Z) / math.sqrt(2)

_KETS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
}


def rotation_matrix(axis: Axis, angle: float) -> np.ndarray:
    return math.cos(angle / 2) * _I - 1j * math.sin(angle / 2) * PAULI[axis]


@dataclass(frozen=True)
class ChainState:
    """Normalized pure state of n spins; site 1 is the most significant bit."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1 or self.n > MAX_PURE_SPINS:
            raise ValueError(f"pure-state simulation supports 1..{MAX_PURE_SPINS} spins")
        if self.amplitudes.shape != (2 ** self.n,):
            raise ValueError("amplitude vector has wrong length")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state norm {norm} is not 1 within 1e-12")
        self.amplitudes.setflags(write=False)


@dataclass(frozen=True)
class DeviationState:
    """Deviation density matrix of n spins with polarization p."""

    n: int
    p: float
    deviation: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1 or self.n > MAX_DEVIATION_SPINS:
            raise ValueError(f"deviation simulation supports 1..{MAX_DEVIATION_SPINS} spins")
        dim = 2 ** self.n
        if self.deviation.shape != (dim, dim):
            raise ValueError("deviation matrix has wrong shape")
        if np.max(np.abs(self.deviation - self.deviation.conj().T)) > 1e-10:
            raise ValueError("deviation matrix is not Hermitian within 1e-10")
        self.deviation.setflags(write=False)


State = ChainState | DeviationState


def init_basis(n: int, bits: str) -> ChainState:
    """Product state from a character spec: 0, 1, + or - per site."""
    if n < 1:
        raise ValueError("need at least one spin")
    if len(bits) != n:
        raise ValueError(f"spec {bits!r} has length {len(bits)}, expected {n}")
    amp = np.array([1.0 + 0j])
    for c in bits:
        if c not in _KETS:
            raise ValueError(f"invalid site character {c!r} (use 0, 1, + or -)")
        amp = np.kron(amp, _KETS[c])
    return ChainState(n, amp)


def pauli_string_matrix(n: int, term: PauliString) -> np.ndarray:
    term.validate(n)
    mats = [_I] * n
    for site, axis in term.factors:
        mats[site - 1] = PAULI[axis]
    out = np.array([[term.coefficient + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def init_deviation(n: int, terms: list[PauliString], p: float) -> DeviationState:
    """Deviation matrix from a sum of Pauli strings."""
    dim = 2 ** n
    dev = np.zeros((dim, dim), dtype=complex)
    for term in terms:
        dev = dev + pauli_string_matrix(n, term)
    return DeviationState(n, p, dev)


def pseudo_pure_deviation(state: ChainState, p: float) -> DeviationState:
    """Deviation proportional to a pure-state projector."""
    dev = np.outer(state.amplitudes, state.amplitudes.conj())
    return DeviationState(state.n, p, dev)


# --- phase kernels ----------------------------------------------------------


def _site_bits(n: int, site: int) -> np.ndarray:
    idx = np.arange(2 ** n)
    return (idx >> (n - site)) & 1


def _cz_phases(n: int, exclude_bond: int | None = None, only_bond: int | None = None) -> np.ndarray:
    bonds = [only_bond] if only_bond is not None else [
        j for j in range(1, n) if j != exclude_bond
    ]
    sign = np.ones(2 ** n)
    for j in bonds:
        sign *= 1.0 - 2.0 * (_site_bits(n, j) & _site_bits(n, j + 1))
    return sign.astype(complex)


def _ising_phases(n: int, duration: float, J: tuple[float, ...]) -> np.ndarray:
    energy = np.zeros(2 ** n)
    for j in range(1, n):
        s1 = 1.0 - 2.0 * _site_bits(n, j)
        s2 = 1.0 - 2.0 * _site_bits(n, j + 1)
        energy += J[j - 1] * s1 * s2
    return np.exp(-1j * duration * energy)


def _zrot_phases(n: int, sites: list[int], angle: float) -> np.ndarray:
    phase = np.zeros(2 ** n)
    for site in sites:
        phase += (1.0 - 2.0 * _site_bits(n, site)) * (-angle / 2.0)
    return np.exp(1j * phase)


def _diagonal_kernel(n: int, prim: Primitive) -> np.ndarray | None:
    """Phase vector for diagonal primitives, None for the rest."""
    if isinstance(prim, CZLayer):
        return _cz_phases(n)
    if isinstance(prim, MaskedCZLayer):
        bond = 1 if prim.excluded_bond is End.HEAD else n - 1
        return _cz_phases(n, exclude_bond=bond)
    if isinstance(prim, BondCZ):
        return _cz_phases(n, only_bond=prim.bond)
    if isinstance(prim, IsingEvolve):
        return _ising_phases(n, prim.duration, prim.couplings.J)
    if isinstance(prim, GlobalRot) and prim.axis is Axis.Z:
        return _zrot_phases(n, list(range(1, n + 1)), prim.angle)
    if isinstance(prim, EdgeRot) and prim.axis is Axis.Z:
        site = 1 if prim.end is End.HEAD else n
        return _zrot_phases(n, [site], prim.angle)
    if isinstance(prim, SiteRot) and prim.axis is Axis.Z:
        return _zrot_phases(n, [prim.site], prim.angle)
    return None


def _single_site_gates(n: int, prim: Primitive) -> list[tuple[int, np.ndarray]]:
    if isinstance(prim, GlobalH):
        return [(s, HADAMARD) for s in range(1, n + 1)]
    if isinstance(prim, GlobalRot):
        u = rotation_matrix(prim.axis, prim.angle)
        return [(s, u) for s in range(1, n + 1)]
    if isinstance(prim, EdgeRot):
        site = 1 if prim.end is End.HEAD else n
        return [(site, rotation_matrix(prim.axis, prim.angle))]
    if isinstance(prim, SiteRot):
        return [(prim.site, rotation_matrix(prim.axis, prim.angle))]
    raise TypeError(f"primitive {prim!r} is not a single-site pulse")


def _apply_site_vec(amp: np.ndarray, n: int, site: int, u: np.ndarray) -> np.ndarray:
    pre = 2 ** (site - 1)
    post = 2 ** (n - site)
    work = amp.reshape(pre, 2, post)
    return np.einsum("ab,xby->xay", u, work).reshape(-1)


def _apply_site_rows(mat: np.ndarray, n: int, site: int, u: np.ndarray) -> np.ndarray:
    pre = 2 ** (site - 1)
    post = 2 ** (n - site)
    work = mat.reshape(pre, 2, post * mat.shape[1])
    return np.einsum("ab,xby->xay", u, work).reshape(mat.shape)


def _apply_unitary_dev(dev: np.ndarray, n: int, gates: list[tuple[int, np.ndarray]]) -> np.ndarray:
    out = dev
    for site, u in gates:
        out = _apply_site_rows(out, n, site, u)
    out = out.conj().T
    for site, u in gates:
        out = _apply_site_rows(out, n, site, u)
    return out.conj().T


def apply(state: State, prim: Primitive) -> State:
    """Apply one primitive: U|psi> for pure states, U rho U^dag for deviations."""
    n = state.n
    if isinstance(prim, IsingEvolve) and prim.couplings.n != n:
        raise ValueError("coupling profile does not match chain length")
    kernel = _diagonal_kernel(n, prim)
    if isinstance(state, ChainState):
        if kernel is not None:
            return ChainState(n, kernel * state.amplitudes)
        amp = state.amplitudes
        for site, u in _single_site_gates(n, prim):
            amp = _apply_site_vec(amp, n, site, u)
        return ChainState(n, amp)
    if kernel is not None:
        dev = kernel[:, None] * state.deviation * kernel.conj()[None, :]
        return DeviationState(n, state.p, dev)
    dev = _apply_unitary_dev(state.deviation, n, _single_site_gates(n, prim))
    return DeviationState(n, state.p, dev)


def _check_runnable(state: State, seq: PulseSequence) -> None:
    if seq.n != state.n:
        raise ValueError(f"sequence is for n={seq.n}, state has n={state.n}")
    hard = [v for v in validate_sequence(seq)
            if "outside" in v or "non-finite" in v or "sized for" in v or "flag" in v]
    if hard:
        raise ValueError("sequence has structural violations: " + "; ".join(hard))


def run(state: State, seq: PulseSequence) -> State:
    """Left fold of apply over the steps.

    Structural violations raise; mere non-compliance (interior addressing,
    as in the swap-network baseline) does not prevent simulation.
    """
    _check_runnable(state, seq)
    out = state
    for step in seq.steps:
        out = apply(out, step)
    return out


def _dephase(dev: np.ndarray, n: int, epsilon: float) -> np.ndarray:
    idx = np.arange(2 ** n)
    xor = idx[:, None] ^ idx[None, :]
    hamming = np.zeros_like(xor)
    for j in range(n):
        hamming += (xor >> j) & 1
    return dev * (1.0 - 2.0 * epsilon) ** hamming


def run_noisy(state: DeviationState, seq: PulseSequence, epsilon: float) -> DeviationState:
    """Run with an independent per-spin phase-flip channel after each primitive.

    Each spin suffers rho -> (1-eps) rho + eps Z rho Z, which multiplies every
    matrix element by (1-2*eps)^(Hamming distance of the two basis labels).
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if not isinstance(state, DeviationState):
        raise TypeError("run_noisy operates on deviation states")
    _check_runnable(state, seq)
    out = state
    for step in seq.steps:
        out = apply(out, step)
        out = DeviationState(out.n, out.p, _dephase(out.deviation, out.n, epsilon))
    return out


def expect(state: State, site: int, axis: Axis | str) -> float:
    """Expectation of sigma_axis at a site.

    Deviation states are normalized so a unit-coefficient Pauli string term
    reads exactly 1.0.
    """
    axis = Axis(axis)
    n = state.n
    if not 1 <= site <= n:
        raise ValueError(f"site {site} outside 1..{n}")
    if isinstance(state, ChainState):
        moved = _apply_site_vec(state.amplitudes, n, site, PAULI[axis])
        return float(np.real(np.vdot(state.amplitudes, moved)))
    rows = _apply_site_rows(state.deviation, n, site, PAULI[axis])
    return float(np.real(np.trace(rows))) / 2 ** n


def spectrum(state: State, readout_axes: list[Axis | str], threshold: float) -> SpectrumReport:
    """Per-site readout with absorption/emission labels along given axes."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if len(readout_axes) != state.n:
        raise ValueError("need one readout axis per site")
    axes = tuple(Axis(a) for a in readout_axes)
    rows = []
    for site in range(1, state.n + 1):
        sx = expect(state, site, Axis.X)
        sy = expect(state, site, Axis.Y)
        sz = expect(state, site, Axis.Z)
        value = {Axis.X: sx, Axis.Y: sy, Axis.Z: sz}[axes[site - 1]]
        if value > threshold:
            label = "absorption"
        elif value < -threshold:
            label = "emission"
        else:
            label = "none"
        rows.append(SiteReadout(site, sx, sy, sz, label))
    return SpectrumReport(tuple(rows), axes, threshold)


def byproduct_matrix_site(rec: ByproductRecord, site: int) -> np.ndarray:
    """2x2 correction recorded at a site (identity if absent)."""
    for s, rots in rec.corrections:
        if s == site:
            u = _I
            for axis, angle in rots:
                u = rotation_matrix(axis, angle) @ u
            return u
    return _I


def apply_byproduct_inverse(state: State, rec: ByproductRecord | None) -> State:
    """Undo a recorded tensor-product byproduct (global phase is unobservable)."""
    if rec is None or rec.empty:
        return state
    if isinstance(state, ChainState):
        amp = state.amplitudes
        for site, _ in rec.corrections:
            u = byproduct_matrix_site(rec, site)
            amp = _apply_site_vec(amp, state.n, site, u.conj().T)
        return ChainState(state.n, amp)
    gates = [(site, byproduct_matrix_site(rec, site).conj().T) for site, _ in rec.corrections]
    return DeviationState(state.n, state.p, _apply_unitary_dev(state.deviation, state.n, gates))


def state_fidelity(a: ChainState, b: ChainState) -> float:
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def deviation_overlap(a: DeviationState, b: DeviationState) -> float:
    """Normalized Hilbert-Schmidt overlap of two deviation matrices."""
    num = float(np.real(np.trace(a.deviation.conj().T @ b.deviation)))
    den = math.sqrt(
        float(np.real(np.trace(a.deviation.conj().T @ a.deviation)))
        * float(np.real(np.trace(b.deviation.conj().T @ b.deviation)))
    )
    if den == 0:
        return 0.0
    return num / den


def trace_norm(dev: DeviationState) -> float:
    return float(np.sum(np.linalg.svd(dev.deviation, compute_uv=False)))


def reduced_single_site(state: ChainState, site: int) -> np.ndarray:
    """2x2 reduced density matrix of one site of a pure state."""
    n = state.n
    pre = 2 ** (site - 1)
    post = 2 ** (n - site)
    psi = state.amplitudes.reshape(pre, 2, post)
    return np.einsum("xay,xby->ab", psi, psi.conj())
