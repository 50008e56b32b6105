"""Brute-force verification tools: dense composition and equivalence checks.

Everything here recomputes from first principles with explicit Kronecker
products so it can stand as an independent witness for the pulse-level
constructions (which use bitwise kernels instead).  Dimensions are capped at
10 spins.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

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
    Primitive,
    PulseSequence,
    SiteRot,
)

MAX_ORACLE_SPINS = 10

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = (_X + _Z) / math.sqrt(2)
_PAULI = {Axis.X: _X, Axis.Y: _Y, Axis.Z: _Z}

EQUIV_TOL = 1e-9
SVD_TOL = 1e-6


class NotFactorizable(ValueError):
    """Operator is not a tensor product of single-spin unitaries."""


class NoPeriodFound(RuntimeError):
    """No mirror period found within the search bound."""


class WordNotFound(RuntimeError):
    """No generator word reaches the target within the length bound."""


def _rot(axis: Axis, angle: float) -> np.ndarray:
    return math.cos(angle / 2) * _I - 1j * math.sin(angle / 2) * _PAULI[axis]


def _kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def _embed(n: int, site: int, u: np.ndarray) -> np.ndarray:
    return _kron_all([_I] * (site - 1) + [u] + [_I] * (n - site))


def _cz_bond(n: int, bond: int) -> np.ndarray:
    diag = np.ones(2 ** n, dtype=complex)
    for b in range(2 ** n):
        if (b >> (n - bond)) & 1 and (b >> (n - bond - 1)) & 1:
            diag[b] = -1
    return np.diag(diag)


def primitive_matrix(n: int, prim: Primitive) -> np.ndarray:
    """Dense 2^n x 2^n matrix of one primitive."""
    if isinstance(prim, GlobalH):
        return _kron_all([_H] * n)
    if isinstance(prim, GlobalRot):
        return _kron_all([_rot(prim.axis, prim.angle)] * n)
    if isinstance(prim, CZLayer):
        out = np.eye(2 ** n, dtype=complex)
        for bond in range(1, n):
            out = _cz_bond(n, bond) @ out
        return out
    if isinstance(prim, MaskedCZLayer):
        skip = 1 if prim.excluded_bond is End.HEAD else n - 1
        out = np.eye(2 ** n, dtype=complex)
        for bond in range(1, n):
            if bond != skip:
                out = _cz_bond(n, bond) @ out
        return out
    if isinstance(prim, BondCZ):
        return _cz_bond(n, prim.bond)
    if isinstance(prim, EdgeRot):
        site = 1 if prim.end is End.HEAD else n
        return _embed(n, site, _rot(prim.axis, prim.angle))
    if isinstance(prim, SiteRot):
        return _embed(n, prim.site, _rot(prim.axis, prim.angle))
    if isinstance(prim, IsingEvolve):
        diag = np.zeros(2 ** n, dtype=complex)
        for b in range(2 ** n):
            e = 0.0
            for bond in range(1, n):
                s1 = 1 - 2 * ((b >> (n - bond)) & 1)
                s2 = 1 - 2 * ((b >> (n - bond - 1)) & 1)
                e += prim.couplings.J[bond - 1] * s1 * s2
            diag[b] = np.exp(-1j * prim.duration * e)
        return np.diag(diag)
    raise TypeError(f"unknown primitive {prim!r}")


def unitary_of(seq: PulseSequence) -> np.ndarray:
    """Ordered product of the primitive matrices of a sequence."""
    if seq.n > MAX_ORACLE_SPINS:
        raise ValueError(f"oracle composition capped at {MAX_ORACLE_SPINS} spins")
    out = np.eye(2 ** seq.n, dtype=complex)
    for step in seq.steps:
        out = primitive_matrix(seq.n, step) @ out
    return out


def equal_phase(u: np.ndarray, v: np.ndarray, tol: float = EQUIV_TOL) -> bool:
    """True iff u = exp(i phi) v with entrywise error below tol.

    The phase is read off the largest-magnitude entry of v.
    """
    if u.shape != v.shape:
        return False
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    ref = v[idx]
    if abs(ref) < 1e-14:
        return bool(np.max(np.abs(u)) < tol and np.max(np.abs(v)) < tol)
    phase = u[idx] / ref
    if abs(abs(phase) - 1.0) > max(tol, 1e-7):
        return False
    return bool(np.max(np.abs(u - phase * v)) < tol)


def factor_local(b: np.ndarray, tol: float = SVD_TOL) -> list[np.ndarray]:
    """Split b into single-spin factors, b = exp(i phi) b_1 x ... x b_n.

    Repeatedly reshapes the remainder into a (4, 4^(m-1)) matrix and demands
    an SVD-certified rank-1 split: the second singular value must stay below
    tol.  Raises NotFactorizable otherwise.
    """
    dim = b.shape[0]
    n = int(round(math.log2(dim)))
    if b.shape != (dim, dim) or 2 ** n != dim:
        raise ValueError("operator must be square with power-of-two dimension")
    factors: list[np.ndarray] = []
    rest = b
    m = n
    while m > 1:
        half = 2 ** (m - 1)
        paired = rest.reshape(2, half, 2, half).transpose(0, 2, 1, 3).reshape(4, half * half)
        u, s, vh = np.linalg.svd(paired, full_matrices=False)
        if s[1] > tol:
            raise NotFactorizable(
                f"second singular value {s[1]:.3e} exceeds {tol:.1e} at split {n - m + 1}"
            )
        factors.append((u[:, 0] * math.sqrt(2)).reshape(2, 2))
        rest = (s[0] / math.sqrt(2)) * vh[0, :].reshape(half, half)
        m -= 1
    factors.append(rest)
    recon = _kron_all(factors)
    if not equal_phase(recon, b, max(10 * tol, 1e-8)):
        raise NotFactorizable("rank-1 splits do not reconstruct the operator")
    return factors


def _zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Euler angles with u proportional to Rz(alpha) Ry(beta) Rz(gamma)."""
    det = np.linalg.det(u)
    su = u / np.sqrt(det)
    beta = 2.0 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[0, 0]) < 1e-12:
        alpha = 2.0 * np.angle(su[1, 0])
        gamma = 0.0
    elif abs(su[1, 0]) < 1e-12:
        alpha = -2.0 * np.angle(su[0, 0])
        gamma = 0.0
    else:
        alpha = np.angle(su[1, 0]) - np.angle(su[0, 0])
        gamma = -np.angle(su[1, 0]) - np.angle(su[0, 0])
    return float(alpha), float(beta), float(gamma)


def local_factor_rotations(u: np.ndarray) -> tuple[tuple[Axis, float], ...]:
    """Axis/angle composition (applied left to right) reproducing u up to phase."""
    alpha, beta, gamma = _zyz_angles(u)
    rots = []
    if abs(gamma) > 1e-12:
        rots.append((Axis.Z, gamma))
    if abs(beta) > 1e-12:
        rots.append((Axis.Y, beta))
    if abs(alpha) > 1e-12:
        rots.append((Axis.Z, alpha))
    return tuple(rots)


def byproduct_from_factors(factors: list[np.ndarray], tol: float = 1e-9) -> ByproductRecord:
    corrections = []
    for site, f in enumerate(factors, start=1):
        rots = local_factor_rotations(f)
        if rots:
            corrections.append((site, rots))
    return ByproductRecord(tuple(corrections), 0.0)


def byproduct_matrix(rec: ByproductRecord, n: int) -> np.ndarray:
    mats = [_I] * n
    for site, rots in rec.corrections:
        u = _I
        for axis, angle in rots:
            u = _rot(axis, angle) @ u
        mats[site - 1] = u
    return _kron_all(mats) * np.exp(1j * rec.global_phase)


def equiv_up_to_local(u: np.ndarray, target: np.ndarray,
                      tol: float = EQUIV_TOL) -> ByproductRecord:
    """Byproduct record with u = byproduct * target, or NotFactorizable.

    The record is verified before being returned: stripping it off u must
    reproduce target up to global phase within tol.
    """
    if u.shape != target.shape:
        raise ValueError("dimension mismatch")
    b = u @ target.conj().T
    factors = factor_local(b)
    rec = byproduct_from_factors(factors)
    n = int(round(math.log2(u.shape[0])))
    stripped = byproduct_matrix(rec, n).conj().T @ u
    if not equal_phase(stripped, target, tol):
        raise NotFactorizable("declared byproduct does not strip to the target")
    return rec


def reversal_matrix(n: int) -> np.ndarray:
    """Permutation sending the state of site j to site n+1-j."""
    dim = 2 ** n
    perm = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        r = 0
        for j in range(n):
            if (b >> j) & 1:
                r |= 1 << (n - 1 - j)
        perm[r, b] = 1
    return perm


def mirror_step_matrix(n: int) -> np.ndarray:
    return primitive_matrix(n, GlobalH()) @ primitive_matrix(n, CZLayer())


def find_mirror_period(n: int, max_k: int | None = None) -> int:
    """Smallest k with (GlobalH . CZLayer)^k equal to the chain reversal up
    to a factorizable local byproduct."""
    if not 2 <= n <= 8:
        raise ValueError("mirror period search supports 2..8 spins")
    if max_k is None:
        max_k = 4 * (n + 1)
    step = mirror_step_matrix(n)
    rev = reversal_matrix(n)
    u = np.eye(2 ** n, dtype=complex)
    for k in range(1, max_k + 1):
        u = step @ u
        try:
            equiv_up_to_local(u, rev)
            return k
        except NotFactorizable:
            continue
    raise NoPeriodFound(f"no mirror period within {max_k} steps for n={n}")


def _canonical_key(u: np.ndarray) -> bytes:
    idx = np.unravel_index(np.argmax(np.abs(u)), u.shape)
    phase = u[idx] / abs(u[idx])
    return np.round(u / phase, 6).tobytes()


@dataclass(frozen=True)
class WordResult:
    word: tuple[str, ...]
    byproduct: ByproductRecord


def word_search(generators: dict[str, np.ndarray], target: np.ndarray,
                max_len: int = 9) -> WordResult:
    """Breadth-first search for a generator word matching target up to locals.

    Words are compared through phase-canonicalized matrices so byproduct
    phases cannot blow up the frontier; insertion order of ``generators``
    fixes the tie-break, so the result is the lexicographically first
    shortest word for that order.
    """
    if len(generators) > 6:
        raise ValueError("at most 6 generators")
    if max_len > 9:
        raise ValueError("word length capped at 9")
    dim = target.shape[0]
    n = int(round(math.log2(dim)))
    if n > 4:
        raise ValueError("word search capped at 4 spins")
    names = list(generators)
    queue: deque[tuple[tuple[str, ...], np.ndarray]] = deque([((), np.eye(dim, dtype=complex))])
    seen = {_canonical_key(np.eye(dim, dtype=complex))}
    while queue:
        word, u = queue.popleft()
        if word:
            try:
                rec = equiv_up_to_local(u, target)
                return WordResult(word, rec)
            except NotFactorizable:
                pass
        if len(word) >= max_len:
            continue
        for name in names:
            nxt = generators[name] @ u
            key = _canonical_key(nxt)
            if key not in seen:
                seen.add(key)
                queue.append((word + (name,), nxt))
    raise WordNotFound(f"no word of length <= {max_len} reaches the target")


@lru_cache(maxsize=None)
def _cached_mirror_period(n: int) -> int:
    return find_mirror_period(n)
