"""Symbolic Heisenberg transport of Pauli operators through Clifford pulses.

Tracks phase * prod_j X_j^{x_j} Z_j^{z_j} through conjugation by the Clifford
subset of the pulse alphabet (CZ layers, Hadamards, quarter- and half-turn
rotations).  This gives the protocol layer an analytic route to byproduct
bookkeeping that never touches a 2^n-dimensional matrix, independent of the
dense oracle used to verify it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import (
    Axis,
    BondCZ,
    CZLayer,
    EdgeRot,
    End,
    GlobalH,
    GlobalRot,
    MaskedCZLayer,
    Primitive,
    SiteRot,
)

_QUARTER = math.pi / 2


@dataclass(frozen=True)
class PauliOp:
    """phase * prod_j X_j^{x_j} Z_j^{z_j} with phase in {1, i, -1, -i}."""

    n: int
    phase: complex
    x: tuple[int, ...]
    z: tuple[int, ...]

    @staticmethod
    def identity(n: int) -> "PauliOp":
        return PauliOp(n, 1.0 + 0j, (0,) * n, (0,) * n)

    @staticmethod
    def single(n: int, site: int, axis: Axis) -> "PauliOp":
        x = [0] * n
        z = [0] * n
        phase = 1.0 + 0j
        if axis in (Axis.X, Axis.Y):
            x[site - 1] = 1
        if axis in (Axis.Z, Axis.Y):
            z[site - 1] = 1
        if axis is Axis.Y:
            phase = 1j  # Y = i X Z
        return PauliOp(n, phase, tuple(x), tuple(z))

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        if self.n != other.n:
            raise ValueError("length mismatch")
        swaps = sum(a & b for a, b in zip(self.z, other.x))
        phase = self.phase * other.phase * (-1.0) ** swaps
        x = tuple(a ^ b for a, b in zip(self.x, other.x))
        z = tuple(a ^ b for a, b in zip(self.z, other.z))
        return PauliOp(self.n, phase, x, z)

    def commutes_with(self, other: "PauliOp") -> bool:
        sym = sum(a & b for a, b in zip(self.x, other.z))
        sym += sum(a & b for a, b in zip(self.z, other.x))
        return sym % 2 == 0

    def single_site_form(self) -> tuple[int, Axis, float] | None:
        """(site, axis, sign) if supported on exactly one site with real phase."""
        support = [j for j in range(self.n) if self.x[j] or self.z[j]]
        if len(support) != 1:
            return None
        j = support[0]
        if self.x[j] and self.z[j]:
            axis, canonical = Axis.Y, 1j
        elif self.x[j]:
            axis, canonical = Axis.X, 1.0 + 0j
        else:
            axis, canonical = Axis.Z, 1.0 + 0j
        sign = self.phase / canonical
        if abs(sign.imag) > 1e-12 or abs(abs(sign.real) - 1.0) > 1e-12:
            return None
        return (j + 1, axis, float(sign.real))

    def matrix(self) -> np.ndarray:
        X = np.array([[0, 1], [1, 0]], dtype=complex)
        Z = np.array([[1, 0], [0, -1]], dtype=complex)
        out = np.array([[self.phase]])
        for j in range(self.n):
            m = np.eye(2, dtype=complex)
            if self.x[j]:
                m = m @ X
            if self.z[j]:
                m = m @ Z
            out = np.kron(out, m)
        return out


def _conj_quarter(generator: PauliOp, op: PauliOp, sign: int) -> PauliOp:
    """Conjugate op by exp(-i sign*pi/4 * generator)."""
    if generator.commutes_with(op):
        return op
    moved = generator * op
    return PauliOp(op.n, moved.phase * (-1j if sign > 0 else 1j), moved.x, moved.z)


def _conj_half(generator: PauliOp, op: PauliOp) -> PauliOp:
    """Conjugate op by exp(-i pi/2 * generator) = -i * generator."""
    if generator.commutes_with(op):
        return op
    return PauliOp(op.n, -op.phase, op.x, op.z)


def _rotation_generator(n: int, site: int, axis: Axis) -> PauliOp:
    return PauliOp.single(n, site, axis)


def _conj_rotation(op: PauliOp, site: int, axis: Axis, angle: float) -> PauliOp:
    gen = _rotation_generator(op.n, site, axis)
    turns = angle / _QUARTER
    nearest = round(turns)
    if abs(turns - nearest) > 1e-9:
        raise ValueError(f"non-Clifford rotation angle {angle}")
    nearest = nearest % 4
    if nearest == 0:
        return op
    if nearest == 1:
        return _conj_quarter(gen, op, +1)
    if nearest == 2:
        return _conj_half(gen, op)
    return _conj_quarter(gen, op, -1)


def _conj_h_site(op: PauliOp, site: int) -> PauliOp:
    j = site - 1
    x = list(op.x)
    z = list(op.z)
    phase = op.phase * ((-1.0) ** (x[j] & z[j]))
    x[j], z[j] = z[j], x[j]
    return PauliOp(op.n, phase, tuple(x), tuple(z))


def _conj_cz_bond(op: PauliOp, a: int, b: int) -> PauliOp:
    """CZ images: X_a -> X_a Z_b, X_b -> Z_a X_b, Z fixed, XX -> YY."""
    ia, ib = a - 1, b - 1
    x = list(op.x)
    z = list(op.z)
    phase = op.phase
    if x[ia] and x[ib]:
        # (X_a Z_b)(Z_a X_b) reassembles to (X_a Z_a)(Z_b X_b): one reorder sign
        phase *= -1.0
    if x[ia]:
        z[ib] ^= 1
    if x[ib]:
        z[ia] ^= 1
    return PauliOp(op.n, phase, tuple(x), tuple(z))


def conjugate(op: PauliOp, prim: Primitive) -> PauliOp:
    """Image of op under U . op . U^dagger for one Clifford primitive U."""
    n = op.n
    if isinstance(prim, GlobalH):
        for site in range(1, n + 1):
            op = _conj_h_site(op, site)
        return op
    if isinstance(prim, CZLayer):
        for bond in range(1, n):
            op = _conj_cz_bond(op, bond, bond + 1)
        return op
    if isinstance(prim, MaskedCZLayer):
        skip = 1 if prim.excluded_bond is End.HEAD else n - 1
        for bond in range(1, n):
            if bond != skip:
                op = _conj_cz_bond(op, bond, bond + 1)
        return op
    if isinstance(prim, BondCZ):
        return _conj_cz_bond(op, prim.bond, prim.bond + 1)
    if isinstance(prim, GlobalRot):
        for site in range(1, n + 1):
            op = _conj_rotation(op, site, prim.axis, prim.angle)
        return op
    if isinstance(prim, EdgeRot):
        site = 1 if prim.end is End.HEAD else n
        return _conj_rotation(op, site, prim.axis, prim.angle)
    if isinstance(prim, SiteRot):
        return _conj_rotation(op, prim.site, prim.axis, prim.angle)
    raise ValueError(f"primitive {prim!r} is not Clifford-transportable")


def transport(op: PauliOp, steps) -> PauliOp:
    """Conjugate through a pulse program in application order."""
    for step in steps:
        op = conjugate(op, step)
    return op


@lru_cache(maxsize=1)
def _single_qubit_cliffords() -> list[np.ndarray]:
    """The 24 single-qubit Cliffords, canonical global phase."""
    H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    S = np.array([[1, 0], [0, 1j]], dtype=complex)

    def canon(m: np.ndarray) -> np.ndarray:
        flat = m.reshape(-1)
        ref = flat[np.argmax(np.abs(flat))]
        return np.round(m / (ref / abs(ref)), 10)

    found: dict[bytes, np.ndarray] = {}
    frontier = [np.eye(2, dtype=complex)]
    while frontier:
        m = frontier.pop()
        key = canon(m).tobytes()
        if key in found:
            continue
        found[key] = canon(m)
        frontier.append(H @ m)
        frontier.append(S @ m)
    return list(found.values())


def clifford_from_action(img_x: tuple[Axis, float], img_z: tuple[Axis, float]) -> np.ndarray:
    """2x2 Clifford u with u X u^dag = sign*axis for both generators."""
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    Z = np.array([[1, 0], [0, -1]], dtype=complex)
    mats = {Axis.X: X, Axis.Y: Y, Axis.Z: Z}
    tx = img_x[1] * mats[img_x[0]]
    tz = img_z[1] * mats[img_z[0]]
    for u in _single_qubit_cliffords():
        if np.max(np.abs(u @ X @ u.conj().T - tx)) < 1e-9 and \
           np.max(np.abs(u @ Z @ u.conj().T - tz)) < 1e-9:
            return u
    raise ValueError(f"no single-qubit Clifford realizes X->{img_x}, Z->{img_z}")
