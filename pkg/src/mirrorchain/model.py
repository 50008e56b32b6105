"""Shared domain types for globally controlled spin-chain programs.

Conventions used throughout the package:

* Sites are numbered 1..n along the chain; site 1 is the head, site n the
  tail.  In state vectors and operator matrices site 1 is the most
  significant bit of the basis index.
* Rotations are ``exp(-i * angle/2 * sigma_axis)``, the Hadamard is
  ``(sigma_x + sigma_z)/sqrt(2)`` and a controlled-phase bond gate is
  ``diag(1, 1, 1, -1)``.
* A pulse program is globally controlled when every step addresses either
  the whole chain at once or one of the two terminal spins.  Interior-site
  addressing is representable (the swap-network baseline needs it) but is
  flagged as a violation by :func:`validate_sequence`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Union


class Axis(str, Enum):
    """One of the three Pauli rotation axes."""

    X = "X"
    Y = "Y"
    Z = "Z"


class End(str, Enum):
    """Terminal spin selector: the head (site 1) or the tail (site n)."""

    HEAD = "head"
    TAIL = "tail"


@dataclass(frozen=True)
class PauliString:
    """A weighted tensor product of single-site Pauli operators.

    ``factors`` maps site index to axis; sites not listed carry the
    identity.  An empty factor map denotes the identity string.
    """

    coefficient: float = 1.0
    factors: tuple[tuple[int, Axis], ...] = ()

    @staticmethod
    def single(site: int, axis: Axis | str, coefficient: float = 1.0) -> "PauliString":
        return PauliString(coefficient, ((site, Axis(axis)),))

    def validate(self, n: int) -> None:
        seen = set()
        for site, _ in self.factors:
            if not 1 <= site <= n:
                raise ValueError(f"pauli factor site {site} outside 1..{n}")
            if site in seen:
                raise ValueError(f"duplicate pauli factor at site {site}")
            seen.add(site)


@dataclass(frozen=True)
class CouplingProfile:
    """Nearest-neighbour Ising couplings J_j between sites j and j+1 (rad/s)."""

    n: int
    J: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("chain needs at least one spin")
        if len(self.J) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} couplings, got {len(self.J)}")

    @staticmethod
    def uniform(n: int, J: float = 1.0) -> "CouplingProfile":
        return CouplingProfile(n, (J,) * (n - 1))

    @property
    def is_uniform(self) -> bool:
        return len(set(self.J)) <= 1


# --- primitives -----------------------------------------------------------


@dataclass(frozen=True)
class GlobalH:
    """Hadamard applied simultaneously to every spin."""


@dataclass(frozen=True)
class GlobalRot:
    """Identical rotation applied simultaneously to every spin."""

    axis: Axis
    angle: float


@dataclass(frozen=True)
class CZLayer:
    """Controlled-phase on every nearest-neighbour bond (all commute)."""


@dataclass(frozen=True)
class MaskedCZLayer:
    """CZ layer with one terminal bond removed: (1,2) for head, (n-1,n) for tail.

    Realizable under global control by an X echo on the adjacent terminal
    spin, so it counts as edge-selective rather than interior addressing.
    """

    excluded_bond: End


@dataclass(frozen=True)
class EdgeRot:
    """Selective rotation of one terminal spin."""

    end: End
    axis: Axis
    angle: float


@dataclass(frozen=True)
class IsingEvolve:
    """Free evolution exp(-i * duration * sum_j J_j sigma_z^j sigma_z^{j+1}).

    Negative durations denote time-reversed evolution; sequence reversal
    relies on them.
    """

    duration: float
    couplings: CouplingProfile


@dataclass(frozen=True)
class SiteRot:
    """Rotation addressed to an arbitrary site.

    Interior targets break the global-control model; only the swap-network
    baseline emits these, and validation flags them.
    """

    site: int
    axis: Axis
    angle: float


@dataclass(frozen=True)
class BondCZ:
    """Controlled-phase on a single named bond (j, j+1); baseline-only."""

    bond: int


Primitive = Union[
    GlobalH, GlobalRot, CZLayer, MaskedCZLayer, EdgeRot, IsingEvolve, SiteRot, BondCZ
]

_GLOBAL_KINDS = (GlobalH, GlobalRot, CZLayer, IsingEvolve)
_EDGE_KINDS = (MaskedCZLayer, EdgeRot)


def is_global_or_edge(step: Primitive) -> bool:
    return isinstance(step, _GLOBAL_KINDS + _EDGE_KINDS)


@dataclass(frozen=True)
class ByproductRecord:
    """Tensor product of single-spin corrections left over by a protocol.

    ``corrections`` maps a site to rotations composed left to right in
    application order; the recorded unitary is the product of those
    rotations times ``exp(i * global_phase)``.  Applying the inverse after
    the sequence recovers the declared target (up to global phase).
    """

    corrections: tuple[tuple[int, tuple[tuple[Axis, float], ...]], ...] = ()
    global_phase: float = 0.0

    def sites(self) -> list[int]:
        return [s for s, _ in self.corrections]

    @property
    def empty(self) -> bool:
        return not self.corrections


@dataclass(frozen=True)
class PulseSequence:
    """An ordered global-control program for an n-spin chain."""

    n: int
    steps: tuple[Primitive, ...]
    byproduct: ByproductRecord | None = None
    global_control_compliant: bool = True


def make_sequence(
    n: int,
    steps: Iterable[Primitive],
    byproduct: ByproductRecord | None = None,
) -> PulseSequence:
    """Build a PulseSequence with the compliance flag computed from the steps."""
    steps = tuple(steps)
    compliant = all(is_global_or_edge(s) for s in steps)
    return PulseSequence(n, steps, byproduct, compliant)


def validate_sequence(seq: PulseSequence) -> list[str]:
    """Check primitive invariants and the compliance flag; violations are data.

    Returns an empty list iff every step is well formed for ``seq.n`` and
    ``global_control_compliant`` matches the steps.
    """
    out: list[str] = []
    n = seq.n
    for i, step in enumerate(seq.steps):
        where = f"step {i}"
        if isinstance(step, (GlobalRot, EdgeRot, SiteRot)) and not math.isfinite(step.angle):
            out.append(f"{where}: non-finite angle")
        if isinstance(step, EdgeRot) and step.end not in (End.HEAD, End.TAIL):
            out.append(f"{where}: invalid end")
        if isinstance(step, MaskedCZLayer):
            if n < 2:
                out.append(f"{where}: masked CZ layer needs at least one bond")
        if isinstance(step, IsingEvolve):
            if step.couplings.n != n:
                out.append(f"{where}: couplings sized for n={step.couplings.n}, chain has n={n}")
            if not math.isfinite(step.duration):
                out.append(f"{where}: non-finite duration")
        if isinstance(step, SiteRot):
            if not 1 <= step.site <= n:
                out.append(f"{where}: site {step.site} outside 1..{n}")
            elif step.site not in (1, n):
                out.append(f"{where}: non-terminal selective pulse (site {step.site})")
        if isinstance(step, BondCZ):
            if not 1 <= step.bond <= n - 1:
                out.append(f"{where}: bond {step.bond} outside 1..{n - 1}")
            else:
                out.append(f"{where}: single-bond CZ is not a global pulse")
    computed = all(is_global_or_edge(s) for s in seq.steps)
    if seq.global_control_compliant != computed:
        out.append(
            "global_control_compliant flag is "
            f"{seq.global_control_compliant}, steps say {computed}"
        )
    return out


def invert_step(step: Primitive) -> Primitive:
    if isinstance(step, (GlobalH, CZLayer, MaskedCZLayer, BondCZ)):
        return step
    if isinstance(step, GlobalRot):
        return GlobalRot(step.axis, -step.angle)
    if isinstance(step, EdgeRot):
        return EdgeRot(step.end, step.axis, -step.angle)
    if isinstance(step, SiteRot):
        return SiteRot(step.site, step.axis, -step.angle)
    if isinstance(step, IsingEvolve):
        return IsingEvolve(-step.duration, step.couplings)
    raise TypeError(f"unknown primitive {step!r}")


def reverse_steps(steps: Iterable[Primitive]) -> tuple[Primitive, ...]:
    """Inverse of each primitive, in reverse order (exact sequence inverse)."""
    return tuple(invert_step(s) for s in reversed(tuple(steps)))


# --- layouts and circuits --------------------------------------------------


@dataclass(frozen=True)
class BlockLayout:
    """Block-encoded qubit placement: B blocks of M data spins, buffers between.

    ``qubit_sites`` lists the physical site of every storage slot (capacity
    B*M, block by block); ``buffer_sites`` lists the B-1 separators.  The two
    lists partition 1..n.
    """

    M: int
    B: int
    n: int
    qubit_sites: tuple[int, ...]
    buffer_sites: tuple[int, ...]

    @property
    def capacity(self) -> int:
        return self.B * self.M

    def validate(self) -> None:
        if self.M < 1 or self.B < 1:
            raise ValueError("M and B must be positive")
        if self.n != self.B * self.M + self.B - 1:
            raise ValueError("site count does not match B*M + B - 1")
        if sorted(self.qubit_sites + self.buffer_sites) != list(range(1, self.n + 1)):
            raise ValueError("qubit and buffer sites must partition 1..n")


def density(layout: BlockLayout) -> Fraction:
    """Storage density (B*M)/(B*M + B - 1); tends to M/(M+1) for long chains."""
    return Fraction(layout.B * layout.M, layout.B * layout.M + layout.B - 1)


@dataclass(frozen=True)
class LogicalGate:
    """One gate of a logical circuit; ``kind`` selects the operand fields."""

    kind: str  # H | RotZ | RotX | CZ | CNOT
    q: int | None = None
    angle: float | None = None
    q1: int | None = None
    q2: int | None = None
    control: int | None = None
    target: int | None = None

    def operands(self) -> tuple[int, ...]:
        if self.kind in ("H", "RotZ", "RotX"):
            return (self.q,)
        if self.kind == "CZ":
            return (self.q1, self.q2)
        if self.kind == "CNOT":
            return (self.control, self.target)
        raise ValueError(f"unknown gate kind {self.kind!r}")


@dataclass(frozen=True)
class LogicalCircuit:
    n_logical: int
    gates: tuple[LogicalGate, ...] = ()

    def validate(self) -> None:
        if self.n_logical < 1:
            raise ValueError("circuit needs at least one qubit")
        for g in self.gates:
            ops = g.operands()
            if any(o is None for o in ops):
                raise ValueError(f"gate {g.kind} is missing operands")
            if any(not 1 <= o <= self.n_logical for o in ops):
                raise ValueError(f"gate {g.kind} operand outside 1..{self.n_logical}")
            if len(ops) == 2 and ops[0] == ops[1]:
                raise ValueError(f"gate {g.kind} needs distinct operands")
            if g.kind in ("RotZ", "RotX") and (g.angle is None or not math.isfinite(g.angle)):
                raise ValueError(f"gate {g.kind} needs a finite angle")


@dataclass(frozen=True)
class BooleanOracleSpec:
    """Truth table of a 1- or 2-bit boolean function.

    ``truth_table`` lists outputs for inputs in ascending binary order, so
    "01" means f(0)=0, f(1)=1 and "0011" means f(00)=0 ... f(11)=1.
    """

    arity: int
    truth_table: str

    def __post_init__(self) -> None:
        if self.arity not in (1, 2):
            raise ValueError("arity must be 1 or 2")
        if len(self.truth_table) != 2 ** self.arity:
            raise ValueError("truth table length must be 2^arity")
        if any(c not in "01" for c in self.truth_table):
            raise ValueError("truth table must be a bit string")

    def value(self, x: int) -> int:
        return int(self.truth_table[x])

    @property
    def is_constant(self) -> bool:
        return len(set(self.truth_table)) == 1

    @property
    def is_balanced(self) -> bool:
        return self.truth_table.count("1") * 2 == len(self.truth_table)


@dataclass(frozen=True)
class SiteReadout:
    site: int
    sx: float
    sy: float
    sz: float
    label: str  # absorption | emission | none


@dataclass(frozen=True)
class SpectrumReport:
    """Per-site expectation triples plus a sign label along a chosen axis."""

    readouts: tuple[SiteReadout, ...]
    readout_axes: tuple[Axis, ...]
    threshold: float


@dataclass(frozen=True)
class CostReport:
    counts: tuple[tuple[str, int], ...]
    edge_selective_pulses: int
    mirror_cycles: int
    storage_density: Fraction
    compliant: bool

    def count(self, kind: str) -> int:
        return dict(self.counts).get(kind, 0)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.counts)


# --- JSON serialization -----------------------------------------------------

_PRIM_NAMES = {
    GlobalH: "GlobalH",
    GlobalRot: "GlobalRot",
    CZLayer: "CZLayer",
    MaskedCZLayer: "MaskedCZLayer",
    EdgeRot: "EdgeRot",
    IsingEvolve: "IsingEvolve",
    SiteRot: "SiteRot",
    BondCZ: "BondCZ",
}


def primitive_to_dict(step: Primitive) -> dict:
    d: dict = {"kind": _PRIM_NAMES[type(step)]}
    if isinstance(step, GlobalRot):
        d.update(axis=step.axis.value, angle=step.angle)
    elif isinstance(step, MaskedCZLayer):
        d.update(excluded_bond=step.excluded_bond.value)
    elif isinstance(step, EdgeRot):
        d.update(end=step.end.value, axis=step.axis.value, angle=step.angle)
    elif isinstance(step, IsingEvolve):
        d.update(duration=step.duration,
                 couplings={"n": step.couplings.n, "J": list(step.couplings.J)})
    elif isinstance(step, SiteRot):
        d.update(site=step.site, axis=step.axis.value, angle=step.angle)
    elif isinstance(step, BondCZ):
        d.update(bond=step.bond)
    return d


def primitive_from_dict(d: dict) -> Primitive:
    kind = d["kind"]
    if kind == "GlobalH":
        return GlobalH()
    if kind == "GlobalRot":
        return GlobalRot(Axis(d["axis"]), float(d["angle"]))
    if kind == "CZLayer":
        return CZLayer()
    if kind == "MaskedCZLayer":
        return MaskedCZLayer(End(d["excluded_bond"]))
    if kind == "EdgeRot":
        return EdgeRot(End(d["end"]), Axis(d["axis"]), float(d["angle"]))
    if kind == "IsingEvolve":
        c = d["couplings"]
        return IsingEvolve(float(d["duration"]), CouplingProfile(int(c["n"]), tuple(float(j) for j in c["J"])))
    if kind == "SiteRot":
        return SiteRot(int(d["site"]), Axis(d["axis"]), float(d["angle"]))
    if kind == "BondCZ":
        return BondCZ(int(d["bond"]))
    raise ValueError(f"unknown primitive kind {kind!r}")


def byproduct_to_dict(rec: ByproductRecord | None) -> dict | None:
    if rec is None:
        return None
    return {
        "corrections": {
            str(site): [[axis.value, angle] for axis, angle in rots]
            for site, rots in rec.corrections
        },
        "global_phase": rec.global_phase,
    }


def byproduct_from_dict(d: dict | None) -> ByproductRecord | None:
    if d is None:
        return None
    corrections = tuple(
        (int(site), tuple((Axis(a), float(ang)) for a, ang in rots))
        for site, rots in sorted(d.get("corrections", {}).items(), key=lambda kv: int(kv[0]))
    )
    return ByproductRecord(corrections, float(d.get("global_phase", 0.0)))


def sequence_to_dict(seq: PulseSequence) -> dict:
    return {
        "n": seq.n,
        "steps": [primitive_to_dict(s) for s in seq.steps],
        "byproduct": byproduct_to_dict(seq.byproduct),
        "global_control_compliant": seq.global_control_compliant,
    }


def sequence_from_dict(d: dict) -> PulseSequence:
    return PulseSequence(
        int(d["n"]),
        tuple(primitive_from_dict(s) for s in d["steps"]),
        byproduct_from_dict(d.get("byproduct")),
        bool(d["global_control_compliant"]),
    )


def layout_to_dict(layout: BlockLayout) -> dict:
    return {
        "M": layout.M,
        "B": layout.B,
        "n": layout.n,
        "qubit_sites": list(layout.qubit_sites),
        "buffer_sites": list(layout.buffer_sites),
    }


def layout_from_dict(d: dict) -> BlockLayout:
    layout = BlockLayout(
        int(d["M"]), int(d["B"]), int(d["n"]),
        tuple(int(s) for s in d["qubit_sites"]),
        tuple(int(s) for s in d["buffer_sites"]),
    )
    layout.validate()
    return layout


def gate_to_dict(g: LogicalGate) -> dict:
    d: dict = {"gate": g.kind}
    if g.kind in ("H", "RotZ", "RotX"):
        d["q"] = g.q
        if g.kind != "H":
            d["angle"] = g.angle
    elif g.kind == "CZ":
        d.update(q1=g.q1, q2=g.q2)
    elif g.kind == "CNOT":
        d.update(control=g.control, target=g.target)
    return d


def gate_from_dict(d: dict) -> LogicalGate:
    kind = d["gate"]
    if kind == "H":
        return LogicalGate("H", q=int(d["q"]))
    if kind in ("RotZ", "RotX"):
        return LogicalGate(kind, q=int(d["q"]), angle=float(d["angle"]))
    if kind == "CZ":
        return LogicalGate("CZ", q1=int(d["q1"]), q2=int(d["q2"]))
    if kind == "CNOT":
        return LogicalGate("CNOT", control=int(d["control"]), target=int(d["target"]))
    raise ValueError(f"unknown gate {kind!r}")


def circuit_to_dict(c: LogicalCircuit) -> dict:
    return {"n_logical": c.n_logical, "gates": [gate_to_dict(g) for g in c.gates]}


def circuit_from_dict(d: dict) -> LogicalCircuit:
    c = LogicalCircuit(int(d["n_logical"]), tuple(gate_from_dict(g) for g in d["gates"]))
    c.validate()
    return c


def oracle_spec_to_dict(f: BooleanOracleSpec) -> dict:
    return {"arity": f.arity, "truth_table": f.truth_table}


def oracle_spec_from_dict(d: dict) -> BooleanOracleSpec:
    return BooleanOracleSpec(int(d["arity"]), str(d["truth_table"]))


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
