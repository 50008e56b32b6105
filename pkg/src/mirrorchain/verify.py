"""Property suite backing both the acceptance tests and the verify command.

Each check re-derives one contract with the dense oracle or the simulator
and reports pass/fail with a short detail string.  Tolerances are fixed
here, not configurable; the ``corrupt`` flag deliberately breaks a frozen
constant so the harness can demonstrate that it catches regressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import algorithms, compiler, oracle, protocol, simulate
from .model import (
    Axis,
    BooleanOracleSpec,
    CouplingProfile,
    CZLayer,
    EdgeRot,
    End,
    GlobalH,
    IsingEvolve,
    LogicalCircuit,
    LogicalGate,
    PauliString,
    validate_sequence,
)

RNG_SEED = 20240917


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _swap_matrix() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    )


def check_mirror_exact_n2(max_spins: int, corrupt: bool = False) -> CheckResult:
    seq = protocol.mirror_cycle(2)
    u = oracle.unitary_of(seq)
    target = _swap_matrix()
    if corrupt:
        target = target.copy()
        target[0, 0] = -1  # negative control: harness must notice
    err = float(np.max(np.abs(u - target)))
    steps = len(seq.steps) // 2
    ok = err < 1e-10 and steps == 3
    return CheckResult(
        "mirror_exact_n2", ok, f"entrywise error {err:.2e} with {steps} steps"
    )


def check_mirror_period_law(max_spins: int, corrupt: bool = False) -> CheckResult:
    details = []
    ok = True
    for n in range(2, max_spins + 1):
        k = oracle.find_mirror_period(n)
        expected = protocol.mirror_period(n)
        u = np.linalg.matrix_power(oracle.mirror_step_matrix(n), k)
        try:
            rec = oracle.equiv_up_to_local(u, oracle.reversal_matrix(n), tol=1e-9)
            strip = oracle.byproduct_matrix(rec, n).conj().T @ u
            err = not oracle.equal_phase(strip, oracle.reversal_matrix(n), 1e-9)
        except oracle.NotFactorizable:
            err = True
        if k != expected or err:
            ok = False
        details.append(f"n={n}:k={k}")
    return CheckResult("mirror_period_law", ok, " ".join(details))


def _fig2_state() -> simulate.DeviationState:
    return simulate.init_deviation(
        3,
        [
            PauliString.single(1, Axis.Z),
            PauliString.single(2, Axis.X, -1.0),
            PauliString.single(3, Axis.X),
        ],
        1e-5,
    )


def check_fig2_mirror_patterns(max_spins: int, corrupt: bool = False) -> CheckResult:
    cycle = protocol.mirror_cycle(3)
    state = _fig2_state()
    patterns = [
        {(1, Axis.X): 1.0, (2, Axis.X): -1.0, (3, Axis.Z): 1.0},
        {(1, Axis.Z): 1.0, (2, Axis.X): -1.0, (3, Axis.X): 1.0},
        {(1, Axis.X): 1.0, (2, Axis.X): -1.0, (3, Axis.Z): 1.0},
    ]
    worst = 0.0
    for pattern in patterns:
        state = simulate.run(state, cycle)
        state = simulate.apply_byproduct_inverse(state, cycle.byproduct)
        for (site, axis), want in pattern.items():
            worst = max(worst, abs(simulate.expect(state, site, axis) - want))
    return CheckResult(
        "fig2_mirror_patterns", worst < 1e-9, f"worst readout error {worst:.2e} over 3 cycles"
    )


def check_cz_synthesis(max_spins: int, corrupt: bool = False) -> CheckResult:
    worst_n = 0
    ok = True
    for n in range(2, min(max_spins, 6) + 1):
        u = oracle.unitary_of(protocol.synth_cz_layer(n))
        v = oracle.primitive_matrix(n, CZLayer())
        if not oracle.equal_phase(u, v, 1e-9):
            ok = False
        worst_n = n
    return CheckResult("cz_synthesis", ok, f"checked n=2..{worst_n}")


def check_partial_refocus(max_spins: int, corrupt: bool = False) -> CheckResult:
    ok = True
    t = 0.83
    for ratio in (1.2, 1.5, 2.0, 3.0):
        couplings = CouplingProfile(3, (ratio, 1.0))
        seq = protocol.partial_refocus(couplings, t)
        u = oracle.unitary_of(seq)
        target = oracle.primitive_matrix(
            3, IsingEvolve(t, CouplingProfile.uniform(3, 1.0))
        )
        if not oracle.equal_phase(u, target, 1e-10):
            ok = False
    return CheckResult("partial_refocus", ok, "ratios 1.2 1.5 2 3 at tol 1e-10")


def check_intra_block_logic(max_spins: int, corrupt: bool = False) -> CheckResult:
    seq = protocol.sandwich_correct(
        protocol.swap12_block(3), EdgeRot(End.HEAD, Axis.Z, math.pi)
    )
    out = simulate.run(simulate.init_basis(3, "0+0"), seq)
    fidelity = simulate.state_fidelity(out, simulate.init_basis(3, "0-0"))
    layout = compiler.make_layout(3, 3)
    circ = LogicalCircuit(3, (LogicalGate("CNOT", control=1, target=3),))
    u = oracle.unitary_of(compiler.compile_circuit(circ, layout))
    v = compiler.circuit_unitary(circ, layout)
    cnot_ok = oracle.equal_phase(u, v, 1e-9)
    ok = fidelity > 1 - 1e-9 and cnot_ok
    return CheckResult(
        "intra_block_logic",
        ok,
        f"|0+0> -> |0-0> fidelity {fidelity:.12f}, CNOT(1,3) exact: {cnot_ok}",
    )


def check_deutsch(max_spins: int, corrupt: bool = False) -> CheckResult:
    ok = True
    details = []
    for name, expect_constant in (("00", True), ("11", True), ("01", False), ("10", False)):
        r = algorithms.deutsch(BooleanOracleSpec(1, name))
        site1 = simulate.expect(r.final_state, 1, Axis.Z)
        site2 = max(
            abs(simulate.expect(r.final_state, 2, Axis.X)),
            abs(simulate.expect(r.final_state, 2, Axis.Y)),
        )
        site3 = simulate.expect(r.final_state, 3, Axis.Z)
        good = (
            (r.classification == "constant") == expect_constant
            and (site1 > 0) == expect_constant
            and site2 < 1e-9
            and site3 < 0
            and r.cross_check_deviation < 1e-9
        )
        ok = ok and good
        details.append(f"f{name}:{r.classification}")
    return CheckResult("deutsch", ok, " ".join(details))


def check_deutsch_jozsa(max_spins: int, corrupt: bool = False) -> CheckResult:
    ok = True
    constant = ("1111", "0000")
    balanced = ("0011", "0101", "0110", "1100", "1010", "1001")
    for tt in constant + balanced:
        r = algorithms.deutsch_jozsa(BooleanOracleSpec(2, tt))
        p00 = dict(r.register_probabilities)["00"]
        if tt in constant:
            good = r.classification == "constant" and p00 > 0.999
        else:
            good = r.classification == "balanced" and (1 - p00) > 0.999
        good = good and r.cross_check_deviation < 1e-9
        ok = ok and good
    return CheckResult("deutsch_jozsa", ok, "2 constant + 6 balanced functions")


def _random_local_product(rng: np.random.Generator, n: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for _ in range(n):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(g)
        q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
        out = np.kron(out, q)
    return out


def _random_entangling(rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    q, r = np.linalg.qr(g)
    return q @ np.diag(np.diag(r) / np.abs(np.diag(r)))


def _protocol_byproduct_cases(max_spins: int):
    cases = []
    for n in range(2, min(max_spins, 5) + 1):
        cases.append(
            (f"mirror({n})", protocol.mirror_cycle(n), oracle.reversal_matrix(n))
        )
    for n in (3, 4):
        sub = oracle.primitive_matrix(n - 1, GlobalH()) @ oracle.primitive_matrix(
            n - 1, CZLayer()
        )
        for end, target in (
            (End.HEAD, np.kron(np.eye(2), sub)),
            (End.TAIL, np.kron(sub, np.eye(2))),
        ):
            for realization in ("echo", "masked"):
                cases.append(
                    (
                        f"freeze({n},{end.value},{realization})",
                        protocol.freeze_step(n, end, realization),
                        target,
                    )
                )
    swap = _swap_matrix()
    for n, bond in ((2, 1), (3, 1), (3, 2), (4, 2)):
        target = np.kron(
            np.kron(np.eye(2 ** (bond - 1)), swap), np.eye(2 ** (n - bond - 1))
        )
        cases.append((f"swap_bond({n},{bond})", protocol.swap_bond(n, bond), target))
    for n in (2, 3, 4):
        circ_cz = np.ones(2 ** n, dtype=complex)
        for v in range(2 ** n):
            if (v >> (n - 1)) & 1 and (v >> (n - 2)) & 1:
                circ_cz[v] = -1
        target = np.diag(circ_cz)
        cases.append((f"cz_bond_head({n})", protocol.cz_bond_head(n), target))
        cases.append(
            (f"cz_bond_head_minimal({n})", protocol.cz_bond_head_minimal(n), target)
        )
    return cases


def check_oracle_soundness(max_spins: int, corrupt: bool = False) -> CheckResult:
    rng = np.random.default_rng(RNG_SEED)
    local_fail = 0
    for trial in range(1000):
        n = int(rng.integers(1, 6))
        b = _random_local_product(rng, n)
        try:
            factors = oracle.factor_local(b)
            recon = factors[0]
            for f in factors[1:]:
                recon = np.kron(recon, f)
            if not oracle.equal_phase(recon, b, 1e-9):
                local_fail += 1
        except oracle.NotFactorizable:
            local_fail += 1
    entangling_fail = 0
    for trial in range(100):
        u = _random_entangling(rng)
        try:
            oracle.factor_local(u)
            entangling_fail += 1
        except oracle.NotFactorizable:
            pass
    roundtrip_fail = []
    for name, seq, target in _protocol_byproduct_cases(max_spins):
        u = oracle.unitary_of(seq)
        declared = oracle.byproduct_matrix(seq.byproduct, seq.n)
        if not oracle.equal_phase(declared.conj().T @ u, target, 1e-9):
            roundtrip_fail.append(name + ":declared")
        try:
            rec = oracle.equiv_up_to_local(u, target, tol=1e-9)
            strip = oracle.byproduct_matrix(rec, seq.n).conj().T @ u
            if not oracle.equal_phase(strip, target, 1e-9):
                roundtrip_fail.append(name + ":rederived")
        except oracle.NotFactorizable:
            roundtrip_fail.append(name + ":unfactorizable")
    ok = local_fail == 0 and entangling_fail == 0 and not roundtrip_fail
    detail = (
        f"1000 local products ({local_fail} failures), "
        f"100 entangling rejections ({entangling_fail} missed)"
    )
    if roundtrip_fail:
        detail += ", byproduct round-trip failures: " + " ".join(roundtrip_fail)
    return CheckResult("oracle_soundness", ok, detail)


def check_noise_ordering(max_spins: int, corrupt: bool = False) -> CheckResult:
    cycle = protocol.mirror_cycle(3)
    ideal = _fig2_state()
    noisy = _fig2_state()
    overlaps = []
    for _ in range(3):
        ideal = simulate.run(ideal, cycle)
        noisy = simulate.run_noisy(noisy, cycle, 0.01)
        overlaps.append(simulate.deviation_overlap(ideal, noisy))
    decreasing = all(a > b for a, b in zip(overlaps, overlaps[1:]))
    mirror_interior = compiler.interior_selective_pulses(cycle)
    baseline = compiler.swap_network_mirror(3)
    base_interior = compiler.interior_selective_pulses(baseline)
    flagged = not baseline.global_control_compliant and validate_sequence(baseline)
    ok = (
        decreasing
        and mirror_interior == 0
        and base_interior >= 6
        and bool(flagged)
    )
    return CheckResult(
        "noise_ordering",
        ok,
        f"overlaps {' > '.join(f'{o:.4f}' for o in overlaps)}, "
        f"interior pulses mirror={mirror_interior} baseline={base_interior}",
    )


def check_density_accounting(max_spins: int, corrupt: bool = False) -> CheckResult:
    ok = True
    for m in (1, 2, 3):
        for k in (1, 2, 3, 4):
            layout = compiler.make_layout(k * m, m)
            got = compiler.density(layout)
            want = Fraction(k * m, k * m + k - 1)
            if got != want or layout.B != k:
                ok = False
    # asymptote: at k = 1e6 the exact residual against M/(M+1) must match its
    # closed form M/((kM+k-1)(M+1)) with zero error (rational arithmetic),
    # which pins the limit far beyond 1e-12
    big = 10 ** 6
    for m in (1, 2, 3):
        value = Fraction(big * m, big * m + big - 1)
        limit = Fraction(m, m + 1)
        residual = value - limit
        expected = Fraction(m, (big * m + big - 1) * (m + 1))
        if residual != expected or float(residual) > 1e-6:
            ok = False
    if abs(float(Fraction(big, 2 * big - 1)) - 0.5) > 1e-6:
        ok = False
    return CheckResult(
        "density_accounting", ok, "exact for M in {1,2,3}, k in 1..4; limit pinned at k=1e6"
    )


CHECKS: tuple[tuple[str, Callable[[int, bool], CheckResult]], ...] = (
    ("mirror_exact_n2", check_mirror_exact_n2),
    ("mirror_period_law", check_mirror_period_law),
    ("fig2_mirror_patterns", check_fig2_mirror_patterns),
    ("cz_synthesis", check_cz_synthesis),
    ("partial_refocus", check_partial_refocus),
    ("intra_block_logic", check_intra_block_logic),
    ("deutsch", check_deutsch),
    ("deutsch_jozsa", check_deutsch_jozsa),
    ("oracle_soundness", check_oracle_soundness),
    ("noise_ordering", check_noise_ordering),
    ("density_accounting", check_density_accounting),
)


def run_suite(max_spins: int = 6, corrupt: bool = False) -> list[CheckResult]:
    if not 2 <= max_spins <= 8:
        raise ValueError("max_spins must lie in 2..8")
    results = []
    for _, func in CHECKS:
        results.append(func(max_spins, corrupt))
    return results
