"""Upwind advection at CFL 1 run through a Bernstein-Vazirani circuit.

The field bits become the hidden code of the oracle: one CX from b_i onto
the phase qubit t for every 1 digit. Between the oracle and the final
Hadamard layer the b-register is permuted, which moves the digits the
circuit reads out. A shift by d*k places is one time-stepping run of k steps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import CX, SWAP, H, X, Circuit, run_circuit

DETERMINISM_TOL = 1e-12


@dataclass(frozen=True)
class AdvectionProblem:
    field_bits: str
    d: int = 1
    k: int = 1
    direction: int = 1  # +1 moves digits towards higher positions
    bc: str = "periodic"
    cfl: float = 1.0

    def __post_init__(self):
        if set(self.field_bits) - {"0", "1"}:
            raise ValueError("field_bits must be a string of 0 and 1")
        if self.d < 1 or len(self.field_bits) % self.d:
            raise ValueError("field length must be a multiple of d")
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.direction not in (1, -1):
            raise ValueError("direction is +1 or -1")
        if self.bc not in ("periodic", "outlet"):
            raise ValueError("bc is 'periodic' or 'outlet'")
        if self.cfl != 1:
            raise ValueError(
                "only CFL = 1 is supported: the upwind update is then an exact "
                "shift by whole cells, which a register permutation can express"
            )

    @property
    def m(self) -> int:
        return len(self.field_bits)

    @property
    def shift(self) -> int:
        return self.direction * self.d * self.k


def build_bv_oracle(code: str) -> Circuit:
    """CX(b_i -> t) for each 1 in code; t is qubit len(code)."""
    m = len(code)
    circ = Circuit(m + 1)
    for i, bit in enumerate(code):
        if bit == "1":
            circ.append(CX(i, m))
    return circ


def _prepare(m: int) -> Circuit:
    circ = Circuit(m + 1)
    circ.append(X(m))
    for q in range(m + 1):
        circ.append(H(q))
    return circ


def _finish(circ: Circuit, m: int) -> None:
    for q in range(m + 1):
        circ.append(H(q))


def bv_circuit(code: str) -> Circuit:
    m = len(code)
    circ = _prepare(m)
    circ.extend(build_bv_oracle(code).gates)
    _finish(circ, m)
    return circ


def classical_shift(bits: str, s: int, bc: str) -> str:
    m = len(bits)
    if bc == "periodic":
        return "".join(bits[(p - s) % m] for p in range(m))
    out = []
    for p in range(m):
        src = p - s
        out.append(bits[src] if 0 <= src < m else "0")
    return "".join(out)


def _rotate_by_one(m: int, direction: int) -> list[tuple[int, int]]:
    # +1: start at the highest position so each digit moves up one place
    if direction > 0:
        return [(p, p - 1) for p in range(m - 1, 0, -1)]
    return [(p, p + 1) for p in range(0, m - 1)]


def shift_network(problem: AdvectionProblem, general: bool = True) -> Circuit:
    """Gates inserted after the oracle.

    Outlet: digits that would leave the register get a second CX onto t,
    which cancels their oracle CX. Then the register is permuted. The general
    network is a chain of one-place rotations (d*k of them, modulo the
    register length) and does not depend on the field; the
    fixed-field network only swaps positions whose digits differ from the
    target pattern.
    """
    m = problem.m
    s = problem.shift
    circ = Circuit(m + 1)
    code = problem.field_bits
    if problem.bc == "outlet":
        for p, bit in enumerate(code):
            if bit == "1" and not 0 <= p + s < m:
                circ.append(CX(p, m))
        code = "".join(
            b if 0 <= p + s < m else "0" for p, b in enumerate(problem.field_bits)
        )
    if general:
        # digits leaving through an outlet are already cancelled, so both
        # boundaries need the same rotation; a full turn is the identity
        for _ in range(abs(s) % m):
            for a, b in _rotate_by_one(m, problem.direction):
                circ.append(SWAP(a, b))
        return circ
    target = classical_shift(code, s, "periodic")
    sources = [p for p in range(m) if code[p] == "1" and target[p] == "0"]
    sinks = [p for p in range(m) if code[p] == "0" and target[p] == "1"]
    pairs = list(zip(sources, sinks))
    # highest position first for +, lowest first for -
    if problem.direction > 0:
        pairs.sort(key=lambda ab: -max(ab))
    else:
        pairs.sort(key=lambda ab: min(ab))
    for a, b in pairs:
        circ.append(SWAP(a, b))
    return circ


def advection_circuit(problem: AdvectionProblem, general: bool = True) -> Circuit:
    m = problem.m
    circ = _prepare(m)
    circ.extend(build_bv_oracle(problem.field_bits).gates)
    circ.extend(shift_network(problem, general).gates)
    _finish(circ, m)
    return circ


@dataclass(frozen=True)
class Readout:
    bits: str
    probability: float


def read_b_register(circ: Circuit) -> Readout:
    """Most likely b-register value and its probability (t traced out)."""
    m = circ.num_qubits - 1
    p = run_circuit(circ).probabilities().reshape(1 << m, 2).sum(axis=1)
    best = int(np.argmax(p))
    return Readout(format(best, f"0{m}b") if m else "", float(p[best]))


def advect(problem: AdvectionProblem, general: bool = True) -> str:
    return advect_readout(problem, general).bits


def advect_readout(problem: AdvectionProblem, general: bool = True) -> Readout:
    if problem.m == 0:
        return Readout("", 1.0)
    return read_b_register(advection_circuit(problem, general))


def trajectory(problem: AdvectionProblem, general: bool = True) -> list[str]:
    """Field after 0..k steps, each from its own circuit."""
    out = []
    for step in range(problem.k + 1):
        p = AdvectionProblem(
            problem.field_bits, problem.d, step, problem.direction, problem.bc
        )
        out.append(advect(p, general))
    return out
