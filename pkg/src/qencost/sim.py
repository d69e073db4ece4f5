"""Dense statevector and branch simulators, gates, layering and sampling.

Qubit 0 is the most significant bit of a basis index.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    IndexOutOfRange,
    NonClassicalGateOnBranch,
    ResetOnSuperposedQubit,
    TooManyQubits,
)

DEFAULT_MAX_QUBITS = 24
RESET_TOL = 1e-10

ROTATIONS = ("Rx", "Ry", "Rz")
CLASSICAL = ("X", "CX", "MCX", "SWAP", "Reset")
KINDS = ROTATIONS + ("H",) + CLASSICAL


def max_dense_qubits() -> int:
    env = os.environ.get("QENCOST_MAX_QUBITS")
    return int(env) if env else DEFAULT_MAX_QUBITS


# -- gates -----------------------------------------------------------------


@dataclass(frozen=True)
class GateOp:
    """One gate. Controls are (qubit, polarity) pairs, polarity 1 = closed."""

    kind: str
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(
            self, "controls", tuple((int(q), int(p)) for q, p in self.controls)
        )
        want = 2 if self.kind == "SWAP" else 1
        if len(self.targets) != want:
            raise ValueError(f"{self.kind} takes {want} target(s)")
        if self.kind in ROTATIONS and self.angle is None:
            raise ValueError(f"{self.kind} needs an angle")
        if self.kind == "CX" and len(self.controls) != 1:
            raise ValueError("CX takes exactly one control")
        qs = self.qubits
        if len(set(qs)) != len(qs):
            raise ValueError(f"repeated qubit in {self}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)

    @property
    def is_classical(self) -> bool:
        return self.kind in CLASSICAL

    def __str__(self):
        parts = [self.kind, " ".join(map(str, self.targets))]
        ctrl = " ".join(f"{q}({p})" for q, p in self.controls)
        parts.append(ctrl if ctrl else "-")
        parts.append(repr(self.angle) if self.angle is not None else "-")
        return " ".join(parts)


def Rx(q, theta):
    return GateOp("Rx", (q,), angle=float(theta))


def Ry(q, theta):
    return GateOp("Ry", (q,), angle=float(theta))


def Rz(q, theta):
    return GateOp("Rz", (q,), angle=float(theta))


def X(q):
    return GateOp("X", (q,))


def H(q):
    return GateOp("H", (q,))


def CX(control, target):
    return GateOp("CX", (target,), ((control, 1),))


def MCX(target, controls):
    return GateOp("MCX", (target,), tuple(controls))


def SWAP(a, b):
    return GateOp("SWAP", (a, b))


def Reset(q):
    return GateOp("Reset", (q,))


def gate_matrix(gate: GateOp) -> np.ndarray:
    """2x2 matrix of a single-target gate (controls not included)."""
    k = gate.kind
    if k in ROTATIONS:
        c = math.cos(gate.angle / 2)
        s = math.sin(gate.angle / 2)
        if k == "Rx":
            return np.array([[c, 1j * s], [1j * s, c]])
        if k == "Ry":
            return np.array([[c, s], [-s, c]], dtype=complex)
        return np.array(
            [[np.exp(-0.5j * gate.angle), 0], [0, np.exp(0.5j * gate.angle)]]
        )
    if k == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if k in ("X", "CX", "MCX"):
        return np.array([[0, 1], [1, 0]], dtype=complex)
    raise ValueError(f"{k} has no 2x2 matrix")


@dataclass
class Circuit:
    num_qubits: int
    gates: list[GateOp] = field(default_factory=list)

    def append(self, gate: GateOp) -> None:
        for q in gate.qubits:
            if not 0 <= q < self.num_qubits:
                raise IndexOutOfRange(f"qubit {q} outside 0..{self.num_qubits - 1}")
        self.gates.append(gate)

    def extend(self, gates) -> None:
        for g in gates:
            self.append(g)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def to_text(self) -> str:
        return "\n".join(str(g) for g in self.gates)


@dataclass(frozen=True)
class DepthReport:
    total: int
    per_kind: dict[str, int]
    layers: tuple[int, ...]  # layer index of each gate


def depth(circuit: Circuit) -> DepthReport:
    """ASAP layering: every gate goes one layer after the latest earlier gate
    that shares a qubit with it."""
    front = [0] * circuit.num_qubits
    layer_kinds: list[set[str]] = []
    layers = []
    for g in circuit.gates:
        layer = max(front[q] for q in g.qubits)
        for q in g.qubits:
            front[q] = layer + 1
        if layer == len(layer_kinds):
            layer_kinds.append(set())
        layer_kinds[layer].add(g.kind)
        layers.append(layer)
    per_kind: dict[str, int] = {}
    for kinds in layer_kinds:
        for k in kinds:
            per_kind[k] = per_kind.get(k, 0) + 1
    return DepthReport(len(layer_kinds), dict(sorted(per_kind.items())), tuple(layers))


# -- dense simulation ------------------------------------------------------


class StateVector:
    """Dense amplitude vector over n qubits."""

    def __init__(self, num_qubits: int, amplitudes=None):
        if num_qubits < 0:
            raise ValueError("num_qubits must be non-negative")
        cap = max_dense_qubits()
        if num_qubits > cap:
            raise TooManyQubits(f"{num_qubits} qubits exceeds dense cap {cap}")
        self.num_qubits = num_qubits
        dim = 1 << num_qubits
        if amplitudes is None:
            amps = np.zeros(dim, dtype=np.complex128)
            amps[0] = 1.0
        else:
            amps = np.ascontiguousarray(amplitudes, dtype=np.complex128).copy()
            if amps.shape != (dim,):
                raise ValueError(f"expected {dim} amplitudes, got {amps.shape}")
        self.amplitudes = amps

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        sv = cls(num_qubits)
        sv.amplitudes[0] = 0
        sv.amplitudes[index] = 1
        return sv

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        return cls.basis(len(bits), int(bits, 2) if bits else 0)

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.probabilities())))

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|^2, insensitive to global phase."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def __repr__(self):
        return f"StateVector({self.num_qubits} qubits)"


def _control_mask(n, controls):
    cmask = cval = 0
    for q, pol in controls:
        bit = 1 << (n - 1 - q)
        cmask |= bit
        if pol:
            cval |= bit
    return cmask, cval


def _apply_inplace(psi: np.ndarray, n: int, gate: GateOp) -> None:
    for q in gate.qubits:
        if not 0 <= q < n:
            raise IndexOutOfRange(f"qubit {q} outside 0..{n - 1}")
    if gate.kind == "Reset":
        _reset_inplace(psi, n, gate.targets[0])
        return
    cmask, cval = _control_mask(n, gate.controls)
    if gate.kind == "SWAP":
        kernels.apply_swap(psi, n, gate.targets[0], gate.targets[1], cmask, cval)
        return
    m = gate_matrix(gate)
    kernels.apply_matrix(
        psi, n, gate.targets[0], m[0, 0], m[0, 1], m[1, 0], m[1, 1], cmask, cval
    )


def _reset_inplace(psi, n, q):
    t = psi.reshape((2,) * n)
    idx0 = tuple(0 if a == q else slice(None) for a in range(n))
    idx1 = tuple(1 if a == q else slice(None) for a in range(n))
    p0 = float(np.sum(np.abs(t[idx0]) ** 2))
    p1 = float(np.sum(np.abs(t[idx1]) ** 2))
    if p1 <= RESET_TOL:
        t[idx1] = 0
    elif p0 <= RESET_TOL:
        t[idx0] = t[idx1]
        t[idx1] = 0
    else:
        raise ResetOnSuperposedQubit(
            f"qubit {q} is in superposition (p0={p0:.3g}, p1={p1:.3g})"
        )


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    out = state.copy()
    _apply_inplace(out.amplitudes, out.num_qubits, gate)
    return out


def run_circuit(circuit: Circuit, state: StateVector | None = None) -> StateVector:
    """Apply every gate of the circuit; starts from |0...0> by default."""
    if state is None:
        out = StateVector(circuit.num_qubits)
    else:
        if state.num_qubits != circuit.num_qubits:
            raise ValueError("state and circuit sizes differ")
        out = state.copy()
    for g in circuit.gates:
        _apply_inplace(out.amplitudes, out.num_qubits, g)
    return out


# -- sampling --------------------------------------------------------------


@dataclass(frozen=True)
class ShotHistogram:
    counts: dict[int, int]
    total: int

    def probability(self, index: int) -> float:
        return self.counts.get(index, 0) / self.total


def sample_shots(state: StateVector, N: int, seed: int) -> ShotHistogram:
    if N < 1:
        raise ValueError("N must be at least 1")
    p = state.probabilities()
    p = p / p.sum()
    draws = np.random.default_rng(seed).multinomial(N, p)
    nz = np.nonzero(draws)[0]
    return ShotHistogram({int(i): int(draws[i]) for i in nz}, int(N))


# -- branch simulation -----------------------------------------------------


class BranchState:
    """Superposition sum_i a_i |i>_top |b_i>_bottom of basis states.

    Gate qubit indices address the full register: the top register holds
    qubits 0..num_top-1, the bottom register the rest.
    """

    def __init__(self, top_amplitudes, branch_bits):
        amps = np.asarray(top_amplitudes, dtype=np.complex128).copy()
        bits = np.ascontiguousarray(branch_bits, dtype=np.uint8).copy()
        if bits.ndim != 2 or bits.shape[0] != amps.size:
            raise ValueError("need one bit row per top amplitude")
        num_top = (amps.size - 1).bit_length()
        if amps.size != 1 << num_top:
            raise ValueError("top amplitude count must be a power of two")
        if np.any(bits > 1):
            raise ValueError("bits must be 0 or 1")
        self.top_amplitudes = amps
        self.bits = bits
        self.num_top = num_top

    @property
    def num_bottom(self) -> int:
        return self.bits.shape[1]

    @property
    def num_qubits(self) -> int:
        return self.num_top + self.num_bottom

    def copy(self) -> "BranchState":
        return BranchState(self.top_amplitudes, self.bits)

    def branch_bitstrings(self) -> list[str]:
        return ["".join(map(str, row)) for row in self.bits]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.top_amplitudes) ** 2)))

    def to_dense(self) -> StateVector:
        n = self.num_qubits
        sv = StateVector(n)
        sv.amplitudes[0] = 0
        nb = self.num_bottom
        weights = 1 << np.arange(nb - 1, -1, -1, dtype=np.int64)
        low = self.bits.astype(np.int64) @ weights if nb else np.zeros(
            len(self.bits), dtype=np.int64
        )
        idx = (np.arange(len(self.bits), dtype=np.int64) << nb) | low
        np.add.at(sv.amplitudes, idx, self.top_amplitudes)
        return sv


def _branch_inplace(state: BranchState, gate: GateOp) -> None:
    if not gate.is_classical:
        raise NonClassicalGateOnBranch(f"{gate.kind} cannot act on branch bits")
    m = state.num_top
    for q in gate.qubits:
        if not m <= q < state.num_qubits:
            raise IndexOutOfRange(
                f"qubit {q} is not in the bottom register {m}..{state.num_qubits - 1}"
            )
    bits = state.bits
    cols = [q - m for q in gate.targets]
    if gate.kind == "Reset":
        live = np.abs(state.top_amplitudes) ** 2 > RESET_TOL
        vals = bits[live, cols[0]]
        if vals.size and vals.min() != vals.max():
            raise ResetOnSuperposedQubit(f"qubit {gate.targets[0]} differs across branches")
        bits[:, cols[0]] = 0
        return
    ctrl_cols = np.array([q - m for q, _ in gate.controls], dtype=np.int64)
    ctrl_vals = np.array([p for _, p in gate.controls], dtype=np.uint8)
    if gate.kind == "SWAP":
        a, b = cols
        if len(ctrl_cols):
            fire = np.all(bits[:, ctrl_cols] == ctrl_vals, axis=1)
        else:
            fire = slice(None)
        tmp = bits[fire, a].copy()
        bits[fire, a] = bits[fire, b]
        bits[fire, b] = tmp
        return
    kernels.mcx_rows(bits, cols[0], ctrl_cols, ctrl_vals)


def branch_apply(state: BranchState, gate: GateOp) -> BranchState:
    out = state.copy()
    _branch_inplace(out, gate)
    return out


def branch_run(circuit: Circuit, state: BranchState) -> BranchState:
    if circuit.num_qubits != state.num_qubits:
        raise ValueError("state and circuit sizes differ")
    out = state.copy()
    for g in circuit.gates:
        _branch_inplace(out, g)
    return out
