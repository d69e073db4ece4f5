"""State-preparation synthesis for amplitude encoding.

The circuit is the inverse of disentangling the qubits one by one, least
significant first. Preparing qubit l (selects = qubits 0..l-1) takes an
Ry-multiplexor followed by an Rz-multiplexor. Each multiplexor with k selects
is flattened into 2^k rotations alternating with CX gates onto the target;
the Rz part is emitted in reverse order so the two CX gates meeting in the
middle of a block cancel and are never emitted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPowerOfTwo, UnnormalizedTarget
from .sim import CX, Circuit, Ry, Rz, StateVector, depth, run_circuit

NORM_TOL = 1e-9


def ry_count(n: int) -> int:
    return 2**n - 1


def rz_count(n: int) -> int:
    return 2**n - 1


def cx_count(n: int) -> int:
    return 2 ** (n + 1) - 2 * (n + 1)


def rotation_depth(n: int) -> int:
    return 2 ** (n + 1) - (n + 1)


def cx_depth(n: int) -> int:
    return 2 ** (n + 1) - 2 * (n + 1)


def _log2_exact(size: int) -> int:
    k = size.bit_length() - 1
    if size < 1 or 1 << k != size:
        raise NotPowerOfTwo(f"length {size} is not a power of two")
    return k


def _gray(i):
    return i ^ (i >> 1)


def _walsh_hadamard(v: np.ndarray) -> np.ndarray:
    """Unnormalized transform: out[s] = sum_i (-1)^popcount(s & i) v[i]."""
    out = np.array(v, dtype=float)
    h = 1
    while h < out.size:
        blocks = out.reshape(-1, 2, h)
        a = blocks[:, 0, :].copy()
        blocks[:, 0, :] += blocks[:, 1, :]
        blocks[:, 1, :] = a - blocks[:, 1, :]
        h *= 2
    return out


def multiplexor_angles(raw_angles) -> np.ndarray:
    """Angles for the flattened rotation/CX pattern of a multiplexor.

    raw_angles[s] is the rotation wanted when the select register reads s.
    Bit p of s belongs to the select qubit p places above the target. Before
    rotation i the target has been conjugated by X once per set bit of
    gray(i) & s, so the net angle is sum_i (-1)^popcount(s & gray(i)) beta_i.
    Inverting that Walsh system gives beta_i = WHT(theta)[gray(i)] / 2^k.
    """
    raw = np.asarray(raw_angles, dtype=float)
    k = _log2_exact(raw.size)
    spectrum = _walsh_hadamard(raw)
    order = [_gray(i) for i in range(1 << k)]
    return spectrum[order] / (1 << k)


def cx_select_offset(c: int, k: int) -> int:
    """Distance above the target of the control of the c-th CX (1-based)."""
    low = (c & -c).bit_length() - 1
    return min(low, k - 1) + 1


def tree_angles(amplitudes) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-qubit (Ry angles, Rz angles) indexed by the value of the qubits
    above it. Entry l has length 2^l."""
    a = np.asarray(amplitudes, dtype=np.complex128)
    n = _log2_exact(a.size)
    mags = np.abs(a)
    phases = np.where(mags > 0, np.angle(a), 0.0)
    out = [None] * n
    for level in range(n - 1, -1, -1):
        r0, r1 = mags[0::2], mags[1::2]
        p0, p1 = phases[0::2], phases[1::2]
        # Ry(theta)|0> = cos(theta/2)|0> - sin(theta/2)|1>
        ry = -2.0 * np.arctan2(r1, r0)
        rz = p1 - p0
        out[level] = (ry, rz)
        mags = np.hypot(r0, r1)
        phases = 0.5 * (p0 + p1)
    return out


def emit_block(circuit: Circuit, target: int, ry: np.ndarray, rz: np.ndarray) -> None:
    k = target
    if k == 0:
        circuit.append(Ry(0, ry[0]))
        circuit.append(Rz(0, rz[0]))
        return
    m = 1 << k
    beta = multiplexor_angles(ry)
    gamma = multiplexor_angles(rz)
    for i in range(m):
        circuit.append(Ry(target, beta[i]))
        if i < m - 1:
            circuit.append(CX(target - cx_select_offset(i + 1, k), target))
    for i in range(m - 1, -1, -1):
        circuit.append(Rz(target, gamma[i]))
        if i > 0:
            circuit.append(CX(target - cx_select_offset(i, k), target))


@dataclass
class SynthesisReport:
    n: int
    ry_count: int
    rz_count: int
    cx_count: int
    rotation_depth: int
    cx_depth: int
    total_depth: int
    circuit: Circuit

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "ry_count": self.ry_count,
            "rz_count": self.rz_count,
            "cx_count": self.cx_count,
            "rotation_depth": self.rotation_depth,
            "cx_depth": self.cx_depth,
            "total_depth": self.total_depth,
        }


def build_circuit(amplitudes) -> Circuit:
    angles = tree_angles(amplitudes)
    n = len(angles)
    circ = Circuit(n)
    for level, (ry, rz) in enumerate(angles):
        emit_block(circ, level, ry, rz)
    return circ


def report_for(circ: Circuit) -> SynthesisReport:
    d = depth(circ)
    rot_layers = 0
    cx_layers = 0
    kinds_per_layer: list[set] = [set() for _ in range(d.total)]
    for g, layer in zip(circ.gates, d.layers):
        kinds_per_layer[layer].add(g.kind)
    for kinds in kinds_per_layer:
        rot_layers += bool(kinds & {"Ry", "Rz", "Rx"})
        cx_layers += "CX" in kinds
    return SynthesisReport(
        n=circ.num_qubits,
        ry_count=circ.count("Ry"),
        rz_count=circ.count("Rz"),
        cx_count=circ.count("CX"),
        rotation_depth=rot_layers,
        cx_depth=cx_layers,
        total_depth=d.total,
        circuit=circ,
    )


def synthesize_init(target: StateVector) -> SynthesisReport:
    if target.num_qubits < 1:
        raise ValueError("need at least one qubit")
    norm = target.norm()
    if abs(norm - 1.0) > NORM_TOL:
        raise UnnormalizedTarget(f"target norm is {norm!r}")
    return report_for(build_circuit(target.amplitudes))


def preparation_fidelity(target: StateVector, report: SynthesisReport | None = None) -> float:
    if report is None:
        report = synthesize_init(target)
    return target.fidelity(run_circuit(report.circuit))


@dataclass(frozen=True)
class GateTimeProfile:
    t_1q: float
    t_cx: float
    coherence_budget: float | None = None

    def __post_init__(self):
        if not (self.t_1q > 0 and self.t_cx > 0):
            raise ValueError("gate times must be positive")


def runtime_estimate(n: int, profile: GateTimeProfile) -> float:
    """Seconds for the synthesized preparation circuit, layer by layer."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return rotation_depth(n) * profile.t_1q + cx_depth(n) * profile.t_cx


def coherence_headroom(n: int, profile: GateTimeProfile) -> float | None:
    """Fraction of the coherence budget used, or None without a budget."""
    if profile.coherence_budget is None:
        return None
    return runtime_estimate(n, profile) / profile.coherence_budget


def random_target(n: int, rng: np.random.Generator) -> StateVector:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, v / np.linalg.norm(v))
