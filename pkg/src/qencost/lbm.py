"""Lattice Boltzmann in a hybrid encoding.

A top register in superposition selects a grid point i; the bottom register
of branch i holds, bit-encoded, the distribution functions of every point
within t*r of i (periodic wrap) plus one ancilla sub-block per time step.
Collision writes the truth-table output through fresh ancillas, streaming is
a SWAP permutation between neighbouring offsets. Every step consumes one ring
of neighbours, so after t steps only the centre offset is still valid.

Register layout of the bottom register, per offset from -t*r to t*r:
f_0 .. f_{q-1} (each Q_j bits, most significant first), then t ancilla
sub-blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AncillaExhausted, StaleDataRegion, ValueOutOfRange
from .funcsynth import TruthTable, round_half_away, synth_naive, synth_optimized
from .sim import SWAP, BranchState, Circuit, branch_run

STENCILS = {
    2: {"velocities": (1, -1), "weights": (0.5, 0.5), "cs2": 1.0},
    3: {"velocities": (0, 1, -1), "weights": (2 / 3, 1 / 6, 1 / 6), "cs2": 1 / 3},
}
REACH = 1


@dataclass(frozen=True)
class LbmConfig:
    Nx: int
    q: int
    Q_f: tuple[int, ...]
    t: int
    ancilla_mode: str = "full"
    bc: str = "periodic"
    top_amplitudes: tuple[complex, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "Q_f", tuple(int(x) for x in self.Q_f))
        if self.Nx < 1:
            raise ValueError("Nx must be at least 1")
        if self.q not in STENCILS:
            raise ValueError("only D1Q2 and D1Q3 are supported")
        if len(self.Q_f) != self.q or min(self.Q_f) < 1:
            raise ValueError(f"need {self.q} positive register widths")
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if self.ancilla_mode not in ("full", "optimized"):
            raise ValueError("ancilla_mode is 'full' or 'optimized'")
        if self.bc != "periodic":
            raise ValueError("only periodic wrap is supported")
        if self.top_amplitudes is not None:
            a = np.asarray(self.top_amplitudes, dtype=complex)
            if a.size != self.Nx or abs(np.linalg.norm(a) - 1) > 1e-12:
                raise ValueError("top_amplitudes must be Nx values of unit norm")

    @property
    def velocities(self) -> tuple[int, ...]:
        return STENCILS[self.q]["velocities"]

    @property
    def width(self) -> int:
        return sum(self.Q_f)

    @property
    def num_top(self) -> int:
        return math.ceil(math.log2(self.Nx)) if self.Nx > 1 else 0

    @property
    def extent(self) -> int:
        return self.t * REACH


def _synth(config: LbmConfig):
    return synth_naive if config.ancilla_mode == "full" else synth_optimized


def ancilla_width(config: LbmConfig, collision: TruthTable | None = None) -> int:
    """Ancillas one collision needs: the full register width, or whatever the
    optimized synthesizer reports for this table."""
    if config.ancilla_mode == "full":
        return config.width
    if collision is None:
        raise ValueError("optimized mode needs the collision table")
    return synth_optimized(collision, reset=False).num_ancillas


def qubit_budget(config: LbmConfig, collision: TruthTable | None = None) -> int:
    per_offset = config.width + config.t * ancilla_width(config, collision)
    return config.num_top + per_offset * (1 + 2 * config.extent)


def ancilla_ratio(config: LbmConfig, collision: TruthTable | None = None) -> float:
    """The A in width*(1+A)*(1+2t): t in full mode, smaller when optimized."""
    return config.t * ancilla_width(config, collision) / config.width


class Layout:
    """Qubit indices (full register) of every register in a branch."""

    def __init__(self, config: LbmConfig, collision: TruthTable | None = None):
        self.config = config
        self.anc_width = ancilla_width(config, collision) if config.t else 0
        self.offsets = tuple(range(-config.extent, config.extent + 1))
        self.block = config.width + config.t * self.anc_width
        self.num_top = config.num_top
        self.num_qubits = self.num_top + self.block * len(self.offsets)

    def _base(self, o: int) -> int:
        return self.num_top + (o + self.config.extent) * self.block

    def f_qubits(self, o: int, j: int) -> list[int]:
        start = self._base(o) + sum(self.config.Q_f[:j])
        return list(range(start, start + self.config.Q_f[j]))

    def data_qubits(self, o: int) -> list[int]:
        start = self._base(o)
        return list(range(start, start + self.config.width))

    def anc_qubits(self, o: int, s: int) -> list[int]:
        start = self._base(o) + self.config.width + s * self.anc_width
        return list(range(start, start + self.anc_width))


# -- tables ----------------------------------------------------------------


def pack(values, widths) -> int:
    out = 0
    for v, w in zip(values, widths):
        out = (out << w) | int(v)
    return out


def unpack(word: int, widths) -> tuple[int, ...]:
    out = []
    for w in reversed(widths):
        out.append(word & ((1 << w) - 1))
        word >>= w
    return tuple(reversed(out))


def _continuum_bgk(f, q, tau, u):
    st = STENCILS[q]
    rho = sum(f)
    return [
        fj + (w * rho * (1 + c * u / st["cs2"]) - fj) / tau
        for fj, w, c in zip(f, st["weights"], st["velocities"])
    ]


def bgk_table(q: int, Q_f, tau: float = 1.0, u: float = 0.0) -> TruthTable:
    """Quantized BGK collision that conserves sum_j f_j exactly.

    Each post-collision value is rounded half away from zero and clamped to
    its register. Any mass left over by rounding goes back one unit at a time
    to the component whose rounding moved it furthest the other way (lowest
    index on ties), skipping full or empty registers.
    """
    Q_f = tuple(Q_f)
    tops = [(1 << w) - 1 for w in Q_f]
    width = sum(Q_f)
    out = []
    for word in range(1 << width):
        f = unpack(word, Q_f)
        rho = sum(f)
        y = _continuum_bgk(f, q, tau, u)
        g = [min(max(round_half_away(v), 0), top) for v, top in zip(y, tops)]
        while sum(g) != rho:
            up = sum(g) < rho
            room = [j for j in range(q) if (g[j] < tops[j] if up else g[j] > 0)]
            j = max(room, key=lambda k: ((y[k] - g[k]) if up else (g[k] - y[k]), -k))
            g[j] += 1 if up else -1
        out.append(pack(g, Q_f))
    return TruthTable(width, width, tuple(out))


def bgk_table_error(table: TruthTable, q: int, Q_f, tau: float = 1.0, u: float = 0.0) -> float:
    """Largest deviation (in register units) of the table from continuum BGK."""
    worst = 0.0
    for word in range(1 << table.d_in):
        y = _continuum_bgk(unpack(word, Q_f), q, tau, u)
        g = unpack(table.map[word], Q_f)
        worst = max(worst, max(abs(a - b) for a, b in zip(y, g)))
    return worst


def is_mass_conserving(table: TruthTable, Q_f) -> bool:
    return all(
        sum(unpack(w, Q_f)) == sum(unpack(table.map[w], Q_f))
        for w in range(1 << table.d_in)
    )


# -- state -----------------------------------------------------------------


def _top_amplitudes(config: LbmConfig) -> np.ndarray:
    amps = np.zeros(1 << config.num_top, dtype=complex)
    if config.top_amplitudes is None:
        amps[: config.Nx] = 1 / math.sqrt(config.Nx)
    else:
        amps[: config.Nx] = config.top_amplitudes
    return amps


def _check_field(config: LbmConfig, field) -> np.ndarray:
    arr = np.asarray(field, dtype=np.int64)
    if arr.shape != (config.Nx, config.q):
        raise ValueOutOfRange(f"field must have shape ({config.Nx}, {config.q})")
    for j, w in enumerate(config.Q_f):
        if arr[:, j].min() < 0 or arr[:, j].max() >= 1 << w:
            raise ValueOutOfRange(f"f_{j} values must fit in {w} bits")
    return arr


def build_initial_state(
    config: LbmConfig, field, collision: TruthTable | None = None
) -> BranchState:
    f = _check_field(config, field)
    lay = Layout(config, collision)
    nb = lay.num_qubits - lay.num_top
    bits = np.zeros((1 << config.num_top, nb), dtype=np.uint8)
    for i in range(config.Nx):
        for o in lay.offsets:
            x = (i + o) % config.Nx
            for j, w in enumerate(config.Q_f):
                for b, qb in enumerate(lay.f_qubits(o, j)):
                    bits[i, qb - lay.num_top] = (f[x, j] >> (w - 1 - b)) & 1
    return BranchState(_top_amplitudes(config), bits)


def valid_offsets(config: LbmConfig, step_index: int) -> list[int]:
    """Offsets still holding correct data before step `step_index`."""
    v = config.extent - step_index * REACH
    return [o for o in range(-config.extent, config.extent + 1) if abs(o) <= v]


def collision_circuit(
    config: LbmConfig, collision: TruthTable, step_index: int, offsets=None
) -> Circuit:
    if step_index >= config.t:
        raise AncillaExhausted(f"only {config.t} ancilla sub-blocks per offset")
    if collision.d_in != config.width:
        raise ValueError("collision table width does not match sum(Q_f)")
    lay = Layout(config, collision)
    valid = set(valid_offsets(config, step_index))
    if offsets is None:
        offsets = sorted(valid)
    stale = [o for o in offsets if o not in valid]
    if stale:
        raise StaleDataRegion(f"offsets {stale} no longer hold valid data")
    circ = Circuit(lay.num_qubits)
    synth = _synth(config)
    for o in offsets:
        fc = synth(
            collision,
            reset=False,
            data=lay.data_qubits(o),
            ancillas=lay.anc_qubits(o, step_index),
            num_qubits=lay.num_qubits,
        )
        circ.extend(fc.circuit.gates)
    return circ


def streaming_circuit(config: LbmConfig, reach_range: int, collision=None) -> Circuit:
    """Move every f_j by its velocity among offsets -reach_range..reach_range.

    The chain of SWAPs is a cyclic rotation of the f_j registers; the
    register entering from outside the range carries no valid data.
    """
    lay = Layout(config, collision)
    circ = Circuit(lay.num_qubits)
    lo, hi = -reach_range, reach_range
    for j, c in enumerate(config.velocities):
        if c == 0 or hi == lo:
            continue
        if c > 0:
            pairs = [(o, o - 1) for o in range(hi, lo, -1)]
        else:
            pairs = [(o, o + 1) for o in range(lo, hi)]
        for a, b in pairs:
            for qa, qb in zip(lay.f_qubits(a, j), lay.f_qubits(b, j)):
                circ.append(SWAP(qa, qb))
    return circ


def step_circuit(config: LbmConfig, collision: TruthTable, step_index: int) -> Circuit:
    circ = collision_circuit(config, collision, step_index)
    stream = streaming_circuit(config, config.extent - step_index * REACH, collision)
    circ.extend(stream.gates)
    return circ


def step(
    state: BranchState, config: LbmConfig, collision: TruthTable, step_index: int
) -> BranchState:
    return branch_run(step_circuit(config, collision, step_index), state)


def run(config: LbmConfig, field, collision: TruthTable) -> list[BranchState]:
    """States before the first and after every step."""
    states = [build_initial_state(config, field, collision)]
    for s in range(config.t):
        states.append(step(states[-1], config, collision, s))
    return states


# -- decoding and reference ------------------------------------------------


def decode_branch(config: LbmConfig, bits, collision: TruthTable | None = None) -> dict:
    """{offset: {"f": (f_0, ...), "anc": [sub-block values]}} for one branch."""
    lay = Layout(config, collision)
    row = np.asarray(bits)

    def value(qubits):
        v = 0
        for qb in qubits:
            v = (v << 1) | int(row[qb - lay.num_top])
        return v

    out = {}
    for o in lay.offsets:
        fs = tuple(value(lay.f_qubits(o, j)) for j in range(config.q))
        anc = [value(lay.anc_qubits(o, s)) for s in range(config.t)]
        out[o] = {"f": fs, "anc": anc}
    return out


def classical_collide(field: np.ndarray, table: TruthTable, Q_f) -> np.ndarray:
    return np.array([unpack(table.map[pack(row, Q_f)], Q_f) for row in field])


def classical_stream(field: np.ndarray, velocities) -> np.ndarray:
    out = np.empty_like(field)
    for j, c in enumerate(velocities):
        out[:, j] = np.roll(field[:, j], c)
    return out


def classical_reference(config: LbmConfig, field, collision: TruthTable) -> list[np.ndarray]:
    """Fields before the first and after every step on the full periodic grid."""
    f = _check_field(config, field)
    out = [f]
    for _ in range(config.t):
        f = classical_stream(classical_collide(f, collision, config.Q_f), config.velocities)
        out.append(f)
    return out


@dataclass
class Comparison:
    matches: bool
    mismatches: list[tuple[int, str]]

    @property
    def count(self) -> int:
        return len(self.mismatches)


def compare_with_reference(
    config: LbmConfig, field, collision: TruthTable, final: BranchState
) -> Comparison:
    """Check every live branch: centre registers equal the classical field
    after t steps and, in full mode, each ancilla sub-block holds the
    pre-collision field of its step wherever that offset was valid."""
    ref = classical_reference(config, field, collision)
    bad = []
    for i in range(config.Nx):
        if abs(final.top_amplitudes[i]) == 0:
            continue
        dec = decode_branch(config, final.bits[i], collision)
        if tuple(dec[0]["f"]) != tuple(ref[-1][i]):
            bad.append((i, f"centre {dec[0]['f']} != {tuple(ref[-1][i])}"))
        if config.ancilla_mode != "full":
            continue
        for s in range(config.t):
            for o in valid_offsets(config, s):
                want = pack(ref[s][(i + o) % config.Nx], config.Q_f)
                if dec[o]["anc"][s] != want:
                    bad.append((i, f"ancilla step {s} offset {o}"))
    return Comparison(not bad, bad)


@dataclass(frozen=True)
class BranchReadout:
    counts: dict[int, int]
    bitstrings: dict[int, str]
    total: int


def readout(state: BranchState, N: int, seed: int) -> BranchReadout:
    p = np.abs(state.top_amplitudes) ** 2
    draws = np.random.default_rng(seed).multinomial(N, p / p.sum())
    counts = {int(i): int(c) for i, c in enumerate(draws) if c}
    strings = state.branch_bitstrings()
    return BranchReadout(counts, {i: strings[i] for i in counts}, int(N))
