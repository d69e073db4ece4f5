"""Circuits that write f(x) for a bitstring-encoded register x.

Data qubits 0..d-1 hold the input (qubit 0 = most significant digit). Output
digits are computed into ancillas, swapped into the data register, and the
ancillas (now holding the old input digits) are optionally reset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteValue, WidthMismatch
from .sim import CX, MCX, SWAP, X, BranchState, Circuit, Reset, branch_run


@dataclass(frozen=True)
class TruthTable:
    d_in: int
    d_out: int
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(v) for v in self.map))
        if len(self.map) != 1 << self.d_in:
            raise WidthMismatch(f"need {1 << self.d_in} rows, got {len(self.map)}")
        if any(not 0 <= v < 1 << self.d_out for v in self.map):
            raise WidthMismatch(f"outputs must fit in {self.d_out} bits")

    def out_digit(self, row: int, digit: int) -> int:
        return (self.map[row] >> (self.d_out - 1 - digit)) & 1

    def in_digit(self, row: int, digit: int) -> int:
        return (row >> (self.d_in - 1 - digit)) & 1

    def rows(self) -> list[tuple[str, str]]:
        return [
            (format(i, f"0{self.d_in}b"), format(o, f"0{self.d_out}b"))
            for i, o in enumerate(self.map)
        ]

    @classmethod
    def identity(cls, d: int) -> "TruthTable":
        return cls(d, d, tuple(range(1 << d)))


@dataclass(frozen=True)
class Discretization:
    phi: float
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if not self.phi > 0:
            raise ValueError("phi must be positive")

    @property
    def levels(self) -> int:
        return (1 << self.d) - 1

    @property
    def unit(self) -> float:
        return self.phi / self.levels

    def value(self, i: int) -> float:
        return i * self.phi / self.levels


def round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def discretize(f, disc: Discretization) -> TruthTable:
    top = disc.levels
    out = []
    for i in range(top + 1):
        y = f(disc.value(i))
        if not math.isfinite(y):
            raise NonFiniteValue(f"f({disc.value(i)}) = {y}")
        out.append(min(max(round_half_away(y / disc.unit), 0), top))
    return TruthTable(disc.d, disc.d, tuple(out))


# -- synthesis -------------------------------------------------------------


@dataclass
class FunctionCircuit:
    """A synthesized circuit plus where its registers live."""

    circuit: Circuit
    data: tuple[int, ...]
    ancillas: tuple[int, ...]
    digit_of_ancilla: tuple[int, ...]  # output digit handled by each ancilla
    mode: str
    notes: list[str] = field(default_factory=list)

    @property
    def num_ancillas(self) -> int:
        return len(self.ancillas)


def _minterm(table: TruthTable, row: int, data) -> list[tuple[int, int]]:
    return [(data[k], table.in_digit(row, k)) for k in range(table.d_in)]


def _finish(circ, table, data, ancillas, digits, reset):
    for a, k in zip(ancillas, digits):
        circ.append(SWAP(data[k], a))
    if reset:
        for a in ancillas:
            circ.append(Reset(a))


def _layout(table, data, ancillas, count):
    d = table.d_in
    data = tuple(range(d)) if data is None else tuple(data)
    if ancillas is None:
        ancillas = tuple(range(d, d + count))
    ancillas = tuple(ancillas)
    if len(data) != d or len(ancillas) < count:
        raise WidthMismatch("register sizes do not match the table")
    return data, ancillas[:count]


def synth_naive(
    table: TruthTable, reset: bool = True, data=None, ancillas=None, num_qubits=None
) -> FunctionCircuit:
    """One ancilla per output digit, majority preset, one fully controlled X
    per (input row, digit) that disagrees with the preset."""
    if table.d_in != table.d_out:
        raise WidthMismatch("in-place synthesis needs d_in == d_out")
    d = table.d_in
    data, anc = _layout(table, data, ancillas, d)
    circ = Circuit(num_qubits if num_qubits is not None else 2 * d)
    rows = range(1 << d)
    presets = []
    for k in range(d):
        ones = sum(table.out_digit(r, k) for r in rows)
        preset = int(2 * ones > len(rows))
        presets.append(preset)
        if preset:
            circ.append(X(anc[k]))
    for r in rows:
        for k in range(d):
            if table.out_digit(r, k) != presets[k]:
                circ.append(MCX(anc[k], _minterm(table, r, data)))
    _finish(circ, table, data, anc, range(d), reset)
    return FunctionCircuit(circ, data, anc, tuple(range(d)), "naive")


def _cube_rows(cube: dict[int, int], d: int):
    """Input rows matching a partial assignment {digit: bit}."""
    for r in range(1 << d):
        if all((r >> (d - 1 - k)) & 1 == b for k, b in cube.items()):
            yield r


def cover_rows(wrong: set[int], d: int) -> list[dict[int, int]]:
    """Disjoint cubes covering exactly the rows in `wrong`.

    Each cube starts as a full minterm and drops controls greedily while
    every row it matches is still uncovered and wrong. Disjointness makes
    the resulting X gates toggle each wrong row exactly once.
    """
    left = set(wrong)
    cubes = []
    for r in sorted(wrong):
        if r not in left:
            continue
        cube = {k: (r >> (d - 1 - k)) & 1 for k in range(d)}
        for k in range(d):
            trial = {kk: b for kk, b in cube.items() if kk != k}
            if all(x in left for x in _cube_rows(trial, d)):
                cube = trial
        covered = set(_cube_rows(cube, d))
        left -= covered
        cubes.append(cube)
    return cubes


def _seed_choice(table: TruthTable, k: int):
    """Cheapest start for output digit k: ('const', b) or ('copy', input_digit,
    negate), and the rows it leaves wrong. Cost is the seed's own
    gates plus one cube per fix-up; ties keep the earlier candidate, constants
    first."""
    d = table.d_in
    rows = range(1 << d)
    want = [table.out_digit(r, k) for r in rows]
    candidates = [(("const", 0), [0] * len(rows), 0), (("const", 1), [1] * len(rows), 1)]
    for src in range(d):
        col = [table.in_digit(r, src) for r in rows]
        candidates.append((("copy", src, 0), col, 1))
        candidates.append((("copy", src, 1), [b ^ 1 for b in col], 2))
    best = None
    for choice, start, seed_cost in candidates:
        wrong = {r for r in rows if want[r] != start[r]}
        cost = seed_cost + len(cover_rows(wrong, d))
        if best is None or cost < best[0]:
            best = (cost, choice, wrong)
    return best[1], best[2]


def synth_optimized(
    table: TruthTable, reset: bool = True, data=None, ancillas=None, num_qubits=None
) -> FunctionCircuit:
    """Correlation-aware synthesis.

    Digits equal to the same input digit on every row keep their qubit and
    get no ancilla. Every other digit starts from whichever constant preset or
    (possibly negated) CX copy of an input digit gives the fewest gates, and
    the rows still wrong are fixed with multi-controlled X gates on merged
    cubes.
    """
    if table.d_in != table.d_out:
        raise WidthMismatch("in-place synthesis needs d_in == d_out")
    d = table.d_in
    rows = range(1 << d)
    kept = [
        k for k in range(d)
        if any(table.out_digit(r, k) != table.in_digit(r, k) for r in rows)
    ]
    data, anc = _layout(table, data, ancillas, len(kept))
    circ = Circuit(num_qubits if num_qubits is not None else d + len(kept))
    notes = [f"digit {k} unchanged, no ancilla" for k in range(d) if k not in kept]
    for a, k in zip(anc, kept):
        choice, wrong = _seed_choice(table, k)
        if choice[0] == "const":
            if choice[1]:
                circ.append(X(a))
        else:
            _, src, neg = choice
            circ.append(CX(data[src], a))
            if neg:
                circ.append(X(a))
            notes.append(f"digit {k} seeded from input digit {src}" + (" negated" if neg else ""))
        for cube in cover_rows(wrong, d):
            controls = [(data[kk], b) for kk, b in sorted(cube.items())]
            if controls:
                circ.append(MCX(a, controls))
            else:
                circ.append(X(a))
    _finish(circ, table, data, anc, kept, reset)
    return FunctionCircuit(circ, data, anc, tuple(kept), "optimized", notes)


def synthesize(table: TruthTable, mode: str = "naive", **kw) -> FunctionCircuit:
    if mode == "naive":
        return synth_naive(table, **kw)
    if mode in ("opt", "optimized"):
        return synth_optimized(table, **kw)
    raise ValueError(f"unknown mode {mode!r}")


def evaluate(fc: FunctionCircuit, d: int) -> list[tuple[int, tuple[int, ...]]]:
    """Run the circuit on every input basis state with ancillas |0>.

    Returns, per input row, the data register value and the ancilla bits.
    Each row is simulated as its own single-branch state.
    """
    n = fc.circuit.num_qubits
    out = []
    for r in range(1 << d):
        bits = np.zeros((1, n), dtype=np.uint8)
        for k in range(d):
            bits[0, fc.data[k]] = (r >> (d - 1 - k)) & 1
        res = branch_run(fc.circuit, BranchState([1.0], bits)).bits[0]
        val = 0
        for k in range(d):
            val = (val << 1) | int(res[fc.data[k]])
        out.append((val, tuple(int(res[a]) for a in fc.ancillas)))
    return out


def verify(fc: FunctionCircuit, table: TruthTable) -> bool:
    return all(val == table.map[r] for r, (val, _) in enumerate(evaluate(fc, table.d_in)))


FUNCTIONS = {
    "x2": lambda x: x * x,
    "identity": lambda x: x,
    "sqrt": math.sqrt,
    "sin": math.sin,
}
