import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qencost.errors import NonFiniteValue, WidthMismatch
from qencost.funcsynth import (
    FUNCTIONS, Discretization, TruthTable, cover_rows, discretize, evaluate,
    round_half_away, synth_naive, synth_optimized, synthesize, verify,
)
from qencost.reference import X2_TABLE
from qencost.sim import StateVector, run_circuit


def x2_table():
    return discretize(FUNCTIONS["x2"], Discretization(2, 3))


def test_x2_table():
    assert tuple(o for _, o in x2_table().rows()) == X2_TABLE


def test_x2_by_hand():
    # x_i = 2i/7, y = x^2, output level = round(y / (2/7))
    want = [round_half_away((2 * i / 7) ** 2 / (2 / 7)) for i in range(8)]
    assert list(x2_table().map) == [min(w, 7) for w in want]


def test_round_half_away():
    assert [round_half_away(v) for v in (0.5, 1.5, 2.5, -0.5, 2.49)] == [1, 2, 3, -1, 2]


def test_discretize_clamps():
    t = discretize(lambda x: -x, Discretization(1, 2))
    assert t.map == (0, 0, 0, 0)


def test_nonfinite():
    with pytest.raises(NonFiniteValue):
        discretize(lambda x: 1 / x if x else math.inf, Discretization(1, 2))


def test_table_width_checks():
    with pytest.raises(WidthMismatch):
        TruthTable(2, 2, (0, 1, 2))
    with pytest.raises(WidthMismatch):
        TruthTable(1, 1, (0, 2))


@pytest.mark.parametrize("mode", ["naive", "opt"])
def test_x2_circuits(mode):
    t = x2_table()
    fc = synthesize(t, mode)
    assert verify(fc, t)
    for _, anc in evaluate(fc, 3):
        assert all(a == 0 for a in anc)


def test_x2_optimized_resources():
    fc = synth_optimized(x2_table())
    assert fc.num_ancillas == 2
    assert len(fc.circuit) < len(synth_naive(x2_table()).circuit)


def test_x2_dense_simulation():
    t = x2_table()
    fc = synth_optimized(t)
    n = fc.circuit.num_qubits
    for r in range(8):
        bits = format(r, "03b") + "0" * (n - 3)
        out = run_circuit(fc.circuit, StateVector.from_bits(bits))
        idx = int(np.argmax(np.abs(out.amplitudes)))
        assert format(idx, f"0{n}b")[:3] == format(t.map[r], "03b")


def test_identity_needs_nothing():
    fc = synth_optimized(TruthTable.identity(3))
    assert fc.num_ancillas == 0 and len(fc.circuit) == 0


def test_without_reset_ancillas_hold_old_input():
    t = x2_table()
    fc = synth_naive(t, reset=False)
    for r, (val, anc) in enumerate(evaluate(fc, 3)):
        assert val == t.map[r]
        assert anc == tuple(int(b) for b in format(r, "03b"))


def test_cover_rows_disjoint_and_exact():
    wrong = {0, 1, 2, 3, 6}
    cubes = cover_rows(wrong, 3)
    hit = []
    for cube in cubes:
        hit += [r for r in range(8) if all((r >> (2 - k)) & 1 == b for k, b in cube.items())]
    assert sorted(hit) == sorted(wrong)


tables = st.integers(1, 4).flatmap(
    lambda d: st.lists(st.integers(0, (1 << d) - 1), min_size=1 << d, max_size=1 << d).map(
        lambda m: TruthTable(d, d, tuple(m))
    )
)


@settings(max_examples=120, deadline=None)
@given(tables, st.booleans())
def test_both_modes_realize_any_table(t, reset):
    for mode in ("naive", "opt"):
        assert verify(synthesize(t, mode, reset=reset), t)


@settings(max_examples=120, deadline=None)
@given(tables)
def test_optimized_never_larger(t):
    naive, opt = synth_naive(t), synth_optimized(t)
    assert opt.num_ancillas <= naive.num_ancillas
    assert len(opt.circuit) <= len(naive.circuit)


@pytest.mark.parametrize("name", sorted(FUNCTIONS))
def test_named_functions(name):
    t = discretize(FUNCTIONS[name], Discretization(1.0, 3))
    assert verify(synth_optimized(t), t)


def test_unknown_mode():
    with pytest.raises(ValueError):
        synthesize(x2_table(), "clever")
