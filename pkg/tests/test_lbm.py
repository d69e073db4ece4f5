import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qencost import lbm
from qencost.errors import AncillaExhausted, StaleDataRegion, ValueOutOfRange
from qencost.sim import run_circuit


def random_field(cfg, rng):
    return np.stack([rng.integers(0, 1 << w, cfg.Nx) for w in cfg.Q_f], axis=1)


def test_d1q2_qubit_budget():
    cfg = lbm.LbmConfig(4, 2, (1, 1), 1)
    # 2 top qubits + 3 offsets * (2 data + 2 ancilla)
    assert lbm.qubit_budget(cfg) == 14
    assert lbm.ancilla_ratio(cfg) == 1.0


def test_budget_grows_with_steps():
    sizes = [lbm.qubit_budget(lbm.LbmConfig(8, 3, (2, 2, 2), t)) for t in range(4)]
    # width * (1 + t) * (1 + 2t) per branch plus the top register
    assert sizes == [3 + 6 * (1 + t) * (1 + 2 * t) for t in range(4)]


def test_layout_is_disjoint_and_complete():
    cfg = lbm.LbmConfig(5, 3, (1, 2, 1), 2)
    lay = lbm.Layout(cfg)
    seen = []
    for o in lay.offsets:
        for j in range(cfg.q):
            seen += lay.f_qubits(o, j)
        for s in range(cfg.t):
            seen += lay.anc_qubits(o, s)
    assert sorted(seen) == list(range(lay.num_top, lay.num_qubits))


def test_pack_roundtrip():
    for word in range(64):
        assert lbm.pack(lbm.unpack(word, (1, 3, 2)), (1, 3, 2)) == word


@pytest.mark.parametrize("q,Q_f", [(2, (1, 1)), (2, (2, 3)), (3, (1, 1, 1)), (3, (2, 2, 2))])
def test_bgk_tables_conserve_mass(q, Q_f):
    t = lbm.bgk_table(q, Q_f)
    assert lbm.is_mass_conserving(t, Q_f)


@pytest.mark.parametrize("q,Q_f", [(2, (2, 3)), (3, (2, 2, 2)), (3, (3, 3, 3))])
def test_bgk_close_to_continuum_when_unclamped(q, Q_f):
    t = lbm.bgk_table(q, Q_f)
    st_ = lbm.STENCILS[q]
    for word in range(1 << t.d_in):
        f = lbm.unpack(word, Q_f)
        rho = sum(f)
        eq = [w * rho for w in st_["weights"]]
        if any(not 0 <= y <= (1 << w) - 1 for y, w in zip(eq, Q_f)):
            continue
        g = lbm.unpack(t.map[word], Q_f)
        # rounding moves each component by at most one half, mass repair by
        # at most one unit more
        assert max(abs(a - b) for a, b in zip(g, eq)) <= 1.5 + 1e-12


def test_d1q2_tau1_is_equal_split_rounded():
    t = lbm.bgk_table(2, (2, 2))
    for word in range(16):
        a, b = lbm.unpack(word, (2, 2))
        ga, gb = lbm.unpack(t.map[word], (2, 2))
        assert ga + gb == a + b and abs(ga - gb) <= 1


def test_field_checks():
    cfg = lbm.LbmConfig(3, 2, (1, 1), 1)
    with pytest.raises(ValueOutOfRange):
        lbm.build_initial_state(cfg, [[2, 0]] * 3)
    with pytest.raises(ValueOutOfRange):
        lbm.build_initial_state(cfg, [[0, 0]] * 2)


def test_config_checks():
    with pytest.raises(ValueError):
        lbm.LbmConfig(4, 5, (1,) * 5, 1)
    with pytest.raises(ValueError):
        lbm.LbmConfig(4, 2, (1, 1), 1, bc="wall")


def test_ancilla_exhausted():
    cfg = lbm.LbmConfig(4, 2, (1, 1), 1)
    with pytest.raises(AncillaExhausted):
        lbm.collision_circuit(cfg, lbm.bgk_table(2, (1, 1)), 1)


def test_stale_region():
    cfg = lbm.LbmConfig(5, 2, (1, 1), 2)
    table = lbm.bgk_table(2, (1, 1))
    with pytest.raises(StaleDataRegion):
        lbm.collision_circuit(cfg, table, 1, offsets=[-2, 0])


def test_valid_offsets_shrink():
    cfg = lbm.LbmConfig(7, 3, (1, 1, 1), 3)
    assert [len(lbm.valid_offsets(cfg, s)) for s in range(3)] == [7, 5, 3]


@pytest.mark.parametrize("seed", range(5))
def test_branch_equals_dense_d1q2(seed):
    cfg = lbm.LbmConfig(4, 2, (1, 1), 1)
    table = lbm.bgk_table(2, (1, 1))
    field = random_field(cfg, np.random.default_rng(seed))
    states = lbm.run(cfg, field, table)
    dense = run_circuit(lbm.step_circuit(cfg, table, 0), states[0].to_dense())
    assert np.array_equal(dense.amplitudes, states[1].to_dense().amplitudes)


@pytest.mark.parametrize(
    "Nx,q,Q_f,t,mode",
    [
        (4, 2, (1, 1), 1, "full"),
        (4, 2, (1, 1), 1, "optimized"),
        (5, 2, (2, 2), 2, "full"),
        (5, 3, (1, 1, 1), 2, "full"),
        (5, 3, (1, 1, 1), 2, "optimized"),
        (7, 3, (2, 1, 1), 3, "optimized"),
        (3, 3, (1, 1, 1), 1, "full"),
    ],
)
def test_matches_classical_reference(Nx, q, Q_f, t, mode):
    cfg = lbm.LbmConfig(Nx, q, Q_f, t, mode)
    table = lbm.bgk_table(q, Q_f)
    rng = np.random.default_rng(Nx * 100 + t)
    for _ in range(5):
        field = random_field(cfg, rng)
        final = lbm.run(cfg, field, table)[-1]
        cmp = lbm.compare_with_reference(cfg, field, table, final)
        assert cmp.matches, cmp.mismatches


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_mass_conserved(Nx, seed):
    cfg = lbm.LbmConfig(Nx, 3, (1, 1, 1), 1)
    table = lbm.bgk_table(3, (1, 1, 1))
    field = random_field(cfg, np.random.default_rng(seed))
    final = lbm.run(cfg, field, table)[-1]
    centre = [lbm.decode_branch(cfg, final.bits[i], table)[0]["f"] for i in range(Nx)]
    assert int(np.sum(centre)) == int(field.sum())


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_streaming_without_collision_is_a_roll(Nx, seed):
    cfg = lbm.LbmConfig(Nx, 3, (2, 2, 2), 1)
    ident = lbm.TruthTable.identity(6)
    field = random_field(cfg, np.random.default_rng(seed))
    final = lbm.run(cfg, field, ident)[-1]
    want = lbm.classical_stream(field, cfg.velocities)
    for i in range(Nx):
        assert lbm.decode_branch(cfg, final.bits[i], ident)[0]["f"] == tuple(want[i])


def test_readout_sampling():
    cfg = lbm.LbmConfig(3, 2, (1, 1), 0)
    state = lbm.build_initial_state(cfg, [[1, 0], [0, 1], [1, 1]])
    r = lbm.readout(state, 300, seed=1)
    assert sum(r.counts.values()) == 300
    assert set(r.counts) <= {0, 1, 2}
