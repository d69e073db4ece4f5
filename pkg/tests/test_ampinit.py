import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qencost.ampinit import (
    GateTimeProfile, build_circuit, coherence_headroom, cx_count, cx_depth,
    emit_block, multiplexor_angles, preparation_fidelity, random_target,
    rotation_depth, runtime_estimate, ry_count, rz_count, synthesize_init,
)
from qencost.errors import NotPowerOfTwo, UnnormalizedTarget
from qencost.sim import Circuit, StateVector, gate_matrix, Ry, Rz, run_circuit


def explicit_multiplexor(k: int, kind: str, thetas) -> np.ndarray:
    """Block-diagonal matrix: target qubit k, select qubits 0..k-1.

    Select value s uses bit p for the qubit p places above the target,
    i.e. qubit k-1-p, which is plain big-endian order of qubits 0..k-1.
    """
    n = k + 1
    dim = 1 << n
    u = np.zeros((dim, dim), dtype=complex)
    make = Ry if kind == "Ry" else Rz
    for s_index in range(1 << k):
        m = gate_matrix(make(0, thetas[s_index]))
        base = s_index << 1
        u[base:base + 2, base:base + 2] = m
    return u


def circuit_unitary(circ: Circuit) -> np.ndarray:
    n = circ.num_qubits
    return np.array(
        [run_circuit(circ, StateVector.basis(n, i)).amplitudes for i in range(1 << n)]
    ).T


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("kind", ["Ry", "Rz"])
def test_multiplexor_matches_block_diagonal(k, kind):
    rng = np.random.default_rng(k)
    thetas = rng.uniform(-math.pi, math.pi, 1 << k)
    circ = Circuit(k + 1)
    zeros = np.zeros(1 << k)
    if kind == "Ry":
        emit_block(circ, k, thetas, zeros)
    else:
        emit_block(circ, k, zeros, thetas)
    got = circuit_unitary(circ)
    want = explicit_multiplexor(k, kind, thetas)
    assert np.allclose(got, want, atol=1e-12)


def test_multiplexor_angles_constant():
    beta = multiplexor_angles([0.4] * 8)
    assert beta[0] == pytest.approx(0.4)
    assert np.allclose(beta[1:], 0)


def test_multiplexor_angles_length_check():
    with pytest.raises(NotPowerOfTwo):
        multiplexor_angles([1, 2, 3])


@pytest.mark.parametrize("n", range(1, 11))
def test_counts_and_depths(n):
    rep = synthesize_init(random_target(n, np.random.default_rng(n)))
    assert rep.ry_count == ry_count(n) == 2**n - 1
    assert rep.rz_count == rz_count(n) == 2**n - 1
    assert rep.cx_count == cx_count(n)
    assert rep.rotation_depth == rotation_depth(n)
    assert rep.cx_depth == cx_depth(n)
    assert rep.total_depth == rotation_depth(n) + cx_depth(n)


def test_small_counts():
    assert [cx_count(n) for n in (1, 2, 3)] == [0, 2, 8]
    assert [rotation_depth(n) for n in (1, 2, 3)] == [2, 5, 12]


def test_uniform_two_qubit():
    target = StateVector(2, np.full(4, 0.5))
    assert preparation_fidelity(target) == pytest.approx(1.0, abs=1e-12)


def test_basis_target():
    for i in range(8):
        assert preparation_fidelity(StateVector.basis(3, i)) == pytest.approx(1.0, abs=1e-12)


def test_unnormalized_rejected():
    with pytest.raises(UnnormalizedTarget):
        synthesize_init(StateVector(1, [1.0, 1.0]))


def test_bad_length_rejected():
    with pytest.raises(NotPowerOfTwo):
        build_circuit(np.ones(3) / math.sqrt(3))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_fidelity_with_zeros(n, seed, zeros):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    v[rng.choice(1 << n, size=min(zeros, (1 << n) - 1), replace=False)] = 0
    target = StateVector(n, v / np.linalg.norm(v))
    assert preparation_fidelity(target) >= 1 - 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.floats(-math.pi, math.pi))
def test_global_phase_irrelevant(n, phi):
    t = random_target(n, np.random.default_rng(n))
    shifted = StateVector(n, t.amplitudes * np.exp(1j * phi))
    assert preparation_fidelity(shifted) >= 1 - 1e-10


def test_runtime_formula():
    prof = GateTimeProfile(50e-9, 200e-9)
    assert runtime_estimate(10, prof) == pytest.approx(507.05e-6, rel=1e-12)
    assert runtime_estimate(1, prof) == pytest.approx(100e-9, rel=1e-12)


def test_runtime_monotone_in_n():
    prof = GateTimeProfile(56.889e-9, 533.333e-9)
    vals = [runtime_estimate(n, prof) for n in range(1, 13)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_headroom():
    prof = GateTimeProfile(50e-9, 200e-9, coherence_budget=1e-3)
    assert coherence_headroom(10, prof) == pytest.approx(0.50705)
    assert coherence_headroom(10, GateTimeProfile(50e-9, 200e-9)) is None


def test_bad_profile():
    with pytest.raises(ValueError):
        GateTimeProfile(0, 1e-9)
