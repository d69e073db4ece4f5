import sympy as sp

from qencost.reference import WITNESS_COORDS, WITNESS_IMAGE, WITNESS_RANK
from qencost.witness import (
    BASIS_INDICES, PROBE_INDEX, bits_of, branch_vector, demanded_output_index,
    input_vectors, streaming_nonlinearity_witness,
)


def test_rank_seven():
    assert streaming_nonlinearity_witness().rank == WITNESS_RANK


def test_coordinates_and_image():
    r = streaming_nonlinearity_witness()
    assert tuple(r.probe_coords) == WITNESS_COORDS
    assert tuple(r.probe_image_coords) == WITNESS_IMAGE
    assert r.contradiction


def test_everything_is_exact():
    r = streaming_nonlinearity_witness()
    for m in (r.D, r.probe_coords, r.probe_image_coords):
        assert all(isinstance(x, sp.Integer) for x in m)


def test_probe_reconstructs_input():
    r = streaming_nonlinearity_witness()
    assert r.basis * r.probe_coords == input_vectors()[PROBE_INDEX - 1]


def test_map_honours_basis_inputs():
    r = streaming_nonlinearity_witness()
    full = r.basis * r.D * r.basis.inv()
    vecs = input_vectors()
    for m in BASIS_INDICES:
        assert full * vecs[m - 1] == vecs[demanded_output_index(m) - 1]


def test_exchange_relabels_bits():
    for m in range(1, 17):
        a, b, c, d = bits_of(m)
        a2, b2, c2, d2 = bits_of(demanded_output_index(m))
        assert (a2, b2, c2, d2) == (a, d, c, b)


def test_branch_vector_shape():
    v = branch_vector(1, 0, 0, 1)
    assert list(v).count(1) == 2 and v[2] == 1 and v[5] == 1


def test_report_text():
    lines = streaming_nonlinearity_witness().lines()
    assert lines[0].endswith("7")
    assert "contradiction" in lines[-1]
