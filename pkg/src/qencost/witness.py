"""Exact check that exchanging streamed registers between branches is not a
linear map.

Branch states |0>|a b> + |1>|c d> over 3 qubits (unnormalized) are asked to
become |0>|a d> + |1>|c b>. Only 7 of the 16 inputs are independent, so a
linear map is fixed by 7 of them plus one free basis vector; it then sends
some other input to the wrong place.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

BASIS_INDICES = (1, 2, 5, 8, 10, 11, 13)  # 1-based, in order
PROBE_INDEX = 3


def branch_vector(a: int, b: int, c: int, d: int) -> sp.Matrix:
    v = sp.zeros(8, 1)
    v[2 * a + b] = 1
    v[4 + 2 * c + d] = 1
    return v


def bits_of(index: int) -> tuple[int, int, int, int]:
    """1-based table index -> (a, b, c, d)."""
    k = index - 1
    return tuple((k >> s) & 1 for s in (3, 2, 1, 0))


def demanded_output_index(index: int) -> int:
    a, b, c, d = bits_of(index)
    return 1 + (a << 3 | d << 2 | c << 1 | b)


def input_vectors() -> list[sp.Matrix]:
    return [branch_vector(*bits_of(m)) for m in range(1, 17)]


@dataclass
class WitnessReport:
    rank: int
    mapping: dict[int, int]
    basis: sp.Matrix  # columns are the chosen basis vectors
    D: sp.Matrix  # map in that basis
    probe_coords: sp.Matrix
    probe_image_coords: sp.Matrix
    demanded_coords: sp.Matrix

    @property
    def contradiction(self) -> bool:
        return self.probe_image_coords != self.demanded_coords

    def lines(self) -> list[str]:
        def row(m):
            return "(" + ", ".join(str(x) for x in m) + ")"

        out = [f"rank of the 16 input vectors: {self.rank}"]
        out.append(
            "input -> output index: "
            + ", ".join(f"{k}->{v}" for k, v in self.mapping.items())
        )
        out.append(f"basis: inputs {list(BASIS_INDICES)} plus unit vector e8")
        out.append("map in basis B:")
        out.extend("  " + row(self.D.row(i)) for i in range(self.D.rows))
        out.append(f"input {PROBE_INDEX} in basis B: {row(self.probe_coords)}")
        out.append(f"its image under the map: {row(self.probe_image_coords)}")
        out.append(
            f"demanded image (input {self.mapping[PROBE_INDEX]}): {row(self.demanded_coords)}"
        )
        out.append(
            "contradiction: no linear map realizes the exchange"
            if self.contradiction
            else "no contradiction found"
        )
        return out


def streaming_nonlinearity_witness() -> WitnessReport:
    vecs = input_vectors()
    mapping = {m: demanded_output_index(m) for m in range(1, 17)}
    rank = sp.Matrix.hstack(*vecs).rank()
    e8 = sp.zeros(8, 1)
    e8[7] = 1
    basis = sp.Matrix.hstack(*[vecs[m - 1] for m in BASIS_INDICES], e8)
    images = sp.Matrix.hstack(*[vecs[mapping[m] - 1] for m in BASIS_INDICES], e8)
    inv = basis.inv()
    D = inv * images
    probe = inv * vecs[PROBE_INDEX - 1]
    demanded = inv * vecs[mapping[PROBE_INDEX] - 1]
    return WitnessReport(rank, mapping, basis, D, probe, D * probe, demanded)
