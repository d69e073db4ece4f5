"""Exact probability that N = z*ntilde uniform samples land every outcome
count inside the band |k/N - 1/ntilde| <= eps/ntilde.

Outcome counts are z + s for an excitation level s. A configuration fixes how
many outcomes v_s sit at each level; it contributes
multinomial(N; counts) * multinomial(ntilde; occupations) sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .errors import DomainError, TooLarge
from .readout import as_fraction

BRUTE_FORCE_CAP = 10**7


def multinomial(n: int, parts) -> int:
    parts = list(parts)
    if sum(parts) != n or any(p < 0 for p in parts):
        raise ValueError("parts must be non-negative and sum to n")
    out = math.factorial(n)
    for p in parts:
        out //= math.factorial(p)
    return out


@dataclass(frozen=True)
class ExcitationConfig:
    j: int
    z: int
    v: dict[int, int]  # level s -> number of outcomes with count z + s

    def counts(self) -> list[int]:
        """K: one count per outcome, levels ascending."""
        out = []
        for s in sorted(self.v):
            out.extend([self.z + s] * self.v[s])
        return out

    def occupations(self) -> list[int]:
        return [self.v[s] for s in sorted(self.v)]

    def weight(self) -> int:
        """Number of outcome sequences realising this configuration."""
        n_tilde = sum(self.v.values())
        N = self.z * n_tilde
        return multinomial(N, self.counts()) * multinomial(n_tilde, self.occupations())


def extension_level(z: int, epsilon) -> int:
    """Largest j with j/z <= eps, evaluated exactly."""
    return math.floor(z * as_fraction(epsilon))


def _compositions(total: int, slots: int):
    """All tuples of `slots` non-negative ints summing to total, lexicographic."""
    if slots == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, slots - 1):
            yield (first,) + rest


def enumerate_configs(n_tilde: int, z: int, epsilon) -> list[ExcitationConfig]:
    if n_tilde < 1 or z < 1:
        raise DomainError("n_tilde and z must be positive")
    if as_fraction(epsilon) < 0:
        raise DomainError("epsilon must be non-negative")
    j = extension_level(z, epsilon)
    # counts cannot go negative and cannot exceed N
    levels = [s for s in range(-j, j + 1) if 0 <= z + s <= z * n_tilde]
    out = []
    for occ in _compositions(n_tilde, len(levels)):
        if sum(s * v for s, v in zip(levels, occ)) != 0:
            continue
        v = {s: c for s, c in zip(levels, occ) if c}
        out.append(ExcitationConfig(j, z, v))
    return out


@dataclass(frozen=True)
class DeltaResult:
    n_tilde: int
    z: int
    epsilon: float
    j: int
    configs: int
    value: Fraction  # 1 - delta

    @property
    def value_float(self) -> float:
        return float(self.value)

    def as_dict(self) -> dict:
        return {
            "n_tilde": self.n_tilde,
            "z": self.z,
            "epsilon": self.epsilon,
            "j": self.j,
            "configs": self.configs,
            "value_rational": f"{self.value.numerator}/{self.value.denominator}",
            "value_float": self.value_float,
        }


def delta_exact(n_tilde: int, z: int, epsilon) -> DeltaResult:
    """1 - delta for N = z*n_tilde shots, as an exact rational."""
    configs = enumerate_configs(n_tilde, z, epsilon)
    N = z * n_tilde
    good = sum(c.weight() for c in configs)
    return DeltaResult(
        n_tilde, z, epsilon, extension_level(z, epsilon), len(configs),
        Fraction(good, n_tilde**N),
    )


def delta_exact_shots(n_tilde: int, N: int, epsilon) -> DeltaResult:
    if N % n_tilde:
        raise DomainError(f"N={N} is not a multiple of n_tilde={n_tilde}")
    return delta_exact(n_tilde, N // n_tilde, epsilon)


def band_count_range(n_tilde: int, N: int, epsilon) -> tuple[int, int]:
    """Inclusive range of per-outcome counts k with |k n_tilde - N| <= eps N."""
    eps = as_fraction(epsilon)
    lo = math.ceil(Fraction(N, n_tilde) * (1 - eps))
    hi = math.floor(Fraction(N, n_tilde) * (1 + eps))
    return max(lo, 0), min(hi, N)


def delta_bruteforce(n_tilde: int, N: int, epsilon, cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """1 - delta by walking every one of the n_tilde^N outcome sequences."""
    if n_tilde < 1 or N < 0:
        raise DomainError("n_tilde must be positive and N non-negative")
    total = n_tilde**N
    if total > cap:
        raise TooLarge(f"{n_tilde}^{N} = {total} sequences exceeds cap {cap}")
    lo, hi = band_count_range(n_tilde, N, epsilon)
    if lo > hi:
        return Fraction(0)
    good = kernels.count_band_sequences(n_tilde, N, lo, hi)
    return Fraction(good, total)
