"""Shot budgets for reading out a probability distribution, outlier
experiments on the uniform distribution, minimal-shot search and scaling fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, DegenerateData, DomainError
from .reference import EMPIRICAL_MIN_SHOTS

MODES = ("one_qubit_absolute", "multi_absolute", "multi_relative")

def as_fraction(x) -> Fraction:
    """Exact value of a decimal parameter: 0.1 means 1/10, not the double."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


@dataclass(frozen=True)
class RunBudget:
    epsilon: float
    delta: float
    n: int
    mode: str
    N: int
    raw: float  # value before the ceiling


def _check(epsilon, delta, n):
    if not 0 < epsilon <= 1:
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not 0 < delta <= 1:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")


def raw_budget(epsilon: float, delta: float, n: int, mode: str) -> float:
    _check(epsilon, delta, n)
    scale = 1.0 / (2.0 * epsilon * epsilon)
    if mode == "one_qubit_absolute":
        return scale * math.log(2.0 / delta)
    if mode == "multi_absolute":
        return scale * math.log(2.0 * (2**n - 1) / delta)
    if mode == "multi_relative":
        return scale * 4**n * math.log(2.0 * (2**n - 1) / delta)
    raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")


def run_budget(epsilon: float, delta: float, n: int, mode: str = "multi_relative") -> RunBudget:
    raw = raw_budget(epsilon, delta, n, mode)
    return RunBudget(epsilon, delta, n, mode, math.ceil(raw), raw)


# -- outlier experiments ---------------------------------------------------


@dataclass(frozen=True)
class StudyConfig:
    n: int
    epsilon: float
    delta: float
    F: int = 100
    seed: int = 0
    N_override: int | None = None

    def __post_init__(self):
        if self.F < 1:
            raise DomainError("F must be at least 1")
        _check(self.epsilon, self.delta, self.n)

    @property
    def experiments(self) -> int:
        return math.ceil(Fraction(self.F) / as_fraction(self.delta))

    @property
    def shots(self) -> int:
        if self.N_override is not None:
            return int(self.N_override)
        return run_budget(self.epsilon, self.delta, self.n, "multi_relative").N


@dataclass(frozen=True)
class StudyResult:
    N_used: int
    experiments: int
    outliers: int
    max_deviation: float  # worst 2^n |N_i/N - 1/2^n| / eps; >= 1 is outside the band


def band_violations(counts: np.ndarray, N: int, n: int, epsilon) -> np.ndarray:
    """Per row of counts: True when some |N_i/N - 1/2^n| >= eps/2^n.

    Evaluated exactly as |N_i 2^n - N| * den >= num * N with eps = num/den,
    so a count sitting exactly on the band edge is a violation.
    """
    eps = as_fraction(epsilon)
    dev = np.abs(counts.astype(np.int64) * (1 << n) - N)
    worst = dev.max(axis=1)
    # python ints avoid overflow for large N
    return np.array(
        [int(w) * eps.denominator >= eps.numerator * N for w in worst], dtype=bool
    )


def outlier_study(config: StudyConfig) -> StudyResult:
    n = config.n
    N = config.shots
    runs = config.experiments
    rng = np.random.default_rng(config.seed)
    p = np.full(1 << n, 1.0 / (1 << n))
    outliers = 0
    worst = 0.0
    # chunk to bound memory for large registers
    chunk = max(1, min(runs, (1 << 22) // (1 << n)))
    done = 0
    while done < runs:
        size = min(chunk, runs - done)
        counts = rng.multinomial(N, p, size=size)
        outliers += int(band_violations(counts, N, n, config.epsilon).sum())
        dev = np.abs(counts * (1 << n) - N).max() / N
        worst = max(worst, float(dev))
        done += size
    return StudyResult(N, runs, outliers, worst / float(config.epsilon))


# -- minimal-shot search ---------------------------------------------------


@dataclass
class MinShotsResult:
    N: int
    trace: list[tuple[int, int]] = field(default_factory=list)  # (N, outliers) per probe
    F: int = 100
    experiments: int = 0
    non_monotone: bool = False

    def outliers_at(self, N: int) -> int | None:
        for probe, out in self.trace:
            if probe == N:
                return out
        return None


def min_shots_search(
    n: int,
    epsilon: float,
    delta: float,
    F: int = 100,
    seed: int = 0,
    cap: int = 1 << 26,
) -> MinShotsResult:
    """Smallest N with at most F outliers among ceil(F/delta) experiments.

    N doubles from 1 until a probe passes and the next doubling passes too;
    a lone pass between failures is an artefact of the count lattice (for
    n=1, N=2 violates with probability exactly 1/2). Bisection then runs
    between the last failing and the first stable passing probe. Every probe
    re-runs the study with the same seed. A pass below some failing probe is
    reported through `non_monotone`.
    """
    cache: dict[int, int] = {}
    result = MinShotsResult(N=0, F=F)

    def passes(N):
        if N > cap:
            raise BudgetExceeded(f"search passed the cap of {cap} shots")
        if N not in cache:
            r = outlier_study(StudyConfig(n, epsilon, delta, F, seed, N_override=N))
            cache[N] = r.outliers
            result.trace.append((N, r.outliers))
            result.experiments = r.experiments
        return cache[N] <= F

    hi = 1
    while not (passes(hi) and passes(2 * hi)):
        hi *= 2
    # hi // 2 failed, otherwise the expansion would have stopped there
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    result.N = hi
    failing = [N for N, o in cache.items() if o > F]
    result.non_monotone = any(
        o <= F and any(f > N for f in failing) for N, o in cache.items()
    )
    return result


# -- scaling fits ----------------------------------------------------------

FIT_MODELS = ("linear", "n_log_n", "power")


@dataclass(frozen=True)
class FitResult:
    model: str
    params: tuple[float, ...]
    residual_norm: float


def fit_scaling(data, model: str) -> FitResult:
    """Least-squares fit of N against ntilde = 2^n.

    linear: N = a*x; n_log_n: N = a*x*ln(x); power: N = a*x^b fitted as a
    straight line in log-log space.
    """
    pts = [(float(x), float(y)) for x, y in data]
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if model in ("linear", "n_log_n"):
        basis = xs if model == "linear" else xs * np.log(xs)
        denom = float(basis @ basis)
        if len(pts) < 1 or denom == 0:
            raise DegenerateData("need at least one point with nonzero regressor")
        a = float(basis @ ys) / denom
        resid = float(np.linalg.norm(ys - a * basis))
        return FitResult(model, (a,), resid)
    if model == "power":
        if len(pts) < 2 or np.any(xs <= 0) or np.any(ys <= 0) or np.ptp(xs) == 0:
            raise DegenerateData("power fit needs two distinct positive points")
        b, loga = np.polyfit(np.log(xs), np.log(ys), 1)
        a = math.exp(loga)
        resid = float(np.linalg.norm(ys - a * xs**b))
        return FitResult(model, (a, float(b)), resid)
    raise DegenerateData(f"unknown model {model!r}; expected one of {FIT_MODELS}")


def empirical_points() -> list[tuple[int, int]]:
    return [(2**n, N) for n, N in sorted(EMPIRICAL_MIN_SHOTS.items())]
