"""Rational approximations ``Q(j) = s / 2n`` under finite knowledge of ``j``.

The controller knows only the first ``k`` decimals of the coupling ``j``;
the pair evolves under the true value. The loop defect of a candidate is
``sin^2(2 n pi (j_true - s / 2n))``, which is ``1 - F`` at ``theta = 0``.

Since ``s`` is an integer, the defect equals ``sin^2(2 pi n j_true)`` and
only ``n`` matters. The best ``n <= n_max`` for the scan is therefore the
largest continued-fraction convergent denominator of ``2 j_true`` not
exceeding ``n_max``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class ApproxCandidate:
    n: int
    s: int
    q: Fraction
    delta: float
    cost: float

    @classmethod
    def build(cls, j_true: float, n: int, s: int) -> "ApproxCandidate":
        delta = j_true - s / (2 * n)
        return cls(n=n, s=s, q=Fraction(s, 2 * n), delta=delta, cost=defect(n, delta))


@dataclass(frozen=True)
class SweepRecord:
    j_true: float
    j_known: float
    best: ApproxCandidate

    @property
    def one_minus_f_max(self) -> float:
        return self.best.cost


def defect(n: int, delta: float) -> float:
    return math.sin(2 * math.pi * n * delta) ** 2


def _check_j(j: float) -> None:
    if not (0.0 < j <= 1.0):
        raise ValueError(f"j={j!r} outside (0, 1]")


def _check_k(k: int) -> None:
    if int(k) != k or not (1 <= k <= 12):
        raise ValueError(f"k={k!r} must be an integer in 1..12")


def truncate_fraction(j: float, k: int) -> Fraction:
    """First ``k`` decimals of the exact binary value of ``j``."""
    _check_j(j)
    _check_k(k)
    scale = 10 ** k
    return Fraction(int(Decimal(j) * scale), scale)


def truncate_digits(j: float, k: int) -> float:
    return float(truncate_fraction(j, k))


def _even_denominator(fr: Fraction) -> tuple[int, int]:
    """``(s, n)`` with ``s / 2n == fr`` and the smallest admissible ``n``."""
    p, q = fr.numerator, fr.denominator
    if q % 2:
        p, q = 2 * p, 2 * q
    return p, q // 2


def truncation_candidates(j_true: float, k: int) -> list[ApproxCandidate]:
    out = []
    for kk in range(1, k + 1):
        s, n = _even_denominator(truncate_fraction(j_true, kk))
        out.append(ApproxCandidate.build(j_true, n, s))
    return out


def convergent_denominators(x: Fraction, limit: int) -> list[int]:
    """Continued-fraction convergent denominators of ``x`` that are ``<= limit``."""
    out = [1]
    q_prev, q = 0, 1
    num, den = x.denominator, x.numerator % x.denominator
    while den:
        a, rem = divmod(num, den)
        q_prev, q = q, a * q + q_prev
        if q > limit:
            break
        if q != out[-1]:
            out.append(q)
        num, den = den, rem
    return out


def scan_candidate(j_true: float, j_known: Fraction, n: int) -> ApproxCandidate:
    return ApproxCandidate.build(j_true, n, round(2 * n * j_known))


def search_best(j_true: float, k: int, n_max: int | None = None) -> ApproxCandidate:
    """Lowest-defect ``Q(j)`` reachable from ``k`` known digits.

    Candidates are every reduced decimal truncation of length ``1..k`` and
    the scan ``n = 1..n_max`` with ``s = round(2 n j_known)``. Ties go to
    the smaller ``n``.
    """
    _check_j(j_true)
    _check_k(k)
    if n_max is None:
        n_max = 10 ** k
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    j_known = truncate_fraction(j_true, k)
    cands = truncation_candidates(j_true, k)
    for n in convergent_denominators(2 * Fraction(j_true), n_max):
        cands.append(scan_candidate(j_true, j_known, n))
    return min(cands, key=lambda c: (c.cost, c.n))


def truncation_bound(j_true: float, k: int) -> tuple[float, float]:
    """``n delta`` for the pure ``k``-digit truncation with ``n = 10^k``, and its bound.

    The bound is ``(a_{k+1} + 1) / 10`` with ``a_{k+1}`` the next decimal.
    """
    exact = Fraction(Decimal(j_true))
    tail = exact - truncate_fraction(j_true, k)
    n_delta = tail * 10 ** k
    next_digit = int(n_delta * 10)
    return float(n_delta), (next_digit + 1) / 10


def _record(args) -> SweepRecord:
    j, k, n_max = args
    return SweepRecord(j, truncate_digits(j, k), search_best(j, k, n_max))


def sweep_values(j_values, k: int, n_max: int | None = None, workers: int = 1) -> list[SweepRecord]:
    """Best candidate for each given ``j``; output sorted by ``j``."""
    jobs = [(float(j), k, n_max) for j in j_values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_record, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        records = [_record(a) for a in jobs]
    return sorted(records, key=lambda r: r.j_true)


def sample_j(count: int, seed: int) -> np.ndarray:
    """``count`` uniform draws on (0, 1]."""
    rng = np.random.default_rng(seed)
    return 1.0 - rng.random(count)


def omega(costs) -> np.ndarray:
    """Empirical CDF evaluated at each cost: fraction of costs ``<=`` it."""
    costs = np.asarray(costs, dtype=float)
    ordered = np.sort(costs)
    return np.searchsorted(ordered, costs, side="right") / len(costs)


def omega_table(costs) -> tuple[np.ndarray, np.ndarray]:
    """Distinct sorted costs and the CDF value reached at each."""
    costs = np.asarray(costs, dtype=float)
    values = np.unique(costs)
    return values, np.searchsorted(np.sort(costs), values, side="right") / len(costs)


def sweep(j_samples: int, k: int, n_max: int | None = None, seed: int = 0,
          workers: int = 1) -> tuple[list[SweepRecord], np.ndarray]:
    """Seeded sweep over random couplings.

    Returns the records sorted by ``j`` and the matching ``Omega`` column.
    """
    if j_samples < 100:
        raise ValueError("j_samples must be >= 100")
    records = sweep_values(sample_j(j_samples, seed), k, n_max, workers)
    return records, omega([r.one_minus_f_max for r in records])


def fraction_with_fidelity(records, threshold: float = 0.8) -> float:
    costs = np.array([r.one_minus_f_max for r in records])
    return float(np.mean(1.0 - costs >= threshold))
