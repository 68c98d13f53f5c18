"""Empirical multiplicity-density counters N^(r)(sigma, T) and N_r(T)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import CertificationError
from .zeros import ZeroRecord, _require_coverage


@dataclass(frozen=True)
class DensityCount:
    sigma: float
    T: float
    r: int
    count: int
    exact_mult: bool

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "T": self.T, "r": self.r, "count": self.count,
                "exact_mult": self.exact_mult}


def count_density(zeros: Sequence[ZeroRecord], sigma: float, T: float, r: int,
                  exact: bool = False) -> DensityCount:
    """Tally zeros with beta >= sigma and 0 < gamma <= T.

    exact=False gives N^(r): zeros with m >= r, where r = 1 counts each zero
    with its multiplicity (so N^(1)(sigma, T) = N(sigma, T)) and r >= 2
    counts distinct zeros. exact=True gives N_r: distinct zeros with m = r.
    """
    if r < 1 or int(r) != r:
        raise ValueError("r must be a positive integer")
    if T <= 0:
        raise ValueError("T must be positive")
    _require_coverage(zeros, 0.0, T)
    count = 0
    for z in zeros:
        if not (0.0 < z.gamma <= T and z.beta >= sigma):
            continue
        m = z.multiplicity
        if m is None:
            raise CertificationError(f"zero #{z.index} at gamma = {z.gamma:.10g} is not certified")
        if exact:
            count += m == r
        elif m >= r:
            count += m if r == 1 else 1
    return DensityCount(float(sigma), float(T), int(r), int(count), bool(exact))


def reference_curve(n_total: int, r: int, C: float = 1.0) -> float:
    """N(T) e^{-C sqrt(r)}, a comparison curve for N_r(T) with an unknown constant C."""
    if C <= 0:
        raise ValueError("C must be positive")
    return n_total * math.exp(-C * math.sqrt(r))
