from __future__ import annotations

import mpmath
import pytest

from zmlab.multiplicity import certify_zeros
from zmlab.zeros import scan_zeros

mpmath.mp.dps = 30


@pytest.fixture(scope="session")
def zeros100():
    """Zeros with 0 < gamma <= 100, certified."""
    zeros = scan_zeros(2.0, 100.0)
    certify_zeros(zeros)
    return zeros


@pytest.fixture(scope="session")
def mp_ordinates():
    """The first 29 ordinates from mpmath (independent oracle)."""
    return [float(mpmath.zetazero(n).imag) for n in range(1, 30)]
