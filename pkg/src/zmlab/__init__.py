"""zmlab: numerical experiments on the multiplicity of Riemann zeta zeros.

Submodules:

* ``zeta``: zeta, chi, log-gamma, Hardy Z, derivatives
* ``zeros``: critical-line zero scan, N(T) and S(T), zero cache
* ``multiplicity``: winding-number certification, Jensen and moment probes
* ``bounds``: multiplicity bound evaluators and F_m
* ``kernel``, ``mollifier``, ``density``: smoothing kernels, Moebius mollifier
  identity, zero-density counters
* ``cli``: the ``zmlab`` command
"""

from .errors import (CertificationError, CoverageError, PoleError, PrecisionError,
                     QuadratureError, ZeroCountMismatch, ZmlabError)
from .zeta import SPoint, EvalResult, hardy_z, zeta, zeta_deriv
from .zeros import ZeroRecord, scan_zeros

__version__ = "0.1.0"

__all__ = [
    "CertificationError", "CoverageError", "EvalResult", "PoleError", "PrecisionError",
    "QuadratureError", "SPoint", "ZeroCountMismatch", "ZeroRecord", "ZmlabError",
    "hardy_z", "scan_zeros", "zeta", "zeta_deriv",
]
