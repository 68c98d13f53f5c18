"""Small quadrature and search routines used across the package.

These are deliberately plain: every routine is deterministic, takes its
tolerances explicitly and raises :class:`~zmlab.errors.QuadratureError`
instead of returning a silently unconverged answer.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import QuadratureError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section(f: Callable[[float], float], a: float, b: float,
                   tol: float = 1e-10, max_iter: int = 200) -> tuple[float, float]:
    """Golden-section search for the minimum of a unimodal ``f`` on ``[a, b]``.

    Returns ``(x_min, f(x_min))``.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(max_iter):
        if h <= tol:
            break
        if yc < yd:
            b, d, yd = d, c, yc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)
    return (c, yc) if yc < yd else (d, yd)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-9, max_depth: int = 50) -> tuple[float, float]:
    """Adaptive Simpson quadrature with Richardson correction.

    Returns ``(integral, error_estimate)``. The error estimate is the sum of
    the local ``|S2 - S1| / 15`` terms accepted along the way.
    """
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    total = 0.0
    err = 0.0
    # explicit stack keeps deep refinement off the Python recursion limit
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a0, b0, fa0, fm0, fb0, s, eps, depth = stack.pop()
        m0 = 0.5 * (a0 + b0)
        lm, rm = 0.5 * (a0 + m0), 0.5 * (m0 + b0)
        flm, frm = f(lm), f(rm)
        left = (m0 - a0) * (fa0 + 4.0 * flm + fm0) / 6.0
        right = (b0 - m0) * (fm0 + 4.0 * frm + fb0) / 6.0
        delta = left + right - s
        if abs(delta) <= 15.0 * eps or depth >= max_depth:
            if depth >= max_depth and abs(delta) > 15.0 * eps:
                raise QuadratureError(
                    f"adaptive Simpson did not converge on [{a0}, {b0}]")
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
        else:
            stack.append((m0, b0, fm0, frm, fb0, right, 0.5 * eps, depth + 1))
            stack.append((a0, m0, fa0, flm, fm0, left, 0.5 * eps, depth + 1))
    return total, err


def circle_nodes(center: complex, radius: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Equispaced nodes ``center + radius*e^{i theta_j}`` and ``e^{i theta_j}``."""
    theta = 2.0 * np.pi * np.arange(n) / n
    e = np.exp(1j * theta)
    return center + radius * e, e


@lru_cache(maxsize=16)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def panel_nodes(a: float, b: float, width: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``.

    The interval is cut into equal panels no wider than ``width``.
    """
    n_panels = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, n_panels + 1)
    x, w = _leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights
