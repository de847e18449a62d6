"""
One-dimensional search helpers: coarse-grid bracketing, golden-section
maximization and bisection roots.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Sequence, Tuple

from scipy.optimize import bisect

from excitonflow.core.errors import ConfigurationError, NoMaximumInBracket, NoSignChange

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def uniform_grid(lo: float, hi: float, step: float) -> list:
    """lo, lo + step, ... up to hi inclusive (hi kept when it lands on the grid)."""
    if not step > 0:
        raise ConfigurationError(f"grid step must be > 0, got {step}")
    if hi < lo:
        raise ConfigurationError(f"grid bounds reversed: [{lo}, {hi}]")
    count = int(math.floor((hi - lo) / step + 1e-9))
    return [lo + k * step for k in range(count + 1)]


def bracket_maximum(grid: Sequence[float], values: Sequence[float]) -> Tuple[float, float, int]:
    """
    Neighbours of the coarse-grid maximum.

    Raises NoMaximumInBracket when the maximum sits on either end of the grid.
    """
    if len(grid) != len(values) or len(grid) == 0:
        raise ConfigurationError("grid and values must be non-empty and of equal length")
    best = max(range(len(values)), key=lambda k: values[k])
    if best == 0 or best == len(grid) - 1:
        logger.warning(
            "coarse maximum %.6g at grid edge %.6g of [%.6g, %.6g]",
            values[best], grid[best], grid[0], grid[-1],
        )
        raise NoMaximumInBracket(
            f"maximum at the edge of [{grid[0]:.6g}, {grid[-1]:.6g}] (param={grid[best]:.6g}); widen the bracket"
        )
    return grid[best - 1], grid[best + 1], best


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    rel_tol: float = 1e-3,
) -> Tuple[float, float]:
    """
    Maximize a unimodal f on [lo, hi] until the bracket is narrower than
    rel_tol times its midpoint magnitude. Returns the best (x, f(x)) seen.
    """
    a, b = min(lo, hi), max(lo, hi)
    tol = rel_tol * max(abs(a + b) / 2.0, 1e-12)
    h = b - a
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc, yd = f(c), f(d)
    best = (c, yc) if yc >= yd else (d, yd)

    while h > tol:
        if yc > yd:
            b, d, yd = d, c, yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
            if yc > best[1]:
                best = (c, yc)
        else:
            a, c, yc = c, d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)
            if yd > best[1]:
                best = (d, yd)
    return best


def find_root(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-4) -> float:
    """Bisection root of f on [lo, hi]; f(lo) and f(hi) must differ in sign."""
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        logger.warning("no sign change on [%.6g, %.6g]: f=%.3g, %.3g", lo, hi, f_lo, f_hi)
        raise NoSignChange(f"f does not change sign on [{lo:.6g}, {hi:.6g}] ({f_lo:.3g}, {f_hi:.3g})")
    return float(bisect(f, lo, hi, xtol=xtol))


__all__ = ["uniform_grid", "bracket_maximum", "golden_section_max", "find_root"]
