"""Coupled companion-transform solver on the upper half-plane and real axis.

The system couples two scalar transforms (s, g) of the limiting spectral
distribution through atom denominators 1 + u*g + t*s. ``solve_at`` finds
the unique upper-half-plane solution by damped fixed-point iteration;
``boundary_value`` continues it down to the real axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .exceptions import (
    ContinuationError,
    ConvergenceError,
    PoleError,
    SingularTransformError,
)
from .spectrum import ModelConfig, spectrum_arrays


@dataclass(frozen=True)
class SolveSettings:
    """Tolerances and budgets for the fixed-point solver and continuation."""

    tol: float = 1e-10
    max_iter: int = 10000
    damping: float = 0.5
    v_start: float = 1.0
    v_min: float = 1e-8

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not (0.0 < self.damping <= 1.0):
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")
        if not (0.0 < self.v_min <= self.v_start):
            raise ValueError("need 0 < v_min <= v_start")


DEFAULT_SETTINGS = SolveSettings()


@dataclass(frozen=True)
class StieltjesPair:
    """Solution pair (s_under, g_under) of the inverted system at a point z."""

    z: complex
    s_under: complex
    g_under: complex


def residual_713(pair: StieltjesPair, cfg: ModelConfig) -> tuple[float, float]:
    """Absolute residuals of the two inverted equations at the pair.

    Raises PoleError when z, s, g, or an atom denominator magnitude falls
    below 1e-14.
    """
    u, t, w = spectrum_arrays(cfg.spectrum)
    r1, r2, status = K.residual_pair(
        complex(pair.z), complex(pair.s_under), complex(pair.g_under), u, t, w, cfg.y
    )
    if status == K.POLE:
        raise PoleError(f"denominator below {K.POLE_EPS} at z={pair.z!r}")
    return float(r1), float(r2)


def residual_712(s: complex, g: complex, z: complex, cfg: ModelConfig) -> tuple[float, float]:
    """Residuals of the original (non-companion) equation system at (s, g, z)."""
    u, t, w = spectrum_arrays(cfg.spectrum)
    y = cfg.y
    if abs(1.0 + y * g) < K.POLE_EPS:
        raise PoleError("1 + y*g vanished in the original system")
    den = u / (1.0 + y * g) - (1.0 + y * s * t) * z + t * (1.0 - y)
    if np.min(np.abs(den)) < K.POLE_EPS:
        raise PoleError("atom denominator vanished in the original system")
    rhs1 = np.sum(w / den)
    rhs2 = np.sum(w * t / den)
    return float(abs(s - rhs1)), float(abs(g - rhs2))


def to_companion(s: complex, g: complex, z: complex, y: float) -> StieltjesPair:
    """Map the original pair (s, g) at z to the companion pair.

    s_under = -(1-y)/z + y*s and g_under = -1/(z*(1+y*g)).
    """
    if abs(z) < K.POLE_EPS:
        raise SingularTransformError("z = 0 in companion transform")
    den = z * (1.0 + y * g)
    if abs(den) < K.POLE_EPS:
        raise SingularTransformError("z*(1+y*g) vanished in companion transform")
    return StieltjesPair(z=z, s_under=-(1.0 - y) / z + y * s, g_under=-1.0 / den)


def from_companion(pair: StieltjesPair, y: float) -> tuple[complex, complex]:
    """Invert the companion transform back to the original pair (s, g)."""
    if y == 0.0:
        raise SingularTransformError("y = 0 has no original pair")
    z = pair.z
    zg = z * pair.g_under
    if abs(z) < K.POLE_EPS or abs(zg) < K.POLE_EPS:
        raise SingularTransformError("z*g_under vanished in inverse transform")
    s = (pair.s_under + (1.0 - y) / z) / y
    g = (-1.0 / zg - 1.0) / y
    return s, g


def constraint_residual(pair: StieltjesPair, cfg: ModelConfig) -> float:
    """Residual of the compatibility constraint tying s, g, and the u-moment."""
    u, t, w = spectrum_arrays(cfg.spectrum)
    return float(
        K.constraint_residual(
            complex(pair.s_under), complex(pair.g_under), u, t, w, cfg.y
        )
    )


def _damping_ladder(first: float):
    ladder = [first]
    for d in (0.25, 0.1, 0.05):
        if d < ladder[-1]:
            ladder.append(d)
    return ladder


def _solve_warm(z, cfg, settings, s0, g0):
    """Fixed-point solve from an explicit starting pair.

    On a stall (critical slowing near support edges) a damped Newton
    polish takes over from the last iterate; remaining failures retry the
    fixed point with heavier damping from the canonical guess.
    """
    u, t, w = spectrum_arrays(cfg.spectrum)
    last = (np.inf, np.inf)
    iters = 0
    for damping in _damping_ladder(settings.damping):
        s, g, r1, r2, it, status = K.fixed_point(
            complex(z), u, t, w, cfg.y, complex(s0), complex(g0),
            settings.tol, settings.max_iter, damping,
        )
        iters += it
        if status == K.OK:
            # polish toward machine residuals; Newton only accepts
            # improving steps, so the contract never degrades
            s2, g2, q1, q2, _it, _st = K.newton_pair(
                complex(z), u, t, w, cfg.y, s, g, settings.tol * 1e-4, 25
            )
            if max(q1, q2) <= max(r1, r2):
                s, g = s2, g2
            return StieltjesPair(z=complex(z), s_under=s, g_under=g)
        if status == K.NO_CONVERGE:
            s, g, r1, r2, it, status = K.newton_pair(
                complex(z), u, t, w, cfg.y, s, g, settings.tol, 100
            )
            iters += it
            if status == K.OK:
                return StieltjesPair(z=complex(z), s_under=s, g_under=g)
        last = (float(r1), float(r2))
        # restart heavier damping from the canonical guess
        s0 = g0 = -1.0 / complex(z)
    raise ConvergenceError(z, last, iters)


def solve_at(z: complex, cfg: ModelConfig, settings: SolveSettings = DEFAULT_SETTINGS) -> StieltjesPair:
    """Unique upper-half-plane solution pair at z (requires Im z > 0).

    Starts from s = g = -1/z, exact in the y -> 0 and |z| -> infinity
    limits, and damps the alternating update until both residuals drop
    below settings.tol.
    """
    z = complex(z)
    if not z.imag > 0.0:
        raise ValueError(f"solve_at requires Im z > 0, got z={z!r}")
    return _solve_warm(z, cfg, settings, -1.0 / z, -1.0 / z)


def boundary_value(x: float, cfg: ModelConfig, settings: SolveSettings = DEFAULT_SETTINGS) -> StieltjesPair:
    """Real-axis limit of the solution pair at x != 0.

    Continues geometrically from v_start down to v_min, warm-starting each
    height from the last, then polishes at v = 0 keeping the upper-half-
    plane projection active. Falls back to the v_min pair if the final
    polish does not converge.
    """
    if x == 0.0:
        raise ValueError("boundary values are undefined at x = 0")
    v = settings.v_start
    z = complex(x, v)
    s0 = g0 = -1.0 / z
    while True:
        z = complex(x, v)
        try:
            pair = _solve_warm(z, cfg, settings, s0, g0)
        except ConvergenceError as exc:
            raise ContinuationError(x, v) from exc
        s0, g0 = pair.s_under, pair.g_under
        if v <= settings.v_min:
            break
        v = max(v / 2.0, settings.v_min)

    try:
        pair = _solve_warm(complex(x, 0.0), cfg, settings, s0, g0)
    except ConvergenceError:
        return pair

    # Off the support the limit pair is real; when the imaginary parts are
    # already a small fraction of the magnitudes, restart from the real
    # parts so the iteration stays exactly real and lands on the limit.
    s, g = pair.s_under, pair.g_under
    rel_im = max(
        abs(s.imag) / max(1.0, abs(s)),
        abs(g.imag) / max(1.0, abs(g)),
    )
    if rel_im < 1e-3:
        try:
            return _solve_warm(
                complex(x, 0.0), cfg, settings,
                complex(s.real, 0.0), complex(g.real, 0.0),
            )
        except ConvergenceError:
            pass
    return pair
