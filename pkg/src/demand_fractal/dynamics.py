"""Complex quadratic dynamics: escape time, membership and classification.

Every operation iterates Z_{n+1} = Z_n^2 + C in double precision. A point
escapes at the first step t with |Z_t| > escape_radius; radius 2 is the
smallest bailout that is always correct for this map.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Union

import numpy as np

from demand_fractal import kernels
from demand_fractal.errors import InvalidParameter
from demand_fractal.models import (
    DerivativeSpace,
    EscapeResult,
    IterationConfig,
    ParameterClass,
    ParameterRegion,
)

ParameterLike = Union[complex, float, int, Sequence[float], str]

DEFAULT_BOUNDARY_EPSILON = 0.02
PROBE_POINTS = 8


def as_parameter(value: ParameterLike) -> complex:
    """Coerce ``value`` to a finite complex number.

    Accepts complex or real numbers, ``(re, im)`` pairs and ``"re,im"``
    strings.
    """
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",")]
        if len(parts) != 2:
            raise InvalidParameter(f"expected 're,im', got {value!r}")
        try:
            value = complex(float(parts[0]), float(parts[1]))
        except ValueError as exc:
            raise InvalidParameter(f"expected 're,im', got {value!r}") from exc
    elif isinstance(value, (tuple, list)):
        if len(value) != 2:
            raise InvalidParameter(f"expected a (re, im) pair, got {value!r}")
        value = complex(float(value[0]), float(value[1]))
    try:
        c = complex(value)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise InvalidParameter(f"not a complex number: {value!r}") from exc
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise InvalidParameter(f"complex parameter must be finite: {c!r}")
    return c


def iterate_escape(
    z0: ParameterLike,
    c: ParameterLike,
    cfg: IterationConfig | None = None,
    track_derivative: bool = False,
    space: DerivativeSpace = DerivativeSpace.PARAMETER,
) -> EscapeResult:
    """Iterate z <- z^2 + c from ``z0`` until escape or ``max_iter`` steps.

    With ``track_derivative`` the first variation is co-iterated: dZ/dC
    (d0 = 0) for PARAMETER runs, dZ/dZ0 (d0 = 1) for DYNAMIC runs. Otherwise
    ``derivative_magnitude`` is 0.
    """
    cfg = cfg or IterationConfig()
    z = as_parameter(z0)
    param = as_parameter(c)
    if space is DerivativeSpace.PARAMETER:
        d0, gain = 0.0, 1.0
    else:
        d0, gain = 1.0, 0.0
    escaped, t, zr, zi, dr, di = kernels.escape_point(
        z.real,
        z.imag,
        param.real,
        param.imag,
        cfg.max_iter,
        cfg.escape_radius * cfg.escape_radius,
        track_derivative,
        d0,
        0.0,
        gain,
    )
    return EscapeResult(
        escaped=bool(escaped),
        iterations=int(t),
        final_magnitude=math.hypot(zr, zi),
        derivative_magnitude=math.hypot(dr, di) if track_derivative else 0.0,
    )


def mandelbrot_member(c: ParameterLike, cfg: IterationConfig | None = None) -> bool:
    """True iff the critical orbit of 0 stays bounded for ``max_iter`` steps."""
    cfg = cfg or IterationConfig()
    param = as_parameter(c)
    return bool(
        kernels.is_bounded(
            param.real, param.imag, cfg.max_iter, cfg.escape_radius**2
        )
    )


def cardioid_bulb_member(c: ParameterLike) -> bool:
    """Analytic test for the main cardioid and the period-2 disk.

    One-sided: True means c is in the Mandelbrot set, False says nothing
    (other bulbs and filaments are not covered).
    """
    param = as_parameter(c)
    x, y = param.real, param.imag
    q = (x - 0.25) ** 2 + y * y
    if q * (q + (x - 0.25)) < y * y / 4.0:
        return True
    return (x + 1.0) ** 2 + y * y < 1.0 / 16.0


def exterior_distance(res: EscapeResult) -> float:
    """Distance estimate |z| ln|z| / |dz/dc| of an escaped parameter run."""
    if not res.escaped:
        raise InvalidParameter("distance estimate needs an escaped orbit")
    if res.derivative_magnitude == 0.0:
        return math.inf
    return res.final_magnitude * math.log(res.final_magnitude) / (
        res.derivative_magnitude
    )


def _probe_escapes(c: complex, cfg: IterationConfig, radius: float) -> bool:
    for k in range(PROBE_POINTS):
        angle = 2.0 * math.pi * k / PROBE_POINTS
        probe = c + complex(radius * math.cos(angle), radius * math.sin(angle))
        if not mandelbrot_member(probe, cfg):
            return True
    return False


def classify_parameter(
    c: ParameterLike,
    cfg: IterationConfig | None = None,
    boundary_epsilon: float = DEFAULT_BOUNDARY_EPSILON,
) -> ParameterClass:
    """Place c inside, on the boundary of, or outside the Mandelbrot set.

    Escaping parameters are EXTERIOR when the exterior distance estimate is
    at least ``boundary_epsilon`` and BOUNDARY otherwise. Bounded parameters
    are BOUNDARY when one of 8 probes at distance ``boundary_epsilon``
    escapes, INTERIOR otherwise.
    """
    if not math.isfinite(boundary_epsilon) or boundary_epsilon <= 0:
        raise InvalidParameter(
            f"boundary_epsilon must be positive, got {boundary_epsilon}"
        )
    cfg = cfg or IterationConfig()
    param = as_parameter(c)
    res = iterate_escape(0j, param, cfg, track_derivative=True)
    if res.escaped:
        distance = exterior_distance(res)
        region = (
            ParameterRegion.EXTERIOR
            if distance >= boundary_epsilon
            else ParameterRegion.BOUNDARY
        )
        return ParameterClass(region, distance)
    if _probe_escapes(param, cfg, boundary_epsilon):
        return ParameterClass(ParameterRegion.BOUNDARY, 0.0)
    return ParameterClass(ParameterRegion.INTERIOR, 0.0)


def julia_connected(c: ParameterLike, cfg: IterationConfig | None = None) -> bool:
    """J(f_c) is connected iff the critical orbit stays bounded."""
    return mandelbrot_member(c, cfg)


def smooth_iteration(res: EscapeResult) -> float:
    """Fractional escape count n + 1 - log2(ln|z_n|)."""
    if not res.escaped:
        raise InvalidParameter("smooth iteration is undefined for bounded orbits")
    if res.final_magnitude <= 1.0:
        raise InvalidParameter(
            f"smooth iteration needs |z| > 1, got {res.final_magnitude}"
        )
    return res.iterations + 1.0 - math.log2(math.log(res.final_magnitude))


def boundary_distance(
    c: ParameterLike,
    cfg: IterationConfig | None = None,
    step: float = 1e-3,
    directions: int = 64,
    max_radius: float = 2.0,
) -> float:
    """Distance from c to the Mandelbrot boundary.

    Escaping parameters use the exterior distance estimate. Bounded ones
    are probed on rings of radius step, 2*step, ... with ``directions``
    points each; the first ring that contains an escaping parameter gives
    the distance (``max_radius`` if none does).
    """
    if step <= 0 or directions < 1 or max_radius < step:
        raise InvalidParameter(
            f"invalid probe settings: step={step}, directions={directions}, "
            f"max_radius={max_radius}"
        )
    cfg = cfg or IterationConfig()
    param = as_parameter(c)
    res = iterate_escape(0j, param, cfg, track_derivative=True)
    if res.escaped:
        return exterior_distance(res)
    return float(
        kernels.probe_radius(
            param.real,
            param.imag,
            cfg.max_iter,
            cfg.escape_radius**2,
            step,
            directions,
            max_radius,
        )
    )


def critical_orbit(c: ParameterLike, n: int, escape_radius: float = 2.0) -> np.ndarray:
    """Z_0 .. Z_k of the orbit of 0, stopping after the first escape."""
    param = as_parameter(c)
    orbit = np.empty(n + 1, dtype=np.complex128)
    z = 0j
    orbit[0] = z
    for t in range(1, n + 1):
        z = z * z + param
        orbit[t] = z
        if abs(z) > escape_radius:
            return orbit[: t + 1]
    return orbit
