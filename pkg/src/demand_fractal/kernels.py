"""Compiled escape-time kernels for z <- z^2 + c.

All kernels work on split real/imaginary doubles without fastmath so that
results are bit-identical across call sites, tile layouts and threads.
They release the GIL, which lets the raster thread pool run them in
parallel.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(nogil=True, cache=False)
def escape_point(zr, zi, cr, ci, max_iter, radius_sq, track, dr, di, gain):
    """Iterate from z0 = zr + i*zi.

    Returns (escaped, iterations, zr, zi, dr, di). The magnitude is checked
    at t = 0 and after every step, so a bounded z is never squared past the
    escape radius. When ``track`` is set, d <- 2*z*d + gain is co-iterated
    with the pre-step z.
    """
    if zr * zr + zi * zi > radius_sq:
        return True, 0, zr, zi, dr, di
    for t in range(1, max_iter + 1):
        if track:
            ndr = 2.0 * (zr * dr - zi * di) + gain
            di = 2.0 * (zr * di + zi * dr)
            dr = ndr
        nzr = zr * zr - zi * zi + cr
        zi = 2.0 * zr * zi + ci
        zr = nzr
        if zr * zr + zi * zi > radius_sq:
            return True, t, zr, zi, dr, di
    return False, max_iter, zr, zi, dr, di


@njit(nogil=True, cache=False)
def is_bounded(cr, ci, max_iter, radius_sq):
    zr = 0.0
    zi = 0.0
    for _ in range(max_iter):
        nzr = zr * zr - zi * zi + cr
        zi = 2.0 * zr * zi + ci
        zr = nzr
        if zr * zr + zi * zi > radius_sq:
            return False
    return True


@njit(nogil=True, cache=False)
def escape_tile(
    iterations,
    escaped,
    smooth,
    x0,
    x1,
    y0,
    y1,
    re_min,
    im_max,
    pixel_width,
    pixel_height,
    julia,
    cr,
    ci,
    max_iter,
    radius_sq,
):
    """Fill the [y0, y1) x [x0, x1) block of the output arrays in place."""
    for y in range(y0, y1):
        im = im_max - (y + 0.5) * pixel_height
        for x in range(x0, x1):
            re = re_min + (x + 0.5) * pixel_width
            if julia:
                result = escape_point(
                    re, im, cr, ci, max_iter, radius_sq, False, 0.0, 0.0, 0.0
                )
            else:
                result = escape_point(
                    0.0, 0.0, re, im, max_iter, radius_sq, False, 0.0, 0.0, 0.0
                )
            done, t, zr, zi = result[0], result[1], result[2], result[3]
            iterations[y, x] = t
            escaped[y, x] = done
            if done:
                magnitude = math.sqrt(zr * zr + zi * zi)
                smooth[y, x] = t + 1.0 - math.log2(math.log(magnitude))
            else:
                smooth[y, x] = np.nan


@njit(nogil=True, cache=False)
def probe_radius(cr, ci, max_iter, radius_sq, step, directions, max_radius):
    """Smallest radius k*step at which a probe around c leaves the set.

    Probes ``directions`` evenly spaced angles on each ring; returns
    ``max_radius`` when every ring up to it stays bounded.
    """
    rings = int(math.floor(max_radius / step + 1e-9))
    for k in range(1, rings + 1):
        r = k * step
        for j in range(directions):
            angle = 2.0 * math.pi * j / directions
            if not is_bounded(
                cr + r * math.cos(angle), ci + r * math.sin(angle), max_iter, radius_sq
            ):
                return r
    return max_radius
