"""Controlled numerical integration.

Four workhorses used throughout the package:

* adaptive semi-infinite integrals with a rigorous tail bound,
* 2D radial-angular momentum integrals with removable-singularity
  handling delegated to the caller's kernel (see
  :func:`removable_quotient`),
* oscillatory radial sine transforms, partitioned at the trig zeros and
  accelerated by repeated averaging of the alternating partial sums
  (Euler transformation),
* plain Monte Carlo in 6 dimensions with a deterministic, chunked
  importance sampler.

Integrand callables handed to the oscillatory and Monte Carlo routines
must accept numpy arrays elementwise; the scalar routines feed floats.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sp_integrate

from ._util import worker_count
from .errors import IntegrandError, SamplerMismatchError

__all__ = [
    "QuadratureResult",
    "TestProfile",
    "integrate_semi_infinite",
    "integrate_radial_angular",
    "sine_transform_radial",
    "monte_carlo_6d",
    "CubicBallSampler",
    "removable_quotient",
]


@dataclass(frozen=True)
class QuadratureResult:
    """Value, error estimate, work counter and convergence flag."""

    value: float
    error_estimate: float
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class TestProfile:
    """Fast-decaying momentum-space test profile.

    ``width`` is the momentum-space Gaussian width w, so
    f_hat(p) = exp(-p^2 / (2 w^2)); ``support_radius`` records the
    nominal position-space localization (~3/w) that asymptotic fit
    windows should clear.
    """

    __test__ = False  # not a pytest class despite the name

    kind: str = "gaussian"
    width: float = 1.0
    support_radius: float = 3.0

    def __post_init__(self):
        if self.kind != "gaussian":
            raise ValueError(f"unsupported profile kind {self.kind!r}")
        if not (self.width > 0.0):
            raise ValueError(f"width must be > 0, got {self.width}")
        if not (self.support_radius > 0.0):
            raise ValueError(f"support_radius must be > 0, got {self.support_radius}")

    def f_hat(self, p):
        """Momentum profile, numpy-elementwise."""
        p = np.asarray(p, dtype=float)
        out = np.exp(-0.5 * (p / self.width) ** 2)
        return out if out.shape else float(out)


def removable_quotient(h, dh, w1: float, w2: float, den: float | None = None) -> float:
    """(h(w1) - h(w2)) / (w1^2 - w2^2) with a Taylor branch at coincidence.

    When |w1 - w2| < 1e-6 (w1 + w2) the direct quotient is 0/0-noisy, so
    the analytic limit dh(w)/(2w) at the midpoint is used instead.
    ``den`` optionally supplies w1^2 - w2^2 computed in exact arithmetic
    by the caller (useful when the squares difference telescopes).
    """
    if abs(w1 - w2) < 1e-6 * (w1 + w2):
        wm = 0.5 * (w1 + w2)
        return dh(wm) / (2.0 * wm)
    if den is None:
        den = (w1 - w2) * (w1 + w2)
    return (h(w1) - h(w2)) / den


def _quad(f, a, b, **kw):
    # full_output folds convergence complaints into the return tuple instead
    # of emitting warnings; the error estimate is still honest
    out = _sp_integrate.quad(f, a, b, full_output=1, **kw)
    return out[0], out[1]


class _Counted:
    """Wrap a scalar integrand: count calls, trap NaN/inf."""

    __slots__ = ("f", "n")

    def __init__(self, f):
        self.f = f
        self.n = 0

    def __call__(self, x):
        self.n += 1
        v = self.f(x)
        if not math.isfinite(v):
            raise IntegrandError(f"integrand returned {v} at x={x}", abscissa=x)
        return v


def integrate_semi_infinite(
    f,
    decay_scale: float,
    tol: float,
    *,
    tail: str = "exp",
    tail_power: float = 2.0,
    rel_tol: float | None = None,
    points=None,
    max_doublings: int = 14,
) -> QuadratureResult:
    """Integrate f over [0, inf) to absolute tolerance ``tol``.

    The cutoff X starts at 8 decay scales and doubles until the tail
    bound drops below tol/10; the finite part is handled by adaptive
    panels. ``tail`` = "exp" bounds the remainder by |f(X)| * decay_scale
    (valid for |f| <~ C e^{-x/decay_scale}); "power" uses
    |f(X)| * X / (tail_power - 1) for |f| <~ C x^{-tail_power}.
    When ``rel_tol`` is given, convergence is also granted at
    err <= rel_tol * |value|, which is the right notion for integrals
    whose scale is not known a priori.
    """
    if not (decay_scale > 0.0):
        raise ValueError(f"decay_scale must be > 0, got {decay_scale}")
    if not (tol > 0.0):
        raise ValueError(f"tol must be > 0, got {tol}")
    if tail == "power" and not (tail_power > 1.0):
        raise ValueError("power tail needs tail_power > 1")
    cf = _Counted(f)

    x_cut = 8.0 * decay_scale
    tail_bound = math.inf
    for _ in range(max_doublings):
        probe = max(abs(cf(x_cut)), abs(cf(1.09 * x_cut)), abs(cf(1.21 * x_cut)))
        if tail == "exp":
            tail_bound = probe * decay_scale
        else:
            tail_bound = probe * 1.21 * x_cut / (tail_power - 1.0)
        if tail_bound <= 0.1 * tol:
            break
        x_cut *= 2.0
    # fall through with the last bound; convergence flag reports honestly

    epsrel = 1e-12 if rel_tol is None else max(1e-12, 0.25 * rel_tol)
    pts = None
    if points is not None:
        pts = [p for p in points if 0.0 < p < x_cut]
        pts = pts or None
    val, err = _quad(
        cf, 0.0, x_cut, epsabs=0.25 * tol, epsrel=epsrel, limit=500, points=pts
    )
    total_err = err + tail_bound
    converged = total_err <= tol or (rel_tol is not None and total_err <= rel_tol * abs(val))
    return QuadratureResult(value=val, error_estimate=total_err, evaluations=cf.n, converged=converged)


def integrate_radial_angular(
    kernel,
    tol: float,
    *,
    decay_scale: float = 1.0,
    inner_points=None,
    rel_tol: float | None = None,
) -> QuadratureResult:
    """2pi * int_0^inf dp p^2 int_{-1}^{1} dt kernel(p, t), to ~tol.

    The azimuthal 2pi is applied internally. ``inner_points``, if given,
    maps p to a list of interior t-breakpoints (e.g. the removable
    coincidence point of a difference-quotient kernel) that the angular
    panels should honor.
    """
    if not (tol > 0.0):
        raise ValueError(f"tol must be > 0, got {tol}")
    inner_evals = 0

    def shell(p):
        nonlocal inner_evals
        if p == 0.0:
            return 0.0
        pts = None
        if inner_points is not None:
            pts = [t for t in (inner_points(p) or ()) if -1.0 < t < 1.0]
            pts = pts or None
        g = _Counted(lambda t: kernel(p, t))
        inner_abs = 1e-4 * tol / max(p * p, 1.0)
        val, _ = _quad(g, -1.0, 1.0, epsabs=inner_abs, epsrel=1e-10,
                       limit=200, points=pts)
        inner_evals += g.n
        return p * p * val

    outer = integrate_semi_infinite(
        shell, decay_scale, tol / (2.0 * math.pi) * 0.5,
        rel_tol=rel_tol,
    )
    err = 2.0 * math.pi * outer.error_estimate + 0.01 * tol
    value = 2.0 * math.pi * outer.value
    converged = err <= tol or (rel_tol is not None and err <= rel_tol * abs(value))
    return QuadratureResult(value=value, error_estimate=err,
                            evaluations=outer.evaluations + inner_evals, converged=converged)


# ---------------------------------------------------------------------------
# Oscillatory lobes + Euler acceleration
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _vectorized(f):
    """Return an array-capable version of f, probing once."""
    try:
        out = f(np.array([0.3, 0.7]))
        if np.shape(out) == (2,):
            return f
    except Exception:
        pass
    return lambda arr: np.array([f(float(x)) for x in np.atleast_1d(arr)])


def _euler_tail(terms: np.ndarray) -> tuple[float, float]:
    """Sum an alternating tail by repeated averaging of partial sums."""
    row = np.cumsum(terms)
    diag = [row[-1]]
    while row.size > 1:
        row = 0.5 * (row[:-1] + row[1:])
        diag.append(row[-1])
    if len(diag) >= 2:
        return diag[-1], abs(diag[-1] - diag[-2])
    return diag[-1], abs(diag[-1])


def _osc_integral(g, r: float, kind: str, tol: float) -> tuple[float, float, int, float]:
    """int_0^inf g(p) * sin(p r) dp (kind="sin") or cos (kind="cos").

    Lobes between consecutive zeros of the trig factor, 16-point
    Gauss-Legendre each; the first block of lobes is summed directly and
    the alternating remainder is Euler-accelerated. Returns
    (value, error_estimate, evaluations, abs_accumulation); the last
    entry is the unsigned mass the lobe sums moved through, which sets
    the rounding floor of the cancellation.
    """
    gv = _vectorized(g)
    half = math.pi / r

    def lobe_edges(j):
        if kind == "sin":
            return j * half, (j + 1) * half
        if j == 0:
            return 0.0, 0.5 * half
        return (j - 0.5) * half, (j + 0.5) * half

    lobes: list[float] = []
    abs_accum = 0.0
    evals = 0

    def gl16(a, b):
        nonlocal evals
        x = 0.5 * (a + b) + 0.5 * (b - a) * _GL_NODES
        w = 0.5 * (b - a) * _GL_WEIGHTS
        osc = np.sin(x * r) if kind == "sin" else np.cos(x * r)
        vals = np.asarray(gv(x), dtype=float) * osc
        if not np.all(np.isfinite(vals)):
            bad = x[~np.isfinite(vals)][0]
            raise IntegrandError(f"oscillatory integrand not finite near p={bad}", abscissa=bad)
        evals += x.size
        return float(np.dot(w, vals)), float(np.dot(np.abs(w), np.abs(vals)))

    def panel(a, b, v1, m1, depth):
        # the first lobes can be much wider than the integrand's own
        # scale, so bisect until the embedded estimate agrees at the
        # rounding level of the local mass
        mid = 0.5 * (a + b)
        vl, ml = gl16(a, mid)
        vr, mr = gl16(mid, b)
        if abs(v1 - (vl + vr)) <= 5e-15 * (ml + mr + 1e-300) or depth >= 10:
            return vl + vr, ml + mr
        vl, ml = panel(a, mid, vl, ml, depth + 1)
        vr, mr = panel(mid, b, vr, mr, depth + 1)
        return vl + vr, ml + mr

    def compute_through(n):
        nonlocal abs_accum
        while len(lobes) < n:
            a, b = lobe_edges(len(lobes))
            v1, m1 = gl16(a, b)
            contrib, mass = panel(a, b, v1, m1, 0)
            lobes.append(contrib)
            abs_accum += mass

    for n_direct, n_euler in ((16, 32), (32, 64), (96, 128)):
        compute_through(n_direct + n_euler)
        arr = np.array(lobes)
        floor = 5e-16 * abs_accum
        head = float(np.sum(arr[:n_direct]))
        tail_terms = arr[n_direct:n_direct + n_euler]
        scale = max(np.max(np.abs(arr)), 1e-300)
        if np.all(np.abs(tail_terms[-3:]) < 1e-3 * tol * scale + floor):
            # integrand effectively dead: plain sum is already exact
            value = head + float(np.sum(tail_terms))
            err = float(np.abs(tail_terms[-1])) + floor
        else:
            tail, terr = _euler_tail(tail_terms)
            value = head + float(tail)
            err = float(terr) + floor
        if err <= tol * max(abs(value), 1e-300) or err <= floor * 4.0:
            return value, err, evals, abs_accum
    return value, err, evals, abs_accum


def _osc_integral_mp(g, r: float, kind: str, tol: float):
    """Big-float rerun of the lobe scheme for deeply cancelled transforms.

    When the answer is exponentially smaller than the lobe mass (mu*r
    large in a screened profile), double precision cannot resolve it.
    This reruns the same zero-partition + series-acceleration scheme in
    arbitrary precision, escalating the working digits until two runs
    agree to tol relative. Needs g to tolerate big-float inputs; returns
    (value, error_estimate, evaluations, accepted).
    """
    try:
        from mpmath import mp
    except ImportError:              # pragma: no cover
        return 0.0, math.inf, 0, False
    evals = 0
    prev = None
    old_dps = mp.dps
    try:
        for dps in (30, 50, 80, 120):
            mp.dps = dps
            rr = mp.mpf(r)
            trig = mp.sin if kind == "sin" else mp.cos

            def h(p):
                nonlocal evals
                evals += 1
                return mp.mpf(g(p)) * trig(p * rr)

            try:
                val = mp.quadosc(h, [0, mp.inf], period=2 * mp.pi / rr)
            except Exception:
                return 0.0, math.inf, evals, False
            if prev is not None:
                diff = abs(val - prev)
                if diff <= tol * abs(val):
                    return float(val), float(diff), evals, True
            prev = val
        return float(prev), abs(float(prev)), evals, False
    finally:
        mp.dps = old_dps


def sine_transform_radial(f_hat, r_grid, tol: float) -> list[float]:
    """Radial inverse 3D Fourier transform of a radial function.

    A(r) = (1/(2 pi^2 r)) int_0^inf p sin(p r) f_hat(p) dp for each r in
    ``r_grid``. f_hat must be bounded, continuous on (0, inf) and decay
    at least like p^-2; a probe at two large momenta rejects slower
    decay up front.
    """
    vals, _errs, _n = _sine_transform_diag(f_hat, r_grid, tol)
    return vals


def _sine_transform_diag(f_hat, r_grid, tol: float):
    """sine_transform_radial plus per-radius error estimates and work count."""
    if not (tol > 0.0):
        raise ValueError(f"tol must be > 0, got {tol}")
    rg = [float(r) for r in r_grid]
    if any(r <= 0.0 for r in rg):
        raise ValueError("all radii must be > 0")
    fv = _vectorized(f_hat)

    p1, p2 = 1.0e4, 1.0e6
    probe = np.asarray(fv(np.array([p1, p2])), dtype=float)
    if not np.all(np.isfinite(probe)):
        raise IntegrandError("f_hat not finite at the decay probes", abscissa=p1)
    if abs(probe[1]) * p2 * p2 > 4.0 * (abs(probe[0]) * p1 * p1) + 1e-290:
        raise ValueError(
            "f_hat does not decay at least like p^-2 "
            f"(|f|p^2 grew from {abs(probe[0]) * p1 * p1:.3e} to {abs(probe[1]) * p2 * p2:.3e})"
        )

    values, errs = [], []
    total_evals = 0
    for r in rg:
        v, e, n, acc = _osc_integral(lambda p: np.asarray(fv(p)) * p, r, "sin", tol)
        if e > tol * abs(v) and 5e-16 * acc >= 0.25 * e:
            # the error is the rounding floor of a deep cancellation, not
            # a truncation artifact: double precision is exhausted, so
            # rerun in big floats (only helps if f_hat accepts them)
            v2, e2, n2, ok = _osc_integral_mp(lambda p: f_hat(p) * p, r, "sin", tol)
            n += n2
            if ok:
                v, e = v2, e2
        c = 1.0 / (2.0 * math.pi ** 2 * r)
        values.append(c * v)
        errs.append(c * e)
        total_evals += n
    return values, errs, total_evals


# ---------------------------------------------------------------------------
# 6D Monte Carlo
# ---------------------------------------------------------------------------

_MC_CHUNK = 1 << 18


class CubicBallSampler:
    """Importance sampler: two iid 3-vectors with density ~ (1+r)^-3.

    The radial density r^2 (1+r)^-3 is normalizable only on a truncated
    ball; ``radius`` defaults to 1e4 and the induced truncation bias for
    the triple-cubic integrand is available as a closed-form upper
    estimate from :meth:`truncation_bias_bound`.
    """

    def __init__(self, radius: float = 1.0e4):
        if not (radius > 0.0):
            raise ValueError(f"radius must be > 0, got {radius}")
        self.radius = float(radius)
        self._norm = self._cdf_raw(self.radius)
        # inversion table on a log grid, polished by Newton below
        rs = np.concatenate([[0.0], np.logspace(-6, math.log10(self.radius), 4096)])
        self._tab_r = rs
        self._tab_c = self._cdf_raw(rs)

    @staticmethod
    def _cdf_raw(r):
        """int_0^r s^2/(1+s)^3 ds, exact antiderivative."""
        r = np.asarray(r, dtype=float)
        u = 1.0 + r
        return np.log1p(r) + 2.0 / u - 0.5 / (u * u) - 1.5

    def _invert(self, targets: np.ndarray) -> np.ndarray:
        t = targets * self._norm
        r = np.interp(t, self._tab_c, self._tab_r)
        small = t < 1e-9
        if np.any(small):
            r[small] = np.cbrt(3.0 * t[small])
        for _ in range(3):
            u = 1.0 + r
            fr = np.log1p(r) + 2.0 / u - 0.5 / (u * u) - 1.5 - t
            dr = r * r / (u * u * u)
            step = np.where(dr > 0.0, fr / np.maximum(dr, 1e-300), 0.0)
            r = np.clip(r - step, 0.0, self.radius)
        return r

    def _draw_vectors(self, rng, n: int) -> np.ndarray:
        radii = self._invert(rng.random(n))
        g = rng.standard_normal((n, 3))
        norm = np.linalg.norm(g, axis=1)
        # resample the (measure-zero) degenerate directions deterministically
        norm = np.where(norm < 1e-12, 1.0, norm)
        return g / norm[:, None] * radii[:, None]

    def draw(self, rng, n: int):
        """n joint samples: returns (x, y, joint_density)."""
        x = self._draw_vectors(rng, n)
        y = self._draw_vectors(rng, n)
        c = 1.0 / (4.0 * math.pi * self._norm)
        qx = c * (1.0 + np.linalg.norm(x, axis=1)) ** -3
        qy = c * (1.0 + np.linalg.norm(y, axis=1)) ** -3
        return x, y, qx * qy

    def truncation_bias_bound(self) -> float:
        """Upper estimate of the mass of the triple-cubic integrand outside the ball.

        Uses inner-integral bound
        B(s) <= (1+s/2)^-3 * 4 pi (ln(1+s/2) + 2) + C* (1+s/2)^-3/2
        with C* = 1.92 from a Hoelder bound, integrated over both tail
        regions (factor 2 by x<->y symmetry).
        """
        c_star = 1.92

        def outer(s):
            half = 1.0 + 0.5 * s
            inner = (half ** -3) * 4.0 * math.pi * (math.log(half) + 2.0) + c_star * half ** -1.5
            return 4.0 * math.pi * s * s * (1.0 + s) ** -3 * inner

        val, _ = _quad(outer, self.radius, np.inf, epsabs=1e-12, epsrel=1e-8)
        return 2.0 * val


def monte_carlo_6d(integrand, sampler, n_samples: int, seed: int) -> QuadratureResult:
    """Importance-sampled MC estimate of int int d3x d3y integrand(x, y).

    Deterministic for a fixed seed regardless of worker count: the
    sample range is partitioned into fixed-size chunks, each driven by
    its own spawned SeedSequence, and the per-chunk partials are
    combined in index order.
    """
    n_samples = int(n_samples)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n_chunks = (n_samples + _MC_CHUNK - 1) // _MC_CHUNK
    children = np.random.SeedSequence(seed).spawn(n_chunks)

    # accept either a pair-of-3-vectors integrand or one vectorized over
    # (n, 3) blocks; probe once
    probe = np.full((2, 3), 0.25)
    try:
        out = integrand(probe, probe)
        batched = np.shape(out) == (2,)
    except Exception:
        batched = False
    if batched:
        f_block = integrand
    else:
        def f_block(xs, ys):
            return np.array([integrand(xi, yi) for xi, yi in zip(xs, ys)])

    def run_chunk(i):
        n = min(_MC_CHUNK, n_samples - i * _MC_CHUNK)
        rng = np.random.Generator(np.random.PCG64(children[i]))
        x, y, q = sampler.draw(rng, n)
        if np.any(q <= 0.0) or not np.all(np.isfinite(q)):
            raise SamplerMismatchError("sampler density not strictly positive on its own draw")
        f = np.asarray(f_block(x, y), dtype=float)
        if np.any(f < 0.0):
            raise ValueError("integrand must be nonnegative")
        w = f / q
        return float(np.sum(w)), float(np.sum(w * w)), n

    workers = min(worker_count(), n_chunks)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            partials = list(ex.map(run_chunk, range(n_chunks)))
    else:
        partials = [run_chunk(i) for i in range(n_chunks)]

    s1 = 0.0
    s2 = 0.0
    for a, b, _ in partials:   # fixed combination order
        s1 += a
        s2 += b
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0)
    stderr = math.sqrt(var / n_samples)
    return QuadratureResult(value=mean, error_estimate=stderr,
                            evaluations=n_samples, converged=True)
