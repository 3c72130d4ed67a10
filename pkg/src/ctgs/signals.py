"""Continuous-time graph signal models and synthesis.

Two realizations of band-limited vertex signals:

* periodic — trigonometric polynomials on a period T whose harmonic
  frequencies sit strictly inside (-B, B). Reconstruction from 2BT uniform
  samples per period is exact finite linear algebra, so "perfect recovery"
  is machine-checkable.
* sinc — truncated cardinal series on a finite window; evaluation-only,
  with edge effects assessed on an inner window.

The periodic model also admits a direct coefficient-space description of
the whole constrained signal space (dimension, random members, membership
verification), which serves as the independent oracle for the planner and
the recovery pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .bandwidth import BandwidthProfile
from .numerics import COEFF_TOL, harmonic_cutoff, is_inf, n_trig_coeffs, null_space
from .planner import SamplingPlan
from .spectral import Spectrum


def trig_design(times: np.ndarray, cutoff: int, period: float) -> np.ndarray:
    """Evaluation matrix of the trig basis [1, cos, sin, ...] at ``times``."""
    times = np.asarray(times, dtype=float)
    cols = [np.ones_like(times)]
    for k in range(1, cutoff + 1):
        arg = 2.0 * np.pi * k * times / period
        cols.append(np.cos(arg))
        cols.append(np.sin(arg))
    if cutoff < 0:
        return np.zeros((len(times), 0))
    return np.stack(cols, axis=1)


@dataclass(eq=False)
class TrigSeries:
    """Scalar trig polynomial: coeffs = [a0, a1, b1, ..., aK, bK]."""

    period: Fraction
    coeffs: np.ndarray

    @property
    def cutoff(self) -> int:
        return (len(self.coeffs) - 1) // 2 if len(self.coeffs) else -1

    def eval(self, times) -> np.ndarray:
        return trig_design(np.atleast_1d(np.asarray(times, dtype=float)),
                           self.cutoff, float(self.period)) @ self.coeffs


@dataclass(eq=False)
class SincSeries:
    """Scalar truncated cardinal series at a uniform rate on a window."""

    rate: Fraction
    phase: Fraction
    window: tuple
    coeffs: np.ndarray
    first_index: int

    def node_times(self) -> np.ndarray:
        idx = np.arange(self.first_index, self.first_index + len(self.coeffs))
        return (idx + float(self.phase) * float(self.rate)) / float(self.rate)

    def eval(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if len(self.coeffs) == 0:
            return np.zeros_like(times)
        args = float(self.rate) * (times[:, None] - float(self.phase)) - np.arange(
            self.first_index, self.first_index + len(self.coeffs))[None, :]
        return np.sinc(args) @ self.coeffs


def sinc_indices(rate: Fraction, phase: Fraction, window) -> tuple:
    """Integer index range of a rate-``rate`` grid inside ``window``."""
    t0, t1 = Fraction(window[0]), Fraction(window[1])
    lo = math.ceil((t0 - phase) * rate)
    hi = math.floor((t1 - phase) * rate)
    return lo, hi


def make_sinc_series(rate: Fraction, phase: Fraction, window, coeffs) -> SincSeries:
    lo, hi = sinc_indices(rate, phase, window)
    coeffs = np.asarray(coeffs, dtype=float)
    if len(coeffs) != hi - lo + 1:
        raise ValueError("coefficient count does not cover the window grid")
    return SincSeries(rate=rate, phase=phase, window=(Fraction(window[0]), Fraction(window[1])),
                      coeffs=coeffs, first_index=lo)


class GraphSignal:
    """Evaluation interface shared by all signal realizations."""

    mode: str

    def eval(self, vertex: int, times) -> np.ndarray:
        raise NotImplementedError


@dataclass(eq=False)
class PeriodicSignal(GraphSignal):
    """Coefficient-matrix form: one trig-coefficient row per vertex."""

    period: Fraction
    coeffs: np.ndarray  # n x (2K+1)
    zero_space: bool = False
    mode: str = field(default="periodic")

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @property
    def cutoff(self) -> int:
        return (self.coeffs.shape[1] - 1) // 2 if self.coeffs.shape[1] else -1

    def eval(self, vertex: int, times) -> np.ndarray:
        return trig_design(np.atleast_1d(np.asarray(times, dtype=float)),
                           self.cutoff, float(self.period)) @ self.coeffs[vertex]

    def vertex_series(self, vertex: int) -> TrigSeries:
        return TrigSeries(period=self.period, coeffs=self.coeffs[vertex].copy())

    def support_cutoff(self, vertex: int, tol: float = COEFF_TOL) -> int:
        """Largest harmonic index carrying energy at ``vertex``."""
        row = self.coeffs[vertex]
        scale = max(1.0, float(np.max(np.abs(self.coeffs))))
        top = -1
        for k in range(self.cutoff + 1):
            lo = 0 if k == 0 else 2 * k - 1
            hi = 1 if k == 0 else 2 * k + 1
            if np.any(np.abs(row[lo:hi]) > tol * scale):
                top = k
        return top


def pad_coeffs(coeffs: np.ndarray, cutoff: int) -> np.ndarray:
    want = n_trig_coeffs(cutoff)
    if coeffs.shape[-1] >= want:
        return coeffs
    pad = [(0, 0)] * (coeffs.ndim - 1) + [(0, want - coeffs.shape[-1])]
    return np.pad(coeffs, pad)


@dataclass(eq=False)
class CompositeSignal(GraphSignal):
    """Sum of extension-matrix images of scalar series (sinc-mode recovery)."""

    n: int
    parts: list  # (matrix n x m, [scalar series]*m)
    mode: str = "sinc"
    zero_space: bool = False

    def eval(self, vertex: int, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.zeros_like(times)
        for matrix, series_list in self.parts:
            for col, series in enumerate(series_list):
                w = matrix[vertex, col]
                if w != 0.0 and series is not None:
                    out += w * series.eval(times)
        return out


# --- coefficient-space oracle (periodic) ----------------------------------

def _per_harmonic_constraints(spectrum: Spectrum, profile: BandwidthProfile,
                              period: Fraction, k: int):
    """Active vertices and binding frequency rows for harmonic ``k``."""
    active = [v for v in range(spectrum.n)
              if is_inf(profile.vertex_bw[v]) or k < profile.vertex_bw[v] * period]
    rows = [f for f, c in enumerate(profile.freq_bw)
            if not is_inf(c) and k >= c * period]
    return active, rows


def space_dimension(spectrum: Spectrum, profile: BandwidthProfile, period) -> int:
    """Real dimension of the constrained space of T-periodic signals."""
    period = Fraction(period)
    finite = [b for b in profile.vertex_bw if not is_inf(b)]
    if len(finite) != spectrum.n:
        raise ValueError("space_dimension requires finite vertex bandwidths")
    top = max((harmonic_cutoff(b, period) for b in profile.vertex_bw), default=-1)
    dim = 0
    for k in range(0, top + 1):
        active, rows = _per_harmonic_constraints(spectrum, profile, period, k)
        if not active:
            continue
        basis = null_space(spectrum.submatrix(rows, active))
        dim += basis.shape[1] * (1 if k == 0 else 2)
    return dim


def random_member(spectrum: Spectrum, profile: BandwidthProfile, period, seed) -> PeriodicSignal:
    """Uniform-ish random element of the constrained space (oracle sampler)."""
    period = Fraction(period)
    rng = np.random.default_rng(seed)
    top = max((harmonic_cutoff(b, period) for b in profile.vertex_bw), default=-1)
    coeffs = np.zeros((spectrum.n, n_trig_coeffs(top)))
    for k in range(0, top + 1):
        active, rows = _per_harmonic_constraints(spectrum, profile, period, k)
        if not active:
            continue
        basis = null_space(spectrum.submatrix(rows, active))
        if basis.shape[1] == 0:
            continue
        if k == 0:
            coeffs[active, 0] = basis @ rng.standard_normal(basis.shape[1])
        else:
            coeffs[active, 2 * k - 1] = basis @ rng.standard_normal(basis.shape[1])
            coeffs[active, 2 * k] = basis @ rng.standard_normal(basis.shape[1])
    return PeriodicSignal(period=period, coeffs=coeffs,
                          zero_space=not np.any(np.abs(coeffs) > 0))


def membership_violations(spectrum: Spectrum, profile: BandwidthProfile,
                          signal: PeriodicSignal, tol: float = COEFF_TOL) -> list:
    """Support checks: vertex rows within B, transformed rows within C."""
    period = signal.period
    scale = max(1.0, float(np.max(np.abs(signal.coeffs))) if signal.coeffs.size else 1.0)
    bad = []
    for v, b in enumerate(profile.vertex_bw):
        if is_inf(b):
            continue
        limit = harmonic_cutoff(b, period)
        for k in range(limit + 1, signal.cutoff + 1):
            lo, hi = (0, 1) if k == 0 else (2 * k - 1, 2 * k + 1)
            if np.any(np.abs(signal.coeffs[v, lo:hi]) > tol * scale):
                bad.append(("vertex", v, k))
                break
    transformed = spectrum.basis @ signal.coeffs
    for f, c in enumerate(profile.freq_bw):
        if is_inf(c):
            continue
        limit = harmonic_cutoff(c, period) if c > 0 else -1
        for k in range(limit + 1, signal.cutoff + 1):
            lo, hi = (0, 1) if k == 0 else (2 * k - 1, 2 * k + 1)
            if np.any(np.abs(transformed[f, lo:hi]) > tol * scale):
                bad.append(("frequency", f, k))
                break
    return bad


def verify_membership(spectrum, profile, signal, tol: float = COEFF_TOL) -> bool:
    return not membership_violations(spectrum, profile, signal, tol)


# --- synthesis -------------------------------------------------------------

def _random_trig_coeffs(rng, cutoff: int, top_harmonic: bool = False) -> np.ndarray:
    coeffs = rng.standard_normal(n_trig_coeffs(cutoff))
    if top_harmonic and cutoff >= 0:
        # guarantee energy at the top harmonic
        idx = 0 if cutoff == 0 else 2 * cutoff - 1
        if abs(coeffs[idx]) < 0.5:
            coeffs[idx] = 1.0
    return coeffs


def synthesize_signal(spectrum: Spectrum, profile: BandwidthProfile, seed,
                      mode: str, period_or_window, plan: Optional[SamplingPlan] = None,
                      filtration=None, sequence=None) -> GraphSignal:
    """Random member of the signal space built from free base content plus
    one quotient witness per filtration level.

    When ``plan`` is omitted it is derived from the profile. Periodic-mode
    output is verified against the membership checker before being returned.
    """
    from .planner import plan_problem

    if plan is None:
        _, profile, filtration, sequence, plan = plan_problem(spectrum, profile)
    rng = np.random.default_rng(seed)

    if mode == "periodic":
        period = Fraction(period_or_window)
        contents = {}
        for w in plan.base_vertices:
            contents[("base", w)] = _random_trig_coeffs(rng, harmonic_cutoff(profile.vertex_bw[w], period))
        for spec in plan.levels:
            contents[("level", spec.level)] = _random_trig_coeffs(rng, harmonic_cutoff(spec.b, period))
        signal = assemble_periodic(plan, period, contents)
        signal.zero_space = signal.coeffs.size == 0 or not np.any(signal.coeffs)
        bad = membership_violations(spectrum, profile, signal)
        if bad:
            raise AssertionError(f"synthesized signal violates its own constraints: {bad}")
        return signal

    if mode == "sinc":
        window = (Fraction(period_or_window[0]), Fraction(period_or_window[1]))
        parts = []
        base_series = []
        for w in plan.base_vertices:
            rate = 2 * Fraction(profile.vertex_bw[w])
            if rate == 0:
                base_series.append(None)
                continue
            lo, hi = sinc_indices(rate, Fraction(0), window)
            base_series.append(make_sinc_series(rate, Fraction(0), window,
                                                rng.standard_normal(hi - lo + 1)))
        parts.append((plan.base_extension, base_series))
        for spec in plan.levels:
            rate = 2 * spec.b
            series = [None] * len(spec.v_set)
            if rate > 0:
                lo, hi = sinc_indices(rate, Fraction(0), window)
                series[spec.col] = make_sinc_series(rate, Fraction(0), window,
                                                    rng.standard_normal(hi - lo + 1))
            parts.append((spec.extension, series))
        return CompositeSignal(n=spectrum.n, parts=parts)

    raise ValueError(f"unknown mode {mode!r}")


def assemble_periodic(plan: SamplingPlan, period: Fraction, contents: dict) -> PeriodicSignal:
    """Sum the extension images of per-unknown trig contents."""
    top = -1
    for coeffs in contents.values():
        top = max(top, (len(coeffs) - 1) // 2 if len(coeffs) else -1)
    full = np.zeros((plan.n, n_trig_coeffs(top)))
    for (kind, key), coeffs in contents.items():
        padded = pad_coeffs(np.asarray(coeffs, dtype=float), top)
        if kind == "base":
            col = plan.base_col(key)
            full += np.outer(plan.base_extension[:, col], padded)
        else:
            spec = plan.level_spec(key)
            full += np.outer(spec.extension[:, spec.col], padded)
    return PeriodicSignal(period=period, coeffs=full)


def quotient_witness(spectrum: Spectrum, profile: BandwidthProfile, step, period) -> PeriodicSignal:
    """Signal whose peeled transform has support reaching the quotient bound.

    Construction from the tightness argument: full-bandwidth content at a
    contributing vertex of the optimal uniqueness set, zero elsewhere on it.
    """
    from .dependence import extension_matrix, x_support

    period = Fraction(period)
    x = step.x_vec
    support = x_support(x)
    cutoff = harmonic_cutoff(step.b_star, period)
    candidates = [v for v, hit in zip(step.chosen_v0, support) if hit
                  and profile.vertex_bw[v] >= step.b_star]
    if not candidates:
        raise AssertionError("no witness vertex; quotient bound computation inconsistent")
    vstar = candidates[0]
    coeffs = np.zeros(n_trig_coeffs(cutoff))
    if cutoff >= 0:
        coeffs[0 if cutoff == 0 else 2 * cutoff - 1] = 1.0
    m = extension_matrix(spectrum, step.lambda0, step.chosen_v0)
    col = step.chosen_v0.index(vstar)
    full = np.outer(m[:, col], coeffs)
    return PeriodicSignal(period=period, coeffs=full)
