"""Bandwidth profiles: uniformity, finitization, tightness and tightening."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .dependence import enumerate_uniqueness_sets, is_dependent
from .errors import InfeasibleProblemError, ProblemFormatError, ScaleLimitError
from .numerics import INF, as_bandwidth, bandwidth_to_json, is_inf, svd_rank
from .spectral import Spectrum

TIGHTEN_GUARD = 12
UNIFORM_EXHAUSTIVE_GUARD = 12


@dataclass(frozen=True)
class BandwidthProfile:
    """Per-vertex and per-frequency bandwidth bounds (extended reals)."""

    vertex_bw: tuple
    freq_bw: tuple

    @staticmethod
    def create(vertex_bw: Sequence, freq_bw: Sequence) -> "BandwidthProfile":
        return BandwidthProfile(
            vertex_bw=tuple(as_bandwidth(b, f"/B/{i}") for i, b in enumerate(vertex_bw)),
            freq_bw=tuple(as_bandwidth(c, f"/C/{i}") for i, c in enumerate(freq_bw)),
        )

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_bw)

    @property
    def n_frequencies(self) -> int:
        return len(self.freq_bw)

    def lambda0(self) -> tuple:
        """Frequencies whose bandwidth bound is exactly zero."""
        return tuple(i for i, c in enumerate(self.freq_bw) if c == 0)

    def all_vertex_finite(self) -> bool:
        return all(not is_inf(b) for b in self.vertex_bw)

    def is_simple(self) -> bool:
        """True when every frequency bound is 0 or infinity."""
        return all(c == 0 or is_inf(c) for c in self.freq_bw)

    def with_freq_zeroed(self, frequency: int) -> "BandwidthProfile":
        freq = list(self.freq_bw)
        freq[frequency] = Fraction(0)
        return BandwidthProfile(self.vertex_bw, tuple(freq))

    def with_vertex_bw(self, vertex_bw: Sequence) -> "BandwidthProfile":
        return BandwidthProfile(tuple(vertex_bw), self.freq_bw)

    def to_json(self) -> dict:
        return {
            "B": [bandwidth_to_json(b) for b in self.vertex_bw],
            "C": [bandwidth_to_json(c) for c in self.freq_bw],
        }


def validate_profile(spectrum: Spectrum, profile: BandwidthProfile) -> None:
    if profile.n_vertices != spectrum.n:
        raise ProblemFormatError(f"B must list {spectrum.n} vertex bandwidths", "/B")
    if profile.n_frequencies != spectrum.n:
        raise ProblemFormatError(f"C must list {spectrum.n} frequency bandwidths", "/C")


@dataclass(frozen=True)
class UniformityCertificate:
    """Outcome of the uniform-bandlimitedness test.

    ``witness_freqs`` is the frequency subset certifying uniformity when
    some vertex bound is infinite; ``bound`` is the finite replacement value
    those vertices receive during finitization.
    """

    is_uniform: bool
    v_infinity: tuple
    witness_freqs: Optional[tuple]
    bound: object


def _replacement_bound(profile: BandwidthProfile, v_inf, freqs) -> object:
    finite_b = [profile.vertex_bw[v] for v in range(profile.n_vertices) if v not in v_inf]
    parts = list(finite_b) + [profile.freq_bw[f] for f in freqs]
    return max(parts) if parts else Fraction(0)


def check_uniform(spectrum: Spectrum, profile: BandwidthProfile) -> UniformityCertificate:
    """Decide whether every signal in the space has uniformly finite bandwidth.

    With infinite vertex bounds present, uniformity holds iff some subset of
    finite-bound frequencies of matching size has an invertible eigenrow
    block over those vertices. The exhaustive search below also minimizes
    the finitization bound (ties broken lexicographically); past the guard
    size it falls back to greedy rank building with the coarse bound.
    """
    validate_profile(spectrum, profile)
    v_inf = tuple(v for v, b in enumerate(profile.vertex_bw) if is_inf(b))
    if not v_inf:
        finite_max = max(profile.vertex_bw) if profile.vertex_bw else Fraction(0)
        return UniformityCertificate(True, (), None, finite_max)

    finite_freqs = [f for f, c in enumerate(profile.freq_bw) if not is_inf(c)]
    k = len(v_inf)
    if len(finite_freqs) < k:
        return UniformityCertificate(False, v_inf, None, INF)

    if k <= UNIFORM_EXHAUSTIVE_GUARD:
        best = None
        for cand in combinations(finite_freqs, k):
            block = spectrum.submatrix(cand, v_inf)
            if svd_rank(block) == k:
                bound = _replacement_bound(profile, set(v_inf), cand)
                if best is None or bound < best[0]:
                    best = (bound, cand)
        if best is None:
            return UniformityCertificate(False, v_inf, None, INF)
        return UniformityCertificate(True, v_inf, best[1], best[0])

    # Greedy fallback: build rank one frequency at a time, coarse bound.
    chosen: list = []
    rank = 0
    for f in sorted(finite_freqs, key=lambda f: (profile.freq_bw[f], f)):
        trial = chosen + [f]
        new_rank = svd_rank(spectrum.submatrix(trial, v_inf))
        if new_rank > rank:
            chosen = trial
            rank = new_rank
        if rank == k:
            break
    if rank != k:
        return UniformityCertificate(False, v_inf, None, INF)
    finite_b = [profile.vertex_bw[v] for v in range(profile.n_vertices) if v not in set(v_inf)]
    coarse = max(list(finite_b) + [profile.freq_bw[f] for f in finite_freqs])
    return UniformityCertificate(True, v_inf, tuple(sorted(chosen)), coarse)


def finitize(spectrum: Spectrum, profile: BandwidthProfile,
             cert: UniformityCertificate) -> BandwidthProfile:
    """Replace infinite vertex bounds by the certificate bound.

    Finite entries are untouched; requires a positive uniformity verdict.
    """
    if not cert.is_uniform:
        raise InfeasibleProblemError("space not uniformly bandlimited")
    if not cert.v_infinity:
        return profile
    replaced = [cert.bound if is_inf(b) else b for b in profile.vertex_bw]
    return profile.with_vertex_bw(replaced)


@dataclass(frozen=True)
class TightnessReport:
    tight: bool
    violations: tuple  # ((vertex, prefix, max_bw), ...)


def _sorted_by_bw(vertices, vertex_bw):
    return sorted(vertices, key=lambda v: (vertex_bw[v], v))


def _minimal_prefix(spectrum, lambda0, ordered, v) -> int:
    """Smallest k with v dependent on the first k vertices of ``ordered``."""
    for k in range(len(ordered) + 1):
        if is_dependent(spectrum, lambda0, ordered[:k], v):
            return k
    raise AssertionError("vertex not dependent on a full uniqueness set")


def is_tight(spectrum: Spectrum, profile: BandwidthProfile) -> TightnessReport:
    """Tightness test: no vertex bound exceeds what its dependencies allow.

    Runs the dependence criterion over the closure-generating family: for
    every uniqueness set, vertices outside it are checked against their
    minimal dependent prefix in ascending-bandwidth order.
    """
    validate_profile(spectrum, profile)
    if not profile.all_vertex_finite():
        raise ProblemFormatError("tightness requires finite vertex bandwidths; finitize first")
    if spectrum.n > TIGHTEN_GUARD:
        raise ScaleLimitError(f"tightness testing is limited to n <= {TIGHTEN_GUARD}")
    lambda0 = profile.lambda0()
    bw = profile.vertex_bw
    violations = []
    seen = set()
    for cand in enumerate_uniqueness_sets(spectrum, lambda0):
        ordered = _sorted_by_bw(cand.vertices, bw)
        for v in cand.complement:
            k = _minimal_prefix(spectrum, lambda0, ordered, v)
            if k == 0:
                # dependent on the empty set: the signal is forced to zero
                limit = Fraction(0)
                prefix = ()
            else:
                limit = bw[ordered[k - 1]]
                prefix = tuple(ordered[:k])
            if bw[v] > limit:
                key = (v, prefix)
                if key not in seen:
                    seen.add(key)
                    violations.append((v, prefix, limit))
    return TightnessReport(tight=not violations, violations=tuple(violations))


def tighten(spectrum: Spectrum, profile: BandwidthProfile) -> BandwidthProfile:
    """Maximal tight profile below ``profile`` spanning the same signal space.

    Built as the pointwise-max union of the per-uniqueness-set prefix
    profiles (vertex inherits the bound of the last vertex of its minimal
    dependent prefix), keeping only candidates that stay below the input.
    The minimizing uniqueness set always yields a valid candidate, and every
    valid candidate is tight, so the union is the unique maximum.
    """
    validate_profile(spectrum, profile)
    if not profile.all_vertex_finite():
        raise ProblemFormatError("tighten requires finite vertex bandwidths; finitize first")
    if spectrum.n > TIGHTEN_GUARD:
        raise ScaleLimitError(f"tighten is limited to n <= {TIGHTEN_GUARD}")
    lambda0 = profile.lambda0()
    bw = profile.vertex_bw
    union: Optional[list] = None
    for cand in enumerate_uniqueness_sets(spectrum, lambda0):
        ordered = _sorted_by_bw(cand.vertices, bw)
        candidate = list(bw)
        valid = True
        for v in cand.complement:
            k = _minimal_prefix(spectrum, lambda0, ordered, v)
            value = Fraction(0) if k == 0 else bw[ordered[k - 1]]
            if value > bw[v]:
                valid = False
                break
            candidate[v] = value
        if not valid:
            continue
        if union is None:
            union = candidate
        else:
            union = [max(a, b) for a, b in zip(union, candidate)]
    if union is None:
        raise InfeasibleProblemError("no uniqueness set exists; constraints inconsistent")
    return profile.with_vertex_bw(union)


def profile_union(a: BandwidthProfile, b: BandwidthProfile) -> BandwidthProfile:
    """Pointwise max of vertex bounds; frequency bounds must agree."""
    if a.freq_bw != b.freq_bw:
        raise ProblemFormatError("profile union requires identical frequency bandwidths")
    if a.n_vertices != b.n_vertices:
        raise ProblemFormatError("profile union requires matching vertex counts")
    return BandwidthProfile(tuple(max(x, y) for x, y in zip(a.vertex_bw, b.vertex_bw)), a.freq_bw)
