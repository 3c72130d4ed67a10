"""Vertex dependence induced by zero-bandwidth frequencies, and its matroid.

With ``lambda0`` the set of frequencies whose signals are forced to vanish,
feasible snapshots live in the null space of the corresponding eigenvector
rows. A vertex ``v`` depends on a vertex set ``V'`` when every feasible
snapshot that vanishes on ``V'`` also vanishes at ``v`` — equivalently, every
null-space direction of the eigenrow submatrix over the complement of ``V'``
has zero ``v``-component. Independence in this sense is a matroid whose bases
are exactly the uniqueness sets, which is what makes the greedy minimal-rate
search below exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import ScaleLimitError
from .numerics import COMPONENT_TOL, is_invertible, null_space
from .spectral import Spectrum

ENUMERATION_GUARD = 14


def _complement(n: int, vertices: Iterable[int]) -> list:
    excluded = set(vertices)
    return [v for v in range(n) if v not in excluded]


def is_dependent(spectrum: Spectrum, lambda0: Sequence[int], vset: Sequence[int], v: int) -> bool:
    """True iff ``v`` is lambda0-dependent on ``vset``.

    Checked on an orthonormal null-space basis of the eigenrow submatrix
    over the complement of ``vset``; the verdict is basis- and
    sign-independent.
    """
    vset = sorted(set(vset))
    if v in vset:
        raise ValueError(f"vertex {v} is a member of the candidate set")
    if not 0 <= v < spectrum.n:
        raise IndexError(f"vertex {v} out of range")
    comp = _complement(spectrum.n, vset)
    basis = null_space(spectrum.submatrix(lambda0, comp))
    if basis.shape[1] == 0:
        return True
    row = comp.index(v)
    return float(np.linalg.norm(basis[row, :])) <= COMPONENT_TOL


def is_uniqueness_set(spectrum: Spectrum, lambda0: Sequence[int], vset: Sequence[int]) -> bool:
    """Size condition plus invertibility of the complement submatrix."""
    vset = sorted(set(vset))
    lambda0 = sorted(set(lambda0))
    if len(vset) + len(lambda0) != spectrum.n:
        return False
    comp = _complement(spectrum.n, vset)
    return is_invertible(spectrum.submatrix(lambda0, comp))


@dataclass(frozen=True)
class UniquenessSet:
    """A vertex set that determines all snapshots, with cached complement data."""

    vertices: tuple
    lambda0: tuple
    complement: tuple

    def __len__(self):
        return len(self.vertices)


def make_uniqueness_set(spectrum: Spectrum, lambda0: Sequence[int], vertices: Sequence[int]) -> UniquenessSet:
    vertices = tuple(sorted(set(vertices)))
    lambda0 = tuple(sorted(set(lambda0)))
    if not is_uniqueness_set(spectrum, lambda0, vertices):
        raise ValueError(f"{vertices} is not a uniqueness set for frequencies {lambda0}")
    return UniquenessSet(vertices=vertices, lambda0=lambda0,
                         complement=tuple(_complement(spectrum.n, vertices)))


def enumerate_uniqueness_sets(spectrum: Spectrum, lambda0: Sequence[int]) -> list:
    """All uniqueness sets, lexicographically sorted. Brute force, guarded."""
    if spectrum.n > ENUMERATION_GUARD:
        raise ScaleLimitError(
            f"uniqueness-set enumeration is limited to n <= {ENUMERATION_GUARD}, got n = {spectrum.n}")
    lambda0 = tuple(sorted(set(lambda0)))
    size = spectrum.n - len(lambda0)
    out = []
    for vset in combinations(range(spectrum.n), size):
        if is_uniqueness_set(spectrum, lambda0, vset):
            out.append(UniquenessSet(vertices=vset, lambda0=lambda0,
                                     complement=tuple(_complement(spectrum.n, vset))))
    return out


def extension_matrix(spectrum: Spectrum, lambda0: Sequence[int], vset) -> np.ndarray:
    """|V| x |V0| operator extending values on V0 to the whole vertex set.

    For any snapshot x on V0, M @ x is the unique snapshot with the
    prescribed V0 values and zero transform at every frequency in lambda0.
    Rows at V0 positions form the identity.
    """
    if isinstance(vset, UniquenessSet):
        vertices = list(vset.vertices)
        lambda0 = list(vset.lambda0)
    else:
        vertices = sorted(set(vset))
        lambda0 = sorted(set(lambda0))
    comp = _complement(spectrum.n, vertices)
    m = np.zeros((spectrum.n, len(vertices)))
    for col, v in enumerate(vertices):
        m[v, col] = 1.0
    if lambda0:
        block = spectrum.submatrix(lambda0, comp)
        rhs = spectrum.submatrix(lambda0, vertices)
        m[comp, :] = -np.linalg.solve(block, rhs)
    return m


def x_vector(spectrum: Spectrum, lambda0: Sequence[int], vset, lambda_star: int) -> np.ndarray:
    """Row vector expressing the lambda_star transform in terms of V0 signals."""
    m = extension_matrix(spectrum, lambda0, vset)
    return spectrum.row(lambda_star) @ m


def x_support(x: np.ndarray) -> np.ndarray:
    """Boolean mask of the non-vanishing entries of an x-vector."""
    scale = float(np.max(np.abs(x))) if x.size else 0.0
    if scale == 0.0:
        return np.zeros(x.shape, dtype=bool)
    return np.abs(x) > COMPONENT_TOL * max(1.0, scale)


def greedy_minimal_vertex_set(spectrum: Spectrum, lambda0: Sequence[int], vertex_bw: Sequence):
    """Greedy matroid optimum: uniqueness set minimizing the bandwidth sum.

    Candidates are scanned in ascending (bandwidth, index) order and added
    whenever they are not lambda0-dependent on the current set. Returns the
    set together with its sampling rate ``2 * sum(bw)``.
    """
    lambda0 = tuple(sorted(set(lambda0)))
    target = spectrum.n - len(lambda0)
    chosen: list = []
    for v in sorted(range(spectrum.n), key=lambda v: (vertex_bw[v], v)):
        if len(chosen) == target:
            break
        if not is_dependent(spectrum, lambda0, chosen, v):
            chosen.append(v)
    if len(chosen) != target:
        raise ValueError("greedy search failed to reach a basis; inconsistent spectrum")
    v0 = make_uniqueness_set(spectrum, lambda0, chosen)
    rate = 2 * sum((Fraction(vertex_bw[v]) for v in v0.vertices), Fraction(0))
    return v0, rate


def minimal_rate_bruteforce(spectrum: Spectrum, lambda0: Sequence[int], vertex_bw: Sequence):
    """Exhaustive oracle for the minimal rate; pairs with the greedy search."""
    best = None
    for cand in enumerate_uniqueness_sets(spectrum, lambda0):
        rate = 2 * sum((Fraction(vertex_bw[v]) for v in cand.vertices), Fraction(0))
        if best is None or rate < best[1]:
            best = (cand, rate)
    if best is None:
        raise ValueError("no uniqueness set exists; constraints inconsistent")
    return best
