"""Shared generators for randomized suites."""

from fractions import Fraction

import numpy as np

import ctgs

B_POOL = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2),
          Fraction(5, 2), Fraction(3), Fraction(4), Fraction(5)]
C_FINITE_POOL = [Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3),
                 Fraction(4), Fraction(6)]


def random_connected_graph(rng, n):
    """Random spanning tree plus extra edges, random weights (simple spectra)."""
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append([u, v, float(rng.uniform(0.5, 2.0))])
    present = {(min(u, v), max(u, v)) for u, v, _ in edges}
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        u, v = rng.choice(n, size=2, replace=False)
        key = (min(int(u), int(v)), max(int(u), int(v)))
        if key not in present:
            present.add(key)
            edges.append([key[0], key[1], float(rng.uniform(0.5, 2.0))])
    return ctgs.GraphModel.create(n, edges)


def random_spectrum(rng, n):
    graph = random_connected_graph(rng, n)
    return ctgs.eigendecompose(ctgs.build_shift_operator(graph, "laplacian"))


def random_profile(rng, n, allow_zero_c=True):
    vertex_bw = [B_POOL[int(rng.integers(0, len(B_POOL)))] for _ in range(n)]
    freq_bw = []
    for _ in range(n):
        roll = rng.random()
        if allow_zero_c and roll < 0.25:
            freq_bw.append(Fraction(0))
        elif roll < 0.6:
            freq_bw.append(C_FINITE_POOL[int(rng.integers(0, len(C_FINITE_POOL)))])
        else:
            freq_bw.append(ctgs.INF)
    return ctgs.BandwidthProfile.create(vertex_bw, freq_bw)


def random_lambda0(rng, n):
    size = int(rng.integers(0, n))
    return tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))


def plannable_instances(master_seed, count, n_max=7, max_attempts_factor=8):
    """Yield (spectrum, profile, bundle) for problems that admit a plan."""
    rng = np.random.default_rng(master_seed)
    produced = 0
    attempts = 0
    while produced < count:
        attempts += 1
        if attempts > max_attempts_factor * count:
            raise AssertionError(f"only {produced}/{count} plannable instances found")
        n = int(rng.integers(2, n_max + 1))
        spectrum = random_spectrum(rng, n)
        profile = random_profile(rng, n)
        try:
            bundle = ctgs.plan_problem(spectrum, profile)
        except ctgs.InfeasibleProblemError:
            continue
        produced += 1
        yield spectrum, profile, bundle


def independence(spectrum, lambda0, vset):
    """Set independence in the dependence matroid (definition-level)."""
    vset = tuple(sorted(vset))
    return all(
        not ctgs.is_dependent(spectrum, lambda0, [u for u in vset if u != v], v)
        for v in vset
    )
