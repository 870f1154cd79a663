"""Shared test oracles, independent of the implementations they check."""

from __future__ import annotations

import math

import numpy as np


def pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def cdf_by_quadrature(z: float, panels: int = 4000) -> float:
    """Standard normal CDF by composite Simpson integration from 0 to z.

    With 4000 panels over |z| <= 8 the truncation error is far below
    1e-12; uses only the density, never erf/erfc.
    """
    if z < 0.0:
        return 1.0 - cdf_by_quadrature(-z, panels)
    zc = min(z, 12.0)  # the tail beyond 12 is ~1e-33, below double resolution here
    h = zc / panels
    total = pdf(0.0) + pdf(zc)
    for i in range(1, panels):
        total += pdf(i * h) * (4.0 if i % 2 else 2.0)
    return 0.5 + total * h / 3.0


def sf_by_quadrature(z: float, panels: int = 4000) -> float:
    return 1.0 - cdf_by_quadrature(z, panels)


def mean_excess_by_formula(z: float) -> float:
    """Direct mean-excess formula on top of the quadrature CDF."""
    return pdf(z) / sf_by_quadrature(z) - z


def bisect_root(fn, lo: float, hi: float, tol: float = 1e-12,
                max_iter: int = 200) -> float:
    """Plain bisection for a sign change of fn on [lo, hi]."""
    flo = fn(lo)
    fhi = fn(hi)
    assert flo * fhi <= 0, f"no sign change on [{lo}, {hi}]"
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if fmid == 0.0 or (hi - lo) < tol:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def random_instance(rng: np.random.Generator, n: int, m: int = 4, k: int = 5,
                    eta=None, gamma_tilde=None, psi=None):
    """Small random instance with uniform-style coefficients."""
    from socalloc import Instance, RiskSpec
    c = rng.uniform(0, 1, (n, k))
    a_bar = rng.uniform(0, 4, (n, m, k))
    k_diag = rng.uniform(0, 1, (n, m, k)) ** 2
    risk = RiskSpec(eta=eta, gamma_tilde=gamma_tilde, psi=psi)
    return Instance(c, a_bar, k_diag, np.ones(m), risk)


def random_decisions(rng: np.random.Generator, n: int, k: int,
                     accept_prob: float = 0.7) -> list:
    return [int(rng.integers(k)) if rng.random() < accept_prob else None
            for _ in range(n)]


def trace_by_recomputation(instance, decisions):
    """Brute-force trace reconstruction from scratch (the oracle side)."""
    from socalloc import SolutionTrace
    m = instance.m
    mean = np.zeros(m)
    var = np.zeros(m)
    objective = 0.0
    for t, l in enumerate(decisions):
        if l is None:
            continue
        objective += float(instance.c[t, l])
        mean += instance.a_bar[t, :, l]
        var += instance.k_diag[t, :, l]
    return SolutionTrace(decisions=tuple(decisions), objective=objective,
                         mean_consumption=mean, variance_accum=var)
