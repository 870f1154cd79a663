"""Offline dual baseline for the linearized problem.

The fractional relaxation's optimum equals, by strong duality, the
minimum over nonnegative prices p of the dual function

    f(p) = p . b + sum_t max(0, max_l (c_t - p . A_t)[l]),

which one pass over the requests evaluates exactly, together with a
subgradient b - sum_t A_t x_t(p).  The optimal p lies in the box
{p >= 0, sum(p) <= c_max / d_min}: outside it, f(p) >= p . b > n*c_max
>= f(0).

``minimize_dual`` runs projected subgradient descent over that box with
normalized directions, a diminishing step a/sqrt(iter) inside each
round, and best-iterate tracking; the step scale a starts at the box
radius and halves between rounds, restarting from the incumbent.  The
search stops once two consecutive fine-scale rounds (scale below a
thousandth of the box radius, so coarse exploratory rounds cannot end
the search) each improve the incumbent by less than tol * |value|.  The
whole procedure is deterministic, so certificates are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .model import Decision, _frozen
from .transform import LinearizedInstance


@dataclass(frozen=True)
class DualCertificate:
    """Best dual point found, its value, and the work spent getting it."""

    value: float
    p_star: np.ndarray
    iterations: int
    residual: float

    def __post_init__(self):
        object.__setattr__(self, "p_star", _frozen(self.p_star))

    def to_dict(self) -> dict:
        return {"value": self.value, "p_star": self.p_star.tolist(),
                "iterations": self.iterations, "residual": self.residual}

    @classmethod
    def from_dict(cls, doc: dict) -> "DualCertificate":
        return cls(value=float(doc["value"]), p_star=doc["p_star"],
                   iterations=int(doc["iterations"]),
                   residual=float(doc["residual"]))


def dual_value_and_subgradient(prices: np.ndarray,
                               lin: LinearizedInstance) -> tuple[float, np.ndarray]:
    """Exact dual value and one subgradient at ``prices``.

    The subgradient is b - sum_t A_t x_t(p) where x_t(p) selects any
    maximizer with positive reduced value (and nothing otherwise).
    """
    prices = np.asarray(prices, dtype=float)
    if np.any(prices < 0):
        raise DomainError("prices must be nonnegative")
    inst = lin.base
    b = inst.budget
    reduced = inst.c - np.tensordot(prices, lin.a_tilde, axes=(0, 1))
    choice = reduced.argmax(axis=1)
    best = reduced[np.arange(inst.n), choice]
    active = best > 0.0
    value = float(prices @ b + best[active].sum())
    if active.any():
        chosen = lin.a_tilde[active, :, :][np.arange(active.sum()), :, choice[active]]
        consumption = chosen.sum(axis=0)
    else:
        consumption = np.zeros(inst.m)
    return value, b - consumption


def dual_value(prices: np.ndarray, lin: LinearizedInstance) -> float:
    """Exact dual function value at ``prices`` (one pass over requests)."""
    return dual_value_and_subgradient(prices, lin)[0]


def _project_box(p: np.ndarray, radius: float) -> np.ndarray:
    p = np.maximum(p, 0.0)
    s = p.sum()
    if s > radius:
        p = p * (radius / s)
    return p


def minimize_dual(lin: LinearizedInstance, tol: float = 1e-6, *,
                  iteration_cap: int = 20000,
                  round_iters: int = 120) -> DualCertificate:
    """Minimize the dual function over the bounded price box.

    Returns the best iterate as a :class:`DualCertificate` whose
    ``value`` is exactly the dual function at ``p_star`` (an upper bound
    on the relaxation optimum, tight to roughly ``tol``) and whose
    ``residual`` is the last full round's relative improvement.

    Raises
    ------
    ConvergenceError
        If the iteration cap is reached before a round's improvement
        drops below tol * |value|; the best certificate so far rides
        along on the exception.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    inst = lin.base
    radius = float(inst.c.max()) / float(inst.d.min())
    if radius <= 0:  # all revenues <= 0: nothing is ever worth accepting
        radius = 1.0

    p = np.zeros(inst.m)
    best_f, _ = dual_value_and_subgradient(p, lin)
    best_p = p.copy()
    evals = 1
    scale = radius
    fine_scale = 1e-3 * radius
    quiet_rounds = 0
    residual = np.inf

    while evals < iteration_cap:
        p = best_p.copy()
        round_start = best_f
        for it in range(1, round_iters + 1):
            f, g = dual_value_and_subgradient(p, lin)
            evals += 1
            if f < best_f:
                best_f, best_p = f, p.copy()
            norm = np.linalg.norm(g)
            if norm == 0.0:
                break
            p = _project_box(p - (scale / np.sqrt(it)) * g / norm, radius)
            if evals >= iteration_cap:
                break
        improvement = round_start - best_f
        residual = improvement / max(abs(best_f), 1.0)
        if improvement < tol * max(abs(best_f), 1.0):
            quiet_rounds += 1 if scale <= fine_scale else 0
        else:
            quiet_rounds = 0
        scale *= 0.5
        if quiet_rounds >= 2:
            return DualCertificate(value=best_f, p_star=best_p,
                                   iterations=evals, residual=float(residual))

    raise ConvergenceError(
        f"dual minimization did not settle within {iteration_cap} evaluations",
        certificate=DualCertificate(value=best_f, p_star=best_p,
                                    iterations=evals, residual=float(residual)))


def greedy_primal(lin: LinearizedInstance) -> tuple[list[Decision], float]:
    """Feasibility-preserving greedy pass over the linearized problem.

    Takes each request's highest-revenue scheme whenever doing so keeps
    every linear resource row within budget.  Any such selection's
    revenue lower-bounds the relaxation optimum, so it pairs with a dual
    certificate as a weak-duality sandwich.
    """
    inst = lin.base
    b = inst.budget
    used = np.zeros(inst.m)
    decisions: list[Decision] = []
    revenue = 0.0
    for t in range(inst.n):
        order = np.argsort(-inst.c[t])
        pick: Decision = None
        for l in order:
            if inst.c[t, l] <= 0:
                break
            if np.all(used + lin.a_tilde[t, :, l] <= b):
                pick = int(l)
                break
        if pick is not None:
            used += lin.a_tilde[t, :, pick]
            revenue += float(inst.c[t, pick])
        decisions.append(pick)
    return decisions, revenue
