"""From risk targets to cone form, and from cone form to linear columns.

``to_soc`` turns the per-resource risk targets into safety coefficients
psi so the feasible consumption of resource j becomes

    sum_t a_bar_tj . x_t + psi_j * sqrt(sum_t x_t . K_tj x_t) <= b_j.

``linearize`` replaces the coupled square root by per-request linear
columns

    a_tilde_tj = a_bar_tj + (psi_j / sqrt(n)) * gamma_tj,

where gamma is the per-scheme standard deviation vector.  For one-hot
selections the per-step standard deviation equals gamma . x_t exactly,
and summing those over t never exceeds the joint square root, so every
solution feasible in cone form stays feasible for the linear columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .gaussian import safety_coefficient
from .model import Instance, RiskSpec, _frozen


@dataclass(frozen=True)
class LinearizedInstance:
    """An instance together with its per-request pricing columns."""

    base: Instance
    a_tilde: np.ndarray  # (n, m, k)

    def __post_init__(self):
        object.__setattr__(self, "a_tilde", _frozen(self.a_tilde))
        if self.a_tilde.shape != self.base.a_bar.shape:
            raise ConfigError("a_tilde shape does not match the instance")

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def k(self) -> int:
        return self.base.k


def to_soc(instance: Instance) -> Instance:
    """Populate the derived safety coefficients on a new instance.

    psi_j is the larger of the quantile implied by eta_j and the
    mean-excess inverse implied by gamma_tilde_j; coefficients are
    computed once here so solver loops never touch root finding.
    """
    risk = instance.risk
    if risk.eta is None and risk.gamma_tilde is None:
        raise ConfigError("risk spec is empty: need eta and/or gamma_tilde")
    psi = np.array([
        safety_coefficient(
            None if risk.eta is None else float(risk.eta[j]),
            None if risk.gamma_tilde is None else float(risk.gamma_tilde[j]))
        for j in range(instance.m)
    ])
    return Instance(
        instance.c, instance.a_bar, instance.k_diag, instance.d,
        RiskSpec(eta=risk.eta, gamma_tilde=risk.gamma_tilde, psi=psi))


def linearize(instance: Instance) -> LinearizedInstance:
    """Build the per-request linear columns a_tilde.

    Requires psi (see :func:`to_soc`); with psi = 0 the columns reduce
    to the plain means.
    """
    psi = instance.risk.psi
    if psi is None:
        raise ConfigError("instance has no safety coefficients; apply to_soc first")
    scale = psi[None, :, None] / math.sqrt(instance.n)
    a_tilde = instance.a_bar + scale * instance.gamma
    return LinearizedInstance(instance, a_tilde)
