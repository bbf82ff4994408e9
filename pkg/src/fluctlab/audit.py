"""Uncertainty-product audits: bound comparison, regime labels, time-energy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NonPositiveInput
from .states import (
    HamiltonianSpec,
    MixedEnsemble,
    MomentReport,
    PureState,
    UnitSystem,
    energy_moments,
    ensemble_moments,
    phase_space_moments,
)


class Verdict(str, Enum):
    """Where the product sits relative to the bound.

    MINIMAL marks saturation within tolerance (the regime conventionally
    labeled equilibrium), STRICT a genuine excess (non-equilibrium label),
    BELOW_BOUND a product under the bound - always a numerical artifact of
    discretized inputs, flagged rather than raised.
    """

    MINIMAL = "minimal"
    STRICT = "strict"
    BELOW_BOUND = "below_bound"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    product: float
    bound: float
    relative_excess: float


@dataclass(frozen=True)
class SelfSimilarityReport:
    """Energy spreads of each member next to the ensemble spread.

    max_relative_spread is reported, never asserted small: generic mixtures
    separate the member and ensemble spreads arbitrarily far.
    """

    member_delta_e: tuple
    ensemble_delta_e: float
    max_relative_spread: float


def uncertainty_product(report: MomentReport) -> float:
    """sqrt(var_x * var_p), the product of the two spreads."""
    return math.sqrt(report.var_x * report.var_p)


def classify(report: MomentReport, units: UnitSystem, epsilon: float = 1e-6) -> Classification:
    """Label a moment report against the bound h/(4*pi).

    epsilon is the relative half-width of the saturation band and must lie
    in (0, 0.1).
    """
    if not (0.0 < epsilon < 0.1):
        raise ValueError(f"epsilon must lie in (0, 0.1), got {epsilon}")
    product = uncertainty_product(report)
    bound = units.bound
    excess = product / bound - 1.0
    if abs(excess) <= epsilon:
        verdict = Verdict.MINIMAL
    elif excess > epsilon:
        verdict = Verdict.STRICT
    else:
        verdict = Verdict.BELOW_BOUND
    return Classification(verdict=verdict, product=product, bound=bound, relative_excess=excess)


def time_energy(delta_e: float, units: UnitSystem) -> float:
    """Reference-time interval h/(4*pi*delta_e) paired with an energy spread.

    Applying it twice returns the input, so it converts either way.
    """
    if not (delta_e > 0 and math.isfinite(delta_e)):
        raise NonPositiveInput(f"energy spread must be positive and finite, got {delta_e}")
    return units.bound / delta_e


def entropy_surrogate(ensemble: MixedEnsemble) -> float:
    """Weight entropy -sum(w*ln w); 0 for a single member, at most ln(member count)."""
    w = ensemble.weights
    return float(max(0.0, -(w @ np.log(w))))


def self_similarity_report(
    ensemble: MixedEnsemble, hamiltonian: HamiltonianSpec, units: UnitSystem
) -> SelfSimilarityReport:
    """Member energy spreads (about each member's own mean) versus the
    ensemble spread (about the ensemble mean)."""
    member = tuple(
        math.sqrt(energy_moments(m, hamiltonian, units)[1]) for m in ensemble.members
    )
    ensemble_delta = math.sqrt(energy_moments(ensemble, hamiltonian, units)[1])
    spread = max(abs(d - ensemble_delta) for d in member) / max(ensemble_delta, 1e-300)
    return SelfSimilarityReport(
        member_delta_e=member,
        ensemble_delta_e=ensemble_delta,
        max_relative_spread=spread,
    )


def audit_report(target, units: UnitSystem, epsilon: float = 1e-6, delta_e: float | None = None) -> dict:
    """Assemble the JSON-ready audit of a PureState or MixedEnsemble.

    delta_t is filled from an externally supplied energy spread when given,
    else null; the moment data alone carries no energy scale.
    """
    if isinstance(target, MixedEnsemble):
        report = ensemble_moments(target, units)
        surrogate = entropy_surrogate(target)
    elif isinstance(target, PureState):
        report = phase_space_moments(target, units)
        surrogate = 0.0
    else:
        raise TypeError(f"expected PureState or MixedEnsemble, got {type(target).__name__}")
    result = classify(report, units, epsilon)
    return {
        "product": result.product,
        "bound": result.bound,
        "classification": result.verdict.value,
        "relative_excess": result.relative_excess,
        "delta_t": time_energy(delta_e, units) if delta_e is not None else None,
        "entropy_surrogate": surrogate,
    }
