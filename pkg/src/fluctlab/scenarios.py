"""Reproducible experiment harness: parameter sweeps over model systems and
a toy relaxation walk toward the bound.

The walk is invented dynamics - a seeded multiplicative contraction of the
gap above the bound - included to illustrate monotone approach to
saturation, not to model any equation of motion.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .audit import classify, entropy_surrogate
from .density import FluctuationParams
from .errors import InvalidRecipe
from .states import (
    GridSpec,
    UnitSystem,
    ensemble_moments,
    oscillator_eigenstates,
    phase_space_moments,
    thermal_ensemble,
)

MAX_SWEEP_LEVEL = 30


@dataclass(frozen=True)
class SweepRow:
    label: str
    parameter: float
    product: float
    bound: float
    classification: str
    entropy_surrogate: float


@dataclass(frozen=True)
class WalkTrace:
    step: int
    product: float
    distance_to_bound: float


def eigenstate_sweep(
    n_max: int,
    mass: float,
    omega: float,
    grid: GridSpec,
    units: UnitSystem,
    epsilon: float = 1e-6,
) -> list[SweepRow]:
    """One row per oscillator level 0..n_max; products grow as (2n+1) times the bound."""
    if int(n_max) != n_max or not (0 <= n_max <= MAX_SWEEP_LEVEL):
        raise InvalidRecipe(f"n_max must be an integer in [0, {MAX_SWEEP_LEVEL}], got {n_max}")
    rows = []
    for n, state in enumerate(oscillator_eigenstates(int(n_max), mass, omega, grid, units)):
        result = classify(phase_space_moments(state, units), units, epsilon)
        rows.append(
            SweepRow(
                label=f"n={n}",
                parameter=float(n),
                product=result.product,
                bound=result.bound,
                classification=result.verdict.value,
                entropy_surrogate=0.0,
            )
        )
    return rows


def thermal_sweep(
    temperatures,
    mass: float,
    omega: float,
    n_max: int,
    grid: GridSpec,
    units: UnitSystem,
    epsilon: float = 1e-6,
) -> list[SweepRow]:
    """One row per temperature for the Boltzmann oscillator mixture (k_B = 1)."""
    rows = []
    for temperature in temperatures:
        ensemble = thermal_ensemble(omega, mass, float(temperature), n_max, grid, units)
        result = classify(ensemble_moments(ensemble, units), units, epsilon)
        rows.append(
            SweepRow(
                label=f"T={float(temperature):g}",
                parameter=float(temperature),
                product=result.product,
                bound=result.bound,
                classification=result.verdict.value,
                entropy_surrogate=entropy_surrogate(ensemble),
            )
        )
    return rows


def relaxation_walk(
    start: FluctuationParams,
    steps: int,
    step_size: float,
    seed: int,
    units: UnitSystem,
) -> list[WalkTrace]:
    """Seeded contraction of the product toward the bound.

    Each step multiplies the gap above the bound by (1 - step_size * u) with
    u uniform on (0, 1), then projects so the product never crosses below
    the bound.  The trace has steps + 1 points and is monotone nonincreasing.
    """
    if int(steps) != steps or steps < 0:
        raise InvalidRecipe(f"steps must be a nonnegative integer, got {steps}")
    if not (0.0 < step_size < 0.5):
        raise InvalidRecipe(f"step_size must lie in (0, 0.5), got {step_size}")
    bound = units.bound
    gap0 = max(math.sqrt(start.var_x * start.var_p) - bound, 0.0)
    draws = np.random.default_rng(int(seed)).random(int(steps))
    gaps = np.empty(int(steps) + 1)
    gaps[0] = gap0
    gaps[1:] = gap0 * np.cumprod(1.0 - step_size * draws)
    np.maximum(gaps, 0.0, out=gaps)
    return [
        WalkTrace(step=k, product=bound + gap, distance_to_bound=gap)
        for k, gap in enumerate(gaps.tolist())
    ]
