"""Photon-counting statistics.

Cavity photon-number and photocount distributions are p(z)-mixtures of
Poissonians; all three families here share one log-space mixture kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln

from .optics import AmplitudeTable
from .states import ZDistribution
from .trajectory import TrajectoryState

_TAIL_BOUND = 1e-10


class DistributionKind(Enum):
    CAVITY_NUMBER = "cavity_number"
    COUNTS = "counts"
    CONDITIONAL_COUNTS = "conditional_counts"


@dataclass(frozen=True)
class PhotonDistribution:
    n_values: np.ndarray
    probabilities: np.ndarray
    kind: DistributionKind

    def __post_init__(self):
        n = np.asarray(self.n_values, dtype=int)
        p = np.asarray(self.probabilities, dtype=float)
        if abs(p.sum() - 1.0) > _TAIL_BOUND:
            raise ValueError("distribution not normalized after truncation")
        object.__setattr__(self, "n_values", n)
        object.__setattr__(self, "probabilities", p)

    @property
    def mean(self) -> float:
        return float(np.dot(self.n_values, self.probabilities))

    @property
    def variance(self) -> float:
        return float(np.dot(self.n_values**2, self.probabilities) - self.mean**2)

    @property
    def fano(self) -> float:
        if self.mean <= 0:
            raise ValueError("Fano factor undefined at zero mean")
        return self.variance / self.mean

    @property
    def mandel_q(self) -> float:
        return self.fano - 1.0


def poisson_mixture(rates: np.ndarray, weights: np.ndarray,
                    kind: DistributionKind) -> PhotonDistribution:
    """sum_z weights[z] * Poisson(n; rates[z]), truncated to tail < 1e-10.

    Poisson terms use log factorials; the truncation point starts ten
    standard deviations past the largest rate and is extended until the
    captured mass bound holds.
    """
    rates = np.asarray(rates, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if np.any(rates < 0):
        raise ValueError("rates must be nonnegative")
    top = rates.max(initial=0.0)
    n_max = int(np.ceil(top + 10.0 * np.sqrt(top) + 20.0))
    while True:
        n = np.arange(n_max + 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            logpmf = (np.outer(np.log(np.where(rates > 0, rates, 1.0)), n)
                      - rates[:, None] - gammaln(n + 1.0)[None, :])
        pmf = np.exp(logpmf)
        zero = rates == 0
        if np.any(zero):
            pmf[zero] = 0.0
            pmf[zero, 0] = 1.0
        p = weights @ pmf
        tail = 1.0 - p.sum()
        if tail < _TAIL_BOUND:
            break
        n_max *= 2
    return PhotonDistribution(n, p / p.sum(), kind)


def cavity_photon_distribution(state: TrajectoryState) -> PhotonDistribution:
    """Probability of n photons in the cavity for the conditional state."""
    return poisson_mixture(state.amplitudes.intensity,
                           state.dist.probabilities,
                           DistributionKind.CAVITY_NUMBER)


def photocount_distribution(p0: ZDistribution, amplitudes: AmplitudeTable,
                            kappa: float, t: float) -> PhotonDistribution:
    """Ensemble probability of m detections in [0, t] (steady regime).

    The mean grows as 2 kappa t <a+ a>_0; the distribution is never
    sub-Poissonian.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    return poisson_mixture(2.0 * kappa * amplitudes.intensity * t,
                           p0.probabilities, DistributionKind.COUNTS)


def conditional_photocount_distribution(p_at_T: ZDistribution,
                                        amplitudes: AmplitudeTable,
                                        kappa: float, T: float, t: float
                                        ) -> PhotonDistribution:
    """Counts in (T, t] given the conditional distribution reached at T.

    A zero-length window (t == T) yields a point mass at m = 0.
    """
    if t < T:
        raise ValueError("need t >= T")
    return poisson_mixture(2.0 * kappa * amplitudes.intensity * (t - T),
                           p_at_T.probabilities,
                           DistributionKind.CONDITIONAL_COUNTS)
