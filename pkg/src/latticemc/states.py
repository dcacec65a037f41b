"""Initial atom-number distributions p0(z).

Constructors for the superfluid (binomial), Mott-insulator (point mass),
Gaussian-approximate and file-loaded distributions over the scenario's
statistical variable z.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .geometry import LatticeSpec, ZMeaning

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class ZDistribution:
    """Probability vector over an ordered integer grid of z values."""

    z_values: np.ndarray
    probabilities: np.ndarray
    meaning: ZMeaning

    def __post_init__(self):
        z = np.asarray(self.z_values, dtype=int)
        p = np.asarray(self.probabilities, dtype=float)
        if z.shape != p.shape or z.ndim != 1:
            raise ValueError("z_values and probabilities must be equal-length 1D")
        if np.any(np.diff(z) <= 0):
            raise ValueError("z_values must be strictly increasing")
        if np.any(p < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > _NORM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "z_values", z)
        object.__setattr__(self, "probabilities", p)

    @property
    def mean(self) -> float:
        return float(np.dot(self.z_values, self.probabilities))

    @property
    def variance(self) -> float:
        return float(np.dot(self.z_values**2, self.probabilities) - self.mean**2)

    @property
    def std(self) -> float:
        return float(np.sqrt(max(self.variance, 0.0)))

    def with_probabilities(self, p: np.ndarray) -> "ZDistribution":
        return ZDistribution(self.z_values, p, self.meaning)


def _normalized(weights: np.ndarray) -> np.ndarray:
    total = weights.sum()
    if total <= 0:
        raise ValueError("cannot normalize all-zero weights")
    return weights / total


def superfluid_atom_number(spec: LatticeSpec) -> ZDistribution:
    """Binomial distribution of the atom number at K illuminated sites.

    p(z) = C(N, z) (K/M)^z (1 - K/M)^(N - z), z = 0..N.  Computed in log
    space so it stays finite at large N.
    """
    n, ratio = spec.n_atoms, spec.n_illuminated / spec.n_sites
    z = np.arange(n + 1)
    p = np.exp(binom.logpmf(z, n, ratio))
    return ZDistribution(z, _normalized(p), ZMeaning.ATOM_NUMBER_AT_K_SITES)


def superfluid_difference(spec: LatticeSpec) -> ZDistribution:
    """Distribution of the odd-even atom-number difference in a superfluid.

    Requires all sites illuminated and an even number of sites, so the
    atom number at odd sites is Binomial(N, 1/2); z = 2*z_tilde - N runs
    over -N..N in steps of 2 with zero mean and variance N.
    """
    if spec.n_illuminated != spec.n_sites:
        raise ValueError("difference distribution requires K = M")
    if spec.n_sites % 2 != 0:
        raise ValueError("difference distribution requires even M")
    n = spec.n_atoms
    z_tilde = np.arange(n + 1)
    p = np.exp(binom.logpmf(z_tilde, n, 0.5))
    return ZDistribution(2 * z_tilde - n, _normalized(p),
                         ZMeaning.ODD_EVEN_DIFFERENCE)


def gaussian_approximation(mean: float, sigma: float, z_grid,
                           meaning: ZMeaning = ZMeaning.ATOM_NUMBER_AT_K_SITES
                           ) -> ZDistribution:
    """Discrete Gaussian weights renormalized on the given z grid."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    z = np.asarray(z_grid, dtype=int)
    logw = -0.5 * ((z - mean) / sigma) ** 2
    w = np.exp(logw - logw.max())
    return ZDistribution(z, _normalized(w), meaning)


def mott_distribution(spec: LatticeSpec, z_grid,
                      meaning: ZMeaning = ZMeaning.ATOM_NUMBER_AT_K_SITES
                      ) -> ZDistribution:
    """Point-mass distribution for the unit-filling Mott insulator.

    z = K for the atom-number variable; z = 0 for the odd-even difference
    (even M).
    """
    if spec.n_atoms != spec.n_sites:
        raise ValueError("Mott distribution requires unit filling N = M")
    if meaning is ZMeaning.ATOM_NUMBER_AT_K_SITES:
        target = spec.n_illuminated
    else:
        if spec.n_sites % 2 != 0:
            raise ValueError("odd-even difference requires even M")
        target = 2 * spec.n_odd_illuminated - spec.n_atoms
    z = np.asarray(z_grid, dtype=int)
    p = np.zeros(len(z))
    hits = np.nonzero(z == target)[0]
    if len(hits) != 1:
        raise ValueError(f"z grid does not contain the Mott value {target}")
    p[hits[0]] = 1.0
    return ZDistribution(z, p, meaning)


def load_distribution(path, meaning: ZMeaning = ZMeaning.ATOM_NUMBER_AT_K_SITES
                      ) -> ZDistribution:
    """Load a two-column (z, probability) text file.

    The distribution is renormalized on load; deviations of the column sum
    from 1 beyond 1e-6 trigger a warning.
    """
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError("expected a two-column (z, probability) file")
    z = data[:, 0]
    if np.any(z != np.round(z)):
        raise ValueError("z column must be integer-valued")
    p = data[:, 1]
    total = p.sum()
    if abs(total - 1.0) > 1e-6:
        warnings.warn(f"loaded probabilities sum to {total:.8g}; renormalizing",
                      stacklevel=2)
    order = np.argsort(z)
    return ZDistribution(z[order].astype(int), _normalized(p[order]), meaning)
