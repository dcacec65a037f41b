"""Lattice and light geometry.

Probe and cavity mode functions evaluated on lattice sites, and the
reduction of the weighted atom-number sums D_lm to a single scalar
statistical variable z for each measurement scenario:

* diffraction maximum  -> z is the atom number at the K illuminated sites,
* diffraction minimum  -> z is the atom-number difference between odd and
  even sites (all sites illuminated),
* transmission         -> z is again the atom number at K sites, entering
  through the dispersive cavity shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Scenario(Enum):
    MAXIMUM = "maximum"
    MINIMUM = "minimum"
    TRANSMISSION = "transmission"


class ZMeaning(Enum):
    ATOM_NUMBER_AT_K_SITES = "atom_number_at_k_sites"
    ODD_EVEN_DIFFERENCE = "odd_even_difference"


@dataclass(frozen=True)
class LatticeSpec:
    """Atom / site / illumination counts and the lattice period.

    Illuminated sites default to the contiguous block j = 1..K; an explicit
    1-based site mask can be given instead (e.g. every second site).
    """

    n_atoms: int
    n_sites: int
    n_illuminated: int
    period: float = 1.0
    illuminated_sites: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be >= 1")
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if not 1 <= self.n_illuminated <= self.n_sites:
            raise ValueError("need 1 <= n_illuminated <= n_sites")
        if self.period <= 0:
            raise ValueError("period must be > 0")
        if self.illuminated_sites is not None:
            sites = tuple(self.illuminated_sites)
            if len(sites) != self.n_illuminated:
                raise ValueError("site mask length must equal n_illuminated")
            if len(set(sites)) != len(sites):
                raise ValueError("site mask has repeated sites")
            if any(not 1 <= j <= self.n_sites for j in sites):
                raise ValueError("site mask entries must lie in 1..n_sites")
            object.__setattr__(self, "illuminated_sites", sites)

    @property
    def sites(self) -> tuple[int, ...]:
        """1-based indices of the illuminated sites."""
        if self.illuminated_sites is not None:
            return self.illuminated_sites
        return tuple(range(1, self.n_illuminated + 1))

    @property
    def n_odd_illuminated(self) -> int:
        """Number of odd illuminated sites (Q for contiguous illumination)."""
        return sum(1 for j in self.sites if j % 2 == 1)


@dataclass(frozen=True)
class ModeFunction:
    """Plane-wave mode function on the lattice.

    kind is 'traveling' or 'standing'; projected_wavenumber is
    k_x = |k| sin(theta); phase is site-independent (plane-wave
    approximation).
    """

    kind: str
    projected_wavenumber: float
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in ("traveling", "standing"):
            raise ValueError(f"unknown mode kind {self.kind!r}")


@dataclass(frozen=True)
class ScenarioGeometry:
    scenario: Scenario
    z_grid: tuple[int, ...]
    z_meaning: ZMeaning


def mode_value(mode: ModeFunction, site_index: int, spec: LatticeSpec) -> complex:
    """Mode function u(r_j) at site j (1-based).

    exp(i(j k_x d + phi)) for traveling waves, cos(j k_x d + phi) for
    standing waves.
    """
    if not 1 <= site_index <= spec.n_sites:
        raise IndexError(f"site index {site_index} outside 1..{spec.n_sites}")
    arg = site_index * mode.projected_wavenumber * spec.period + mode.phase
    if mode.kind == "traveling":
        return complex(np.exp(1j * arg))
    return complex(np.cos(arg))


def coupling_coefficient(q, mode_l: ModeFunction, mode_m: ModeFunction,
                         spec: LatticeSpec) -> complex:
    """D^q_lm = sum over illuminated sites of u_l*(r_j) u_m(r_j) q_j."""
    q = np.asarray(q)
    if len(q) != spec.n_sites:
        raise ValueError(f"configuration length {len(q)} != n_sites {spec.n_sites}")
    if np.any(q < 0):
        raise ValueError("occupations must be nonnegative")
    total = 0j
    for j in spec.sites:
        ul = mode_value(mode_l, j, spec)
        um = mode_value(mode_m, j, spec)
        total += np.conj(ul) * um * q[j - 1]
    return complex(total)


def scenario_geometry(scenario: Scenario, spec: LatticeSpec) -> ScenarioGeometry:
    """z grid and meaning of z for the given scenario.

    Maximum / transmission: z in {0, ..., N}.  Minimum (requires all sites
    illuminated): z in {-N, -N+2, ..., N}.
    """
    n = spec.n_atoms
    if scenario in (Scenario.MAXIMUM, Scenario.TRANSMISSION):
        return ScenarioGeometry(scenario, tuple(range(n + 1)),
                                ZMeaning.ATOM_NUMBER_AT_K_SITES)
    if scenario is Scenario.MINIMUM:
        if spec.n_illuminated != spec.n_sites:
            raise ValueError("diffraction minimum requires K = M "
                             "(all sites illuminated)")
        return ScenarioGeometry(scenario, tuple(range(-n, n + 1, 2)),
                                ZMeaning.ODD_EVEN_DIFFERENCE)
    raise ValueError(f"unknown scenario {scenario!r}")


def configuration_z(q, scenario: Scenario, spec: LatticeSpec) -> int:
    """The scalar statistical variable z of a classical configuration q."""
    q = np.asarray(q)
    if len(q) != spec.n_sites:
        raise ValueError(f"configuration length {len(q)} != n_sites {spec.n_sites}")
    if scenario in (Scenario.MAXIMUM, Scenario.TRANSMISSION):
        return int(sum(q[j - 1] for j in spec.sites))
    return int(sum((-1) ** (j + 1) * q[j - 1] for j in spec.sites))
