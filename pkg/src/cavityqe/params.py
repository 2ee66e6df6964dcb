"""Parameter records, unit conventions, derived rates, and regime labels.

Unit discipline
---------------
Every rate stored on :class:`SystemParams` (and everything derived from it)
is an *angular* rate in rad/ns.  User-facing numbers, file formats, and the
command line all speak *linear* frequency in GHz; the conversion is
``omega = 2 * pi * nu``, i.e. 1 GHz of linewidth equals ``2*pi`` rad/ns.
Times are nanoseconds internally and in data files; human-readable summaries
quote picoseconds where that is the natural scale.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# ratio operationalizing "much greater than" in the cavity-quality tests
MUCH_GREATER_RATIO = 10.0
# relative slack accepted for the kappa == g0**2/kappa optimal-point equality
OPTIMAL_MATCH_RTOL = 0.05


class ValidationError(ValueError):
    """Invalid user input; carries the name of the offending field or key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


def ghz_to_angular(nu_ghz: float) -> float:
    """Convert a linear frequency in GHz to an angular rate in rad/ns."""
    return TWO_PI * nu_ghz


def angular_to_ghz(omega: float) -> float:
    """Convert an angular rate in rad/ns to a linear frequency in GHz."""
    return omega / TWO_PI


def _require_finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ValidationError(name, f"must be finite, got {value!r}")
    return value


def _require_positive(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if value <= 0.0:
        raise ValidationError(name, f"must be > 0, got {value!r}")
    return value


def _require_nonnegative(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if value < 0.0:
        raise ValidationError(name, f"must be >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class SystemParams:
    """One emitter coupled to one leaky cavity mode, in angular rad/ns.

    Attributes
    ----------
    g0 : float
        Emitter-cavity coupling rate (vacuum Rabi half-splitting), > 0.
    kappa : float
        Cavity field amplitude decay rate into the useful output channel,
        > 0.  The intensity decays at ``2 * kappa``.
    gamma : float
        Emitter amplitude decay rate into all non-cavity loss channels,
        >= 0.  The excited population decays at ``2 * gamma``.
    delta : float
        Emitter-cavity detuning (emitter minus cavity), any sign.  The
        closed forms require ``delta = 0``; the numeric engine does not.
    gamma0 : float or None
        Free-space amplitude decay rate of the bare emitter.  Optional;
        required only by the Purcell-factor decomposition.
    """

    g0: float
    kappa: float
    gamma: float
    delta: float = 0.0
    gamma0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "g0", _require_positive("g0", self.g0))
        object.__setattr__(self, "kappa", _require_positive("kappa", self.kappa))
        object.__setattr__(self, "gamma", _require_nonnegative("gamma", self.gamma))
        object.__setattr__(self, "delta", _require_finite("delta", self.delta))
        if self.gamma0 is not None:
            object.__setattr__(
                self, "gamma0", _require_positive("gamma0", self.gamma0)
            )

    @classmethod
    def from_ghz(
        cls,
        g0_ghz: float,
        kappa_ghz: float,
        gamma_ghz: float,
        delta_ghz: float = 0.0,
        gamma0_ghz: float | None = None,
    ) -> "SystemParams":
        """Build from linear frequencies in GHz (multiplies each by 2*pi)."""
        return cls(
            g0=ghz_to_angular(_require_finite("g0_ghz", g0_ghz)),
            kappa=ghz_to_angular(_require_finite("kappa_ghz", kappa_ghz)),
            gamma=ghz_to_angular(_require_finite("gamma_ghz", gamma_ghz)),
            delta=ghz_to_angular(_require_finite("delta_ghz", delta_ghz)),
            gamma0=None
            if gamma0_ghz is None
            else ghz_to_angular(_require_finite("gamma0_ghz", gamma0_ghz)),
        )

    def is_resonant(self) -> bool:
        return self.delta == 0.0


@dataclass(frozen=True)
class DerivedRates:
    """Rates computed once from a parameter set and reused everywhere.

    Attributes
    ----------
    total_decay : float
        Sum ``kappa + gamma``: decay rate of the joint-excitation envelope.
    decay_imbalance : float
        Difference ``kappa - gamma``; its half sets the oscillation branch.
    rabi : complex
        Effective oscillation rate ``sqrt(g0**2 - (decay_imbalance/2)**2)``.
        Real when underdamped, zero at critical damping, positive-imaginary
        when overdamped.
    cooperativity : float
        ``g0**2 / (2 * kappa * gamma)``; +inf when ``gamma == 0``.
    """

    total_decay: float
    decay_imbalance: float
    rabi: complex
    cooperativity: float


def derive_rates(p: SystemParams) -> DerivedRates:
    """Compute the damped-oscillation rates for one parameter set."""
    total = p.kappa + p.gamma
    imbalance = p.kappa - p.gamma
    rabi = cmath.sqrt(complex(p.g0 * p.g0 - 0.25 * imbalance * imbalance))
    if rabi.imag < 0.0:  # keep the overdamped branch on +i
        rabi = -rabi
    loss = 2.0 * p.kappa * p.gamma  # can underflow to 0.0 for subnormal gamma
    coop = math.inf if loss == 0.0 else p.g0 * p.g0 / loss
    return DerivedRates(
        total_decay=total,
        decay_imbalance=imbalance,
        rabi=rabi,
        cooperativity=coop,
    )


class Coupling(enum.Enum):
    STRONG = "strong"
    WEAK = "weak"


class CavityQuality(enum.Enum):
    OPTIMAL = "optimal"
    GOOD = "good"
    BAD = "bad"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class RegimeLabel:
    """Pair of qualitative labels for a parameter set."""

    coupling: Coupling
    cavity: CavityQuality

    def __str__(self) -> str:
        return f"{self.coupling.value}/{self.cavity.value}"


def classify_regime(p: SystemParams) -> RegimeLabel:
    """Label coupling strength and cavity quality for a parameter set.

    Coupling is strong when the coherent rate dominates both losses
    (``g0 >= kappa`` and ``g0 >= gamma``), weak otherwise.  Cavity quality
    compares ``kappa`` against the emitter-side funneling rate
    ``q = g0**2 / kappa``: matched rates (within 5%) with both well above
    ``gamma`` are optimal; ``q > kappa`` with ``kappa`` well above ``gamma``
    is good (photon leaves slower than it is funneled); ``kappa > q`` with
    ``q`` well above ``gamma`` is bad (cavity dumps the photon faster than
    it is replenished).  "Well above" means a factor of
    ``MUCH_GREATER_RATIO``.  Anything else is unclassified.
    """
    coupling = (
        Coupling.STRONG
        if (p.g0 >= p.kappa and p.g0 >= p.gamma)
        else Coupling.WEAK
    )
    q = p.g0 * p.g0 / p.kappa
    floor = MUCH_GREATER_RATIO * p.gamma
    if math.isclose(p.kappa, q, rel_tol=OPTIMAL_MATCH_RTOL) and min(p.kappa, q) >= floor:
        cavity = CavityQuality.OPTIMAL
    elif q > p.kappa and p.kappa >= floor:
        cavity = CavityQuality.GOOD
    elif p.kappa > q and q >= floor:
        cavity = CavityQuality.BAD
    else:
        cavity = CavityQuality.UNCLASSIFIED
    return RegimeLabel(coupling=coupling, cavity=cavity)


@dataclass(frozen=True)
class SpectrumGrid:
    """Photon spectral density sampled on a detuning axis.

    Attributes
    ----------
    deltas : numpy.ndarray
        Detuning from the cavity line, rad/ns, strictly increasing.
    density : numpy.ndarray
        Spectral density in probability per rad/ns.  Integrating over the
        full axis recovers the probability emitted into the output channel.
    """

    deltas: np.ndarray
    density: np.ndarray

    def integral(self) -> float:
        """Trapezoid integral of the density over the stored axis."""
        return float(np.trapezoid(self.density, self.deltas))


def as_detuning_grid(values) -> np.ndarray:
    """Validate and return a detuning axis as a float64 array.

    Must be one-dimensional, non-empty, finite, and strictly increasing.
    """
    grid = np.asarray(values, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("deltas", "expected a non-empty 1-D array")
    if not np.all(np.isfinite(grid)):
        raise ValidationError("deltas", "all detunings must be finite")
    if grid.size > 1 and not np.all(np.diff(grid) > 0.0):
        raise ValidationError("deltas", "detunings must be strictly increasing")
    return grid
