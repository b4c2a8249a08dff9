"""Potential families, tail descriptions and problem specifications.

All quantities are dimensionless with hbar = m = 1.  Potentials evaluate on
scalars or numpy arrays; instances are immutable and safe to share between
workers.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple, Union

import numpy as np

from .errors import ConfigError, DomainError


def _check_positive(name, value):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")


# ---------------------------------------------------------------------------
# Potential families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedOscillator:
    """Harmonic well frozen at its value beyond |t| = cutoff_a.

    V(t) = omega^2 t^2 / 2 for |t| <= cutoff_a, constant outside; C0 at the
    truncation radii.
    """

    omega: float
    cutoff_a: float

    def __post_init__(self):
        _check_positive("omega", self.omega)
        _check_positive("cutoff_a", self.cutoff_a)

    half_line_only = False

    def breakpoints(self):
        return (-self.cutoff_a, self.cutoff_a)

    def evaluate(self, t):
        x = np.minimum(np.abs(t), self.cutoff_a)
        return 0.5 * self.omega**2 * x * x


@dataclass(frozen=True)
class HybridOscillator:
    """Two harmonic half-wells joined continuously at the origin."""

    omega_left: float
    omega_right: float

    def __post_init__(self):
        _check_positive("omega_left", self.omega_left)
        _check_positive("omega_right", self.omega_right)

    half_line_only = False

    def breakpoints(self):
        return (0.0,)

    def evaluate(self, t):
        w = np.where(np.asarray(t) < 0, self.omega_left, self.omega_right)
        out = 0.5 * w * w * np.asarray(t) ** 2
        return float(out) if np.isscalar(t) else out


@dataclass(frozen=True)
class SquareWell:
    """Constant well of the given (non-positive) depth on [left, right]."""

    depth: float
    left: float
    right: float

    def __post_init__(self):
        if self.depth > 0:
            raise ValueError("depth must be <= 0")
        if not self.left < self.right:
            raise ValueError("left edge must be below right edge")

    half_line_only = False

    def breakpoints(self):
        return (self.left, self.right)

    def evaluate(self, t):
        t = np.asarray(t)
        inside = (t >= self.left) & (t <= self.right)
        out = np.where(inside, self.depth, 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PiecewiseConstant:
    """Step potential: values[i] on (breakpoints[i-1], breakpoints[i])."""

    breakpoints_: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(x) for x in self.breakpoints_)
        vals = tuple(float(x) for x in self.values)
        if len(vals) != len(bp) + 1:
            raise ValueError("need len(values) == len(breakpoints) + 1")
        if any(b1 >= b2 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints_", bp)
        object.__setattr__(self, "values", vals)

    half_line_only = False

    def breakpoints(self):
        return self.breakpoints_

    def evaluate(self, t):
        idx = np.searchsorted(self.breakpoints_, t, side="right")
        out = np.asarray(self.values)[idx]
        return float(out) if np.isscalar(t) else out


@dataclass(frozen=True)
class Coulomb:
    """Attractive Coulomb well V(t) = -charge / t on the half line."""

    charge: float = 1.0

    def __post_init__(self):
        _check_positive("charge", self.charge)

    half_line_only = True

    def breakpoints(self):
        return ()

    def evaluate(self, t):
        _require_half_line(t)
        return -self.charge / t


@dataclass(frozen=True)
class Yukawa:
    """Screened Coulomb well V(t) = -exp(-lambda t) / t."""

    screening_lambda: float

    def __post_init__(self):
        _check_positive("screening_lambda", self.screening_lambda)

    half_line_only = True

    def breakpoints(self):
        return ()

    def evaluate(self, t):
        _require_half_line(t)
        return -np.exp(-self.screening_lambda * t) / t


@dataclass(frozen=True)
class QuarkHybrid:
    """Coulomb attraction plus a weak confining oscillator term."""

    omega: float

    def __post_init__(self):
        _check_positive("omega", self.omega)

    half_line_only = True

    def breakpoints(self):
        return ()

    def evaluate(self, t):
        _require_half_line(t)
        return -1.0 / t + 0.5 * self.omega**2 * t * t


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear interpolation of (t, V) samples.

    Clamps to the endpoint values outside the sampled range, consistent with
    a compactly supported deformation between constant tails.
    """

    ts: Tuple[float, ...]
    vs: Tuple[float, ...]

    def __post_init__(self):
        ts = tuple(float(x) for x in self.ts)
        vs = tuple(float(x) for x in self.vs)
        if len(ts) != len(vs) or len(ts) < 2:
            raise ValueError("need matching (t, V) samples, at least two")
        if any(t1 >= t2 for t1, t2 in zip(ts, ts[1:])):
            raise ValueError("sample abscissae must be strictly increasing")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "vs", vs)

    half_line_only = False

    def breakpoints(self):
        return self.ts

    def evaluate(self, t):
        out = np.interp(t, self.ts, self.vs)
        return float(out) if np.isscalar(t) else out


@dataclass(frozen=True)
class EffectiveRadial:
    """base potential plus the centrifugal barrier l(l+1)/(2 t^2)."""

    base: "PotentialSpec"
    l: int

    def __post_init__(self):
        if self.l < 0 or int(self.l) != self.l:
            raise ValueError("l must be a non-negative integer")

    half_line_only = True

    def breakpoints(self):
        return self.base.breakpoints()

    def evaluate(self, t):
        _require_half_line(t)
        return self.base.evaluate(t) + 0.5 * self.l * (self.l + 1) / (t * t)


@dataclass(frozen=True)
class Shifted:
    """base potential plus a constant offset (spectra shift with it)."""

    base: "PotentialSpec"
    offset: float

    @property
    def half_line_only(self):
        return self.base.half_line_only

    def breakpoints(self):
        return self.base.breakpoints()

    def evaluate(self, t):
        return self.base.evaluate(t) + self.offset


PotentialSpec = Union[
    TruncatedOscillator, HybridOscillator, SquareWell, PiecewiseConstant,
    Coulomb, Yukawa, QuarkHybrid, Tabulated, EffectiveRadial, Shifted,
]


def _require_half_line(t):
    if np.any(np.asarray(t) <= 0):
        raise DomainError("half-line potential evaluated at t <= 0")


def evaluate(potential: PotentialSpec, t):
    """V(t) for any family; scalar in, scalar out."""
    return potential.evaluate(t)


def effective_radial(potential: PotentialSpec, l: int) -> PotentialSpec:
    """Half-line potential with the centrifugal term for angular momentum l.

    For l = 0 the input is returned unchanged (the barrier vanishes).
    """
    if l < 0 or int(l) != l:
        raise ValueError("l must be a non-negative integer")
    if l == 0:
        return potential
    return EffectiveRadial(potential, int(l))


# ---------------------------------------------------------------------------
# Tail classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantLevel:
    """V identically equal to `level` beyond the boundary."""
    level: float


@dataclass(frozen=True)
class OscillatorTail:
    """V ~ omega^2 t^2 / 2 as |t| grows."""
    omega: float


@dataclass(frozen=True)
class CoulombTail:
    """V ~ -1/t as t -> +infinity, angular momentum l."""
    l: int


@dataclass(frozen=True)
class YukawaTail:
    """V ~ -exp(-lambda t)/t as t -> +infinity."""
    l: int
    screening_lambda: float


@dataclass(frozen=True)
class QuarkTail:
    """V ~ -1/t + omega^2 t^2 / 2 as t -> +infinity."""
    omega: float
    l: int


@dataclass(frozen=True)
class CoulombZeroSingularity:
    """Left boundary at the 0+ singularity of a Coulomb-type well."""
    l: int


@dataclass(frozen=True)
class YukawaZeroSingularity:
    """Left boundary at the 0+ singularity of a Yukawa well."""
    l: int
    screening_lambda: float


@dataclass(frozen=True)
class QuarkZeroSingularity:
    """Left boundary at the 0+ singularity of the quark hybrid well."""
    omega: float
    l: int


TailClass = Union[
    ConstantLevel, OscillatorTail, CoulombTail, YukawaTail, QuarkTail,
    CoulombZeroSingularity, YukawaZeroSingularity, QuarkZeroSingularity,
]

_ZERO_SINGULARITY_TAILS = (
    CoulombZeroSingularity, YukawaZeroSingularity, QuarkZeroSingularity,
)


def tail_threshold(tail: TailClass) -> float:
    """Supremum of energies admitting a decaying cue on this tail."""
    if isinstance(tail, ConstantLevel):
        return tail.level
    if isinstance(tail, (CoulombTail, YukawaTail)):
        return 0.0
    return np.inf


# ---------------------------------------------------------------------------
# Problem specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WholeLine:
    pass


@dataclass(frozen=True)
class HalfLine:
    l: int = 0

    def __post_init__(self):
        if self.l < 0 or int(self.l) != self.l:
            raise ValueError("l must be a non-negative integer")


@dataclass(frozen=True)
class ProblemSpec:
    """A potential, its domain, its tail classes and a working interval.

    interval is None for automatic selection (see spectrum.auto_interval).
    """

    potential: PotentialSpec
    domain: Union[WholeLine, HalfLine]
    left_tail: TailClass
    right_tail: TailClass
    interval: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.interval is not None:
            a, b = self.interval
            if not a < b:
                raise ValueError(f"need a < b, got interval ({a}, {b})")
            if isinstance(self.domain, HalfLine) and not a > 0:
                raise ValueError(
                    "half-line problems must start at a > 0, never at the "
                    "singularity")
        if isinstance(self.domain, WholeLine) and self.potential.half_line_only:
            raise ValueError("half-line-only potential on the whole line")

    @property
    def l(self) -> int:
        return self.domain.l if isinstance(self.domain, HalfLine) else 0

    def effective_potential(self) -> PotentialSpec:
        """The potential actually entering the angular equation."""
        if isinstance(self.domain, HalfLine):
            return effective_radial(self.potential, self.domain.l)
        return self.potential

    def with_interval(self, a: float, b: float) -> "ProblemSpec":
        return replace(self, interval=(a, b))

    def threshold(self) -> float:
        """Energies must stay below this for the defect angle to exist."""
        return min(tail_threshold(self.left_tail),
                   tail_threshold(self.right_tail))


def expected_tails(potential: PotentialSpec, l: int = 0):
    """The (left, right) tail classes matching a potential's asymptotics."""
    if isinstance(potential, TruncatedOscillator):
        v = 0.5 * potential.omega**2 * potential.cutoff_a**2
        return ConstantLevel(v), ConstantLevel(v)
    if isinstance(potential, HybridOscillator):
        return (OscillatorTail(potential.omega_left),
                OscillatorTail(potential.omega_right))
    if isinstance(potential, SquareWell):
        return ConstantLevel(0.0), ConstantLevel(0.0)
    if isinstance(potential, PiecewiseConstant):
        return (ConstantLevel(potential.values[0]),
                ConstantLevel(potential.values[-1]))
    if isinstance(potential, Coulomb):
        return CoulombZeroSingularity(l), CoulombTail(l)
    if isinstance(potential, Yukawa):
        lam = potential.screening_lambda
        return YukawaZeroSingularity(l, lam), YukawaTail(l, lam)
    if isinstance(potential, QuarkHybrid):
        return (QuarkZeroSingularity(potential.omega, l),
                QuarkTail(potential.omega, l))
    if isinstance(potential, Tabulated):
        return ConstantLevel(potential.vs[0]), ConstantLevel(potential.vs[-1])
    if isinstance(potential, EffectiveRadial):
        return expected_tails(potential.base, potential.l)
    if isinstance(potential, Shifted):
        left, right = expected_tails(potential.base, l)
        if not (isinstance(left, ConstantLevel)
                and isinstance(right, ConstantLevel)):
            raise ConfigError("shifted potentials support constant tails only")
        return (ConstantLevel(left.level + potential.offset),
                ConstantLevel(right.level + potential.offset))
    raise ConfigError(f"unknown potential family {type(potential).__name__}")


def validate_problem(problem: ProblemSpec) -> None:
    """Raise ConfigError when a tail class contradicts the potential."""
    left, right = expected_tails(problem.potential, problem.l)
    for name, given, wanted in (("left_tail", problem.left_tail, left),
                                ("right_tail", problem.right_tail, right)):
        if type(given) is not type(wanted) or given != wanted:
            raise ConfigError(
                f"{name} {given!r} does not match the potential's asymptotic "
                f"behaviour (expected {wanted!r})", key=name)
    if isinstance(problem.domain, WholeLine) and isinstance(
            problem.left_tail, _ZERO_SINGULARITY_TAILS):
        raise ConfigError("zero-singularity tails require a half-line domain",
                          key="left_tail")


def problem_for(potential: PotentialSpec, l: Optional[int] = None,
                interval: Optional[Tuple[float, float]] = None) -> ProblemSpec:
    """Assemble a ProblemSpec with the tails implied by the family."""
    half = potential.half_line_only or l is not None
    l_eff = int(l or 0)
    left, right = expected_tails(potential, l_eff)
    domain = HalfLine(l_eff) if half else WholeLine()
    return ProblemSpec(potential, domain, left, right, interval)
