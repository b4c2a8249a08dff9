"""Boundary angles from decaying-solution ("vanishing cue") asymptotics.

A cue is the logarithmic derivative f = psi'/psi of the solution decaying at
one boundary.  It solves the Riccati identity f' + f^2 = 2(V_eff - E) and is
represented as a leading term plus a finite asymptotic series, truncated at
its smallest term.  arctan(f) at the working-interval endpoint is the
boundary angle fed to the angular integration.
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import DomainError, ThresholdError
from .potentials import (
    ConstantLevel, CoulombTail, CoulombZeroSingularity, OscillatorTail,
    PotentialSpec, ProblemSpec, QuarkTail, QuarkZeroSingularity, YukawaTail,
    YukawaZeroSingularity, effective_radial, evaluate,
)

DEFAULT_N_TERMS = 16


# ---------------------------------------------------------------------------
# Series representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearTerm:
    """Leading behaviour f ~ slope * t (oscillator-dominated tails)."""
    slope: float


@dataclass(frozen=True)
class ConstantTerm:
    """Leading behaviour f ~ value (constant-coefficient tails)."""
    value: float


@dataclass(frozen=True)
class PoleTerm:
    """Leading behaviour f ~ coefficient / t (0+ singularities)."""
    coefficient: float


INVERSE_T = "inverse_t"
DIRECT_T = "direct_t"


@dataclass(frozen=True)
class CueSeries:
    """Leading term plus correction series for a Riccati cue f(t).

    For variable == "inverse_t", coeffs[i] multiplies t**-(i+1); for
    "direct_t" it multiplies t**i.  The series is asymptotic: evaluation
    truncates at the smallest surviving term, never past `coeffs`.
    """

    leading: Union[LinearTerm, ConstantTerm, PoleTerm]
    coeffs: Tuple[float, ...]
    variable: str

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("need at least two series coefficients")
        if not all(math.isfinite(c) for c in self.coeffs):
            raise ValueError("series coefficients must be finite")
        if self.variable not in (INVERSE_T, DIRECT_T):
            raise ValueError(f"unknown series variable {self.variable!r}")

    def _powers(self):
        if self.variable == INVERSE_T:
            return np.arange(-1, -len(self.coeffs) - 1, -1)
        return np.arange(len(self.coeffs))

    def truncation_index(self, t: float) -> int:
        """Number of terms kept at t by the smallest-term rule."""
        mags = np.abs(np.asarray(self.coeffs) * float(t) ** self._powers())
        live = np.nonzero(mags > 0)[0]
        if live.size == 0:
            return len(self.coeffs)
        smallest = live[np.argmin(mags[live])]
        return int(smallest) + 1

    def evaluate(self, t: float, n_terms: int = None) -> float:
        """f(t); n_terms overrides the smallest-term truncation."""
        m = self.truncation_index(t) if n_terms is None else int(n_terms)
        c = np.asarray(self.coeffs[:m])
        tail = float(np.sum(c * float(t) ** self._powers()[:m]))
        return self._leading_value(t) + tail

    def derivative(self, t: float, n_terms: int = None) -> float:
        """f'(t), term-by-term, with the same truncation as evaluate."""
        m = self.truncation_index(t) if n_terms is None else int(n_terms)
        powers = self._powers()[:m]
        c = np.asarray(self.coeffs[:m])
        tail = float(np.sum(c * powers * float(t) ** (powers - 1)))
        return self._leading_derivative(t) + tail

    def _leading_value(self, t):
        lead = self.leading
        if isinstance(lead, LinearTerm):
            return lead.slope * t
        if isinstance(lead, ConstantTerm):
            return lead.value
        return lead.coefficient / t

    def _leading_derivative(self, t):
        lead = self.leading
        if isinstance(lead, LinearTerm):
            return lead.slope
        if isinstance(lead, ConstantTerm):
            return 0.0
        return -lead.coefficient / (t * t)


# ---------------------------------------------------------------------------
# Recurrence engines
# ---------------------------------------------------------------------------
#
# Substituting each ansatz into f' + f^2 = 2(V_eff - E) and matching powers
# of t yields one linear recurrence per leading-term shape.  `d` holds the
# inverse-power tail of the right-hand side (d[s] multiplies t**-s), `c` its
# Taylor part (c[s] multiplies t**s, with s = -1 allowed).

def _linear_leading_series(omega, E, d, n_terms):
    a = np.zeros(n_terms + 1)
    a[1] = E / omega - 0.5
    for s in range(1, n_terms):
        quad = np.dot(a[1:s], a[s - 1:0:-1])
        a[s + 1] = (-(s - 1) * a[s - 1] + quad - d.get(s, 0.0)) / (2 * omega)
    return tuple(a[1:])


def _constant_leading_series(k, d, n_terms):
    b = np.zeros(n_terms + 1)
    for s in range(1, n_terms + 1):
        quad = np.dot(b[1:s], b[s - 1:0:-1])
        b[s] = (-(s - 1) * b[s - 1] + quad - d.get(s, 0.0)) / (2 * k)
    return tuple(b[1:])


def _pole_leading_series(l, c, n_terms):
    a = np.zeros(n_terms)
    for s in range(n_terms):
        quad = np.dot(a[:s], a[s - 1::-1]) if s else 0.0
        a[s] = (c.get(s - 1, 0.0) - quad) / (s + 2 * l + 2)
    return tuple(a)


# ---------------------------------------------------------------------------
# Cue constructors
# ---------------------------------------------------------------------------

def oscillator_cue_coeffs(omega: float, E: float,
                          n_terms: int = DEFAULT_N_TERMS) -> CueSeries:
    """Right-decaying cue of the pure harmonic tail, f = -omega t + series.

    Valid as t -> +infinity.  Evaluated at negative t it gives the
    left-decaying cue: only odd inverse powers survive, so the series is an
    odd function like the exact f.
    """
    if not omega > 0:
        raise DomainError("oscillator cue needs omega > 0")
    coeffs = _linear_leading_series(omega, E, {}, n_terms)
    return CueSeries(LinearTerm(-omega), coeffs, INVERSE_T)


def coulomb_zero_cue_coeffs(l: int, E: float,
                            n_terms: int = DEFAULT_N_TERMS) -> CueSeries:
    """0+ cue of the Coulomb well, f = (l+1)/t + power series in t."""
    c = {-1: -2.0, 0: -2.0 * E}
    return CueSeries(PoleTerm(l + 1.0), _pole_leading_series(l, c, n_terms),
                     DIRECT_T)


def yukawa_zero_cue_coeffs(l: int, E: float, screening_lambda: float,
                           n_terms: int = DEFAULT_N_TERMS) -> CueSeries:
    """0+ cue of the Yukawa well; the screened charge feeds every order."""
    if not screening_lambda > 0:
        raise DomainError("yukawa cue needs screening_lambda > 0")
    lam = screening_lambda
    c = {s: -2.0 * (-lam) ** (s + 1) / math.factorial(s + 1)
         for s in range(-1, n_terms)}
    c[0] -= 2.0 * E
    return CueSeries(PoleTerm(l + 1.0), _pole_leading_series(l, c, n_terms),
                     DIRECT_T)


def quark_zero_cue_coeffs(l: int, E: float, omega: float,
                          n_terms: int = DEFAULT_N_TERMS) -> CueSeries:
    """0+ cue of the quark hybrid well (Coulomb plus confining term)."""
    c = {-1: -2.0, 0: -2.0 * E, 2: omega * omega}
    return CueSeries(PoleTerm(l + 1.0), _pole_leading_series(l, c, n_terms),
                     DIRECT_T)


def coulomb_infinity_cue_coeffs(l: int, E: float,
                                n_terms: int = DEFAULT_N_TERMS) -> CueSeries:
    """Right-decaying Coulomb cue, f = -sqrt(2|E|) + series in 1/t."""
    k = _decay_rate(E)
    d = {1: -2.0, 2: float(l * (l + 1))}
    return CueSeries(ConstantTerm(-k), _constant_leading_series(k, d, n_terms),
                     INVERSE_T)


def yukawa_infinity_cue_coeffs(l: int, E: float, screening_lambda: float,
                               n_terms: int = DEFAULT_N_TERMS) -> CueSeries:
    """Right-decaying Yukawa cue.

    The screened charge decays faster than every inverse power, so the series
    sees only the centrifugal tail; verify_cue_residual against the actual
    potential accounts for the neglected exponential.
    """
    del screening_lambda
    k = _decay_rate(E)
    d = {2: float(l * (l + 1))}
    return CueSeries(ConstantTerm(-k), _constant_leading_series(k, d, n_terms),
                     INVERSE_T)


def quark_infinity_cue_coeffs(l: int, E: float, omega: float,
                              n_terms: int = DEFAULT_N_TERMS) -> CueSeries:
    """Right-decaying cue of the quark hybrid well, f = -omega t + series."""
    if not omega > 0:
        raise DomainError("quark infinity cue needs omega > 0; for omega -> 0 "
                          "use the Coulomb cue instead")
    d = {1: -2.0, 2: float(l * (l + 1))}
    coeffs = _linear_leading_series(omega, E, d, n_terms)
    return CueSeries(LinearTerm(-omega), coeffs, INVERSE_T)


def _decay_rate(E):
    if not E < 0:
        raise ThresholdError("decaying tail cue needs E < 0")
    return math.sqrt(-2.0 * E)


# ---------------------------------------------------------------------------
# Closed-form approximants
# ---------------------------------------------------------------------------

def coulomb_infinity_f(l: int, E: float, t: float, mode: str = "sqrt",
                       n_terms: int = DEFAULT_N_TERMS) -> float:
    """Right cue value for the Coulomb well at large t.

    mode "sqrt" uses -sqrt(-2E - 2/t + l(l+1)/t^2); mode "series" evaluates
    the inverse-power expansion to n_terms.
    """
    _decay_rate(E)
    if mode == "series":
        return coulomb_infinity_cue_coeffs(l, E, n_terms).evaluate(t)
    radicand = -2.0 * E - 2.0 / t + l * (l + 1) / (t * t)
    if radicand <= 0:
        raise DomainError(
            f"t = {t} is inside the classical region; enlarge the interval")
    return -math.sqrt(radicand)


def yukawa_infinity_f(l: int, E: float, screening_lambda: float, t: float,
                      mode: str = "sqrt",
                      n_terms: int = DEFAULT_N_TERMS) -> float:
    """Right cue value for the Yukawa well at large t (negative root)."""
    _decay_rate(E)
    if mode == "series":
        return yukawa_infinity_cue_coeffs(
            l, E, screening_lambda, n_terms).evaluate(t)
    radicand = (l * (l + 1) / (t * t) - 2.0 * E
                - 2.0 * math.exp(-screening_lambda * t) / t)
    if radicand <= 0:
        raise DomainError(
            f"t = {t} is inside the classical region; enlarge the interval")
    return -math.sqrt(radicand)


def quark_cue_zero(l: int, E: float, omega: float, t: float) -> float:
    """0+ cue of the quark well, explicit truncation through t^3."""
    return quark_zero_cue_coeffs(l, E, omega, n_terms=4).evaluate(t, n_terms=4)


def quark_cue_infinity(l: int, E: float, omega: float, t: float) -> float:
    """Large-t cue of the quark well, explicit truncation through 1/t^3."""
    if not omega > 0:
        raise DomainError("quark infinity cue needs omega > 0; for omega -> 0 "
                          "use the Coulomb cue instead")
    series = quark_infinity_cue_coeffs(l, E, omega, n_terms=3)
    return series.evaluate(t, n_terms=3)


# ---------------------------------------------------------------------------
# Angles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryAngles:
    """Cue directions at the interval ends, before any branch shifting."""

    alpha_plus_at_a: float
    alpha_minus_at_b: float
    delta: float


def cue_angle(f: float) -> float:
    """Phase-plane angle of the cue direction, arctan(psi'/psi)."""
    return math.atan(f)


def compact_support_angles(E: float, V_left: float,
                           V_right: float) -> BoundaryAngles:
    """Exact limiting angles for constant levels outside the interval."""
    if not (E < V_left and E < V_right):
        raise ThresholdError(
            f"E = {E} is not below both tail levels ({V_left}, {V_right})")
    alpha_plus = math.atan(math.sqrt(2.0 * (V_left - E)))
    alpha_minus = -math.atan(math.sqrt(2.0 * (V_right - E)))
    return BoundaryAngles(alpha_plus, alpha_minus, alpha_plus - alpha_minus)


def verify_cue_residual(series: CueSeries, potential: PotentialSpec, l: int,
                        E: float, t_check: float) -> float:
    """|f' + f^2 - 2(V_eff - E)| at t_check, the gate before a cue is used."""
    f = series.evaluate(t_check)
    df = series.derivative(t_check)
    v = evaluate(effective_radial(potential, l), t_check)
    return abs(df + f * f - 2.0 * (v - E))


# ---------------------------------------------------------------------------
# Tail dispatch used by the spectrum module
# ---------------------------------------------------------------------------

def tail_cue_series(tail, E: float, n_terms: int = DEFAULT_N_TERMS):
    """CueSeries for a series-backed tail class, None for constant levels."""
    if isinstance(tail, ConstantLevel):
        return None
    if isinstance(tail, OscillatorTail):
        return oscillator_cue_coeffs(tail.omega, E, n_terms)
    if isinstance(tail, CoulombTail):
        return coulomb_infinity_cue_coeffs(tail.l, E, n_terms)
    if isinstance(tail, YukawaTail):
        return yukawa_infinity_cue_coeffs(tail.l, E, tail.screening_lambda,
                                          n_terms)
    if isinstance(tail, QuarkTail):
        return quark_infinity_cue_coeffs(tail.l, E, tail.omega, n_terms)
    if isinstance(tail, CoulombZeroSingularity):
        return coulomb_zero_cue_coeffs(tail.l, E, n_terms)
    if isinstance(tail, YukawaZeroSingularity):
        return yukawa_zero_cue_coeffs(tail.l, E, tail.screening_lambda,
                                      n_terms)
    if isinstance(tail, QuarkZeroSingularity):
        return quark_zero_cue_coeffs(tail.l, E, tail.omega, n_terms)
    raise DomainError(f"unknown tail class {type(tail).__name__}")


def left_boundary_angle(problem: ProblemSpec, E: float, a: float,
                        n_terms: int = DEFAULT_N_TERMS) -> float:
    """Angle of the left-decaying cue at t = a, in (-pi/2, pi/2)."""
    tail = problem.left_tail
    if isinstance(tail, ConstantLevel):
        if not E < tail.level:
            raise ThresholdError(f"E = {E} not below left level {tail.level}")
        return math.atan(math.sqrt(2.0 * (tail.level - E)))
    series = tail_cue_series(tail, E, n_terms)
    return cue_angle(series.evaluate(a))


def right_boundary_angle(problem: ProblemSpec, E: float, b: float,
                         n_terms: int = DEFAULT_N_TERMS) -> float:
    """Angle of the right-decaying cue at t = b, in (-pi/2, pi/2)."""
    tail = problem.right_tail
    if isinstance(tail, ConstantLevel):
        if not E < tail.level:
            raise ThresholdError(f"E = {E} not below right level {tail.level}")
        return -math.atan(math.sqrt(2.0 * (tail.level - E)))
    series = tail_cue_series(tail, E, n_terms)
    return cue_angle(series.evaluate(b))


def boundary_residual(problem: ProblemSpec, E: float, t: float, side: str,
                      n_terms: int = DEFAULT_N_TERMS) -> float:
    """Cue residual at a candidate boundary; 0 for exact constant tails."""
    tail = problem.left_tail if side == "left" else problem.right_tail
    if isinstance(tail, ConstantLevel):
        v = evaluate(problem.effective_potential(), t)
        k2 = 2.0 * (tail.level - E)
        # constant-tail cue is exact only where V has settled to the level
        return abs(2.0 * (v - E) - k2)
    series = tail_cue_series(tail, E, n_terms)
    return verify_cue_residual(series, problem.potential, problem.l, E, t)
