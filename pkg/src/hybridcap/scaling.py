"""Closed-form scaling laws for hybrid networks with rate-limited backhaul.

All quantities are exponents of ``n`` (the number of wireless nodes).  The
operating point is described by

* ``alpha`` -- path-loss exponent (``alpha > 2``),
* ``beta``  -- number of BSs ``m = n**beta``,
* ``gamma`` -- antennas per BS ``l = n**gamma``,
* ``eta``   -- backhaul rate of every BS-to-BS link ``R_BS = n**eta``.

Order expressions such as ``Theta(n**x (log n)**k)`` are represented by
:class:`ScalingValue`.  Exponents stay exact (:class:`fractions.Fraction`)
when the inputs are rationals; float inputs are compared with an absolute
tolerance of ``1e-12`` so that points on a regime boundary classify
consistently.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import NamedTuple

__all__ = [
    "DomainError",
    "Scheme",
    "ScalingPoint",
    "RegimeLabel",
    "ScalingValue",
    "ExponentBreakdown",
    "GeneralizedResult",
    "classify_regime",
    "regime_inequalities",
    "throughput_exponent_infinite",
    "xki_exponent",
    "cbs_protocol_exponent",
    "cbs_exponent",
    "is_infrastructure_limited",
    "generalized_exponent",
    "regime_worst_case_cbs",
    "TOL",
]

TOL = 1e-12
_HALF = Fraction(1, 2)
_THIRD = Fraction(1, 3)


class DomainError(ValueError):
    """An argument lies outside the domain of a scaling law."""


class Scheme(str, enum.Enum):
    ISH = "ISH"
    IMH = "IMH"

    def __str__(self) -> str:
        return self.value


# -- tolerant comparisons ---------------------------------------------------
def _tol(*xs) -> float:
    # an int zero keeps Fraction arithmetic exact
    return 0 if all(isinstance(x, (int, Fraction)) for x in xs) else TOL


def _lt(a, b) -> bool:
    return a < b - _tol(a, b)


def _le(a, b) -> bool:
    return a <= b + _tol(a, b)


def _eq(a, b) -> bool:
    return abs(a - b) <= _tol(a, b)


def _as_number(x, name: str):
    if isinstance(x, bool) or not isinstance(x, Real):
        raise DomainError(f"{name} must be a real number, got {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    x = float(x)
    if x != x:
        raise DomainError(f"{name} is NaN")
    return x


@dataclass(frozen=True)
class ScalingPoint:
    """Exponent coordinates ``(alpha, beta, gamma, eta)`` of an operating point."""

    alpha: Real
    beta: Real
    gamma: Real
    eta: Real | None = None

    def __post_init__(self):
        alpha = _as_number(self.alpha, "alpha")
        beta = _as_number(self.beta, "beta")
        gamma = _as_number(self.gamma, "gamma")
        if not alpha > 2:
            raise DomainError(f"alpha must exceed 2 (got {alpha})")
        if not 0 <= beta < 1:
            raise DomainError(f"beta must lie in [0, 1) (got {beta})")
        if not 0 <= gamma < 1:
            raise DomainError(f"gamma must lie in [0, 1) (got {gamma})")
        if not _le(beta + gamma, 1):
            raise DomainError(f"beta + gamma must not exceed 1 (got {beta + gamma})")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)
        if self.eta is not None:
            object.__setattr__(self, "eta", _as_number(self.eta, "eta"))

    def require_eta(self):
        if self.eta is None:
            raise DomainError("this operation needs the backhaul exponent eta")
        return self.eta


@dataclass(frozen=True)
class RegimeLabel:
    """Operating regime, e.g. ``RegimeLabel("B", 3)`` prints as ``B-3``."""

    major: str
    minor: int

    def __post_init__(self):
        allowed = {"A": (1, 2), "B": (1, 2, 3, 4)}
        if self.major not in allowed or self.minor not in allowed[self.major]:
            raise DomainError(f"no such regime {self.major}-{self.minor}")

    def __str__(self) -> str:
        return f"{self.major}-{self.minor}"

    @classmethod
    def parse(cls, text: str) -> "RegimeLabel":
        major, _, minor = text.partition("-")
        return cls(major, int(minor))


@functools.total_ordering
@dataclass(frozen=True)
class ScalingValue:
    """The order ``n**exponent * (log n)**polylog_order``.

    Ordering is lexicographic on ``(exponent, polylog_order)``, so
    ``Theta(1) < O(log n) < n**0.0001``.  ``epsilon_slack`` records an
    arbitrarily small ``n**(-eps)`` factor; it is metadata only and never
    takes part in comparisons.
    """

    exponent: Real
    polylog_order: int = 0
    epsilon_slack: bool = field(default=False, compare=False)

    def _key_cmp(self, other: "ScalingValue") -> int:
        if not _eq(self.exponent, other.exponent):
            return -1 if self.exponent < other.exponent else 1
        return (self.polylog_order > other.polylog_order) - (
            self.polylog_order < other.polylog_order
        )

    def __eq__(self, other):
        if not isinstance(other, ScalingValue):
            return NotImplemented
        return self._key_cmp(other) == 0

    def __lt__(self, other):
        if not isinstance(other, ScalingValue):
            return NotImplemented
        return self._key_cmp(other) < 0

    def __hash__(self):
        return hash(self.polylog_order)

    def __str__(self) -> str:
        e = float(self.exponent)
        parts = []
        if not _eq(self.exponent, 0) or self.polylog_order == 0:
            parts.append("1" if _eq(self.exponent, 0) else f"n^{e:g}")
        if self.polylog_order == 1:
            parts.append("log n")
        elif self.polylog_order:
            parts.append(f"(log n)^{self.polylog_order}")
        s = " ".join(parts)
        return s + (" n^-eps" if self.epsilon_slack else "")

    def to_dict(self) -> dict:
        return {
            "exponent": float(self.exponent),
            "polylog_order": self.polylog_order,
            "epsilon_slack": self.epsilon_slack,
        }


LOG_N = ScalingValue(Fraction(0), 1)


class ExponentBreakdown(NamedTuple):
    """Per-protocol term list; ``result`` is the minimum of ``terms``."""

    scheme: Scheme
    terms: list[tuple[str, ScalingValue]]
    result: ScalingValue


class GeneralizedResult(NamedTuple):
    value: ScalingValue
    scheme: Scheme
    ish: ExponentBreakdown
    imh: ExponentBreakdown


# -- regimes ----------------------------------------------------------------
def classify_regime(p: ScalingPoint) -> RegimeLabel:
    """Return the sub-regime of ``(beta, gamma)``.

    Regime A is ``beta + 2 gamma < 1``; inside it A-1 has ``gamma <= beta``.
    In Regime B the split is by ``beta``: B-1 for ``beta >= 1/2``, B-4 for
    ``beta < 1/3``, and B-2 / B-3 in between for ``gamma <= beta`` /
    ``gamma > beta``.
    """
    b, g = p.beta, p.gamma
    if _lt(b + 2 * g, 1):
        return RegimeLabel("A", 1 if _le(g, b) else 2)
    if not _lt(b, _HALF):
        return RegimeLabel("B", 1)
    if _lt(b, _THIRD):
        return RegimeLabel("B", 4)
    return RegimeLabel("B", 2 if _le(g, b) else 3)


def regime_inequalities(p: ScalingPoint) -> list[str]:
    """Human-readable inequalities that place ``p`` in its regime."""
    b, g = float(p.beta), float(p.gamma)
    label = classify_regime(p)
    s = b + 2 * g
    out = []
    if label.major == "A":
        out.append(f"beta+2*gamma = {s:g} < 1")
        out.append(f"gamma = {g:g} {'<=' if label.minor == 1 else '>'} beta = {b:g}")
    else:
        out.append(f"beta+2*gamma = {s:g} >= 1")
        if label.minor == 1:
            out.append(f"beta = {b:g} >= 1/2")
        elif label.minor == 4:
            out.append(f"beta = {b:g} < 1/3")
        else:
            out.append(f"1/3 <= beta = {b:g} < 1/2")
            out.append(f"gamma = {g:g} {'<=' if label.minor == 2 else '>'} beta = {b:g}")
    return out


# -- infinite backhaul ------------------------------------------------------
def ish_boundary_alpha(p: ScalingPoint):
    """Path-loss exponent at which ISH and IMH tie in Regime B."""
    return 1 + 2 * p.gamma / (1 - p.beta)


def throughput_exponent_infinite(p: ScalingPoint) -> tuple[ScalingValue, Scheme]:
    """Throughput exponent and best scheme with unlimited backhaul."""
    a, b, g = p.alpha, p.beta, p.gamma
    if classify_regime(p).major == "A":
        return ScalingValue(b + g), Scheme.IMH
    if _lt(a, ish_boundary_alpha(p)):
        return ScalingValue(1 + g - a * (1 - b) / 2), Scheme.ISH
    return ScalingValue((1 + b) / 2, epsilon_slack=True), Scheme.IMH


def xki_exponent(a: Real, b: Real) -> ScalingValue:
    """Order of the S-D pair count between two cells.

    ``n**a`` active sources per cell pick destinations uniformly among
    ``n**b`` cells.  The count is ``O(log n)`` for ``a <= b`` and
    ``Theta(n**(a-b))`` otherwise.
    """
    a = _as_number(a, "a")
    b = _as_number(b, "b")
    if not (a > 0 and b > 0):
        raise DomainError(f"a and b must be positive (got a={a}, b={b})")
    if _le(a, b):
        return LOG_N
    return ScalingValue(a - b)


# -- minimum backhaul rate --------------------------------------------------
def cbs_protocol_exponent(p: ScalingPoint, scheme: Scheme | str) -> ScalingValue:
    """Minimum backhaul rate needed by one protocol to keep its throughput."""
    scheme = Scheme(scheme)
    label = classify_regime(p)
    b, g = p.beta, p.gamma
    if scheme is Scheme.ISH:
        if label.major != "B":
            raise DomainError(f"ISH backhaul requirement is defined in Regime B only, not {label}")
        if label.minor == 1:
            return ScalingValue(b + g - 1, 1)
        return ScalingValue(g - b)
    if str(label) == "A-2":
        return ScalingValue(g - b)
    if str(label) == "B-4":
        return ScalingValue((1 - 3 * b) / 2, epsilon_slack=True)
    return LOG_N


def cbs_exponent(p: ScalingPoint) -> ScalingValue:
    """Minimum backhaul rate preserving the infinite-backhaul throughput."""
    imh = cbs_protocol_exponent(p, Scheme.IMH)
    if classify_regime(p).major == "A":
        return imh
    ish = cbs_protocol_exponent(p, Scheme.ISH)
    return ish if imh < ish else imh


def is_infrastructure_limited(p: ScalingPoint) -> bool:
    """True when ``R_BS = n**eta`` grows slower than the required rate."""
    eta = p.require_eta()
    return ScalingValue(eta) < cbs_exponent(p)


def regime_worst_case_cbs(group: str) -> ScalingValue:
    """Supremum of the required backhaul exponent over a group of regimes.

    ``group`` is ``"A∪B123"`` (alias ``"AB123"``) or ``"B4"``.
    """
    key = group.replace(" ", "").upper().replace("∪", "")
    if key in ("AB123", "A+B123", "A,B123"):
        return ScalingValue(_HALF)
    if key in ("B4", "B-4"):
        return ScalingValue(Fraction(1))
    raise DomainError(f"unknown regime group {group!r}")


# -- arbitrary backhaul -----------------------------------------------------
def _min_term(terms):
    best = terms[0][1]
    for _, v in terms[1:]:
        if v < best:
            best = v
    return best


def ish_terms(p: ScalingPoint) -> ExponentBreakdown:
    a, b, g = p.alpha, p.beta, p.gamma
    eta = p.require_eta()
    terms = [
        ("ml(m/n)^(alpha/2-1)", ScalingValue(b + g - (a / 2 - 1) * (1 - b))),
        ("m^2 R_BS", ScalingValue(2 * b + eta)),
        ("(n/log n) R_BS", ScalingValue(1 + eta, -1)),
    ]
    return ExponentBreakdown(Scheme.ISH, terms, _min_term(terms))


def imh_terms(p: ScalingPoint) -> ExponentBreakdown:
    b, g = p.beta, p.gamma
    eta = p.require_eta()
    half = b + (1 - b) / 2
    terms = [
        ("ml", ScalingValue(b + g)),
        ("m(n/m)^(1/2-eps)", ScalingValue(half, epsilon_slack=True)),
        ("m^2 R_BS", ScalingValue(2 * b + eta)),
        ("(ml/log n) R_BS", ScalingValue(b + g + eta, -1)),
        ("(m/log n)(n/m)^(1/2-eps) R_BS", ScalingValue(half + eta, -1, True)),
    ]
    return ExponentBreakdown(Scheme.IMH, terms, _min_term(terms))


def generalized_exponent(p: ScalingPoint) -> GeneralizedResult:
    """Aggregate throughput exponent for an arbitrary backhaul exponent.

    Each protocol is limited by the smallest of its wireless and backhaul
    terms; the network uses the better protocol.
    """
    ish = ish_terms(p)
    imh = imh_terms(p)
    if ish.result > imh.result:
        return GeneralizedResult(ish.result, Scheme.ISH, ish, imh)
    return GeneralizedResult(imh.result, Scheme.IMH, ish, imh)
