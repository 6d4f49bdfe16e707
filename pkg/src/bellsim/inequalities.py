"""Inequality evaluators and exhaustive enumeration oracles.

Every evaluator takes a :class:`CorrelationSource`, an object providing
the correlation function ``E(delta, gamma)`` and, where meaningful, the
joint outcome-pair probabilities.  Sources wrap the quantum closed
forms, the exact Born engine, local hidden-variable models, empirical
counts, and convex mixtures of fixed-outcome sextets, so the same
inequality code runs against theory, simulation, and data.

Implemented bounds:

* :func:`bell_d1` - the original three-correlation inequality
  |E(d,g) - E(d,g')| -+ E(g,g') <= 1 (minus for anticorrelated pairs,
  plus for correlated ones; the third correlation puts analyzer D at
  angle g).
* :func:`chsh_d3` - the four-setting variant
  |E(d,g) - E(d,g')| + E(d',g') + E(d',g) <= 2, valid for correlated
  and anticorrelated pairs alike.
* :func:`chsh_d4` - |<S>| <= 2 with
  S = E(d,g) + E(d,g') + E(d',g) - E(d',g').
* :func:`wigner_check` - the three-angle probability inequality for
  strictly (anti)correlated pairs.

The enumeration oracles ground the convex bounds in integer
arithmetic: :func:`enumerate_quartets` lists all 16 joint outcome
assignments for four settings (each with S = +-2 exactly), and
:func:`enumerate_sextets` lists the 8 assignments for three shared
angles consistent with strict (anti)correlation.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lhv import LhvModel, estimate_correlation, quadrature_correlation
from .qstate import (
    EntangledState,
    JointDistribution,
    StateKind,
    closed_form_correlation,
    joint_distribution,
)

__all__ = [
    "VIOLATION_TOLERANCE",
    "CorrelationSign",
    "InequalityReport",
    "CorrelationSource",
    "JointUnavailableError",
    "QuantumClosedFormSource",
    "QuantumBornSource",
    "LhvSource",
    "EmpiricalSource",
    "SextetMixtureSource",
    "bell_d1",
    "chsh_s",
    "chsh_d4",
    "chsh_d3",
    "wigner_check",
    "Quartet",
    "enumerate_quartets",
    "quartet_mixture_s",
    "Sextet",
    "enumerate_sextets",
    "WignerProbabilities",
    "sextet_mixture_probabilities",
]

# analytic sources count as violating only beyond this margin; statistical
# sources should be judged on their standard errors instead
VIOLATION_TOLERANCE = 1e-9

WEIGHT_ATOL = 1e-9


class CorrelationSign(enum.Enum):
    """Selects the sign variant of the inequalities that depend on whether
    equal-angle outcomes are strictly opposite or strictly equal."""

    ANTICORRELATED = "anticorrelated"
    CORRELATED = "correlated"


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    bound: float
    margin: float
    violated: bool
    inputs: dict

    def __str__(self):
        flag = "VIOLATED" if self.violated else "satisfied"
        return f"{self.name}: lhs={self.lhs:.6f} bound={self.bound:.6f} ({flag})"


def _report(name: str, lhs: float, bound: float, inputs: dict) -> InequalityReport:
    margin = lhs - bound
    return InequalityReport(
        name=name,
        lhs=lhs,
        bound=bound,
        margin=margin,
        violated=margin > VIOLATION_TOLERANCE,
        inputs=inputs,
    )


class JointUnavailableError(ValueError):
    """Raised when a source cannot provide joint outcome probabilities."""


class CorrelationSource:
    """Provider of E(delta, gamma); subclasses may also provide joints."""

    def correlation(self, delta: float, gamma: float) -> float:
        raise NotImplementedError

    def joint(self, delta: float, gamma: float) -> JointDistribution:
        raise JointUnavailableError(
            f"{self.describe()} provides no joint outcome probabilities"
        )

    def describe(self) -> str:
        return type(self).__name__


class QuantumClosedFormSource(CorrelationSource):
    """Analytic cosine correlations for one of the four canonical states."""

    def __init__(self, kind: StateKind):
        self.kind = kind

    def correlation(self, delta: float, gamma: float) -> float:
        return closed_form_correlation(self.kind, delta, gamma)

    def joint(self, delta: float, gamma: float) -> JointDistribution:
        # all four canonical states have uniform marginals and symmetric
        # joints, so E determines the distribution
        e = self.correlation(delta, gamma)
        same = 0.25 * (1.0 + e)
        diff = 0.25 * (1.0 - e)
        return JointDistribution(p_pp=same, p_pm=diff, p_mp=diff, p_mm=same)

    def describe(self) -> str:
        return f"closed-form:{self.kind.value}"


class QuantumBornSource(CorrelationSource):
    """Exact Born-rule evaluation of an entangled state."""

    def __init__(self, state: EntangledState):
        self.state = state

    def correlation(self, delta: float, gamma: float) -> float:
        return joint_distribution(self.state, delta, gamma).correlation()

    def joint(self, delta: float, gamma: float) -> JointDistribution:
        return joint_distribution(self.state, delta, gamma)

    def describe(self) -> str:
        return f"born:{self.state.kind.value}"


class LhvSource(CorrelationSource):
    """Correlations of a hidden-variable model, by quadrature or Monte Carlo.

    ``method`` is "quadrature" (uses ``nodes`` midpoint nodes; joints
    available) or "montecarlo" (uses ``n`` samples per requested pair,
    seeded from ``seed`` plus a per-call counter; correlations only).
    """

    def __init__(
        self,
        model: LhvModel,
        method: str = "quadrature",
        nodes: int = 4096,
        n: int = 100_000,
        seed: int = 0,
    ):
        if method not in ("quadrature", "montecarlo"):
            raise ValueError(f"unknown method {method!r}")
        self.model = model
        self.method = method
        self.nodes = nodes
        self.n = n
        self.seed = seed
        self._calls = 0

    def correlation(self, delta: float, gamma: float) -> float:
        if self.method == "quadrature":
            return quadrature_correlation(self.model, delta, gamma, self.nodes)
        self._calls += 1
        return estimate_correlation(
            self.model, delta, gamma, self.n, self.seed + self._calls
        ).mean

    def joint(self, delta: float, gamma: float) -> JointDistribution:
        if self.method != "quadrature":
            raise JointUnavailableError(
                "joint probabilities require the quadrature method"
            )
        from .lhv import _midpoints  # midpoint grid shared with quadrature

        lam, weight = _midpoints(self.model.support, self.nodes)
        rho = self.model.pdf(lam) * weight
        d = self.model.response_d(lam, delta)
        g = self.model.response_g(lam, gamma)
        p = [
            float(np.sum(rho[(d == x) & (g == y)]))
            for x, y in ((1, 1), (1, -1), (-1, 1), (-1, -1))
        ]
        return JointDistribution(p_pp=p[0], p_pm=p[1], p_mp=p[2], p_mm=p[3])

    def describe(self) -> str:
        return f"lhv:{self.model.name}:{self.method}"


class EmpiricalSource(CorrelationSource):
    """Correlations estimated from coincidence counts.

    ``pairs`` lists the measured (delta, gamma) settings pairs and
    ``counts`` the matching (n_pp, n_pm, n_mp, n_mm) rows.  Lookups
    require the exact settings pair; there is no interpolation between
    nearby angles, so an inequality can only be evaluated on data that
    actually contains every pair it references.
    """

    def __init__(self, pairs: Sequence[tuple[float, float]], counts: np.ndarray):
        counts = np.asarray(counts, dtype=np.int64)
        if counts.shape != (len(pairs), 4):
            raise ValueError("counts must have one (pp, pm, mp, mm) row per pair")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        self.pairs = [(float(d), float(g)) for d, g in pairs]
        self.counts = counts
        self._index = {pair: i for i, pair in enumerate(self.pairs)}

    def _row(self, delta: float, gamma: float) -> np.ndarray:
        try:
            i = self._index[(float(delta), float(gamma))]
        except KeyError:
            raise KeyError(
                f"no counts recorded for settings pair ({delta!r}, {gamma!r})"
            ) from None
        row = self.counts[i]
        if row.sum() == 0:
            raise ValueError(
                f"settings pair ({delta!r}, {gamma!r}) has zero trials"
            )
        return row

    def correlation(self, delta: float, gamma: float) -> float:
        n_pp, n_pm, n_mp, n_mm = self._row(delta, gamma)
        total = n_pp + n_pm + n_mp + n_mm
        return float((n_pp + n_mm - n_pm - n_mp) / total)

    def joint(self, delta: float, gamma: float) -> JointDistribution:
        row = self._row(delta, gamma).astype(np.float64)
        p = row / row.sum()
        return JointDistribution(p_pp=p[0], p_pm=p[1], p_mp=p[2], p_mm=p[3])

    def describe(self) -> str:
        return f"empirical:{int(self.counts.sum())} trials"


# ---------------------------------------------------------------------------
# inequality evaluators
# ---------------------------------------------------------------------------


def bell_d1(
    source: CorrelationSource,
    delta: float,
    gamma: float,
    gamma_prime: float,
    sign: CorrelationSign,
) -> InequalityReport:
    """Three-correlation inequality |E(d,g) - E(d,g')| -+ E(g,g') <= 1.

    The minus sign applies to anticorrelated pairs, the plus sign to
    correlated ones.  The third correlation requires analyzer D to sit
    at angle gamma, which is why the four-setting variants below are
    preferred experimentally.
    """
    e_dg = source.correlation(delta, gamma)
    e_dgp = source.correlation(delta, gamma_prime)
    e_ggp = source.correlation(gamma, gamma_prime)
    if sign is CorrelationSign.ANTICORRELATED:
        lhs = abs(e_dg - e_dgp) - e_ggp
    else:
        lhs = abs(e_dg - e_dgp) + e_ggp
    return _report(
        "bell_d1",
        lhs,
        1.0,
        {
            "delta": delta,
            "gamma": gamma,
            "gamma_prime": gamma_prime,
            "sign": sign.value,
            "source": source.describe(),
        },
    )


def chsh_s(
    source: CorrelationSource,
    delta: float,
    delta_prime: float,
    gamma: float,
    gamma_prime: float,
) -> float:
    """<S> = E(d,g) + E(d,g') + E(d',g) - E(d',g')."""
    return (
        source.correlation(delta, gamma)
        + source.correlation(delta, gamma_prime)
        + source.correlation(delta_prime, gamma)
        - source.correlation(delta_prime, gamma_prime)
    )


def chsh_d4(
    source: CorrelationSource,
    delta: float,
    delta_prime: float,
    gamma: float,
    gamma_prime: float,
) -> InequalityReport:
    """|<S>| <= 2, the bound obeyed by every mixture of outcome quartets."""
    s = chsh_s(source, delta, delta_prime, gamma, gamma_prime)
    return _report(
        "chsh_d4",
        abs(s),
        2.0,
        {
            "delta": delta,
            "delta_prime": delta_prime,
            "gamma": gamma,
            "gamma_prime": gamma_prime,
            "s": s,
            "source": source.describe(),
        },
    )


def chsh_d3(
    source: CorrelationSource,
    delta: float,
    delta_prime: float,
    gamma: float,
    gamma_prime: float,
    sign: CorrelationSign | None = None,
) -> InequalityReport:
    """Four-setting inequality |E(d,g) - E(d,g')| + E(d',g') + E(d',g) <= 2.

    This displayed form holds for correlated and anticorrelated pairs
    alike; ``sign`` is accepted for symmetry with :func:`bell_d1` and
    echoed in the report inputs without changing the left-hand side.
    Note the lhs differs from |S|; use :func:`chsh_d4` for that.
    """
    e_dg = source.correlation(delta, gamma)
    e_dgp = source.correlation(delta, gamma_prime)
    e_dpgp = source.correlation(delta_prime, gamma_prime)
    e_dpg = source.correlation(delta_prime, gamma)
    lhs = abs(e_dg - e_dgp) + e_dpgp + e_dpg
    return _report(
        "chsh_d3",
        lhs,
        2.0,
        {
            "delta": delta,
            "delta_prime": delta_prime,
            "gamma": gamma,
            "gamma_prime": gamma_prime,
            "sign": sign.value if sign is not None else None,
            "source": source.describe(),
        },
    )


def wigner_check(
    source: CorrelationSource, theta1: float, theta2: float, theta3: float
) -> InequalityReport:
    """Three-angle probability inequality for strictly anticorrelated pairs.

    With both wings restricted to the shared angles theta1..theta3, the
    three measurable joint probabilities

        lhs = P(D at theta3 -> -1, G at theta2 -> +1)
        rhs = P(D at theta1 -> +1, G at theta2 -> +1)
            + P(D at theta1 -> -1, G at theta3 -> +1)

    satisfy lhs <= rhs for every anticorrelated mixture of fixed-outcome
    sextets, because the lhs event set splits exactly into disjoint
    subsets of the two rhs event sets.  For the spin singlet the three
    probabilities are half cos^2((theta2-theta3)/2),
    half sin^2((theta2-theta1)/2) and half cos^2((theta3-theta1)/2),
    and the inequality fails on a wide range of angles.

    The source must provide joint probabilities.  For correlated-pair
    mixtures use :func:`sextet_mixture_probabilities`, whose second
    probability reads the sign-matched outcome pattern.
    """
    lhs = source.joint(theta3, theta2).p_mp
    rhs = (
        source.joint(theta1, theta2).p_pp + source.joint(theta1, theta3).p_mp
    )
    return _report(
        "wigner",
        lhs,
        rhs,
        {
            "theta1": theta1,
            "theta2": theta2,
            "theta3": theta3,
            "source": source.describe(),
        },
    )


# ---------------------------------------------------------------------------
# exhaustive enumerations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Quartet:
    """One joint assignment of +-1 outcomes to the four settings."""

    d_delta: int
    g_gamma: int
    d_delta_prime: int
    g_gamma_prime: int
    s_value: int

    def __post_init__(self):
        s = (
            self.d_delta * self.g_gamma
            + self.d_delta * self.g_gamma_prime
            + self.d_delta_prime * self.g_gamma
            - self.d_delta_prime * self.g_gamma_prime
        )
        if s != self.s_value:
            raise ValueError(f"s_value {self.s_value} does not match outcomes ({s})")


def enumerate_quartets() -> list[Quartet]:
    """All 16 outcome quartets (d, g, d', g'), +1 first, d slowest.

    The combination S = d*g + d*g' + d'*g - d'*g' equals +2 or -2 for
    every quartet, which is the integer fact behind the |<S>| <= 2
    bound for any mixture.
    """
    out = []
    for d, g, dp, gp in itertools.product((1, -1), repeat=4):
        s = d * g + d * gp + dp * g - dp * gp
        out.append(Quartet(d, g, dp, gp, s))
    return out


def quartet_mixture_s(weights: Sequence[float]) -> float:
    """<S> of a convex mixture of the 16 quartets; always within [-2, 2]."""
    w = _validated_weights(weights, 16)
    s_values = np.array([q.s_value for q in enumerate_quartets()], dtype=np.int64)
    return float(np.dot(w, s_values))


@dataclass(frozen=True)
class Sextet:
    """Joint +-1 outcomes for both wings at three shared angles.

    Strict (anti)correlation ties the wings together: g_j = -d_j for
    anticorrelated pairs, g_j = d_j for correlated ones, so a sextet is
    fully determined by (d1, d2, d3).
    """

    d: tuple[int, int, int]
    g: tuple[int, int, int]
    sign: CorrelationSign

    def __post_init__(self):
        expect = -1 if self.sign is CorrelationSign.ANTICORRELATED else 1
        if any(gj != expect * dj for dj, gj in zip(self.d, self.g)):
            raise ValueError("sextet violates the (anti)correlation constraint")


def enumerate_sextets(sign: CorrelationSign) -> list[Sextet]:
    """The 8 constraint-consistent sextets, ordered by d with +1 first."""
    factor = -1 if sign is CorrelationSign.ANTICORRELATED else 1
    out = []
    for d in itertools.product((1, -1), repeat=3):
        g = tuple(factor * dj for dj in d)
        out.append(Sextet(d=d, g=g, sign=sign))
    return out


@dataclass(frozen=True)
class WignerProbabilities:
    """The three boxed-measurement probabilities of the sextet argument.

    In each, the two named outcomes are the measured ones; the rest of
    the sextet is summed over.  With s = -1 for anticorrelated pairs
    and +1 for correlated ones:

        rhs_first  = P(D at theta1 -> +1, G at theta2 -> +1)
        rhs_second = P(D at theta1 -> -1, G at theta3 -> -s)
        lhs        = P(D at theta3 -> -1, G at theta2 -> +1)

    (the G outcome in rhs_second is the one that pins d3 = -1).  The
    inequality reads lhs <= rhs_first + rhs_second.
    """

    lhs: float
    rhs_first: float
    rhs_second: float

    def margin(self) -> float:
        return self.lhs - (self.rhs_first + self.rhs_second)


def sextet_mixture_probabilities(
    weights: Sequence[float],
    sign: CorrelationSign = CorrelationSign.ANTICORRELATED,
) -> WignerProbabilities:
    """Wigner probabilities of a convex mixture of the 8 sextets.

    Each probability is the total weight of the sextets matching the
    corresponding outcome pattern (unconstrained positions summed
    over).  The lhs pattern decomposes exactly into two disjoint
    pieces, one inside each rhs pattern, so the mixture can never
    violate the inequality, whichever correlation sign ties the wings.
    """
    w = _validated_weights(weights, 8)
    sextets = enumerate_sextets(sign)
    g3_boxed = 1 if sign is CorrelationSign.ANTICORRELATED else -1
    rhs_first = sum(wi for wi, s in zip(w, sextets) if s.d[0] == 1 and s.g[1] == 1)
    rhs_second = sum(
        wi for wi, s in zip(w, sextets) if s.d[0] == -1 and s.g[2] == g3_boxed
    )
    lhs = sum(wi for wi, s in zip(w, sextets) if s.d[2] == -1 and s.g[1] == 1)
    return WignerProbabilities(
        lhs=float(lhs), rhs_first=float(rhs_first), rhs_second=float(rhs_second)
    )


class SextetMixtureSource(CorrelationSource):
    """Joint probabilities of a sextet mixture at three labelled angles.

    ``thetas`` names the three shared analyzer angles; joints are
    available exactly at those angles (matched by value).  Measuring D
    at theta_i and G at theta_j reads outcome d_i on one wing and g_j
    on the other, so the joint is the weight of the matching sextets.
    """

    def __init__(
        self,
        weights: Sequence[float],
        sign: CorrelationSign,
        thetas: tuple[float, float, float],
    ):
        self.weights = _validated_weights(weights, 8)
        self.sign = sign
        self.thetas = tuple(float(t) for t in thetas)
        self._sextets = enumerate_sextets(sign)

    def _angle_index(self, angle: float) -> int:
        for i, t in enumerate(self.thetas):
            if float(angle) == t:
                return i
        raise KeyError(f"angle {angle!r} is not one of the mixture angles")

    def joint(self, delta: float, gamma: float) -> JointDistribution:
        i = self._angle_index(delta)
        j = self._angle_index(gamma)
        p = {(1, 1): 0.0, (1, -1): 0.0, (-1, 1): 0.0, (-1, -1): 0.0}
        for wi, s in zip(self.weights, self._sextets):
            p[(s.d[i], s.g[j])] += wi
        return JointDistribution(
            p_pp=p[(1, 1)], p_pm=p[(1, -1)], p_mp=p[(-1, 1)], p_mm=p[(-1, -1)]
        )

    def correlation(self, delta: float, gamma: float) -> float:
        return self.joint(delta, gamma).correlation()

    def describe(self) -> str:
        return f"sextet-mixture:{self.sign.value}"


def _validated_weights(weights: Sequence[float], size: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (size,):
        raise ValueError(f"expected {size} weights, got shape {w.shape}")
    if np.any(w < -WEIGHT_ATOL):
        raise ValueError("weights must be nonnegative")
    total = float(w.sum())
    if abs(total - 1.0) > WEIGHT_ATOL:
        raise ValueError(f"weights sum to {total!r}, not 1")
    return w
