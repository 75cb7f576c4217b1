"""Bayes factor engine for the three two-group designs.

The sampling model is reduced to the observed t statistic, whose likelihood
given the standardized effect delta is noncentral t with noncentrality
delta * sqrt(n_eff).  A zero-location Cauchy prior (possibly truncated and
renormalized) is placed on delta.  From these two ingredients:

* superiority:      BF10 = marginal likelihood under the (half-)Cauchy
                    alternative over the central-t density at the point null
* non-inferiority:  BF10 = posterior odds of the two regions split at the
                    margin, divided by the Cauchy prior odds of the regions
* equivalence:      BF01 = the same region odds for inside versus outside
                    the interval; a degenerate (0, 0) interval short-cuts
                    to the Savage-Dickey density ratio at zero

A benefit direction of "low" is folded away at the door: the mean
difference is negated and the computation proceeds as if high scores were
beneficial, so both directions share one code path and mirror exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Optional, Sequence, Tuple, Union

import numpy as np

from . import specfun
from .datamodel import (
    DerivedStats,
    RawGroups,
    StudyInput,
    SummaryCi,
    SummaryMoments,
    ValidationError,
    derive_stats,
    standardize_margin,
)
from .quadrature import Interval, QuadratureError, QuadratureSettings, integrate_log

__all__ = [
    "DEFAULT_PRIOR_SCALE",
    "CauchyPrior",
    "TestSpec",
    "BfResult",
    "SweepEntry",
    "SweepResult",
    "posterior_log_density",
    "super_bf",
    "infer_bf",
    "equiv_bf",
    "savage_dickey_bf",
    "prior_sweep",
    "get_bf",
]

DEFAULT_PRIOR_SCALE = 1.0 / math.sqrt(2.0)

# Region constructions reject splits leaving less prior mass than this on
# either side; the odds are meaningless beyond it.
_MIN_REGION_PRIOR_MASS = 1e-15

Design = Literal["superiority", "non_inferiority", "equivalence"]
Direction = Literal["high", "low"]
Alternative = Literal["one_sided", "two_sided"]
Orientation = Literal["bf10", "bf01"]


@dataclass(frozen=True)
class CauchyPrior:
    """Zero-location Cauchy on delta, optionally truncated and renormalized."""

    scale: float = DEFAULT_PRIOR_SCALE
    truncation: Interval = Interval(-math.inf, math.inf)

    def __post_init__(self):
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ValidationError("prior scale must be a positive finite number")
        if self.mass(self.truncation.lower, self.truncation.upper) < _MIN_REGION_PRIOR_MASS:
            raise ValidationError("truncation interval carries no Cauchy mass")

    def mass(self, lower: float, upper: float) -> float:
        """Untruncated Cauchy mass of (lower, upper)."""
        return specfun.cauchy_cdf(upper, self.scale) - specfun.cauchy_cdf(lower, self.scale)

    @property
    def log_norm(self) -> float:
        return math.log(self.mass(self.truncation.lower, self.truncation.upper))

    def logpdf(self, delta):
        """Renormalized log density; -inf outside the truncation interval."""
        delta = np.asarray(delta, dtype=float)
        dens = specfun.cauchy_logpdf(delta, self.scale) - self.log_norm
        inside = (delta > self.truncation.lower) & (delta < self.truncation.upper)
        out = np.where(inside, dens, -math.inf)
        return float(out[()]) if out.ndim == 0 else out


@dataclass(frozen=True)
class TestSpec:
    """Which test to run and how its hypotheses are laid out.

    Only the fields relevant to ``design`` may be set; use the factory
    classmethods rather than filling fields by hand.
    """

    __test__ = False  # keep pytest from collecting this as a test class

    design: Design
    direction: Direction = "high"
    alternative: Optional[Alternative] = None
    ni_margin: Optional[float] = None
    ni_margin_std: bool = False
    interval: Optional[Tuple[float, float]] = None
    interval_std: bool = False

    def __post_init__(self):
        if self.direction not in ("high", "low"):
            raise ValidationError("direction must be 'high' or 'low'")
        if self.design == "superiority":
            if self.alternative not in ("one_sided", "two_sided"):
                raise ValidationError("superiority needs alternative one_sided or two_sided")
            if self.ni_margin is not None or self.interval is not None:
                raise ValidationError("margins are not part of a superiority test")
        elif self.design == "non_inferiority":
            if self.ni_margin is None or self.ni_margin < 0.0:
                raise ValidationError("non-inferiority needs ni_margin >= 0")
            if self.alternative is not None or self.interval is not None:
                raise ValidationError("only ni_margin applies to a non-inferiority test")
        elif self.design == "equivalence":
            if self.interval is None:
                raise ValidationError("equivalence needs an interval")
            lo, hi = self.interval
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise ValidationError("equivalence interval needs lower <= upper")
            if self.alternative is not None or self.ni_margin is not None:
                raise ValidationError("only interval applies to an equivalence test")
        else:
            raise ValidationError(f"unknown design: {self.design!r}")

    @classmethod
    def superiority(cls, direction: Direction = "high",
                    alternative: Alternative = "two_sided") -> "TestSpec":
        return cls(design="superiority", direction=direction, alternative=alternative)

    @classmethod
    def non_inferiority(cls, ni_margin: float, standardized: bool = False,
                        direction: Direction = "high") -> "TestSpec":
        return cls(design="non_inferiority", direction=direction,
                   ni_margin=float(ni_margin), ni_margin_std=standardized)

    @classmethod
    def equivalence(cls, interval: Union[float, Tuple[float, float]] = (0.0, 0.0),
                    standardized: bool = False,
                    direction: Direction = "high") -> "TestSpec":
        # a scalar v means the symmetric interval (-v, v); 0 is the point null
        if isinstance(interval, (int, float)):
            v = abs(float(interval))
            interval = (-v, v) if v > 0.0 else (0.0, 0.0)
        else:
            interval = (float(interval[0]), float(interval[1]))
        return cls(design="equivalence", direction=direction,
                   interval=interval, interval_std=standardized)


@dataclass(frozen=True)
class BfResult:
    """A computed Bayes factor plus everything needed to report it."""

    log_bf: float
    orientation: Orientation
    design: Design
    direction: Direction
    prior_scale: float
    input_mode: Literal["raw", "summary-moments", "summary-ci"]
    alternative: Optional[Alternative] = None
    margin_std: Optional[float] = None
    margin_unstd: Optional[float] = None
    interval_std: Optional[Tuple[float, float]] = None
    interval_unstd: Optional[Tuple[float, float]] = None

    def flipped(self) -> "BfResult":
        """Same evidence, opposite orientation."""
        other: Orientation = "bf01" if self.orientation == "bf10" else "bf10"
        return replace(self, log_bf=-self.log_bf, orientation=other)


@dataclass(frozen=True)
class SweepEntry:
    scale: float
    result: Optional[BfResult] = None
    error: Optional[str] = None


@dataclass(frozen=True)
class SweepResult:
    entries: Tuple[SweepEntry, ...]
    min_log_bf: Optional[float]
    max_log_bf: Optional[float]


def get_bf(result: BfResult) -> float:
    """The Bayes factor on the linear scale, in the result's orientation."""
    return math.exp(result.log_bf)


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------

def _input_mode(data: StudyInput) -> str:
    if isinstance(data, RawGroups):
        return "raw"
    if isinstance(data, SummaryMoments):
        return "summary-moments"
    if isinstance(data, SummaryCi):
        return "summary-ci"
    raise ValidationError(f"unsupported study input type: {type(data).__name__}")


def _canonical_t(stats: DerivedStats, direction: Direction) -> float:
    """t statistic oriented so that larger values favour the benefit."""
    return stats.t_obs if direction == "high" else -stats.t_obs


def _log_likelihood(stats: DerivedStats, t_canonical: float):
    sqrt_n = math.sqrt(stats.n_eff)

    def ll(delta):
        return specfun.noncentral_t_logpdf(t_canonical, stats.df, np.asarray(delta) * sqrt_n)

    return ll


def _log_marginal(stats: DerivedStats, t_canonical: float, prior: CauchyPrior,
                  region: Interval, settings: QuadratureSettings) -> float:
    """ln integral of likelihood * truncated-prior density over region."""
    ll = _log_likelihood(stats, t_canonical)

    def integrand(delta):
        return ll(delta) + prior.logpdf(delta)

    return integrate_log(integrand, region, settings)


def posterior_log_density(delta, stats: DerivedStats, prior: CauchyPrior,
                          settings: QuadratureSettings | None = None):
    """Normalized log posterior density of delta given the observed t.

    Proportional to likelihood times prior; the normalizer is integrated
    over the prior's truncation interval, so the density integrates to one
    there.  Broadcasts over ``delta``.
    """
    settings = settings or QuadratureSettings()
    log_z = _log_marginal(stats, stats.t_obs, prior, prior.truncation, settings)
    ll = _log_likelihood(stats, stats.t_obs)
    return ll(delta) + prior.logpdf(delta) - log_z


def savage_dickey_bf(stats: DerivedStats, prior: CauchyPrior, delta0: float,
                     settings: QuadratureSettings | None = None) -> float:
    """BF01 for the point null delta = delta0 nested in the prior's support.

    The density ratio shortcut: posterior density over prior density at the
    null point.
    """
    if not prior.truncation.lower < delta0 < prior.truncation.upper:
        raise ValidationError("delta0 lies outside the prior's truncation interval")
    log_post = posterior_log_density(delta0, stats, prior, settings)
    return math.exp(float(log_post) - float(prior.logpdf(delta0)))


def _region_log_odds(stats: DerivedStats, t_canonical: float, prior: CauchyPrior,
                     split: float, settings: QuadratureSettings) -> Tuple[float, float]:
    """(log posterior odds, log prior odds) of delta > split vs delta < split."""
    p_below = prior.mass(-math.inf, split)
    p_above = prior.mass(split, math.inf)
    if p_below < _MIN_REGION_PRIOR_MASS or p_above < _MIN_REGION_PRIOR_MASS:
        raise ValidationError(
            f"margin {split:g} leaves essentially no prior mass on one side"
        )
    log_m_above = _log_marginal(stats, t_canonical, prior, Interval(split, math.inf), settings)
    log_m_below = _log_marginal(stats, t_canonical, prior, Interval(-math.inf, split), settings)
    return log_m_above - log_m_below, math.log(p_above) - math.log(p_below)


def super_bf(data: StudyInput, spec: TestSpec,
             prior_scale: float = DEFAULT_PRIOR_SCALE,
             settings: QuadratureSettings | None = None) -> BfResult:
    """Superiority test: point null delta = 0 against the Cauchy alternative.

    Two-sided uses the full Cauchy; one-sided uses the half-Cauchy on the
    beneficial side, renormalized.  Evidence is oriented BF10.
    """
    if spec.design != "superiority":
        raise ValidationError("super_bf requires a superiority TestSpec")
    settings = settings or QuadratureSettings()
    stats = derive_stats(data)
    t_c = _canonical_t(stats, spec.direction)

    if spec.alternative == "two_sided":
        prior = CauchyPrior(scale=prior_scale)
    else:
        prior = CauchyPrior(scale=prior_scale, truncation=Interval(0.0, math.inf))
    log_m1 = _log_marginal(stats, t_c, prior, prior.truncation, settings)
    log_m0 = float(specfun.central_t_logpdf(t_c, stats.df))

    return BfResult(
        log_bf=log_m1 - log_m0,
        orientation="bf10",
        design="superiority",
        direction=spec.direction,
        alternative=spec.alternative,
        prior_scale=prior_scale,
        input_mode=_input_mode(data),
    )


def infer_bf(data: StudyInput, spec: TestSpec,
             prior_scale: float = DEFAULT_PRIOR_SCALE,
             settings: QuadratureSettings | None = None) -> BfResult:
    """Non-inferiority test: region odds split at the standardized margin.

    With benefit = high the hypotheses are H0: delta < -margin versus
    H1: delta > -margin (mirrored for benefit = low).  BF10 is the posterior
    odds of the regions divided by their prior odds under the full Cauchy.
    """
    if spec.design != "non_inferiority":
        raise ValidationError("infer_bf requires a non-inferiority TestSpec")
    settings = settings or QuadratureSettings()
    stats = derive_stats(data)
    t_c = _canonical_t(stats, spec.direction)
    margin_std = standardize_margin(spec.ni_margin, spec.ni_margin_std, stats)
    margin_unstd = spec.ni_margin if not spec.ni_margin_std else spec.ni_margin * stats.sd_pooled

    prior = CauchyPrior(scale=prior_scale)
    log_post_odds, log_prior_odds = _region_log_odds(
        stats, t_c, prior, -margin_std, settings
    )
    return BfResult(
        log_bf=log_post_odds - log_prior_odds,
        orientation="bf10",
        design="non_inferiority",
        direction=spec.direction,
        prior_scale=prior_scale,
        input_mode=_input_mode(data),
        margin_std=margin_std,
        margin_unstd=margin_unstd,
    )


def equiv_bf(data: StudyInput, spec: TestSpec,
             prior_scale: float = DEFAULT_PRIOR_SCALE,
             settings: QuadratureSettings | None = None) -> BfResult:
    """Equivalence test: evidence for delta inside the interval, as BF01.

    The degenerate interval (0, 0) is the point null, evaluated by the
    Savage-Dickey ratio against the full Cauchy alternative.  A proper
    interval uses the inside-versus-outside region odds.  The interval is
    read in benefit-oriented units: with direction "low" it bounds the
    mirrored effect, so mirrored data under the flipped direction give the
    same answer.
    """
    if spec.design != "equivalence":
        raise ValidationError("equiv_bf requires an equivalence TestSpec")
    settings = settings or QuadratureSettings()
    stats = derive_stats(data)
    t_c = _canonical_t(stats, spec.direction)

    lo_std = standardize_margin(spec.interval[0], spec.interval_std, stats)
    hi_std = standardize_margin(spec.interval[1], spec.interval_std, stats)
    if spec.interval_std:
        lo_unstd = spec.interval[0] * stats.sd_pooled
        hi_unstd = spec.interval[1] * stats.sd_pooled
    else:
        lo_unstd, hi_unstd = spec.interval

    # the interval is stated for the benefit-oriented effect, which is what
    # the canonical t already measures; no reflection needed
    lo_c, hi_c = lo_std, hi_std

    prior = CauchyPrior(scale=prior_scale)
    stats_c = replace(stats, t_obs=t_c)

    if lo_c == hi_c == 0.0:
        log_bf01 = math.log(savage_dickey_bf(stats_c, prior, 0.0, settings))
    elif lo_c == hi_c:
        raise ValidationError("a point equivalence hypothesis must sit at 0")
    else:
        p_in = prior.mass(lo_c, hi_c)
        p_out = 1.0 - p_in
        if p_in < _MIN_REGION_PRIOR_MASS:
            raise ValidationError("equivalence interval carries no prior mass")
        if p_out < _MIN_REGION_PRIOR_MASS:
            raise ValidationError("equivalence interval leaves no prior mass outside")
        log_m_in = _log_marginal(stats, t_c, prior, Interval(lo_c, hi_c), settings)
        log_m_out = np.logaddexp(
            _log_marginal(stats, t_c, prior, Interval(-math.inf, lo_c), settings),
            _log_marginal(stats, t_c, prior, Interval(hi_c, math.inf), settings),
        )
        log_bf01 = (log_m_in - float(log_m_out)) - (math.log(p_in) - math.log(p_out))

    return BfResult(
        log_bf=log_bf01,
        orientation="bf01",
        design="equivalence",
        direction=spec.direction,
        prior_scale=prior_scale,
        input_mode=_input_mode(data),
        interval_std=(lo_std, hi_std),
        interval_unstd=(lo_unstd, hi_unstd),
    )


_RUNNERS = {
    "superiority": super_bf,
    "non_inferiority": infer_bf,
    "equivalence": equiv_bf,
}


def run_test(data: StudyInput, spec: TestSpec,
             prior_scale: float = DEFAULT_PRIOR_SCALE,
             settings: QuadratureSettings | None = None) -> BfResult:
    """Dispatch to the design-appropriate Bayes factor."""
    return _RUNNERS[spec.design](data, spec, prior_scale, settings)


def prior_sweep(data: StudyInput, spec: TestSpec, scales: Sequence[float],
                settings: QuadratureSettings | None = None) -> SweepResult:
    """Robustness sweep: one Bayes factor per prior scale.

    A failure at one scale is recorded on its entry and the sweep carries
    on.  Entries keep the order of ``scales``; the summary holds the min
    and max log Bayes factor over the successful entries.
    """
    if len(scales) == 0:
        raise ValidationError("prior_sweep needs at least one scale")
    if any(not (s > 0.0 and math.isfinite(s)) for s in scales):
        raise ValidationError("all prior scales must be positive finite numbers")

    entries = []
    for scale in scales:
        try:
            entries.append(SweepEntry(scale=float(scale),
                                      result=run_test(data, spec, float(scale), settings)))
        except (ValidationError, QuadratureError) as exc:
            entries.append(SweepEntry(scale=float(scale), error=str(exc)))
    log_bfs = [e.result.log_bf for e in entries if e.result is not None]
    return SweepResult(
        entries=tuple(entries),
        min_log_bf=min(log_bfs) if log_bfs else None,
        max_log_bf=max(log_bfs) if log_bfs else None,
    )
