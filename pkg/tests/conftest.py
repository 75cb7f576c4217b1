import numpy as np

from twogroupbf.datamodel import RawGroups, SummaryMoments


def random_moments(rng, n_lo=3, n_hi=50):
    """Random small-study summary with a moderate standardized effect."""
    n_x = int(rng.integers(n_lo, n_hi + 1))
    n_y = int(rng.integers(n_lo, n_hi + 1))
    sd_x = float(rng.uniform(0.3, 3.0))
    sd_y = float(rng.uniform(0.3, 3.0))
    mean_x = float(rng.normal(0.0, 2.0))
    mean_y = mean_x + float(rng.uniform(-1.5, 1.5)) * sd_x
    return SummaryMoments(n_x, n_y, mean_x, mean_y, sd_x, sd_y)


def raw_with_exact_moments(n, mean, sd):
    """Observations whose sample mean and sd (ddof=1) are exact by construction.

    Half the points sit at mean - a and half at mean + a with a chosen so the
    ddof-1 variance equals sd^2; odd n gets one point at the mean.
    """
    half = n // 2
    a = sd * np.sqrt((n - 1) / (2.0 * half))
    values = [mean - a] * half + [mean + a] * half
    if n % 2:
        values.append(mean)
    return values


def random_raw(rng, n_lo=4, n_hi=40):
    n_x = int(rng.integers(n_lo, n_hi + 1))
    n_y = int(rng.integers(n_lo, n_hi + 1))
    x = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 2.0), size=n_x)
    y = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 2.0), size=n_y)
    return RawGroups(x=list(x), y=list(y))
