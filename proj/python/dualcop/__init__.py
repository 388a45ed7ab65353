"""Dual chi-square divergence estimation and independence tests for bivariate copulas."""

from ._core import (
    CriterionOptions,
    CsvError,
    DomainCheck,
    Engine,
    EstimateOptions,
    InferenceOptions,
    ParameterError,
    PowerForm,
    SimMode,
    cdf,
    chi2_divergence,
    density,
    empirical_criterion,
    estimate,
    families,
    independence_test,
    m_eval,
    power_approx,
    pseudo_mle,
    sample,
    sample_size,
    simulate,
    theta0,
)

__all__ = [
    "CriterionOptions",
    "CsvError",
    "DomainCheck",
    "Engine",
    "EstimateOptions",
    "InferenceOptions",
    "ParameterError",
    "PowerForm",
    "SimMode",
    "cdf",
    "chi2_divergence",
    "density",
    "empirical_criterion",
    "estimate",
    "families",
    "independence_test",
    "m_eval",
    "power_approx",
    "pseudo_mle",
    "sample",
    "sample_size",
    "simulate",
    "theta0",
]
