"""Latent status rankings from directed friendship networks."""

from ._core import (
    FormatError,
    Network,
    ParseError,
    __version__,
    attribute_summary,
    count_violations,
    exact_estep,
    fit,
    generate,
    log_likelihood,
    main,
    mcmc_estep,
    minimum_violations_ranking,
    randomize_directions,
    synthetic_params,
)


def rescale(fit_result):
    """Posterior mean ranks mapped to [0, 1] by (r - 1) / (n - 1), keyed by label."""
    post = fit_result["posterior"]
    n = len(post["labels"])
    return {label: (r - 1.0) / (n - 1) for label, r in zip(post["labels"], post["mean_rank"])}


__all__ = [
    "FormatError",
    "Network",
    "ParseError",
    "attribute_summary",
    "count_violations",
    "exact_estep",
    "fit",
    "generate",
    "log_likelihood",
    "main",
    "mcmc_estep",
    "minimum_violations_ranking",
    "randomize_directions",
    "rescale",
    "synthetic_params",
]
