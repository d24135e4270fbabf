"""Second-order Slepian-Wolf analysis.

A pmf is a list of rows indexed by X1, columns by X2. Rates, entropies and
second-order terms are in nats.
"""

from ._swdisp import (
    SwdispError,
    __version__,
    anchor,
    boundary_curve,
    classify,
    ensemble_error,
    exact_Fn,
    koshelev_bound,
    lemma1_upper,
    lemma2_lower,
    mc_Fn,
    membership,
    mixed_membership,
    stats,
)

REFERENCE = [[0.5, 0.25], [0.15, 0.1]]

__all__ = [
    "SwdispError",
    "REFERENCE",
    "__version__",
    "anchor",
    "boundary_curve",
    "classify",
    "ensemble_error",
    "exact_Fn",
    "koshelev_bound",
    "lemma1_upper",
    "lemma2_lower",
    "mc_Fn",
    "membership",
    "mixed_membership",
    "stats",
]
