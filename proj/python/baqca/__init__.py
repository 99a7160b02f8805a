"""Python interface to the baqca engine.

Every function returns plain dicts parsed from the engine's JSON output.
"""

import json

from . import _core

__version__ = _core.__version__
InputError = _core.InputError


def qca(path, outcome, id=None, consistency=0.85, conf_n=1, solution="complex", negate=False):
    """Truth table and minimized solution for a CSV of binary columns."""
    return json.loads(_core.qca(str(path), outcome, id, consistency, conf_n, solution, negate))


def assess(condition_probs, outcome_prob, n, consistency=0.85, conf_n=1, solution="complex",
           sims=2000, boot=1000, level=0.95, seed=0, threads=0, trace=False):
    """Probability that the setup returns a result from random data with these marginals."""
    return json.loads(_core.assess_profile(list(condition_probs), outcome_prob, n, consistency, conf_n,
                                           solution, sims, boot, level, seed, threads, trace))


def recommend(condition_probs, outcome_prob, n, alphas=(0.10, 0.05, 0.01, 0.001), solution="complex",
              sims=2000, seed=0, threads=0, model="interaction"):
    """Minimum consistency threshold per configurational N for each target alpha."""
    return json.loads(_core.recommend_profile(list(condition_probs), outcome_prob, n, list(alphas), solution,
                                              sims, seed, threads, model))


def study(iterations=10000, seed=0, min_conditions=1, max_conditions=6, threads=0):
    """Run the Monte Carlo sweep and return both fitted models."""
    return json.loads(_core.study(iterations, seed, min_conditions, max_conditions, threads))


__all__ = ["InputError", "assess", "qca", "recommend", "study"]
