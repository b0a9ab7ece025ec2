"""Polynomial feature expansion."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from ..errors import ConfigurationError

MAX_EXPANDED_WIDTH = 100_000


def expanded_width(n_features: int, degree: int) -> int:
    return comb(n_features + degree, degree)


@lru_cache(maxsize=64)
def monomials(n_features: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Index tuples of every monomial up to ``degree``: constant, then degree 1, 2, ...

    Within a degree, terms follow ``itertools.combinations_with_replacement`` order,
    so ``[x, y]`` at degree 2 gives ``1, x, y, x^2, xy, y^2``.
    """
    if degree < 1:
        raise ConfigurationError("degree must be >= 1")
    width = expanded_width(n_features, degree)
    if width > MAX_EXPANDED_WIDTH:
        raise ConfigurationError(f"expansion width {width} exceeds {MAX_EXPANDED_WIDTH}")
    terms: list[tuple[int, ...]] = [()]
    for d in range(1, degree + 1):
        terms.extend(combinations_with_replacement(range(n_features), d))
    return tuple(terms)


def poly_expand(X, degree: int) -> np.ndarray:
    """Expand rows of ``X`` (1-D row or 2-D matrix) into all monomials up to ``degree``."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    if single:
        X = X.reshape(1, -1)
    terms = monomials(X.shape[1], degree)
    out = np.empty((X.shape[0], len(terms)))
    # build each term from its prefix, which always precedes it in the ordering
    position = {t: i for i, t in enumerate(terms)}
    out[:, 0] = 1.0
    for i, t in enumerate(terms[1:], start=1):
        out[:, i] = out[:, position[t[:-1]]] * X[:, t[-1]]
    return out[0] if single else out
