"""Seeded samplers for exact rational test data.

Numerators and denominators are drawn uniformly with magnitude at most
``bound`` (10³ by default) so exact arithmetic stays cheap.
"""

from __future__ import annotations

import random

from gmpy2 import mpq

from .matrix import Matrix, Scalar


def sub_rng(seed: int, index: int) -> random.Random:
    """Independent stream for trial ``index`` of a run seeded with ``seed``."""
    return random.Random(f"witnessforge:{seed}:{index}")


def random_rational(rng: random.Random, bound: int = 1000) -> "mpq":
    return mpq(rng.randint(-bound, bound), rng.randint(1, bound))


def random_scalar(rng: random.Random, bound: int = 1000, complex_: bool = True) -> Scalar:
    return Scalar(random_rational(rng, bound), random_rational(rng, bound) if complex_ else 0)


def random_matrix(rng: random.Random, rows: int, cols: int | None = None, bound: int = 1000, complex_: bool = True) -> Matrix:
    cols = rows if cols is None else cols
    return Matrix.from_rows([[random_scalar(rng, bound, complex_) for _ in range(cols)] for _ in range(rows)])


def random_vector(rng: random.Random, n: int, bound: int = 1000, complex_: bool = True) -> Matrix:
    while True:
        v = random_matrix(rng, n, 1, bound, complex_)
        if not v.is_zero():
            return v


def random_hermitian(rng: random.Random, n: int, bound: int = 1000) -> Matrix:
    X = random_matrix(rng, n, n, bound)
    return (X + X.H) / 2
