"""Exact Gaussian-rational scalars and dense matrices.

Entries are stored as two numpy object arrays of ``gmpy2.mpq`` (real and
imaginary parts).  ``mpq`` is always in lowest terms with a positive
denominator, so equality is structural.  Matrices are immutable: the
backing arrays are flagged read-only and every operation returns a new
matrix.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpq

from .errors import DimensionMismatch

_MPQ = type(mpq(0))
ZERO = mpq(0)
ONE = mpq(1)


def to_mpq(x) -> "mpq":
    """Coerce an exact real value to ``mpq``.

    Floats are accepted and converted exactly (every double is a dyadic
    rational); strings use the ``"p/q"`` form.
    """
    if isinstance(x, _MPQ):
        return x
    if isinstance(x, bool):
        return mpq(int(x))
    if isinstance(x, (int, Fraction)):
        return mpq(x)
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, float):
        return mpq(Fraction(x))
    if isinstance(x, Rational):
        return mpq(x.numerator, x.denominator)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class Scalar:
    """Gaussian rational ``re + i·im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_mpq(re)
        self.im = to_mpq(im)

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, complex):
            return cls(x.real, x.imag)
        return cls(x, 0)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        o = _maybe_scalar(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _maybe_scalar(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _maybe_scalar(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _maybe_scalar(other)
        if o is None:
            return NotImplemented
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _maybe_scalar(other)
        if o is None:
            return NotImplemented
        den = o.abs2()
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return Scalar(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        o = _maybe_scalar(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __eq__(self, other):
        o = _maybe_scalar(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def _real_or_raise(self):
        if self.im != 0:
            raise TypeError(f"ordering undefined for non-real scalar {self}")
        return self.re

    def __lt__(self, other):
        return self._real_or_raise() < Scalar.coerce(other)._real_or_raise()

    def __le__(self, other):
        return self._real_or_raise() <= Scalar.coerce(other)._real_or_raise()

    def __gt__(self, other):
        return self._real_or_raise() > Scalar.coerce(other)._real_or_raise()

    def __ge__(self, other):
        return self._real_or_raise() >= Scalar.coerce(other)._real_or_raise()

    def __float__(self):
        return float(self._real_or_raise())

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def to_fraction(self) -> Fraction:
        r = self._real_or_raise()
        return Fraction(int(r.numerator), int(r.denominator))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __repr__(self):
        return f"Scalar('{self.re}', '{self.im}')"

    def to_json(self) -> dict:
        return {"re": str(self.re), "im": str(self.im)}

    @classmethod
    def from_json(cls, obj) -> "Scalar":
        return cls(obj["re"], obj.get("im", "0"))


def _maybe_scalar(x):
    if isinstance(x, Scalar):
        return x
    try:
        return Scalar.coerce(x)
    except TypeError:
        return None


def _object_array(rows: int, cols: int):
    return np.full((rows, cols), ZERO, dtype=object)


def _freeze(a):
    a.flags.writeable = False
    return a


def _any_nonzero(a) -> bool:
    return bool((a != 0).any()) if a.size else False


class Matrix:
    """Immutable dense matrix over the Gaussian rationals."""

    __slots__ = ("re", "im", "_real")

    def __init__(self, re, im=None):
        re = np.array(re, dtype=object)
        if re.ndim != 2:
            raise DimensionMismatch("Matrix needs a 2-D array")
        if im is None:
            im = _object_array(*re.shape)
        else:
            im = np.array(im, dtype=object)
            if im.shape != re.shape:
                raise DimensionMismatch("real and imaginary parts differ in shape")
        self.re = _freeze(re)
        self.im = _freeze(im)
        self._real = not _any_nonzero(im)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Matrix":
        rows = [list(r) for r in rows]
        n, m = len(rows), len(rows[0]) if rows else 0
        if n == 0 or m == 0 or any(len(r) != m for r in rows):
            raise DimensionMismatch("ragged or empty row data")
        re = _object_array(n, m)
        im = _object_array(n, m)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                s = Scalar.coerce(x)
                re[i, j] = s.re
                im[i, j] = s.im
        return cls(re, im)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable) -> "Matrix":
        entries = list(entries)
        if len(entries) != rows * cols:
            raise DimensionMismatch(f"need {rows * cols} entries, got {len(entries)}")
        return cls.from_rows([entries[i * cols:(i + 1) * cols] for i in range(rows)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "Matrix":
        cols = rows if cols is None else cols
        return cls(_object_array(rows, cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        re = _object_array(n, n)
        for i in range(n):
            re[i, i] = ONE
        return cls(re)

    @classmethod
    def unit(cls, n: int, i: int, j: int, m: int | None = None) -> "Matrix":
        """Matrix unit e_ij (0-indexed) of shape n×m."""
        re = _object_array(n, n if m is None else m)
        re[i, j] = ONE
        return cls(re)

    @classmethod
    def column(cls, values: Iterable) -> "Matrix":
        return cls.from_rows([[v] for v in values])

    @classmethod
    def basis(cls, n: int, i: int) -> "Matrix":
        return cls.unit(n, i, 0, 1)

    @classmethod
    def diag(cls, values: Iterable) -> "Matrix":
        values = [Scalar.coerce(v) for v in values]
        n = len(values)
        re, im = _object_array(n, n), _object_array(n, n)
        for i, v in enumerate(values):
            re[i, i], im[i, i] = v.re, v.im
        return cls(re, im)

    @classmethod
    def from_int_array(cls, a) -> "Matrix":
        """Exact copy of a numpy integer (or complex-integer) array."""
        a = np.asarray(a)
        if np.iscomplexobj(a):
            re = np.vectorize(lambda x: mpq(int(x)), otypes=[object])(a.real)
            im = np.vectorize(lambda x: mpq(int(x)), otypes=[object])(a.imag)
            return cls(re, im)
        return cls(np.vectorize(lambda x: mpq(int(x)), otypes=[object])(a))

    # -- shape and access --------------------------------------------

    @property
    def rows(self) -> int:
        return self.re.shape[0]

    @property
    def cols(self) -> int:
        return self.re.shape[1]

    @property
    def shape(self):
        return self.re.shape

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_real(self) -> bool:
        return self._real

    @property
    def entries(self) -> tuple:
        return tuple(Scalar(r, i) for r, i in zip(self.re.flat, self.im.flat))

    def __getitem__(self, idx) -> Scalar:
        i, j = idx
        return Scalar(self.re[i, j], self.im[i, j])

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix(self.re[r0:r1, c0:c1].copy(), self.im[r0:r1, c0:c1].copy())

    def block(self, i: int, j: int, size: int) -> "Matrix":
        return self.submatrix(i * size, (i + 1) * size, j * size, (j + 1) * size)

    def flat(self) -> list:
        return list(self.entries)

    # -- algebra ------------------------------------------------------

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"shape {self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check_same_shape(other)
        return Matrix(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check_same_shape(other)
        return Matrix(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return Matrix(-self.re, -self.im)

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        if self._real and other._real:
            return Matrix(self.re @ other.re)
        re = self.re @ other.re
        im = self.re @ other.im
        if not other._real:
            re = re - self.im @ other.im if not self._real else re
        if not self._real:
            im = im + self.im @ other.re
        return Matrix(re, im)

    def scale(self, s) -> "Matrix":
        s = Scalar.coerce(s)
        if s.im == 0:
            return Matrix(self.re * s.re, self.im * s.re)
        return Matrix(self.re * s.re - self.im * s.im, self.re * s.im + self.im * s.re)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return NotImplemented
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        s = Scalar.coerce(other)
        return self.scale(Scalar(1) / s)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.re.T.copy(), self.im.T.copy())

    def conj(self) -> "Matrix":
        return Matrix(self.re.copy(), -self.im)

    @property
    def H(self) -> "Matrix":
        return Matrix(self.re.T.copy(), -self.im.T)

    def trace(self) -> Scalar:
        if not self.is_square:
            raise DimensionMismatch("trace of a non-square matrix")
        return Scalar(sum(np.diagonal(self.re), ZERO), sum(np.diagonal(self.im), ZERO))

    def is_zero(self) -> bool:
        return not (_any_nonzero(self.re) or _any_nonzero(self.im))

    def is_hermitian(self) -> bool:
        if not self.is_square:
            return False
        return bool((self.re == self.re.T).all() and (self.im == -self.im.T).all())

    def nonzero_count(self) -> int:
        return int(((self.re != 0) | (self.im != 0)).sum())

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and bool((self.re == other.re).all())
            and bool((self.im == other.im).all())
        )

    def __hash__(self):
        return hash((self.shape, tuple(self.re.flat), tuple(self.im.flat)))

    def to_complex(self) -> np.ndarray:
        """Nearest double-precision complex array."""
        f = np.vectorize(float, otypes=[float])
        out = f(self.re).astype(complex)
        if not self._real:
            out = out + 1j * f(self.im)
        return out

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, nnz={self.nonzero_count()})"

    def pretty(self) -> str:
        cells = [[str(self[i, j]) if self[i, j] else "." for j in range(self.cols)] for i in range(self.rows)]
        width = max(len(c) for row in cells for c in row)
        return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)


def inner(u: Matrix, v: Matrix) -> Scalar:
    """⟨u|v⟩ for column vectors (conjugate-linear in ``u``)."""
    return (u.H @ v)[0, 0]


def outer(u: Matrix, v: Matrix) -> Matrix:
    """|u⟩⟨v|."""
    return u @ v.H


def projector(v: Matrix) -> Matrix:
    return outer(v, v)


def quadratic_form(W: Matrix, v: Matrix) -> Scalar:
    return (v.H @ (W @ v))[0, 0]


def trace_product(A: Matrix, B: Matrix) -> Scalar:
    """Tr(A·B) in O(n²) without forming the product."""
    if A.shape != (B.cols, B.rows):
        raise DimensionMismatch(f"Tr(AB) needs compatible shapes, got {A.shape} and {B.shape}")
    BT_re, BT_im = B.re.T, B.im.T
    re = (A.re * BT_re).sum()
    im = ZERO
    if not B.is_real:
        re = re - (A.im * BT_im).sum() if not A.is_real else re
        im = im + (A.re * BT_im).sum()
    if not A.is_real:
        im = im + (A.im * BT_re).sum()
    return Scalar(re, im)
