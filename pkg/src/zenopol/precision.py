"""Arbitrary-precision complex scalars and small dense linear algebra.

Everything here is precision-explicit: each operation takes a
:class:`PrecisionContext` (or values already bound to one) and returns
freshly rounded values.  Nothing mutates its inputs and there is no
global precision state, so values and contexts can be shared freely
between threads.

Matrices are plain tuples of tuples of :class:`HComplex`; ``Mat2``,
``Mat4`` and ``Vec4`` below are aliases, not classes.  The dynamic range
these routines must survive is extreme (stack transfer matrices reach
~10**683 while their determinant stays 1), which is why the working
mantissa carries guard digits and the exponent range is unbounded for
all practical purposes.
"""

import math
from typing import Callable, Tuple

from .backends import default_backend_name, make_backend
from .errors import SingularMatrixError

LOG2_10 = math.log2(10)

Mat2 = Tuple[Tuple["HComplex", "HComplex"], ...]
Mat4 = Tuple[Tuple["HComplex", ...], ...]
Vec4 = Tuple["HComplex", ...]


class PrecisionContext:
    """Decimal-digit-denominated precision for all arithmetic under it.

    Args:
        digits: significant decimal digits the results are good for
            (at least 30).
        guard_digits: extra decimal digits carried internally by every
            computation; absorbs rounding of composite expressions.
        backend: "gmpy2", "mpmath", or None for the import-time default.

    The working mantissa is ``ceil((digits + guard_digits) * log2(10)) + 32``
    bits.  All operations round binary; ``digits`` is the accuracy
    contract, not the storage format.
    """

    __slots__ = ("digits", "guard_digits", "backend_name", "prec_bits", "_b")

    def __init__(self, digits: int, guard_digits: int = 20, backend: str | None = None):
        if not isinstance(digits, int) or digits < 30:
            raise ValueError(f"digits must be an integer >= 30, got {digits!r}")
        if not isinstance(guard_digits, int) or guard_digits < 0:
            raise ValueError(f"guard_digits must be a non-negative integer, got {guard_digits!r}")
        self.digits = digits
        self.guard_digits = guard_digits
        self.prec_bits = math.ceil((digits + guard_digits) * LOG2_10) + 32
        self.backend_name = backend or default_backend_name()
        self._b = make_backend(self.backend_name, self.prec_bits)

    def complex(self, value=0, imag=None) -> "HComplex":
        """Coerce to an HComplex bound to this context.

        Accepts HComplex, python numbers, decimal strings, backend
        scalars, or an explicit (value, imag) pair of any of those.
        """
        b = self._b
        if imag is not None:
            return HComplex(self, b.complex(self.real(value), self.real(imag)))
        if isinstance(value, HComplex):
            if value.ctx is self:
                return value
            return HComplex(self, b.complex(value.re, value.im))
        if isinstance(value, complex):
            return HComplex(self, b.complex(value.real, value.imag))
        return HComplex(self, b.complex(value))

    def real(self, value):
        """Backend-native real at this context's precision."""
        if isinstance(value, HComplex):
            return value.re
        return self._b.real(value)

    @property
    def pi(self):
        return self._b.pi()

    def __eq__(self, other):
        return (
            isinstance(other, PrecisionContext)
            and self.digits == other.digits
            and self.guard_digits == other.guard_digits
            and self.backend_name == other.backend_name
        )

    def __hash__(self):
        return hash((self.digits, self.guard_digits, self.backend_name))

    def __repr__(self):
        return (
            f"PrecisionContext(digits={self.digits}, guard_digits={self.guard_digits}, "
            f"backend={self.backend_name!r})"
        )


class HComplex:
    """Immutable arbitrary-precision complex number bound to a context.

    Arithmetic between mixed operands coerces the right-hand side into
    the left operand's context; each operation rounds once at the
    context's working precision.
    """

    __slots__ = ("ctx", "_z")

    def __init__(self, ctx: PrecisionContext, native):
        self.ctx = ctx
        self._z = native

    @property
    def re(self):
        return self.ctx._b.re(self._z)

    @property
    def im(self):
        return self.ctx._b.im(self._z)

    @property
    def native(self):
        return self._z

    def _coerce(self, other):
        if isinstance(other, HComplex):
            if other.ctx is self.ctx:
                return other._z
            return self.ctx._b.complex(other.re, other.im)
        return self.ctx.complex(other)._z

    def __add__(self, other):
        return HComplex(self.ctx, self.ctx._b.add(self._z, self._coerce(other)))

    def __radd__(self, other):
        return HComplex(self.ctx, self.ctx._b.add(self._coerce(other), self._z))

    def __sub__(self, other):
        return HComplex(self.ctx, self.ctx._b.sub(self._z, self._coerce(other)))

    def __rsub__(self, other):
        return HComplex(self.ctx, self.ctx._b.sub(self._coerce(other), self._z))

    def __mul__(self, other):
        return HComplex(self.ctx, self.ctx._b.mul(self._z, self._coerce(other)))

    def __rmul__(self, other):
        return HComplex(self.ctx, self.ctx._b.mul(self._coerce(other), self._z))

    def __truediv__(self, other):
        return HComplex(self.ctx, self.ctx._b.div(self._z, self._coerce(other)))

    def __rtruediv__(self, other):
        return HComplex(self.ctx, self.ctx._b.div(self._coerce(other), self._z))

    def __neg__(self):
        return HComplex(self.ctx, self.ctx._b.neg(self._z))

    def conjugate(self):
        return HComplex(self.ctx, self.ctx._b.conj(self._z))

    def abs2(self):
        """|z|^2 as a backend real."""
        return self.ctx._b.norm(self._z)

    def __abs__(self):
        return self.ctx._b.sqrt(self.abs2())

    def to_complex(self) -> complex:
        return self.ctx._b.to_complex(self._z)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __repr__(self):
        from .sigfig import format_real

        return (
            f"HComplex({format_real(self.re, self.ctx, 30)}, "
            f"{format_real(self.im, self.ctx, 30)})"
        )


def csqrt(z, ctx: PrecisionContext) -> HComplex:
    """Principal complex square root: Re >= 0; on the cut, Im >= 0.

    With this branch, sqrt of a passive dielectric eigenvalue
    (Im >= 0) has a non-negative imaginary part, so forward waves in
    lossy media decay.
    """
    z = ctx.complex(z)
    w = HComplex(ctx, ctx._b.sqrt(z._z))
    if w.re < 0 or (w.re == 0 and w.im < 0):
        w = -w
    return w


def ctrig(z, ctx: PrecisionContext) -> Tuple[HComplex, HComplex]:
    """(cos z, sin z) via exponentials of exactly +iz and -iz.

    Safe for large |Im z|: cosh-type growth is represented exactly in
    the unbounded exponent range instead of cancelling in a series.
    """
    z = ctx.complex(z)
    b = ctx._b
    # +iz and -iz are exact component swaps, no rounding.
    iz = ctx.complex(b.neg(z.im), z.re)
    ep = HComplex(ctx, b.exp(iz._z))
    em = HComplex(ctx, b.exp(b.neg(iz._z)))
    two_i = ctx.complex(0, 2)
    return (ep + em) / 2, (ep - em) / two_i


def rotation2(theta, ctx: PrecisionContext) -> Mat2:
    """2x2 rotation [[cos t, -sin t], [sin t, cos t]].

    ``theta`` may be a float, decimal string, or backend real.
    """
    b = ctx._b
    t = ctx.real(theta)
    c, s = ctx.complex(b.rcos(t)), ctx.complex(b.rsin(t))
    return ((c, -s), (s, c))


def mat2_spectral_apply(theta, lam1, lam2, f: Callable, ctx: PrecisionContext) -> Mat2:
    """f of the 2x2 matrix R(theta)·diag(lam1, lam2)·R(theta)^-1.

    Because the rotation diagonalizes the matrix, f acts on the two
    eigenvalues only; entries come from the closed form
    ``diag = f1 c^2 + f2 s^2, f1 s^2 + f2 c^2`` and
    ``off-diag = (f1 - f2) s c``.  Degenerate eigenvalues need no
    special casing: the off-diagonal factor vanishes identically.
    """
    b = ctx._b
    t = ctx.real(theta)
    c, s = ctx.complex(b.rcos(t)), ctx.complex(b.rsin(t))
    f1 = ctx.complex(f(ctx.complex(lam1)))
    f2 = ctx.complex(f(ctx.complex(lam2)))
    cc, ss, sc = c * c, s * s, s * c
    off = (f1 - f2) * sc
    return ((f1 * cc + f2 * ss, off), (off, f1 * ss + f2 * cc))


def mat2_mul(a: Mat2, b: Mat2, ctx: PrecisionContext) -> Mat2:
    return tuple(
        tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)) for i in range(2)
    )


def mat2_identity(ctx: PrecisionContext) -> Mat2:
    one, zero = ctx.complex(1), ctx.complex(0)
    return ((one, zero), (zero, one))


def mat4_identity(ctx: PrecisionContext) -> Mat4:
    one, zero = ctx.complex(1), ctx.complex(0)
    return tuple(tuple(one if i == j else zero for j in range(4)) for i in range(4))


def mat4_mul(a: Mat4, b: Mat4, ctx: PrecisionContext) -> Mat4:
    """Product of two 4x4 matrices, entries rounded at context precision."""
    out = []
    for i in range(4):
        row = []
        for j in range(4):
            s = a[i][0] * b[0][j]
            for k in range(1, 4):
                s = s + a[i][k] * b[k][j]
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def mat4_apply(a: Mat4, v: Vec4, ctx: PrecisionContext) -> Vec4:
    out = []
    for i in range(4):
        s = a[i][0] * v[0]
        for k in range(1, 4):
            s = s + a[i][k] * v[k]
        out.append(s)
    return tuple(out)


def _eliminate(a: Mat4, rhs, ctx: PrecisionContext):
    """Gaussian elimination with partial pivoting on entry modulus.

    Returns (upper rows, transformed rhs or None, pivot-swap parity).
    Raises SingularMatrixError when a pivot is exactly zero at working
    precision.
    """
    n = 4
    rows = [list(r) for r in a]
    b = list(rhs) if rhs is not None else None
    parity = 1
    for k in range(n):
        piv, piv_norm = k, rows[k][k].abs2()
        for r in range(k + 1, n):
            nr = rows[r][k].abs2()
            if nr > piv_norm:
                piv, piv_norm = r, nr
        if piv_norm == 0:
            raise SingularMatrixError(f"zero pivot in column {k} at working precision")
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            if b is not None:
                b[k], b[piv] = b[piv], b[k]
            parity = -parity
        inv_piv = rows[k][k]
        for r in range(k + 1, n):
            if rows[r][k].is_zero():
                continue
            factor = rows[r][k] / inv_piv
            for c in range(k, n):
                rows[r][c] = rows[r][c] - factor * rows[k][c]
            if b is not None:
                b[r] = b[r] - factor * b[k]
    return rows, b, parity


def mat4_solve(a: Mat4, b: Vec4, ctx: PrecisionContext) -> Vec4:
    """Solve a 4x4 system by pivoted elimination.

    For systems whose row-equilibrated form is well conditioned the
    residual ||Ax - b||_inf / ||b||_inf stays below
    10**-(digits - guard_digits).
    """
    rows, rhs, _ = _eliminate(a, b, ctx)
    x = [None] * 4
    for i in range(3, -1, -1):
        s = rhs[i]
        for j in range(i + 1, 4):
            s = s - rows[i][j] * x[j]
        x[i] = s / rows[i][i]
    return tuple(x)


def mat4_det(a: Mat4, ctx: PrecisionContext) -> HComplex:
    """Determinant via the same pivoted elimination; exact for triangular input."""
    rows, _, parity = _eliminate(a, None, ctx)
    d = rows[0][0]
    for k in range(1, 4):
        d = d * rows[k][k]
    return d if parity > 0 else -d
