"""Arbitrary-precision scalar backends.

Two interchangeable lanes provide the complex-scalar primitives that the
rest of the package builds on:

* ``gmpy2`` -- bindings to the MPFR/MPC C libraries.  This is the fast
  lane and the default whenever gmpy2 is importable.
* ``mpmath`` -- Python implementation, used as the fallback.  Each
  precision context owns an independent ``MPContext`` instance, so no
  global mpmath state is touched.

The active default is chosen once at import; it can be overridden with
the ``ZENO_PRECISION_BACKEND`` environment variable (``gmpy2`` or
``mpmath``) or per ``PrecisionContext``.  Both lanes expose the same
small adapter surface; the arithmetic methods are polymorphic over the
backend's real and complex types.
"""

import os

BACKEND_NAMES = ("gmpy2", "mpmath")

try:
    import gmpy2 as _gmpy2
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _gmpy2 = None


class Gmpy2Backend:
    """MPFR/MPC-backed scalars via gmpy2 at a fixed binary precision."""

    name = "gmpy2"
    pure_python = False

    def __init__(self, prec_bits):
        if _gmpy2 is None:
            raise RuntimeError("gmpy2 backend requested but gmpy2 is not installed")
        self.prec_bits = prec_bits
        # Widest exponent range MPFR offers; overflow is then impossible for
        # any magnitude this package can produce (well beyond 10**(10**7)).
        self._ctx = _gmpy2.context(
            precision=prec_bits,
            emin=_gmpy2.get_emin_min(),
            emax=_gmpy2.get_emax_max(),
            allow_complex=True,
        )

    def real(self, v):
        if isinstance(v, _gmpy2.mpfr) and v.precision == self.prec_bits:
            return v
        return _gmpy2.mpfr(v, precision=self.prec_bits)

    def complex(self, re, im=0):
        return _gmpy2.mpc(self.real(re), self.real(im), precision=self.prec_bits)

    def is_complex(self, v):
        return isinstance(v, (_gmpy2.mpfr, _gmpy2.mpc))

    # Arithmetic: rounded once per operation at this context's precision.
    def add(self, a, b):
        return self._ctx.add(a, b)

    def sub(self, a, b):
        return self._ctx.sub(a, b)

    def mul(self, a, b):
        return self._ctx.mul(a, b)

    def div(self, a, b):
        return self._ctx.div(a, b)

    def neg(self, a):
        # Bare operators on gmpy2 scalars round at the *thread* context
        # (53 bits by default); only this context's methods are safe.
        return self._ctx.minus(a)

    def conj(self, a):
        return _gmpy2.mpc(a.real, self._ctx.minus(a.imag), precision=self.prec_bits)

    def sqrt(self, a):
        return self._ctx.sqrt(a)

    def exp(self, a):
        return self._ctx.exp(a)

    def rcos(self, x):
        return self._ctx.cos(x)

    def rsin(self, x):
        return self._ctx.sin(x)

    def pi(self):
        return self._ctx.const_pi()

    def re(self, a):
        return a.real

    def im(self, a):
        return a.imag

    def norm(self, a):
        """|a|^2 as a backend real."""
        return self._ctx.norm(a)

    def to_complex(self, a):
        try:
            return complex(a)
        except OverflowError:
            big = float("inf")
            re = big if a.real > 0 else -big if a.real < 0 else 0.0
            im = big if a.imag > 0 else -big if a.imag < 0 else 0.0
            return complex(re, im)

    def digits_exp(self, x, n):
        """First ``n``-ish decimal digits of a real: (sign, digits, exp).

        Value is sign * 0.D1D2... * 10**exp scaled so that the returned
        pair reads D1.D2D3... * 10**(exp) with exp for the leading digit.
        """
        if x == 0:
            return 1, "0" * n, 0
        ds, e10, _ = x.digits(10, n)
        sign = 1
        if ds.startswith("-"):
            sign = -1
            ds = ds[1:]
        return sign, ds, e10 - 1


class MpmathBackend:
    """mpmath-backed scalars; one private MPContext per instance."""

    name = "mpmath"
    pure_python = True

    def __init__(self, prec_bits):
        from mpmath.ctx_mp import MPContext

        self.prec_bits = prec_bits
        ctx = MPContext()
        ctx.prec = prec_bits
        self._ctx = ctx

    def real(self, v):
        return self._ctx.mpf(v)

    def complex(self, re, im=0):
        return self._ctx.mpc(self.real(re), self.real(im))

    def is_complex(self, v):
        return isinstance(v, (self._ctx.mpf, self._ctx.mpc))

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def neg(self, a):
        return -a

    def conj(self, a):
        return self._ctx.conj(a)

    def sqrt(self, a):
        return self._ctx.sqrt(a)

    def exp(self, a):
        return self._ctx.exp(a)

    def rcos(self, x):
        return self._ctx.cos(x)

    def rsin(self, x):
        return self._ctx.sin(x)

    def pi(self):
        return +self._ctx.pi

    def re(self, a):
        return getattr(a, "real", a)

    def im(self, a):
        if hasattr(a, "imag"):
            return a.imag
        return self._ctx.mpf(0)

    def norm(self, a):
        re, im = self.re(a), self.im(a)
        return re * re + im * im

    def to_complex(self, a):
        try:
            return complex(a)
        except OverflowError:
            big = float("inf")
            re, im = self.re(a), self.im(a)
            return complex(
                big if re > 0 else -big if re < 0 else 0.0,
                big if im > 0 else -big if im < 0 else 0.0,
            )

    def digits_exp(self, x, n):
        from mpmath.libmp import to_digits_exp

        if x == 0:
            return 1, "0" * n, 0
        sign_s, ds, e10 = to_digits_exp(x._mpf_, n)
        return (-1 if sign_s == "-" else 1), ds, e10


def default_backend_name():
    env = os.environ.get("ZENO_PRECISION_BACKEND")
    if env:
        if env not in BACKEND_NAMES:
            raise ValueError(
                f"ZENO_PRECISION_BACKEND must be one of {BACKEND_NAMES}, got {env!r}"
            )
        return env
    return "gmpy2" if _gmpy2 is not None else "mpmath"


def make_backend(name, prec_bits):
    if name == "gmpy2":
        return Gmpy2Backend(prec_bits)
    if name == "mpmath":
        return MpmathBackend(prec_bits)
    raise ValueError(f"unknown precision backend {name!r}")
