"""Transfer matrices for anisotropic lossy polarizer stacks.

A polarizer slab is modeled by the 2x2 principal-axis dielectric tensor

    eps(theta) = R(theta) . diag(eps1~, eps2~) . R(theta)^-1,

with complex principal eigenvalues eps_j~ = eps_j + 4*pi*i*sigma_j/omega
(time convention e^{-i omega t}; Im eps~ >= 0 means absorption).  The
4x4 slab transfer matrix relates the transverse field components
chi = (E1, E2, B1, B2) across the slab; a stack is the left-ordered
product of slab matrices.  The scattering boundary problem then yields
transmission/reflection amplitudes, whose squared modulus is compared
against the von Neumann projection baseline {cos^2(pi/2N)}^N.

Inside a lossy stack the blocked channel grows like cosh(xi * Im sqrt(eps~))
per slab, so stack entries can reach ~10**683 while amplitudes stay O(1):
`estimate_digits` sizes the precision that makes the boundary solve
trustworthy, and `solve_boundary` refuses to return amplitudes whose
back-substitution residual is not tiny.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .errors import PrecisionExhaustedError
from .precision import (
    HComplex,
    Mat2,
    Mat4,
    PrecisionContext,
    csqrt,
    ctrig,
    mat2_spectral_apply,
    mat4_apply,
    mat4_det,
    mat4_mul,
    mat4_solve,
)

# Relative back-substitution residual above which amplitudes are garbage.
RESIDUAL_LIMIT = "1e-20"


@dataclass(frozen=True)
class DielectricEigenvalues:
    """Complex principal eigenvalues of the 2x2 dielectric tensor.

    ``eps1`` belongs to the allowed (transparent) axis, ``eps2`` to the
    blocked one.  Only passive media are accepted: Im eps_j >= 0.
    When built via :meth:`from_conductivity`, the exact constituents
    are kept so the high-precision values reproduce
    eps_j + 4*pi*i*sigma_j/omega at full context precision.
    """

    eps1: complex
    eps2: complex
    conductivity: Optional[Tuple[float, float, float, float, float]] = None

    def __post_init__(self):
        for tag, e in (("eps1", self.eps1), ("eps2", self.eps2)):
            if e.imag < 0:
                raise ValueError(f"{tag} has Im < 0 (gain medium): {e!r}")
        if self.conductivity is not None:
            e1, s1, e2, s2, omega = self.conductivity
            if omega <= 0:
                raise ValueError(f"omega must be positive, got {omega!r}")
            if s1 < 0 or s2 < 0:
                raise ValueError("conductivities must be non-negative")

    @classmethod
    def from_conductivity(cls, eps1, sigma1, eps2, sigma2, omega):
        if omega <= 0:
            raise ValueError(f"omega must be positive, got {omega!r}")
        if sigma1 < 0 or sigma2 < 0:
            raise ValueError("conductivities must be non-negative")
        return cls(
            eps1=complex(eps1, 4 * math.pi * sigma1 / omega),
            eps2=complex(eps2, 4 * math.pi * sigma2 / omega),
            conductivity=(float(eps1), float(sigma1), float(eps2), float(sigma2), float(omega)),
        )

    def values(self, ctx: PrecisionContext) -> Tuple[HComplex, HComplex]:
        """(eps1~, eps2~) at the context's working precision."""
        if self.conductivity is None:
            return ctx.complex(self.eps1), ctx.complex(self.eps2)
        e1, s1, e2, s2, omega = self.conductivity
        four_pi = 4 * ctx.complex(0, ctx.pi)
        om = ctx.complex(omega)
        return (
            ctx.complex(e1) + four_pi * s1 / om,
            ctx.complex(e2) + four_pi * s2 / om,
        )


@dataclass(frozen=True)
class PolarizerSlab:
    """One polarizer: orientation angle, optical thickness xi = omega*a/c."""

    theta: float
    xi: float
    eps: DielectricEigenvalues

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")
        if not (self.xi > 0 and math.isfinite(self.xi)):
            raise ValueError(f"xi must be positive and finite, got {self.xi!r}")


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Transmission and reflection amplitudes for the two polarizations."""

    t1: HComplex
    t2: HComplex
    r1: HComplex
    r2: HComplex

    def flux(self):
        """|T1|^2+|T2|^2+|R1|^2+|R2|^2; equals 1 for lossless stacks."""
        b = self.t1.ctx._b
        total = self.t1.abs2()
        for amp in (self.t2, self.r1, self.r2):
            total = b.add(total, amp.abs2())
        return total


@dataclass(frozen=True)
class StackConfig:
    """A stack of N identical-thickness polarizers at given angles."""

    n_polarizers: int
    xi: float
    eps: DielectricEigenvalues
    angle_schedule: Optional[Tuple[float, ...]] = None
    digits: Optional[int] = None

    def __post_init__(self):
        if self.n_polarizers < 1:
            raise ValueError("n_polarizers must be >= 1")
        if self.angle_schedule is not None and len(self.angle_schedule) != self.n_polarizers:
            raise ValueError(
                f"angle_schedule length {len(self.angle_schedule)} != N={self.n_polarizers}"
            )

    def angles(self) -> Tuple[float, ...]:
        if self.angle_schedule is not None:
            return tuple(self.angle_schedule)
        return tuple(zeno_angle_schedule(self.n_polarizers))

    def slabs(self) -> Tuple[PolarizerSlab, ...]:
        return tuple(PolarizerSlab(theta, self.xi, self.eps) for theta in self.angles())


def zeno_angle_schedule(n: int):
    """Equal-increment schedule theta_k = k*pi/(2n), ending exactly at pi/2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [0.5 * math.pi * (k / n) for k in range(1, n + 1)]


def dielectric_tensor(theta, eps: DielectricEigenvalues, ctx: PrecisionContext) -> Mat2:
    """2x2 dielectric tensor of a polarizer rotated by ``theta``."""
    e1, e2 = eps.values(ctx)
    return mat2_spectral_apply(theta, e1, e2, lambda lam: lam, ctx)


def _kernel_cos(xi_hp):
    def f(lam):
        root = csqrt(lam, lam.ctx)
        return ctrig(xi_hp * root, lam.ctx)[0]

    return f


def _kernel_sin_over_root(xi_hp):
    """sin(xi*sqrt(lam))/sqrt(lam), evaluated as xi*sinc near lam = 0."""

    def f(lam):
        ctx = lam.ctx
        root = csqrt(lam, ctx)
        x = xi_hp * root
        if x.abs2() < 0.25:
            # xi * sum_k (-1)^k x^(2k) / (2k+1)!  -- entire in lam, no 0/0.
            x2 = x * x
            term = ctx.complex(1)
            total = ctx.complex(1)
            k = 0
            tiny = ctx.real("1e-%d" % (2 * (ctx.digits + ctx.guard_digits + 10)))
            while True:
                k += 1
                term = -term * x2 / ((2 * k) * (2 * k + 1))
                total = total + term
                if term.abs2() < tiny:
                    return xi_hp * total
        return ctrig(x, ctx)[1] / root

    return f


def _kernel_root_sin(xi_hp):
    """sqrt(lam)*sin(xi*sqrt(lam)) = lam * (sin(xi*sqrt(lam))/sqrt(lam))."""
    inner = _kernel_sin_over_root(xi_hp)

    def f(lam):
        return lam * inner(lam)

    return f


def slab_transfer(slab: PolarizerSlab, ctx: PrecisionContext) -> Mat4:
    """4x4 transfer matrix of one slab, assembled from 2x2 spectral blocks.

    In partitioned form the matrix is

        [  cos(xi*sqrt(eps))              -(sin(xi*sqrt(eps))/sqrt(eps)) tau2 ]
        [  tau2 sqrt(eps) sin(xi*sqrt(eps))   tau2 cos(xi*sqrt(eps)) tau2     ]

    with eps the 2x2 tensor and tau2 = [[0, -i], [i, 0]].  Each block is
    a 2x2 spectral function of eps(theta); the tau2 products reduce to
    index shuffles and factors of +-i.
    """
    e1, e2 = slab.eps.values(ctx)
    xi_hp = ctx.complex(slab.xi)
    theta = slab.theta
    a = mat2_spectral_apply(theta, e1, e2, _kernel_cos(xi_hp), ctx)
    s = mat2_spectral_apply(theta, e1, e2, _kernel_sin_over_root(xi_hp), ctx)
    sm = mat2_spectral_apply(theta, e1, e2, _kernel_root_sin(xi_hp), ctx)
    i_ = ctx.complex(0, 1)
    # B = -S.tau2 ; C = tau2.Sm ; D = tau2.A.tau2
    b00, b01 = -i_ * s[0][1], i_ * s[0][0]
    b10, b11 = -i_ * s[1][1], i_ * s[1][0]
    c00, c01 = -i_ * sm[1][0], -i_ * sm[1][1]
    c10, c11 = i_ * sm[0][0], i_ * sm[0][1]
    d00, d01 = a[1][1], -a[1][0]
    d10, d11 = -a[0][1], a[0][0]
    return (
        (a[0][0], a[0][1], b00, b01),
        (a[1][0], a[1][1], b10, b11),
        (c00, c01, d00, d01),
        (c10, c11, d10, d11),
    )


def stack_transfer(slabs: Sequence[PolarizerSlab], ctx: PrecisionContext) -> Mat4:
    """Product of slab matrices, later slabs multiplying on the left."""
    if not slabs:
        raise ValueError("stack must contain at least one slab")
    m = slab_transfer(slabs[0], ctx)
    for slab in slabs[1:]:
        m = mat4_mul(slab_transfer(slab, ctx), m, ctx)
    return m


def solve_boundary(
    m_tot: Mat4, ctx: PrecisionContext, incident: Tuple[float, float] = (1.0, 0.0)
) -> ScatteringAmplitudes:
    """Scattering amplitudes of a stack between vacuum half-spaces.

    Solves  M_tot . (p+R1, q+R2, -q+R2, p-R1)^T = (T1, T2, -T2, T1)^T
    for the four unknowns, where (p, q) is the incident polarization
    (default: unit amplitude along axis 1, the textbook setup).

    The solved amplitudes are substituted back; if the relative residual
    exceeds RESIDUAL_LIMIT the working precision was insufficient
    (catastrophic cancellation across the stack's dynamic range) and
    PrecisionExhaustedError is raised rather than returning noise.
    """
    p = ctx.complex(incident[0])
    q = ctx.complex(incident[1])
    cols = list(zip(*m_tot))
    zero, one = ctx.complex(0), ctx.complex(1)
    col_r1 = tuple(cols[0][i] - cols[3][i] for i in range(4))
    col_r2 = tuple(cols[1][i] + cols[2][i] for i in range(4))
    col_t1 = (-one, zero, zero, -one)
    col_t2 = (zero, -one, one, zero)
    a = tuple(
        (col_r1[i], col_r2[i], col_t1[i], col_t2[i]) for i in range(4)
    )
    rhs_vec = (p, q, -q, p)
    b = tuple(-mat4_apply(m_tot, rhs_vec, ctx)[i] for i in range(4))
    r1, r2, t1, t2 = mat4_solve(a, b, ctx)

    # Fresh substitution into the boundary relation at working precision.
    v_in = (p + r1, q + r2, -q + r2, p - r1)
    lhs = mat4_apply(m_tot, v_in, ctx)
    t_vec = (t1, t2, -t2, t1)
    b_ops = ctx._b
    num = max((lhs[i] - t_vec[i]).abs2() for i in range(4))
    den = max(x.abs2() for x in (one, t1, t2))
    limit = ctx.real(RESIDUAL_LIMIT)
    if num > b_ops.mul(b_ops.mul(limit, limit), den):
        raise PrecisionExhaustedError(
            "boundary solve residual exceeds 1e-20 of the transmitted amplitude; "
            f"digits={ctx.digits} is too low for this stack's dynamic range "
            "(see estimate_digits)"
        )
    return ScatteringAmplitudes(t1=t1, t2=t2, r1=r1, r2=r2)


def transmission_probability(amps: ScatteringAmplitudes):
    """P = |T2|^2: probability of exiting in the crossed polarization."""
    return amps.t2.abs2()


def stack_det_residual(slabs, ctx: PrecisionContext):
    """|det M_tot - 1| evaluated at a precision where it is meaningful.

    det M_tot = 1 exactly, but the determinant of the *computed* product
    is noise at the working precision that suffices for amplitudes: the
    entries span ~10^span one way, and the determinant cancels through
    the full two-way range, losing ~2*span digits.  The certificate is
    therefore evaluated on a rebuilt stack carrying 2*span extra digits.
    Returns (residual, digits_used_for_check).
    """
    span = sum(decimal_span(1, slab.xi, slab.eps) for slab in slabs)
    det_digits = max(30, ctx.digits + 2 * span)
    det_ctx = PrecisionContext(det_digits, ctx.guard_digits, backend=ctx.backend_name)
    m = stack_transfer(slabs, det_ctx)
    d = mat4_det(m, det_ctx)
    return abs(d - 1), det_digits


def projection_probability(n: int, ctx: PrecisionContext):
    """Projection-postulate baseline {cos^2(pi/2n)}^n for the Zeno schedule."""
    if n < 1:
        raise ValueError("n must be >= 1")
    b = ctx._b
    c = b.rcos(b.div(ctx.pi, b.real(2 * n)))
    # Integer power by repeated squaring; identical rounding on both backends.
    result = b.real(1)
    base = c
    k = 2 * n
    while k:
        if k & 1:
            result = b.mul(result, base)
        base = b.mul(base, base)
        k >>= 1
    return result


def two_polarizer_probability(theta: float) -> float:
    """cos^2(theta): crossing from one polarizer into the next."""
    return math.cos(theta) ** 2


def intermediate_polarizer_probability(theta: float) -> float:
    """Three-polarizer chain: cos^2(theta) cos^2(pi/2 - theta) = sin^2(2 theta)/4."""
    return 0.25 * math.sin(2 * theta) ** 2


def decimal_span(n: int, xi: float, eps: DielectricEigenvalues) -> int:
    """Decimal orders the amplified channel grows across the stack."""
    gmax = max(cmath.sqrt(eps.eps1).imag, cmath.sqrt(eps.eps2).imag)
    return math.ceil(n * xi * gmax / math.log(10))


def estimate_digits(config: StackConfig, guard: int = 200) -> int:
    """Decimal digits needed for a trustworthy boundary solve.

    The exponentially amplified channel spans ~N*xi*Im(sqrt(eps~))/ln10
    decimal orders; the boundary solve cancels all of them, so that span
    plus headroom is the required precision.
    """
    return decimal_span(config.n_polarizers, config.xi, config.eps) + guard
