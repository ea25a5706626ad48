"""Unit tests for the arbitrary-precision scalar and 4x4 kernels."""

import math
import random

import pytest

from helpers import assert_hc_close, assert_mat_close, assert_real_close, hc_rel_err
from zenopol.errors import SingularMatrixError
from zenopol.precision import (
    PrecisionContext,
    csqrt,
    ctrig,
    mat2_mul,
    mat2_spectral_apply,
    mat4_apply,
    mat4_det,
    mat4_identity,
    mat4_mul,
    mat4_solve,
    rotation2,
)

# Independent reference: solving a^2 - b^2 = 1, 2ab = 2 gives
# a = sqrt((1 + sqrt 5)/2), b = 1/a.
SQRT_1_2I_RE = "1.2720196495140689642524224617374914917156080418401"
SQRT_1_2I_IM = "0.78615137775742328606955858584295892952312205783772"
COSH_100 = "1.3440585709080677242063127757900067936805559386871e43"


def _random_hc(ctx, rng, scale=1.0):
    return ctx.complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def _random_mat4(ctx, rng, scale=1.0):
    return tuple(tuple(_random_hc(ctx, rng, scale) for _ in range(4)) for _ in range(4))


class TestContext:
    def test_digits_floor(self):
        with pytest.raises(ValueError):
            PrecisionContext(29)
        with pytest.raises(ValueError):
            PrecisionContext(40, guard_digits=-1)

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            PrecisionContext(40, backend="decimal")

    def test_exact_literals(self, ctx):
        z = ctx.complex("0.5", "-3")
        assert (z - complex(0.5, -3)).is_zero()
        assert (ctx.complex(7) - 7).is_zero()
        # binary floats embed exactly
        assert (ctx.complex(0.1) - 0.1).is_zero()

    def test_mixed_arithmetic(self, ctx):
        z = ctx.complex(2, 1)
        assert_hc_close(2 * z - z / 1 + 0j, complex(2, 1), "1e-35")
        assert_hc_close(1 / ctx.complex(2), 0.5, "1e-35")
        assert_hc_close(z.conjugate(), complex(2, -1), "1e-60")


class TestCsqrt:
    def test_perfect_square(self, ctx):
        assert_hc_close(csqrt(4, ctx), 2 + 0j, "1e-35")

    def test_branch_negative_real(self, ctx):
        assert_hc_close(csqrt(-4, ctx), 2j, "1e-35")

    def test_reference_value(self, ctx):
        w = csqrt(ctx.complex(1, 2), ctx)
        assert_hc_close(w, (SQRT_1_2I_RE, SQRT_1_2I_IM), "1e-38")
        assert_hc_close(w * w, 1 + 2j, "1e-38")

    def test_zero(self, ctx):
        assert csqrt(0, ctx).is_zero()

    def test_square_roundtrip_random(self, ctx):
        rng = random.Random(42)
        for _ in range(50):
            z = _random_hc(ctx, rng, 200.0)
            w = csqrt(z, ctx)
            assert w.re >= 0
            assert hc_rel_err(w * w, z) < 1e-38 or abs(z) < 1e-30

    def test_principal_branch_on_cut(self, ctx):
        rng = random.Random(1)
        for _ in range(20):
            w = csqrt(ctx.complex(-rng.uniform(0.1, 100.0)), ctx)
            assert w.re == 0 and w.im > 0


class TestCtrig:
    def test_zero(self, ctx):
        c, s = ctrig(0, ctx)
        assert_hc_close(c, 1 + 0j, "1e-39")
        assert s.is_zero()

    def test_cosh_identity(self, ctx):
        c, _ = ctrig(ctx.complex(0, 100), ctx)
        assert hc_rel_err(c, ctx.complex(COSH_100)) < 1e-38

    def test_pythagorean_large_imag(self, backend):
        # cos^2 ~ 10^(2*|Im z|/ln10); the guard must absorb that
        # amplification for the identity to read out at `digits`.
        wide = PrecisionContext(30, guard_digits=400, backend=backend)
        rng = random.Random(7)
        for _ in range(25):
            z = wide.complex(rng.uniform(-200, 200), rng.uniform(-200, 200))
            c, s = ctrig(z, wide)
            assert_hc_close(c * c + s * s, 1 + 0j, "1e-30")

    def test_matches_real_trig(self, ctx):
        c, s = ctrig(ctx.complex(1.25), ctx)
        assert_real_close(ctx, c.re, ctx._b.rcos(ctx.real(1.25)), "1e-55")
        assert_real_close(ctx, s.re, ctx._b.rsin(ctx.real(1.25)), "1e-55")


class TestRotation2:
    def test_identity(self, ctx):
        assert_mat_close(rotation2(0.0, ctx), ((1, 0), (0, 1)), "1e-39")

    def test_quarter_turn(self, ctx):
        half_pi = ctx._b.div(ctx.pi, ctx.real(2))
        assert_mat_close(rotation2(half_pi, ctx), ((0, -1), (1, 0)), "1e-39")

    def test_group_inverse(self, ctx):
        rng = random.Random(3)
        for _ in range(10):
            t = rng.uniform(-10, 10)
            prod = mat2_mul(rotation2(t, ctx), rotation2(-t, ctx), ctx)
            assert_mat_close(prod, ((1, 0), (0, 1)), "1e-38")


class TestSpectralApply:
    def test_identity_kernel_diagonal(self, ctx):
        m = mat2_spectral_apply(0.0, 3, ctx.complex(1, 2), lambda lam: lam, ctx)
        assert_mat_close(m, ((3, 0), (0, complex(1, 2))), "1e-39")

    def test_sqrt_kernel_reference(self, ctx):
        quarter_pi = ctx._b.div(ctx.pi, ctx.real(4))
        m = mat2_spectral_apply(quarter_pi, 4, 9, lambda lam: csqrt(lam, lam.ctx), ctx)
        assert_mat_close(m, ((2.5, -0.5), (-0.5, 2.5)), "1e-38")

    def test_trace_det_invariance(self, ctx):
        rng = random.Random(5)
        for _ in range(10):
            t = rng.uniform(-5, 5)
            lam1, lam2 = _random_hc(ctx, rng, 3), _random_hc(ctx, rng, 3)
            f = lambda lam: lam * lam + 1  # noqa: E731
            m = mat2_spectral_apply(t, lam1, lam2, f, ctx)
            f1, f2 = f(lam1), f(lam2)
            assert_hc_close(m[0][0] + m[1][1] - (f1 + f2), 0j, "1e-36")
            det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
            assert_hc_close(det - f1 * f2, 0j, "1e-36")

    def test_closed_form_double_angle(self, ctx):
        # avg*I + diff*[[cos2t, sin2t], [sin2t, -cos2t]]
        rng = random.Random(9)
        b = ctx._b
        for _ in range(10):
            t = rng.uniform(-4, 4)
            lam1, lam2 = _random_hc(ctx, rng, 2), _random_hc(ctx, rng, 2)
            m = mat2_spectral_apply(t, lam1, lam2, lambda lam: lam, ctx)
            avg, diff = (lam1 + lam2) / 2, (lam1 - lam2) / 2
            c2 = ctx.complex(b.rcos(ctx.real(2 * t)))
            s2 = ctx.complex(b.rsin(ctx.real(2 * t)))
            expected = (
                (avg + diff * c2, diff * s2),
                (diff * s2, avg - diff * c2),
            )
            for i in range(2):
                for j in range(2):
                    assert_hc_close(m[i][j] - expected[i][j], 0j, "1e-37")

    def test_degenerate_eigenvalues(self, ctx):
        m = mat2_spectral_apply(1.234, ctx.complex(2, 1), ctx.complex(2, 1), lambda lam: lam, ctx)
        assert m[0][1].is_zero() and m[1][0].is_zero()


class TestPrecisionMonotonicity:
    @pytest.mark.parametrize("digits", [40, 80])
    def test_doubling_stability(self, backend, digits):
        lo = PrecisionContext(digits, backend=backend)
        hi = PrecisionContext(2 * digits, backend=backend)
        z = complex(1.375, -2.5)
        for fn in (
            lambda c: csqrt(c.complex(z), c),
            lambda c: ctrig(c.complex(z), c)[0],
            lambda c: ctrig(c.complex(z), c)[1],
        ):
            a, b = fn(lo), fn(hi)
            assert hc_rel_err(a, b) < 10 ** -(digits - 10)


class TestMat4:
    def test_identity_product(self, ctx):
        rng = random.Random(11)
        a = _random_mat4(ctx, rng)
        prod = mat4_mul(a, mat4_identity(ctx), ctx)
        for i in range(4):
            for j in range(4):
                assert (prod[i][j] - a[i][j]).is_zero()

    def test_det_multiplicative(self, ctx):
        rng = random.Random(13)
        for _ in range(10):
            a, b = _random_mat4(ctx, rng), _random_mat4(ctx, rng)
            lhs = mat4_det(mat4_mul(a, b, ctx), ctx)
            rhs = mat4_det(a, ctx) * mat4_det(b, ctx)
            assert hc_rel_err(lhs, rhs) < 1e-38

    def test_dynamic_range_product_exact(self, ctx):
        def diag(*vals):
            return tuple(
                tuple(ctx.complex(v) if i == j else ctx.complex(0) for j, v in enumerate(vals))
                for i in range(4)
            )

        prod = mat4_mul(diag("1e300", "1e-300", 1, 1), diag("1e-300", "1e300", 1, 1), ctx)
        ident = mat4_identity(ctx)
        for i in range(4):
            for j in range(4):
                assert (prod[i][j] - ident[i][j]).is_zero()

    def test_det_examples(self, ctx):
        det = mat4_det(mat4_identity(ctx), ctx)
        assert (det - 1).is_zero()
        d = tuple(
            tuple(ctx.complex(v) if i == j else ctx.complex(0) for j, v in enumerate((2, 3, 5, 7)))
            for i in range(4)
        )
        assert_hc_close(mat4_det(d, ctx), 210 + 0j, "1e-35")
        # triangular: exact product of the diagonal
        tri = tuple(
            tuple(ctx.complex(i + j + 1) if j >= i else ctx.complex(0) for j in range(4))
            for i in range(4)
        )
        assert (mat4_det(tri, ctx) - (1 * 3 * 5 * 7)).is_zero()

    def test_det_rotation_block(self, ctx):
        r = rotation2(0.8342, ctx)
        zero, one = ctx.complex(0), ctx.complex(1)
        m = (
            (r[0][0], r[0][1], zero, zero),
            (r[1][0], r[1][1], zero, zero),
            (zero, zero, one, zero),
            (zero, zero, zero, one),
        )
        assert_hc_close(mat4_det(m, ctx), 1 + 0j, "1e-38")


class TestMat4Solve:
    def test_identity(self, ctx):
        b = tuple(ctx.complex(k) for k in (1, 2, 3, 4))
        x = mat4_solve(mat4_identity(ctx), b, ctx)
        for xi, bi in zip(x, b):
            assert (xi - bi).is_zero()

    def test_diagonal_extreme(self, ctx):
        a = tuple(
            tuple(ctx.complex(v) if i == j else ctx.complex(0)
                  for j, v in enumerate(("1e300", "1e-300", 1, 1)))
            for i in range(4)
        )
        x = mat4_solve(a, tuple(ctx.complex(1) for _ in range(4)), ctx)
        assert hc_rel_err(x[0], ctx.complex("1e-300")) < 1e-38
        assert hc_rel_err(x[1], ctx.complex("1e300")) < 1e-38

    def test_singular_raises(self, ctx):
        zero = ctx.complex(0)
        a = tuple(tuple(zero for _ in range(4)) for _ in range(4))
        with pytest.raises(SingularMatrixError):
            mat4_solve(a, (zero, zero, zero, zero), ctx)

    def test_residual_bound_scaled_systems(self, backend):
        # 100 row-scaled systems with entries spanning 10^+-100; the
        # residual contract is 10^-(digits - guard).
        ctx = PrecisionContext(120, backend=backend)
        rng = random.Random(17)
        bound = ctx.real("1e-100")
        b_ops = ctx._b
        for _ in range(100):
            scales = [ctx.complex(f"1e{rng.randint(-100, 100)}") for _ in range(4)]
            a = tuple(
                tuple(scales[i] * _random_hc(ctx, rng) + (2 * scales[i] if i == j else 0)
                      for j in range(4))
                for i in range(4)
            )
            rhs = tuple(scales[i] * _random_hc(ctx, rng) for i in range(4))
            x = mat4_solve(a, rhs, ctx)
            resid = mat4_apply(a, x, ctx)
            num = max(abs(resid[i] - rhs[i]) for i in range(4))
            den = max(abs(v) for v in rhs)
            assert b_ops.div(num, den) <= bound
