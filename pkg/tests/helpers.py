"""Shared assertion helpers for the high-precision value types."""

import math


def hp_abs_diff(ctx, value, expected):
    """|value - expected| as a backend real; inputs may be str/int/float."""
    b = ctx._b
    d = b.sub(ctx.real(value), ctx.real(expected))
    if d < 0:
        d = b.neg(d)
    return d


def assert_real_close(ctx, value, expected, tol):
    d = hp_abs_diff(ctx, value, expected)
    assert d <= ctx.real(tol), f"|{float(value)} - {float(ctx.real(expected))}| = {float(d)} > {tol}"


def assert_hc_close(z, expected, tol):
    """HComplex vs a python complex / (re, im) pair of literals."""
    ctx = z.ctx
    if isinstance(expected, tuple):
        ex_re, ex_im = expected
    else:
        ex_re, ex_im = expected.real, expected.imag
    assert_real_close(ctx, z.re, ex_re, tol)
    assert_real_close(ctx, z.im, ex_im, tol)


def assert_mat_close(m, expected, tol):
    for row, exp_row in zip(m, expected):
        for z, e in zip(row, exp_row):
            assert_hc_close(z, e, tol)


def hc_rel_err(a, b):
    """Relative |a-b|/|b| as a float, for HComplex values of any context."""
    ctx = a.ctx
    d = abs(a - ctx.complex(b))
    scale = abs(ctx.complex(b))
    if scale == 0:
        return float(d)
    return float(ctx._b.div(d, scale))


def rel_err_real(ctx, a, b):
    bb = ctx._b
    d = hp_abs_diff(ctx, a, b)
    scale = ctx.real(b)
    if scale < 0:
        scale = bb.neg(scale)
    if scale == 0:
        return float(d)
    return float(bb.div(d, scale))
