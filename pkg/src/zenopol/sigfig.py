"""Decimal formatting of backend reals at a fixed significant-figure count.

Output format is scientific notation with an explicit sign and exactly
``sig`` significant digits, e.g. ``+2.500000000000000000000000000000e-01``.
Digit extraction is backend-specific, but the final decimal rounding is
done here (half away from zero) so both backends emit byte-identical
text for the same value.
"""

# Extra digits requested from the backend before rounding; every binary
# float has a terminating decimal expansion, so this buffer decides ties
# correctly except for expansions that terminate in '5' exactly at the
# buffer edge, which round half-away deterministically either way.
_EXTRA = 15


def _round_digits(ds: str, sig: int):
    """Round a digit string to ``sig`` digits; returns (digits, exp_bump)."""
    if len(ds) <= sig:
        return ds.ljust(sig, "0"), 0
    head, tail = ds[:sig], ds[sig:]
    if tail[0] < "5":
        return head, 0
    num = int(head) + 1
    if len(str(num)) > sig:  # 999..9 + 1 carried out
        return str(num)[:sig], 1
    return str(num).zfill(sig), 0


def format_real(x, ctx, sig: int = 30) -> str:
    """Format a backend real (or int/float) of ``ctx`` to ``sig`` figures."""
    b = ctx._b
    if not b.is_complex(x):
        x = b.real(x)
    sign, ds, exp10 = b.digits_exp(x, sig + _EXTRA)
    ds, bump = _round_digits(ds, sig)
    exp10 += bump
    if set(ds) == {"0"}:
        exp10 = 0
        sign = 1
    mantissa = ds[0] + "." + ds[1:]
    return f"{'+' if sign >= 0 else '-'}{mantissa}e{'+' if exp10 >= 0 else '-'}{abs(exp10):02d}"


def format_hcomplex(z, sig: int = 30):
    """(re, im) strings of an HComplex at ``sig`` figures."""
    return format_real(z.re, z.ctx, sig), format_real(z.im, z.ctx, sig)
