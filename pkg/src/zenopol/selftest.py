"""Built-in end-to-end checks behind ``zeno selftest``.

Each check recomputes a closed-form or independently derived value and
compares at a stated tolerance.  The list is meant to be fast (< 30 s)
while still touching every module, including one real lossy-stack spot
check at a few hundred digits.
"""

import math

import numpy as np

from . import photon, subspace
from .errors import PrecisionExhaustedError
from .precision import (
    PrecisionContext,
    csqrt,
    ctrig,
    mat2_mul,
    mat2_spectral_apply,
    mat4_det,
    mat4_identity,
    mat4_mul,
    mat4_solve,
    rotation2,
)
from .smatrix import stack_amplitudes, stack_flux
from .stack import (
    DielectricEigenvalues,
    StackConfig,
    estimate_digits,
    intermediate_polarizer_probability,
    projection_probability,
    solve_boundary,
    stack_transfer,
    transmission_probability,
    two_polarizer_probability,
    zeno_angle_schedule,
)

# Independently derived reference values (real-algebra square-root
# system and hyperbolic identity, evaluated at high precision).
SQRT_1_2I_RE = "1.2720196495140689642524224617374914917156080418401"
SQRT_1_2I_IM = "0.78615137775742328606955858584295892952312205783772"
COSH_100 = "1.3440585709080677242063127757900067936805559386871e43"
PROJ_20 = "0.88382420539658467597291697967715325938589903566813"


def _close(ctx, value, expected, tol="1e-25"):
    b = ctx._b
    d = b.sub(ctx.real(value), ctx.real(expected))
    if d < 0:
        d = b.neg(d)
    return d <= b.real(tol)


def check_csqrt(ctx):
    w = csqrt(ctx.complex(4), ctx)
    assert _close(ctx, w.re, 2) and _close(ctx, w.im, 0)
    w = csqrt(ctx.complex(-4), ctx)
    assert _close(ctx, w.re, 0) and _close(ctx, w.im, 2)
    w = csqrt(ctx.complex(1, 2), ctx)
    assert _close(ctx, w.re, SQRT_1_2I_RE) and _close(ctx, w.im, SQRT_1_2I_IM)
    sq = w * w
    assert _close(ctx, sq.re, 1) and _close(ctx, sq.im, 2)


def check_ctrig(ctx):
    c, s = ctrig(ctx.complex(0), ctx)
    assert _close(ctx, c.re, 1) and _close(ctx, s.re, 0)
    c, _ = ctrig(ctx.complex(0, 100), ctx)
    b = ctx._b
    rel = b.div(b.sub(c.re, ctx.real(COSH_100)), ctx.real(COSH_100))
    assert abs(float(rel)) < 1e-25
    z = ctx.complex(3.25, -1.5)
    c, s = ctrig(z, ctx)
    ident = c * c + s * s
    assert _close(ctx, ident.re, 1) and _close(ctx, ident.im, 0)


def check_rotation(ctx):
    r = rotation2(0.0, ctx)
    assert _close(ctx, r[0][0].re, 1) and _close(ctx, r[0][1].re, 0)
    theta = 0.8342
    prod = mat2_mul(rotation2(theta, ctx), rotation2(-theta, ctx), ctx)
    assert _close(ctx, prod[0][0].re, 1) and _close(ctx, prod[0][1].re, 0)


def check_spectral(ctx):
    b = ctx._b
    quarter_pi = b.div(ctx.pi, b.real(4))
    m = mat2_spectral_apply(quarter_pi, 4, 9, lambda lam: csqrt(lam, lam.ctx), ctx)
    assert _close(ctx, m[0][0].re, "2.5") and _close(ctx, m[0][1].re, "-0.5")
    # identity kernel at theta=0 reproduces the diagonal
    m = mat2_spectral_apply(0.0, ctx.complex(1), ctx.complex(1, 2), lambda lam: lam, ctx)
    assert _close(ctx, m[0][0].re, 1) and _close(ctx, m[1][1].im, 2)


def check_mat4(ctx):
    ident = mat4_identity(ctx)
    assert _close(ctx, mat4_det(ident, ctx).re, 1)
    d1 = tuple(
        tuple(ctx.complex(v) if i == j else ctx.complex(0) for j, v in enumerate(row))
        for i, row in enumerate((["1e300", 0, 0, 0], [0, "1e-300", 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]))
    )
    d2 = tuple(
        tuple(ctx.complex(v) if i == j else ctx.complex(0) for j, v in enumerate(row))
        for i, row in enumerate((["1e-300", 0, 0, 0], [0, "1e300", 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]))
    )
    prod = mat4_mul(d1, d2, ctx)
    for i in range(4):
        for j in range(4):
            assert (prod[i][j] - (1 if i == j else 0)).is_zero()
    x = mat4_solve(d1, tuple(ctx.complex(1) for _ in range(4)), ctx)
    assert _close(ctx, x[0].re, "1e-300", tol="1e-320") and _close(ctx, x[1].re, "1e300", tol="1e275")


def check_schedule(ctx):
    assert zeno_angle_schedule(1) == [math.pi / 2]
    assert zeno_angle_schedule(2) == [math.pi / 4, math.pi / 2]
    assert zeno_angle_schedule(4) == [math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2]


def check_projection(ctx):
    assert abs(float(projection_probability(1, ctx))) < 1e-20
    assert abs(float(projection_probability(2, ctx)) - 0.25) < 1e-20
    assert _close(ctx, projection_probability(20, ctx), PROJ_20)
    assert intermediate_polarizer_probability(math.pi / 4) == 0.25
    assert intermediate_polarizer_probability(math.pi / 2) < 1e-20
    assert intermediate_polarizer_probability(0.0) == 0.0
    assert two_polarizer_probability(0.0) == 1.0


def check_vacuum_stack(ctx):
    eps = DielectricEigenvalues(1.0, 1.0)
    cfg = StackConfig(n_polarizers=3, xi=1.25, eps=eps)
    m = stack_transfer(cfg.slabs(), ctx)
    amps = solve_boundary(m, ctx)
    b = ctx._b
    phase = ctrig(ctx.complex(3 * 1.25), ctx)
    assert _close(ctx, amps.t1.re, phase[0].re) and _close(ctx, amps.t1.im, phase[1].re)
    assert float(transmission_probability(amps)) < 1e-40
    assert float(amps.r1.abs2()) < 1e-40


def check_estimate_digits(ctx):
    assert estimate_digits(StackConfig(20, 100.0, DielectricEigenvalues(1.0, 1 + 2j))) == 883
    assert estimate_digits(StackConfig(5, 10.0, DielectricEigenvalues(1.0, 1.0))) == 200
    assert estimate_digits(StackConfig(20, 100.0, DielectricEigenvalues(1.1 + 0.001j, 1.1 + 0.05j))) == 221


def check_lossy_stack_det(ctx):
    eps = DielectricEigenvalues(1.0, 1 + 2j)
    cfg = StackConfig(n_polarizers=2, xi=10.0, eps=eps)
    det_ctx = PrecisionContext(120)
    d = mat4_det(stack_transfer(cfg.slabs(), det_ctx), det_ctx)
    assert abs(float(abs(d - 1))) < 1e-60


def check_oracle_agreement(ctx):
    eps1, eps2 = 1.0, 1 + 0.2j
    for n in (1, 2, 3):
        cfg = StackConfig(n_polarizers=n, xi=1.0, eps=DielectricEigenvalues(eps1, eps2))
        hp_ctx = PrecisionContext(max(30, estimate_digits(cfg)))
        amps = solve_boundary(stack_transfer(cfg.slabs(), hp_ctx), hp_ctx)
        ora = stack_amplitudes(zeno_angle_schedule(n), 1.0, eps1, eps2)
        hp = [x.to_complex() for x in (amps.t1, amps.t2, amps.r1, amps.r2)]
        assert max(abs(a - b) for a, b in zip(hp, ora)) < 1e-8
    assert abs(stack_flux(zeno_angle_schedule(3), 1.2, 2.25, 1.69) - 1) < 1e-12


def check_failure_over_garbage(ctx):
    eps = DielectricEigenvalues(1.0, 1 + 2j)
    cfg = StackConfig(n_polarizers=6, xi=100.0, eps=eps)
    low = PrecisionContext(30)
    try:
        solve_boundary(stack_transfer(cfg.slabs(), low), low)
    except PrecisionExhaustedError:
        return
    raise AssertionError("under-resolved stack did not raise PrecisionExhaustedError")


def check_zeno_spot(ctx):
    """One real lossy point: N=8 Maxwell probability near cos^16(pi/16)."""
    cfg = StackConfig(n_polarizers=8, xi=100.0, eps=DielectricEigenvalues(1.0, 1 + 2j))
    hp_ctx = PrecisionContext(max(30, estimate_digits(cfg)))
    amps = solve_boundary(stack_transfer(cfg.slabs(), hp_ctx), hp_ctx)
    p = float(transmission_probability(amps))
    assert abs(p - math.cos(math.pi / 16) ** 16) < 0.05


def check_photon(ctx):
    s = photon.spin1_matrices()
    assert np.array_equal(s.s3[0], np.array([0, -1j, 0]))
    assert np.max(np.abs(s.s1 @ s.s2 - s.s2 @ s.s1 - 1j * s.s3)) == 0
    rng = np.random.default_rng(3)
    samples = [(rng.normal(size=3), float(rng.normal())) for _ in range(10)]
    wave = photon.circular_wave(2.0)
    assert photon.schroedinger_curl_residual(wave, samples) < 1e-12
    assert photon.maxwell_split_check(wave, samples) < 1e-12
    lin = photon.PlaneWaveField([0, 0, 2.0], [1, 0, 0])
    assert abs(photon.schroedinger_curl_residual(lin, samples) - 2 * math.sqrt(2)) < 1e-12
    tcp = photon.compose([photon.TIME_REVERSAL, photon.CHARGE_CONJUGATION, photon.PARITY])(wave)
    r, t = samples[0]
    assert np.max(np.abs(tcp(r, t) - wave.field(r, t))) < 1e-15


def check_subspace(ctx):
    rng = np.random.default_rng(11)
    n, m = 6, 2
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (h + h.conj().T) / 2
    h /= float(np.max(np.sum(np.abs(h), axis=1)))
    system = subspace.MonsterSystem(h_tot=h, m=m)
    blocks = subspace.partition(system)
    assert np.array_equal(blocks.reassemble(), h.astype(complex))
    sig0 = subspace.memory_kernel(blocks, 0.0)
    assert np.max(np.abs(sig0 + 1j * blocks.v @ blocks.v.conj().T)) < 1e-12
    psi0 = np.zeros(m, dtype=complex)
    psi0[0] = 1.0
    full0 = np.zeros(n, dtype=complex)
    full0[0] = 1.0
    errs = []
    for dt in (0.08, 0.04):
        traj = subspace.evolve_nonlocal(blocks, psi0, 8.0, dt)
        ts = np.arange(len(traj)) * dt
        exact = np.array([subspace.evolve_full(system, full0, t) for t in ts])
        errs.append(float(np.max(np.linalg.norm(traj - exact, axis=1))))
    ratio = errs[0] / errs[1]
    assert 3.0 < ratio < 5.0, f"dt-halving ratio {ratio}"
    se = subspace.self_energy(blocks, 0.4, 0.02)
    assert float(np.min(np.linalg.eigvalsh(se.gamma))) > -1e-12


CHECKS = [
    ("csqrt branch and value", check_csqrt),
    ("complex trig via exponentials", check_ctrig),
    ("rotation group inverse", check_rotation),
    ("spectral matrix function", check_spectral),
    ("4x4 product/solve dynamic range", check_mat4),
    ("zeno angle schedule", check_schedule),
    ("projection baseline values", check_projection),
    ("vacuum stack boundary solve", check_vacuum_stack),
    ("precision estimate calibration", check_estimate_digits),
    ("lossy slab determinant", check_lossy_stack_det),
    ("scattering-matrix oracle agreement", check_oracle_agreement),
    ("failure instead of garbage", check_failure_over_garbage),
    ("lossy Zeno stack spot value", check_zeno_spot),
    ("photon wave identities", check_photon),
    ("subspace memory-kernel dynamics", check_subspace),
]


def run_selftest(out) -> bool:
    ctx = PrecisionContext(40)
    ok = True
    for name, fn in CHECKS:
        try:
            fn(ctx)
            out.write(f"[ok]   {name}\n")
        except Exception as exc:  # report and continue
            ok = False
            out.write(f"[FAIL] {name}: {exc}\n")
    out.write("selftest: PASS\n" if ok else "selftest: FAIL\n")
    return ok
