"""Experiment orchestration and the ``zeno`` command-line tool.

Subcommands:

* ``zeno run``       -- transmission sweep over N; CSV/JSON output.
* ``zeno baseline``  -- projection-postulate table {cos^2(pi/2N)}^N.
* ``zeno wave check``    -- photon wave-equation identity residuals.
* ``zeno subspace demo`` -- memory-kernel evolution vs exact oracle.
* ``zeno selftest``  -- fast end-to-end checks of every module.

Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.
Identical configurations produce byte-identical output files: all
numeric output is rounded to 30 significant figures by a shared,
backend-independent formatter.
"""

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import Optional, Tuple, Union

import numpy as np

from . import photon, subspace
from .errors import PrecisionExhaustedError
from .precision import PrecisionContext
from .sigfig import format_real
from .stack import (
    DielectricEigenvalues,
    ScatteringAmplitudes,
    StackConfig,
    estimate_digits,
    projection_probability,
    solve_boundary,
    stack_det_residual,
    stack_transfer,
    transmission_probability,
)

CSV_HEADER = (
    "N,P_maxwell,P_projection,abs_diff,T1_re,T1_im,T2_re,T2_im,"
    "R1_re,R1_im,R2_re,R2_im,digits_used,det_residual"
)

JSON_SCHEMA = {
    "type": "object",
    "required": ["rows"],
    "additionalProperties": False,
    "properties": {
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "N", "P_maxwell", "P_projection", "abs_diff",
                    "T1_re", "T1_im", "T2_re", "T2_im",
                    "R1_re", "R1_im", "R2_re", "R2_im",
                    "digits_used", "det_residual",
                ],
                "additionalProperties": False,
                "properties": {
                    "N": {"type": "integer"},
                    "P_maxwell": {"type": "string"},
                    "P_projection": {"type": "string"},
                    "abs_diff": {"type": "string"},
                    "T1_re": {"type": "string"},
                    "T1_im": {"type": "string"},
                    "T2_re": {"type": "string"},
                    "T2_im": {"type": "string"},
                    "R1_re": {"type": "string"},
                    "R1_im": {"type": "string"},
                    "R2_re": {"type": "string"},
                    "R2_im": {"type": "string"},
                    "digits_used": {"type": "integer"},
                    "det_residual": {"type": "string"},
                },
            },
        },
        "failure": {
            "type": "object",
            "required": ["N", "error", "message"],
            "additionalProperties": False,
            "properties": {
                "N": {"type": "integer"},
                "error": {"type": "string"},
                "message": {"type": "string"},
            },
        },
    },
}


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` literals (``i`` or ``j`` suffix, either order)."""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise ValueError(f"cannot parse complex literal {text!r}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    """A transmission sweep over stacks of N = n_min..n_max polarizers."""

    n_max: int
    n_min: int = 1
    xi: float = 100.0
    eps1: complex = 1.0 + 0j
    eps2: complex = 1.0 + 0j
    digits: Union[int, str] = "auto"
    schedule: Union[str, Tuple[float, ...]] = "zeno"
    output_path: Optional[str] = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.n_min < 1:
            raise ValueError(f"n_min must be >= 1, got {self.n_min}")
        if self.n_max < self.n_min:
            raise ValueError(f"n_max={self.n_max} < n_min={self.n_min}")
        for tag, e in (("eps1", self.eps1), ("eps2", self.eps2)):
            if e.imag < 0:
                raise ValueError(f"{tag} must have a non-negative imaginary part")
        if not (isinstance(self.digits, int) and self.digits >= 1) and self.digits != "auto":
            raise ValueError(f"digits must be a positive integer or 'auto', got {self.digits!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {self.fmt!r}")
        if not isinstance(self.schedule, str):
            if self.n_min != self.n_max or len(self.schedule) != self.n_max:
                raise ValueError(
                    "an explicit angle schedule requires n_min == n_max == len(schedule)"
                )
        elif self.schedule != "zeno":
            raise ValueError(f"schedule must be 'zeno' or an explicit angle list, got {self.schedule!r}")

    def eigenvalues(self) -> DielectricEigenvalues:
        return DielectricEigenvalues(self.eps1, self.eps2)

    def stack_config(self, n: int) -> StackConfig:
        angles = None if isinstance(self.schedule, str) else tuple(self.schedule)
        return StackConfig(n_polarizers=n, xi=self.xi, eps=self.eigenvalues(), angle_schedule=angles)


_CONFIG_KEYS = {
    "n_min": int,
    "n_max": int,
    "xi": float,
    "eps1": parse_complex,
    "eps2": parse_complex,
    "digits": None,
    "schedule": None,
    "output": None,
    "format": None,
}


def _parse_digits(text: str):
    text = text.strip()
    return text if text == "auto" else int(text)


def _parse_schedule(text: str):
    text = text.strip()
    if text == "zeno":
        return "zeno"
    return tuple(float(x) for x in text.split(","))


def load_config_file(path: str) -> dict:
    """Flat ``key = value`` file; '#' starts a comment."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def build_config(file_values: dict, flag_values: dict) -> ExperimentConfig:
    """Merge config-file values with (overriding) CLI flag values."""
    merged = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    if "n_max" not in merged:
        raise ValueError("n_max is required (flag --n-max or config key n_max)")

    def take(key, conv, default):
        if key not in merged:
            return default
        v = merged[key]
        return conv(v) if isinstance(v, str) else v

    digits = take("digits", _parse_digits, None)
    if digits is None:
        env = os.environ.get("ZENO_DEFAULT_DIGITS")
        digits = int(env) if env else "auto"
    return ExperimentConfig(
        n_min=take("n_min", int, 1),
        n_max=take("n_max", int, None),
        xi=take("xi", float, 100.0),
        eps1=take("eps1", parse_complex, 1.0 + 0j),
        eps2=take("eps2", parse_complex, 1.0 + 0j),
        digits=digits,
        schedule=take("schedule", _parse_schedule, "zeno"),
        output_path=take("output", str, None),
        fmt=take("format", str, "csv"),
    )


@dataclass(frozen=True)
class ResultRow:
    """One sweep point; numeric fields are backend scalars of ``ctx``."""

    n: int
    p_maxwell: object
    p_projection: object
    abs_diff: object
    amps: ScatteringAmplitudes
    digits_used: int
    det_residual: object
    ctx: PrecisionContext

    def as_strings(self) -> dict:
        c = self.ctx
        t1, t2, r1, r2 = self.amps.t1, self.amps.t2, self.amps.r1, self.amps.r2
        return {
            "N": self.n,
            "P_maxwell": format_real(self.p_maxwell, c),
            "P_projection": format_real(self.p_projection, c),
            "abs_diff": format_real(self.abs_diff, c),
            "T1_re": format_real(t1.re, c),
            "T1_im": format_real(t1.im, c),
            "T2_re": format_real(t2.re, c),
            "T2_im": format_real(t2.im, c),
            "R1_re": format_real(r1.re, c),
            "R1_im": format_real(r1.im, c),
            "R2_re": format_real(r2.re, c),
            "R2_im": format_real(r2.im, c),
            "digits_used": self.digits_used,
            "det_residual": format_real(self.det_residual, c),
        }


class ExperimentFailure(Exception):
    """Raised when a sweep point cannot be certified; carries partial rows."""

    def __init__(self, n: int, rows, cause: Exception):
        super().__init__(f"N={n}: {cause}")
        self.n = n
        self.rows = rows
        self.cause = cause


def compute_row(config: ExperimentConfig, n: int) -> ResultRow:
    stack_cfg = config.stack_config(n)
    requested = config.digits if isinstance(config.digits, int) else estimate_digits(stack_cfg)
    ctx = PrecisionContext(max(30, requested))
    slabs = stack_cfg.slabs()
    m_tot = stack_transfer(slabs, ctx)
    amps = solve_boundary(m_tot, ctx)
    p_max = transmission_probability(amps)
    p_proj = projection_probability(n, ctx)
    b = ctx._b
    diff = b.sub(p_max, p_proj)
    if diff < 0:
        diff = b.neg(diff)
    det_resid, _ = stack_det_residual(slabs, ctx)
    return ResultRow(
        n=n,
        p_maxwell=p_max,
        p_projection=p_proj,
        abs_diff=diff,
        amps=amps,
        digits_used=ctx.digits,
        det_residual=det_resid,
        ctx=ctx,
    )


def run_experiment(config: ExperimentConfig):
    """Rows ordered by N; on failure raises ExperimentFailure carrying
    the rows completed so far."""
    rows = []
    for n in range(config.n_min, config.n_max + 1):
        try:
            rows.append(compute_row(config, n))
        except PrecisionExhaustedError as exc:
            raise ExperimentFailure(n, rows, exc) from exc
    return rows


def render_output(rows, fmt: str, failure: Optional[ExperimentFailure] = None) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for row in rows:
            d = row.as_strings()
            buf.write(",".join(str(d[k]) for k in CSV_HEADER.split(",")) + "\n")
        if failure is not None:
            buf.write(f"# FAILED N={failure.n} PrecisionExhausted: {failure.cause}\n")
        return buf.getvalue()
    doc = {"rows": [row.as_strings() for row in rows]}
    if failure is not None:
        doc["failure"] = {
            "N": failure.n,
            "error": "PrecisionExhausted",
            "message": str(failure.cause),
        }
    return json.dumps(doc, indent=2) + "\n"


def write_output(rows, config: ExperimentConfig, failure=None):
    """Write rendered rows to config.output_path (or stdout)."""
    text = render_output(rows, config.fmt, failure)
    if config.output_path is None:
        sys.stdout.write(text)
        return None
    try:
        with open(config.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write output to {config.output_path!r}: {exc}") from exc
    return config.output_path


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="zeno", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="transmission sweep over N")
    run_p.add_argument("--config", help="flat key=value config file")
    run_p.add_argument("--n-min", type=int, dest="n_min")
    run_p.add_argument("--n-max", type=int, dest="n_max")
    run_p.add_argument("--xi", type=float)
    run_p.add_argument("--eps1", type=parse_complex, help="complex literal a+bi")
    run_p.add_argument("--eps2", type=parse_complex, help="complex literal a+bi")
    run_p.add_argument("--digits", type=_parse_digits, help="integer or 'auto'")
    run_p.add_argument("--schedule", type=_parse_schedule, help="'zeno' or comma-separated radians")
    run_p.add_argument("--out", dest="output")
    run_p.add_argument("--format", dest="fmt", choices=("csv", "json"))

    base_p = sub.add_parser("baseline", help="projection-postulate table only")
    base_p.add_argument("--n-max", type=int, required=True)
    base_p.add_argument("--digits", type=int, default=50)

    wave_p = sub.add_parser("wave", help="photon wave-function checks")
    wave_sub = wave_p.add_subparsers(dest="wave_command", required=True)
    check_p = wave_sub.add_parser("check", help="print identity residuals")
    check_p.add_argument("--samples", type=int, default=50)
    check_p.add_argument("--seed", type=int, default=0)

    sub_p = sub.add_parser("subspace", help="projected-dynamics checks")
    sub_sub = sub_p.add_subparsers(dest="subspace_command", required=True)
    demo_p = sub_sub.add_parser("demo", help="deviation table and self-energy spot checks")
    demo_p.add_argument("--n", type=int, default=8)
    demo_p.add_argument("--m", type=int, default=2)
    demo_p.add_argument("--seed", type=int, default=1)
    demo_p.add_argument("--dt", type=float, default=0.02)
    demo_p.add_argument("--t-end", type=float, default=10.0, dest="t_end")

    sub.add_parser("selftest", help="run all built-in example checks")
    return parser


def _cmd_run(args) -> int:
    file_values = load_config_file(args.config) if args.config else {}
    flag_values = {
        "n_min": args.n_min,
        "n_max": args.n_max,
        "xi": args.xi,
        "eps1": args.eps1,
        "eps2": args.eps2,
        "digits": args.digits,
        "schedule": args.schedule,
        "output": args.output,
        "format": args.fmt,
    }
    config = build_config(file_values, flag_values)
    try:
        rows = run_experiment(config)
    except ExperimentFailure as failure:
        write_output(failure.rows, config, failure)
        sys.stderr.write(f"zeno run: numerical failure at N={failure.n}: {failure.cause}\n")
        return 2
    write_output(rows, config)
    return 0


def _cmd_baseline(args) -> int:
    ctx = PrecisionContext(max(30, args.digits))
    sys.stdout.write("N,P_projection\n")
    for n in range(1, args.n_max + 1):
        sys.stdout.write(f"{n},{format_real(projection_probability(n, ctx), ctx)}\n")
    return 0


def _cmd_wave_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    samples = [(rng.normal(size=3), float(rng.normal())) for _ in range(args.samples)]
    s = photon.spin1_matrices()
    comm = max(
        float(np.max(np.abs(a @ b - b @ a - 1j * c)))
        for a, b, c in ((s.s1, s.s2, s.s3), (s.s2, s.s3, s.s1), (s.s3, s.s1, s.s2))
    )
    casimir = float(np.max(np.abs(s.s1 @ s.s1 + s.s2 @ s.s2 + s.s3 @ s.s3 - 2 * np.eye(3))))
    wave = photon.circular_wave(2.0)
    res_curl = photon.schroedinger_curl_residual(wave, samples)
    res_split = photon.maxwell_split_check(wave, samples)
    res_matrix = abs(photon.spin_curl_residual(wave, samples) - res_curl)
    tcp = photon.compose(
        [photon.TIME_REVERSAL, photon.CHARGE_CONJUGATION, photon.PARITY]
    )(wave)
    res_tcp = max(
        float(np.max(np.abs(tcp(r, t) - wave.field(r, t)))) for r, t in samples
    )
    checks = [
        ("spin_commutators", comm),
        ("spin_casimir", casimir),
        ("circular_curl_residual", res_curl),
        ("circular_maxwell_residual", res_split),
        ("matrix_vs_vector_form", res_matrix),
        ("tcp_identity", res_tcp),
    ]
    ok = True
    for name, value in checks:
        passed = value <= 1e-12
        ok = ok and passed
        sys.stdout.write(f"{name:28s} {value:.3e} {'ok' if passed else 'FAIL'}\n")
    return 0 if ok else 2


def _cmd_subspace_demo(args) -> int:
    rng = np.random.default_rng(args.seed)
    n, m = args.n, args.m
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (h + h.conj().T) / 2
    h /= max(1.0, float(np.max(np.sum(np.abs(h), axis=1))))
    system = subspace.MonsterSystem(h_tot=h, m=m)
    blocks = subspace.partition(system)
    psi0 = np.zeros(m, dtype=complex)
    psi0[0] = 1.0
    full0 = np.zeros(n, dtype=complex)
    full0[0] = 1.0
    traj = subspace.evolve_nonlocal(blocks, psi0, args.t_end, args.dt)
    steps = len(traj) - 1
    sys.stdout.write(f"n={n} m={m} seed={args.seed} dt={args.dt} t_end={args.t_end}\n")
    sys.stdout.write("t        |psi|        deviation_from_full\n")
    for idx in range(0, steps + 1, max(1, steps // 10)):
        t = idx * args.dt
        exact = subspace.evolve_full(system, full0, t)
        dev = float(np.linalg.norm(traj[idx] - exact))
        sys.stdout.write(f"{t:7.3f}  {np.linalg.norm(traj[idx]):.6f}     {dev:.3e}\n")
    se = subspace.self_energy(blocks, energy=0.3, eta=0.05)
    gmin = float(np.min(np.linalg.eigvalsh(se.gamma)))
    heff = subspace.effective_hamiltonian(blocks, energy=0.3, eta=0.05)
    im_max = float(np.max(np.linalg.eigvals(heff).imag))
    sys.stdout.write(f"gamma_min_eigenvalue {gmin:.3e} (>= 0 expected)\n")
    sys.stdout.write(f"heff_max_im_eigenvalue {im_max:.3e} (<= 0 expected)\n")
    return 0 if gmin >= -1e-12 and im_max <= 1e-12 else 2


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return 1
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "baseline":
            return _cmd_baseline(args)
        if args.command == "wave":
            return _cmd_wave_check(args)
        if args.command == "subspace":
            return _cmd_subspace_demo(args)
        if args.command == "selftest":
            from .selftest import run_selftest

            return 0 if run_selftest(sys.stdout) else 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"zeno: {exc}\n")
        return 1
    except PrecisionExhaustedError as exc:
        sys.stderr.write(f"zeno: numerical failure: {exc}\n")
        return 2
    return 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
