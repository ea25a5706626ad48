"""Photon wave mechanics at desk scale: spin-1 algebra, the curl form of
the photon wave equation, its split into real Maxwell fields, and the
discrete C/P/T symmetry actions.

All checks here are analytic identities evaluated on plane waves, so
machine precision suffices.  The complex field is the Riemann-Silberstein
combination F = E + iB; for a transverse plane wave
F(r, t) = e exp(i(k.r - w t)) with w = |k|, the wave equation
i dF/dt = curl F holds exactly when e is a circular eigenpolarization.
"""

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Tuple

import numpy as np

from .errors import InvalidPolarizationError

_TRANSVERSALITY_TOL = 1e-12


@dataclass(frozen=True)
class Spin1Matrices:
    """The three spin-1 generators, (S_i)_jk = -i eps_ijk."""

    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray

    def as_tuple(self):
        return (self.s1, self.s2, self.s3)


def spin1_matrices() -> Spin1Matrices:
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[i, k, j] = -1.0
    s = -1j * eps
    return Spin1Matrices(s1=s[0], s2=s[1], s3=s[2])


class PlaneWaveField:
    """Transverse plane wave F(r, t) = e exp(i(k.r - w t)), w = |k|.

    Raises InvalidPolarizationError unless k.e = 0 (plain dot, not
    conjugated: transversality of the complex field).
    """

    def __init__(self, k, e):
        self.k = np.asarray(k, dtype=float).reshape(3)
        self.e = np.asarray(e, dtype=complex).reshape(3)
        scale = max(1.0, np.linalg.norm(self.k) * np.linalg.norm(self.e))
        if abs(np.dot(self.k, self.e)) > _TRANSVERSALITY_TOL * scale:
            raise InvalidPolarizationError(
                f"k.e = {np.dot(self.k, self.e)!r} != 0: longitudinal component present"
            )

    @property
    def omega(self) -> float:
        return float(np.linalg.norm(self.k))

    def phase(self, r, t) -> complex:
        return np.exp(1j * (np.dot(self.k, np.asarray(r, dtype=float)) - self.omega * t))

    def field(self, r, t) -> np.ndarray:
        return self.e * self.phase(r, t)

    def electric(self, r, t) -> np.ndarray:
        return self.field(r, t).real

    def magnetic(self, r, t) -> np.ndarray:
        return self.field(r, t).imag


def circular_wave(omega: float = 1.0) -> PlaneWaveField:
    """Positive-helicity eigenmode: e = (x + iy)/sqrt(2), k = w z."""
    return PlaneWaveField(k=[0.0, 0.0, omega], e=np.array([1.0, 1j, 0.0]) / np.sqrt(2.0))


def schroedinger_curl_residual(w: PlaneWaveField, samples: Sequence[Tuple]) -> float:
    """max over samples of || i dF/dt - curl F ||_2, evaluated analytically.

    Plane-wave derivatives are exact: d/dt -> -i w, curl -> i k x.
    The residual vector is (w e - i k x e) exp(...); it vanishes iff e is
    a circular eigenpolarization of k.
    """
    rc = w.omega * w.e - 1j * np.cross(w.k, w.e)
    worst = 0.0
    for r, t in samples:
        worst = max(worst, float(np.linalg.norm(rc * w.phase(r, t))))
    return worst


def maxwell_split_check(w: PlaneWaveField, samples: Sequence[Tuple]) -> float:
    """Residual of the real Maxwell system for E = Re F, B = Im F.

    Stacks dE/dt - curl B, dB/dt + curl E, div E and div B into one
    vector per sample and returns the max 2-norm.  Because the split is
    an identity, this equals the complex curl-form residual exactly
    (up to rounding).
    """
    kxe = np.cross(w.k, w.e)
    kde = np.dot(w.k, w.e)
    worst = 0.0
    for r, t in samples:
        ph = w.phase(r, t)
        res_e = (-1j * w.omega * w.e * ph).real - (1j * kxe * ph).imag
        res_b = (-1j * w.omega * w.e * ph).imag + (1j * kxe * ph).real
        div_e = (1j * kde * ph).real
        div_b = (1j * kde * ph).imag
        total = np.concatenate([res_e, res_b, [div_e, div_b]])
        worst = max(worst, float(np.linalg.norm(total)))
    return worst


def spin_curl_residual(w: PlaneWaveField, samples: Sequence[Tuple]) -> float:
    """Same residual via the matrix form i dpsi/dt = (S.p) psi.

    On a plane wave (S.k) e = i k x e entrywise, so this must agree with
    schroedinger_curl_residual to machine rounding.
    """
    s = spin1_matrices()
    s_dot_k = s.s1 * w.k[0] + s.s2 * w.k[1] + s.s3 * w.k[2]
    rc = w.omega * w.e - s_dot_k @ w.e
    worst = 0.0
    for r, t in samples:
        worst = max(worst, float(np.linalg.norm(rc * w.phase(r, t))))
    return worst


def curl_residual_fd(field_fn: Callable, samples: Sequence[Tuple], h: float = 1e-5) -> float:
    """Finite-difference fallback for arbitrary (non-plane-wave) fields.

    Central differences, O(h^2).  ``field_fn(r, t)`` returns a complex
    3-vector.
    """

    def dt(r, t):
        return (field_fn(r, t + h) - field_fn(r, t - h)) / (2 * h)

    def curl(r, t):
        r = np.asarray(r, dtype=float)
        d = []
        for ax in range(3):
            step = np.zeros(3)
            step[ax] = h
            d.append((field_fn(r + step, t) - field_fn(r - step, t)) / (2 * h))
        return np.array(
            [d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]]
        )

    worst = 0.0
    for r, t in samples:
        res = 1j * dt(r, t) - curl(r, t)
        worst = max(worst, float(np.linalg.norm(res)))
    return worst


@dataclass(frozen=True)
class DiscreteSymmetry:
    """Value-level action on the complex field: C: F -> -F, T: F -> F*,
    P: F -> -F*."""

    tag: str

    def __post_init__(self):
        if self.tag not in ("C", "P", "T"):
            raise ValueError(f"unknown symmetry tag {self.tag!r}")

    def transform(self, value: np.ndarray) -> np.ndarray:
        if self.tag == "C":
            return -value
        if self.tag == "T":
            return np.conj(value)
        return -np.conj(value)


CHARGE_CONJUGATION = DiscreteSymmetry("C")
PARITY = DiscreteSymmetry("P")
TIME_REVERSAL = DiscreteSymmetry("T")


def _as_field_fn(w) -> Callable:
    if isinstance(w, PlaneWaveField):
        return w.field
    return w


def apply_symmetry(sym: DiscreteSymmetry, w) -> Callable:
    """Transformed field as a callable (r, t) -> complex 3-vector."""
    fn = _as_field_fn(w)

    def transformed(r, t):
        return sym.transform(fn(r, t))

    return transformed


def compose(syms: Iterable[DiscreteSymmetry]) -> Callable:
    """Field map applying the listed symmetries outermost-first.

    compose([T, C, P])(F) evaluates T(C(P(F))); that composition is the
    identity on fields.
    """
    syms = list(syms)

    def mapper(w):
        fn = _as_field_fn(w)
        for sym in reversed(syms):
            fn = apply_symmetry(sym, fn)
        return fn

    return mapper
