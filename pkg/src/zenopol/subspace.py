"""Projected dynamics of a finite Hermitian composite system.

A large Hermitian Hamiltonian is partitioned into blocks

    H_tot = [[H, V], [V^H, H']]

by the projector onto the first m coordinates.  When the complement
starts empty, the projected piece obeys a time-non-local equation

    i dpsi/dt = H psi + int_0^t Sigma(s) psi(t - s) ds,
    Sigma(s) = -i V exp(-i H' s) V^H               (hbar = 1),

which is exactly equivalent to projecting the full unitary evolution.
`evolve_nonlocal` integrates it with an explicit midpoint step and
trapezoidal history quadrature (both second order); `evolve_full` is
the exact oracle.  The frequency-domain counterpart is the resolvent
self-energy Delta(E) - (i/2) Gamma(E) = V (E - H' + i eta)^-1 V^H with
its non-perturbative decay rate Gamma(E) = 2 pi V delta_eta(E - H') V^H.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitianError, StepTooLargeError

_HERMITICITY_TOL = 1e-12


def _inf_norm(a: np.ndarray) -> float:
    """Induced infinity norm (max absolute row sum)."""
    return float(np.max(np.sum(np.abs(a), axis=1)))


@dataclass(frozen=True)
class MonsterSystem:
    """Full Hermitian system plus the dimension of the projected subspace."""

    h_tot: np.ndarray
    m: int

    def __post_init__(self):
        h = np.asarray(self.h_tot)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"h_tot must be square, got shape {h.shape}")
        if not (1 <= self.m < h.shape[0]):
            raise ValueError(f"need 1 <= m < n, got m={self.m}, n={h.shape[0]}")

    @property
    def n(self) -> int:
        return self.h_tot.shape[0]


@dataclass(frozen=True)
class SubspaceBlocks:
    """Partition blocks: h is m x m, v is m x (n-m), hp is (n-m) x (n-m)."""

    h: np.ndarray
    v: np.ndarray
    hp: np.ndarray

    def reassemble(self) -> np.ndarray:
        top = np.hstack([self.h, self.v])
        bottom = np.hstack([self.v.conj().T, self.hp])
        return np.vstack([top, bottom])

    @property
    def m(self) -> int:
        return self.h.shape[0]


def partition(sys: MonsterSystem) -> SubspaceBlocks:
    """Exact block extraction; rejects non-Hermitian input."""
    h = np.asarray(sys.h_tot, dtype=complex)
    dev = _inf_norm(h - h.conj().T)
    if dev > _HERMITICITY_TOL:
        raise NotHermitianError(f"||h_tot - h_tot^H||_inf = {dev:.3e} > {_HERMITICITY_TOL}")
    m = sys.m
    return SubspaceBlocks(h=h[:m, :m].copy(), v=h[:m, m:].copy(), hp=h[m:, m:].copy())


def memory_kernel(blocks: SubspaceBlocks, s: float) -> np.ndarray:
    """Sigma(s) = -i V exp(-i H' s) V^H via Hermitian eigendecomposition."""
    lam, u = np.linalg.eigh(blocks.hp)
    a = blocks.v @ u
    return -1j * (a * np.exp(-1j * lam * s)) @ a.conj().T


def evolve_full(sys: MonsterSystem, psi0_full: np.ndarray, t: float) -> np.ndarray:
    """Exact oracle: project exp(-i H_tot t) Psi0 onto the first m coordinates."""
    h = np.asarray(sys.h_tot, dtype=complex)
    lam, u = np.linalg.eigh(h)
    psi0_full = np.asarray(psi0_full, dtype=complex).reshape(h.shape[0])
    full = u @ (np.exp(-1j * lam * t) * (u.conj().T @ psi0_full))
    return full[: sys.m]


def evolve_nonlocal(
    blocks: SubspaceBlocks, psi0: np.ndarray, t_end: float, dt: float
) -> np.ndarray:
    """Integrate the memory-kernel equation for an initially empty complement.

    Explicit midpoint stepping with trapezoidal quadrature of the
    history integral (both O(dt^2) globally).  Returns the trajectory
    as an array of shape (nsteps + 1, m) including the initial state.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    scale = _inf_norm(blocks.reassemble())
    if dt * scale > 0.1:
        raise StepTooLargeError(f"dt*||h_tot||_inf = {dt * scale:.3f} > 0.1")

    m = blocks.m
    psi0 = np.asarray(psi0, dtype=complex).reshape(m)
    nsteps = int(round(t_end / dt))

    # Sigma on the half-step grid: sig[j] = Sigma(j*dt/2).
    lam, u = np.linalg.eigh(blocks.hp)
    a = blocks.v @ u
    phases = np.exp(-1j * np.outer(np.arange(2 * nsteps + 1) * (dt / 2), lam))
    sig = -1j * np.einsum("ik,tk,jk->tij", a, phases, a.conj())

    h = blocks.h
    traj = np.empty((nsteps + 1, m), dtype=complex)
    traj[0] = psi0
    for n in range(nsteps):
        psi_n = traj[n]
        # History integral at t_n over the stored grid (offsets 2(n-j) on
        # the half grid), trapezoidal weights.
        if n == 0:
            i_n = np.zeros(m, dtype=complex)
        else:
            terms = np.einsum("jik,jk->ji", sig[2 * (n - np.arange(n + 1))], traj[: n + 1])
            w = np.full(n + 1, dt)
            w[0] = w[-1] = dt / 2
            i_n = w @ terms
        k1 = -1j * (h @ psi_n + i_n)
        psi_half = psi_n + 0.5 * dt * k1

        # History integral at t_n + dt/2: grid nodes plus the half node.
        offs = 2 * (n - np.arange(n + 1)) + 1
        terms = np.einsum("jik,jk->ji", sig[offs], traj[: n + 1])
        u_nodes = np.arange(n + 1, dtype=float) * dt
        u_nodes = np.append(u_nodes, n * dt + dt / 2)
        w = np.empty(n + 2)
        w[0] = (u_nodes[1] - u_nodes[0]) / 2
        w[-1] = (u_nodes[-1] - u_nodes[-2]) / 2
        if n >= 1:
            w[1:-1] = (u_nodes[2:] - u_nodes[:-2]) / 2
        i_half = w[:-1] @ terms + w[-1] * (sig[0] @ psi_half)
        traj[n + 1] = psi_n + dt * (-1j) * (h @ psi_half + i_half)
    return traj


@dataclass(frozen=True)
class SelfEnergy:
    """Level shift and decay rate at energy E with Lorentzian broadening eta."""

    delta: np.ndarray
    gamma: np.ndarray
    eta: float


def self_energy(blocks: SubspaceBlocks, energy: float, eta: float) -> SelfEnergy:
    """Delta(E) - (i/2) Gamma(E) = V (E - H' + i eta)^-1 V^H, split into
    Hermitian and anti-Hermitian parts.

    Gamma equals 2 pi V delta_eta(E - H') V^H with the Lorentzian
    delta_eta(x) = (eta/pi)/(x^2 + eta^2); the identity is checked here
    to 1e-12 as an internal consistency guard.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    lam, u = np.linalg.eigh(blocks.hp)
    a = blocks.v @ u
    g = (a / (energy - lam + 1j * eta)) @ a.conj().T
    delta = (g + g.conj().T) / 2
    gamma = 1j * (g - g.conj().T)

    lorentz = (eta / np.pi) / ((energy - lam) ** 2 + eta**2)
    gamma_direct = 2 * np.pi * (a * lorentz) @ a.conj().T
    if _inf_norm(gamma - gamma_direct) > 1e-12 * max(1.0, _inf_norm(gamma)):
        raise AssertionError("Lorentzian rate identity violated; numerical fault")
    return SelfEnergy(delta=delta, gamma=gamma, eta=eta)


def effective_hamiltonian(blocks: SubspaceBlocks, energy: float, eta: float) -> np.ndarray:
    """H + Delta(E) - (i/2) Gamma(E); all eigenvalues decay (Im <= 0)."""
    se = self_energy(blocks, energy, eta)
    return blocks.h + se.delta - 0.5j * se.gamma
