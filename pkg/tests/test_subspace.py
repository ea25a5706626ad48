"""Projected-dynamics tests: partition, memory kernel, self-energy."""

import math

import numpy as np
import pytest

from zenopol.errors import NotHermitianError, StepTooLargeError
from zenopol.subspace import (
    MonsterSystem,
    SubspaceBlocks,
    effective_hamiltonian,
    evolve_full,
    evolve_nonlocal,
    memory_kernel,
    partition,
    self_energy,
)


def random_system(rng, n, m, scale=1.0):
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (h + h.conj().T) / 2
    h *= scale / max(1.0, float(np.max(np.sum(np.abs(h), axis=1))))
    return MonsterSystem(h_tot=h, m=m)


class TestPartition:
    def test_two_level(self):
        g = 0.3 + 0.1j
        h = np.array([[1.0, g], [np.conj(g), -0.5]])
        blocks = partition(MonsterSystem(h_tot=h, m=1))
        assert blocks.h[0, 0] == 1.0
        assert blocks.v[0, 0] == g
        assert blocks.hp[0, 0] == -0.5

    def test_block_diagonal_v_zero(self):
        h = np.diag([1.0, 2.0, 3.0, 4.0]).astype(complex)
        blocks = partition(MonsterSystem(h_tot=h, m=2))
        assert np.all(blocks.v == 0)

    def test_reassembly_bitwise(self):
        rng = np.random.default_rng(5)
        system = random_system(rng, 10, 3)
        blocks = partition(system)
        assert np.array_equal(blocks.reassemble(), system.h_tot.astype(complex))

    def test_not_hermitian_rejected(self):
        h = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(NotHermitianError):
            partition(MonsterSystem(h_tot=h, m=1))

    def test_bad_dimensions(self):
        with pytest.raises(ValueError):
            MonsterSystem(h_tot=np.eye(3), m=3)
        with pytest.raises(ValueError):
            MonsterSystem(h_tot=np.eye(3), m=0)


class TestMemoryKernel:
    def test_s_zero(self):
        rng = np.random.default_rng(6)
        blocks = partition(random_system(rng, 8, 2))
        sig0 = memory_kernel(blocks, 0.0)
        assert np.max(np.abs(sig0 + 1j * blocks.v @ blocks.v.conj().T)) < 1e-14

    def test_v_zero(self):
        h = np.diag([1.0, 2.0, 3.0]).astype(complex)
        blocks = partition(MonsterSystem(h_tot=h, m=1))
        assert np.all(memory_kernel(blocks, 1.7) == 0)

    def test_scalar_exponential(self):
        g, wp = 0.4, 1.3
        h = np.array([[0.2, g], [g, wp]], dtype=complex)
        blocks = partition(MonsterSystem(h_tot=h, m=1))
        for s in (0.0, 0.5, 2.0):
            want = -1j * g * g * np.exp(-1j * wp * s)
            assert abs(memory_kernel(blocks, s)[0, 0] - want) < 1e-14


class TestEvolveFull:
    def test_t_zero_projection(self):
        rng = np.random.default_rng(8)
        system = random_system(rng, 6, 2)
        psi0 = rng.normal(size=6) + 1j * rng.normal(size=6)
        assert np.allclose(evolve_full(system, psi0, 0.0), psi0[:2], atol=1e-12)

    def test_unitarity(self):
        rng = np.random.default_rng(9)
        system = random_system(rng, 6, 5)
        psi0 = rng.normal(size=6) + 1j * rng.normal(size=6)
        h = system.h_tot
        lam, u = np.linalg.eigh(h)
        full = u @ (np.exp(-1j * lam * 3.7) * (u.conj().T @ psi0))
        assert abs(np.linalg.norm(full) - np.linalg.norm(psi0)) < 1e-12

    def test_eigenvector_phase_rotation(self):
        rng = np.random.default_rng(10)
        system = random_system(rng, 5, 4)
        lam, u = np.linalg.eigh(system.h_tot)
        vec = u[:, 2]
        out = evolve_full(system, vec, 2.0)
        assert np.allclose(out, np.exp(-1j * lam[2] * 2.0) * vec[:4], atol=1e-12)


class TestEvolveNonlocal:
    def test_memoryless_limit(self):
        # V = 0: plain unitary evolution of the small block
        h = np.zeros((4, 4), dtype=complex)
        h[:2, :2] = np.array([[0.3, 0.1], [0.1, -0.2]])
        h[2:, 2:] = np.diag([1.0, 2.0])
        blocks = partition(MonsterSystem(h_tot=h, m=2))
        psi0 = np.array([1.0, 0.0], dtype=complex)
        dt = 0.02
        traj = evolve_nonlocal(blocks, psi0, 5.0, dt)
        lam, u = np.linalg.eigh(h[:2, :2])
        for idx in (50, 125, 250):
            t = idx * dt
            exact = u @ (np.exp(-1j * lam * t) * (u.conj().T @ psi0))
            assert np.linalg.norm(traj[idx] - exact) < 5e-4 * max(1.0, t)

    def test_matches_full_projection(self):
        rng = np.random.default_rng(12)
        system = random_system(rng, 4, 2)
        blocks = partition(system)
        psi0 = np.array([1.0, 0.5 - 0.25j])
        psi0 /= np.linalg.norm(psi0)
        full0 = np.concatenate([psi0, np.zeros(2)])
        errs = []
        for dt in (0.05, 0.025):
            traj = evolve_nonlocal(blocks, psi0, 12.0, dt)
            ts = np.arange(len(traj)) * dt
            exact = np.array([evolve_full(system, full0, t) for t in ts])
            errs.append(float(np.max(np.linalg.norm(traj - exact, axis=1))))
        assert 3.5 < errs[0] / errs[1] < 4.5

    def test_subspace_norm_never_grows(self):
        rng = np.random.default_rng(13)
        system = random_system(rng, 8, 2)
        blocks = partition(system)
        psi0 = np.array([0.6, 0.8], dtype=complex)
        traj = evolve_nonlocal(blocks, psi0, 15.0, 0.05)
        norms = np.linalg.norm(traj, axis=1)
        assert np.all(norms <= np.linalg.norm(psi0) * (1 + 1e-6))

    def test_step_too_large(self):
        rng = np.random.default_rng(14)
        system = random_system(rng, 4, 2, scale=5.0)
        blocks = partition(system)
        with pytest.raises(StepTooLargeError):
            evolve_nonlocal(blocks, np.array([1.0, 0.0]), 1.0, 0.5)


class TestSelfEnergy:
    def test_scalar_closed_form(self):
        g, wp, energy, eta = 0.4, 1.1, 0.7, 0.01
        h = np.array([[0.2, g], [g, wp]], dtype=complex)
        blocks = partition(MonsterSystem(h_tot=h, m=1))
        se = self_energy(blocks, energy, eta)
        denom = (energy - wp) ** 2 + eta**2
        assert abs(se.delta[0, 0] - g * g * (energy - wp) / denom) < 1e-12
        assert abs(se.gamma[0, 0] - 2 * g * g * eta / denom) < 1e-12

    def test_v_zero(self):
        h = np.diag([1.0, 2.0, 3.0]).astype(complex)
        blocks = partition(MonsterSystem(h_tot=h, m=1))
        se = self_energy(blocks, 0.5, 0.1)
        assert np.all(se.delta == 0) and np.all(se.gamma == 0)

    def test_gamma_psd_random(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            n = rng.integers(3, 10)
            m = rng.integers(1, min(4, n - 1) + 1)
            blocks = partition(random_system(rng, int(n), int(m)))
            energy = float(rng.normal())
            eta = float(10 ** rng.uniform(-3, 0))
            se = self_energy(blocks, energy, eta)
            assert np.max(np.abs(se.delta - se.delta.conj().T)) < 1e-12
            assert np.max(np.abs(se.gamma - se.gamma.conj().T)) < 1e-12
            assert float(np.min(np.linalg.eigvalsh(se.gamma))) > -1e-12

    def test_eta_requirements(self):
        h = np.eye(2, dtype=complex)
        blocks = partition(MonsterSystem(h_tot=h, m=1))
        with pytest.raises(ValueError):
            self_energy(blocks, 0.0, 0.0)

    def test_eta_limit_consistency(self):
        # E at distance >= 1 from spec(H'): Delta -> V (E-H')^-1 V^H and
        # Gamma -> 0, both at least O(eta)
        rng = np.random.default_rng(16)
        system = random_system(rng, 8, 2)
        blocks = partition(system)
        lam = np.linalg.eigvalsh(blocks.hp)
        energy = float(np.max(lam) + 1.0)
        exact = blocks.v @ np.linalg.solve(energy * np.eye(6) - blocks.hp, blocks.v.conj().T)
        prev_d, prev_g = None, None
        for eta in (1e-1, 1e-2, 1e-3):
            se = self_energy(blocks, energy, eta)
            err_d = float(np.max(np.abs(se.delta - exact)))
            err_g = float(np.max(np.abs(se.gamma)))
            assert err_d <= 2.0 * eta
            assert err_g <= 10.0 * eta
            if prev_d is not None:
                assert err_d <= prev_d / 5
                assert err_g <= prev_g / 5
            prev_d, prev_g = err_d, err_g


class TestEffectiveHamiltonian:
    def test_hermitian_when_gamma_vanishes(self):
        h = np.diag([1.0, 2.0, 5.0]).astype(complex)
        h[0, 2] = h[2, 0] = 0.2
        blocks = partition(MonsterSystem(h_tot=h, m=1))
        # far detuned, small eta: effectively Hermitian
        heff = effective_hamiltonian(blocks, energy=1.0, eta=1e-9)
        assert abs(heff[0, 0].imag) < 1e-8

    def test_scalar_eigenvalue(self):
        g, wp, energy, eta = 0.3, 2.0, 0.4, 0.05
        h = np.array([[1.0, g], [g, wp]], dtype=complex)
        blocks = partition(MonsterSystem(h_tot=h, m=1))
        heff = effective_hamiltonian(blocks, energy, eta)
        denom = (energy - wp) ** 2 + eta**2
        want = 1.0 + g * g * (energy - wp) / denom - 1j * g * g * eta / denom
        assert abs(heff[0, 0] - want) < 1e-12

    def test_eigenvalues_decay_random(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            blocks = partition(random_system(rng, 8, 3))
            heff = effective_hamiltonian(blocks, float(rng.normal()), float(10 ** rng.uniform(-2, 0)))
            assert float(np.max(np.linalg.eigvals(heff).imag)) < 1e-12

    def test_fixed_energy_consistency(self):
        # an eigenpair of H_eff(E0) evaluated at its own eigenenergy
        # approximately satisfies the fixed-energy equation
        rng = np.random.default_rng(18)
        blocks = partition(random_system(rng, 10, 2))
        energy0 = 0.2
        eta = 1e-4
        heff = effective_hamiltonian(blocks, energy0, eta)
        vals, vecs = np.linalg.eig(heff)
        idx = int(np.argmin(np.abs(vals.real - energy0)))
        e_iter = float(vals[idx].real)
        heff2 = effective_hamiltonian(blocks, e_iter, eta)
        vals2 = np.linalg.eig(heff2)[0]
        assert np.min(np.abs(vals2.real - e_iter)) < 0.05
