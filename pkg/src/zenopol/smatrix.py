"""Numerically stable scattering-matrix recursion (machine precision).

An independent cross-check for the high-precision transfer-matrix
pipeline: the same layered-medium problem is solved by Redheffer star
products of interface and propagation scattering matrices.  Mode
amplitudes are referenced at their entry faces, so every exponential
that appears is decaying (|e^{i q xi}| <= 1 for passive media) and
float64 suffices as long as the one-way attenuation itself is
representable.

Conventions match the transfer-matrix solver: fields (E1, E2, B1, B2),
time dependence e^{-i omega t}, vacuum half-spaces on both sides,
transmitted amplitudes phase-referenced at the stack exit.
"""

import numpy as np

# J = -i*tau2 maps a forward mode's E to its B: for E=(1,0), B=(0,1).
_J = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def _medium(theta, eps1, eps2):
    """(W, V, q) for a principal-axis medium rotated by theta.

    Columns of W are the two eigenpolarizations of the dielectric
    tensor; q are the principal refractive indices sqrt(eps~) with the
    branch Im q >= 0 (decaying forward waves); V maps forward mode
    amplitudes to B-field components.
    """
    c, s = np.cos(theta), np.sin(theta)
    w = np.array([[c, -s], [s, c]], dtype=complex)
    q = np.sqrt(np.asarray([eps1, eps2], dtype=complex))
    v = _J @ w @ np.diag(q)
    return w, v, q


def _interface(wl, vl, wr, vr):
    """Scattering matrix of the interface between two media.

    Port convention: (b_left, a_right) = S (a_left, b_right), enforced
    by continuity of E and B across the interface.
    """
    lhs = np.block([[wl, -wr], [vl, vr]])
    rhs = np.block([[-wl, wr], [vl, vr]])
    s = np.linalg.solve(lhs, rhs)
    return s[:2, :2], s[:2, 2:], s[2:, :2], s[2:, 2:]


def _propagation(q, xi):
    x = np.diag(np.exp(1j * q * xi))
    z = np.zeros((2, 2), dtype=complex)
    return z, x, x, z


def _star(sa, sb):
    """Redheffer star product: sa (left device) composed with sb (right)."""
    a11, a12, a21, a22 = sa
    b11, b12, b21, b22 = sb
    m1 = np.linalg.solve(_I2 - a22 @ b11, np.hstack([a21, a22 @ b12]))
    t21, t2m = m1[:, :2], m1[:, 2:]
    s11 = a11 + a12 @ b11 @ t21
    s12 = a12 @ (b11 @ t2m + b12)
    s21 = b21 @ t21
    s22 = b22 + b21 @ t2m
    return s11, s12, s21, s22


def stack_amplitudes(angles, xi, eps1, eps2):
    """(T1, T2, R1, R2) for a polarizer stack between vacuum half-spaces.

    ``angles`` are the lab-frame orientations of the successive slabs,
    each of optical thickness ``xi`` with principal eigenvalues
    (eps1, eps2).  Incident wave: unit amplitude along lab axis 1.
    """
    w_vac, v_vac, _ = _medium(0.0, 1.0, 1.0)
    media = [(w_vac, v_vac, None)]
    for theta in angles:
        media.append(_medium(theta, eps1, eps2))
    media.append((w_vac, v_vac, None))

    s = (np.zeros((2, 2), dtype=complex), _I2.copy(), _I2.copy(), np.zeros((2, 2), dtype=complex))
    for idx in range(len(media) - 1):
        wl, vl, _ = media[idx]
        wr, vr, qr = media[idx + 1]
        s = _star(s, _interface(wl, vl, wr, vr))
        if idx + 1 < len(media) - 1:  # internal layer: propagate across it
            s = _star(s, _propagation(qr, xi))

    a_in = np.array([1.0, 0.0], dtype=complex)
    refl = s[0] @ a_in
    trans = s[2] @ a_in
    return trans[0], trans[1], refl[0], refl[1]


def stack_flux(angles, xi, eps1, eps2):
    t1, t2, r1, r2 = stack_amplitudes(angles, xi, eps1, eps2)
    return abs(t1) ** 2 + abs(t2) ** 2 + abs(r1) ** 2 + abs(r2) ** 2
