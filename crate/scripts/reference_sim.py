#!/usr/bin/env python3
"""Independent NumPy implementation of the stochastic attitude filter on the
built-in benchmark scenario.

This script exists to cross-check the Rust implementation with a second,
independently written realization of the same update laws. The steady-state
mean attitude distance it reports is the reference value frozen into
`crates/so3-filter/tests/acceptance.rs` (REFERENCE_STEADY_MEAN_DIST); the
acceptance suite requires the Rust build to land within 20% of it.

Usage: python3 scripts/reference_sim.py

Requires numpy. Runs 100 trials of the 10 s benchmark at dt = 1 ms,
vectorized across trials (~30 s).
"""
import numpy as np


def hat(w):
    """(N,3) -> (N,3,3) skew-symmetric matrices."""
    n = w.shape[0]
    m = np.zeros((n, 3, 3))
    m[:, 0, 1] = -w[:, 2]
    m[:, 0, 2] = w[:, 1]
    m[:, 1, 0] = w[:, 2]
    m[:, 1, 2] = -w[:, 0]
    m[:, 2, 0] = -w[:, 1]
    m[:, 2, 1] = w[:, 0]
    return m


def expm(w):
    """(N,3) rotation vectors -> (N,3,3) rotation matrices."""
    th = np.linalg.norm(w, axis=1)
    small = th < 1e-8
    a = np.empty_like(th)
    b = np.empty_like(th)
    ths = th[~small]
    a[~small] = np.sin(ths) / ths
    b[~small] = (1.0 - np.cos(ths)) / ths**2
    a[small] = 1.0 - th[small] ** 2 / 6.0
    b[small] = 0.5 - th[small] ** 2 / 24.0
    k = hat(w)
    k2 = np.einsum("nij,njk->nik", k, k)
    return np.eye(3)[None, :, :] + a[:, None, None] * k + b[:, None, None] * k2


def reorth(r):
    u, _, vt = np.linalg.svd(r)
    return np.einsum("nij,njk->nik", u, vt)


def normalize(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def omega_true(t):
    return np.array(
        [np.sin(0.7 * t), 0.7 * np.sin(0.5 * t + np.pi), 0.5 * np.sin(0.3 * t + np.pi / 3.0)]
    )


def angle_axis(alpha, u):
    u = u / np.linalg.norm(u)
    k = hat(u[None, :])[0]
    return np.eye(3) + np.sin(alpha) * k + (1.0 - np.cos(alpha)) * (k @ k)


# benchmark scenario constants (matching sim::paper_scenario)
UPS_I1 = np.array([1.0, -1.0, 1.0]) / np.sqrt(3.0)
UPS_I2 = np.array([0.0, 0.0, 1.0])
UPS_I3 = normalize(np.cross(UPS_I1, UPS_I2))
BODY_BIAS = [0.1 * np.array([-1.0, 1.0, 0.5]), 0.1 * np.array([0.0, 0.0, 1.0])]
BODY_STD = 0.2
GYRO_BIAS = 0.2 * np.array([1.0, -1.0, 1.0])
Q_DIAG = 0.2
GAMMA, K_B, K_S, K_W, EPS = 1.0, 0.5, 0.5, 5.0, 0.5

M_I = np.outer(UPS_I1, UPS_I1) + np.outer(UPS_I2, UPS_I2) + np.outer(UPS_I3, UPS_I3)
M_INV = np.linalg.inv(M_I)
LAM = np.min(np.linalg.eigvalsh(3.0 * np.eye(3) - M_I))
R_HAT0 = angle_axis(np.deg2rad(179.0), np.array([1.0, 5.0, 3.0]))


def run_batch(n_trials, seed, duration=10.0, dt=1e-3):
    rng = np.random.default_rng(seed)
    nsteps = int(round(duration / dt))
    r = np.tile(np.eye(3), (n_trials, 1, 1))
    rh = np.tile(R_HAT0, (n_trials, 1, 1))
    bh = np.zeros((n_trials, 3))
    sh = np.zeros((n_trials, 3))
    ecl = np.zeros((n_trials, nsteps + 1))

    def log(k):
        tr = np.trace(np.einsum("nij,nkj->nik", r, rh), axis1=1, axis2=2)
        ecl[:, k] = 0.25 * (3.0 - tr)

    log(0)
    for k in range(nsteps):
        t = k * dt
        om = omega_true(t)
        om_m = om + GYRO_BIAS + Q_DIAG * rng.standard_normal((n_trials, 3)) / np.sqrt(dt)

        vb1 = np.einsum("nji,j->ni", r, UPS_I1) + BODY_BIAS[0] + BODY_STD * rng.standard_normal((n_trials, 3))
        vb2 = np.einsum("nji,j->ni", r, UPS_I2) + BODY_BIAS[1] + BODY_STD * rng.standard_normal((n_trials, 3))
        u1, u2 = normalize(vb1), normalize(vb2)
        u3 = normalize(np.cross(u1, u2))
        uh1 = np.einsum("nji,j->ni", rh, UPS_I1)
        uh2 = np.einsum("nji,j->ni", rh, UPS_I2)
        uh3 = np.einsum("nji,j->ni", rh, UPS_I3)

        c = 0.5 * (np.cross(u1, uh1) + np.cross(u2, uh2) + np.cross(u3, uh3))
        phi = np.einsum("nij,nj->ni", rh, c)
        s = (
            np.einsum("ni,nj->nij", uh1, u1)
            + np.einsum("ni,nj->nij", uh2, u2)
            + np.einsum("ni,nj->nij", uh3, u3)
        )
        d = np.einsum("nij,njk,nlk->nil", rh, s, rh)
        dist = 0.75 - 0.25 * np.trace(d, axis1=1, axis2=2)
        u = 1.0 + np.einsum("ij,nji->n", M_INV, d)

        rhtphi = np.einsum("nji,nj->ni", rh, phi)
        gain = (K_W / (EPS * LAM)) * (u**2 * LAM**2 + 1.0) / u
        w = gain[:, None] * phi + np.einsum("nij,nj->ni", rh, rhtphi * sh) / (LAM * u[:, None])
        rate_b = -GAMMA * dist[:, None] * rhtphi - GAMMA * K_B * bh
        rate_s = (GAMMA * dist / (LAM * u))[:, None] * rhtphi**2 - GAMMA * K_S * sh

        rh = np.einsum("nij,njk,nkl->nil", expm(w * dt), rh, expm((om_m - bh) * dt))
        bh = bh + dt * rate_b
        sh = sh + dt * rate_s
        r = np.einsum("nij,jk->nik", r, expm((om * dt)[None, :])[0])
        if (k + 1) % 200 == 0:
            r, rh = reorth(r), reorth(rh)
        log(k + 1)
    return ecl


def main():
    duration, dt, trials = 10.0, 1e-3, 100
    nsteps = int(round(duration / dt))
    window = slice(int(0.8 * nsteps), nsteps + 1)

    tr0 = np.trace(R_HAT0.T)
    print(f"initial attitude distance: {0.25 * (3.0 - tr0):.6f}")
    print(f"min singular value of the alignment complement: {LAM:.12f}")

    ecl = run_batch(trials, 2026, duration, dt)
    per_trial = ecl[:, window].mean(axis=1)
    print(f"steady-state mean dist over {trials} trials: {per_trial.mean():.6f}")
    print(f"per-trial steady means: [{per_trial.min():.5f}, {per_trial.max():.5f}]")
    print(f"worst per-trial minimum dist: {ecl.min(axis=1).max():.6f}")


if __name__ == "__main__":
    main()
