"""Loop-based re-implementation of the lattice energy, summing sites in a
scrambled order.  Shares no code with the vectorised module."""

import numpy as np


def _sqrt_and_inverse(h):
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (v * np.sqrt(w)) @ v.conj().T, (v / np.sqrt(w)) @ v.conj().T


def oracle_energy(alpha, phi, h, spacing, flux=None, full=False, seed=0):
    N, n = phi.shape[0], phi.shape[-1]
    a = spacing
    roots = {}
    for i in range(N):
        for j in range(N):
            roots[i, j] = _sqrt_and_inverse(h[i, j])

    def W(m, i, j):
        g, _ = roots[i, j]
        di, dj = (1, 0) if m == 0 else (0, 1)
        _, ginv = roots[(i + di) % N, (j + dj) % N]
        return g @ (np.eye(n) + a * alpha[m, i, j]) @ ginv

    def psi(i, j):
        g, ginv = roots[i, j]
        return g @ phi[i, j] @ ginv

    order = np.random.default_rng(seed).permutation(N * N)
    total = 0.0
    for k in order:
        i, j = divmod(int(k), N)
        mu = np.zeros((n, n), complex) if flux is None else np.diag(flux).astype(complex)
        for m in range(2):
            di, dj = (1, 0) if m == 0 else (0, 1)
            w_out = W(m, i, j)
            w_in = W(m, (i - di) % N, (j - dj) % N)
            mu += (w_out @ w_out.conj().T - w_in.conj().T @ w_in) / a**2
        p = psi(i, j)
        mu += p @ p.conj().T - p.conj().T @ p
        total += a * a * np.sum(np.abs(mu) ** 2)
        if full:
            for m in range(2):
                di, dj = (1, 0) if m == 0 else (0, 1)
                w = W(m, i, j)
                D = (w @ psi((i + di) % N, (j + dj) % N) - p @ w) / a
                total += a * a * np.sum(np.abs(D) ** 2)
    return total
