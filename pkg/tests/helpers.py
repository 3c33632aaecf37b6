"""Shared random-instance builders for the test suite."""

from __future__ import annotations

import numpy as np

from dgsim import oracle, state as st_mod, unitary as un_mod


def rand_antisym(rng, m, scale=1.0):
    h = rng.normal(size=(m, m)) * scale
    return (h - h.T) / 2


def rand_state(rng, n, scale=0.4):
    """Random mixed displaced Gaussian state via a thermal generator."""
    return st_mod.from_thermal(rand_antisym(rng, 2 * n), rng.normal(size=2 * n) * scale)


def rand_pure_state(rng, n, scale=0.5):
    """Random pure displaced Gaussian state: rotate the all-|0> state."""
    U = rand_unitary(rng, n, scale=scale)
    return un_mod.conjugate_state(U, st_mod.from_diagonal([1.0] * n))


def rand_unitary(rng, n, scale=0.5):
    h = rand_antisym(rng, 2 * n)
    return un_mod.DGUnitary.from_generator(n, h, rng.normal(size=2 * n) * scale)


def rand_gate(rng, n):
    kinds = ["matchgate", "line1"] + (["fswap"] if n > 1 else [])
    kind = kinds[rng.integers(len(kinds))]
    if kind == "fswap":
        return un_mod.Gate(un_mod.FSWAP, line=int(rng.integers(0, n - 1)))
    if kind == "line1":
        axes = sorted(int(a) for a in rng.choice([0, 1, 2 * n], size=2, replace=False))
        return un_mod.Gate(un_mod.LINE1, axes=tuple(axes), angle=float(rng.uniform(-3, 3)))
    start = 2 * int(rng.integers(0, n))
    win = [a for a in range(start, start + 4) if a < 2 * n]
    axes = sorted(int(a) for a in rng.choice(win, size=2, replace=False))
    return un_mod.Gate(un_mod.MATCHGATE, axes=tuple(axes), angle=float(rng.uniform(-3, 3)))


def rand_sequence(rng, n, count):
    return un_mod.GateSequence(n, tuple(rand_gate(rng, n) for _ in range(count)))


def rand_bloch(rng, pure=False):
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    if not pure:
        v *= rng.random() ** 0.5
    return v


def dense_product(blochs):
    out = np.eye(1, dtype=complex)
    for r in blochs:
        out = np.kron(
            out,
            0.5
            * (
                np.eye(2)
                + r[0] * oracle.PAULIS[1]
                + r[1] * oracle.PAULIS[2]
                + r[2] * oracle.PAULIS[3]
            ),
        )
    return out


def ghz4():
    """(|0000> + |1111>)/sqrt(2): even, pure, and not Gaussian."""
    g = np.zeros(16, dtype=complex)
    g[0] = g[15] = 1 / np.sqrt(2)
    return np.outer(g, g.conj())


def quartic_unitary():
    """exp(i pi/4 g0 g1 g2 g3) on 2 qubits: even but not Gaussian."""
    quart = oracle.majorana_monomial(2, (0, 1, 2, 3))
    return np.cos(np.pi / 4) * np.eye(4, dtype=complex) + 1j * np.sin(np.pi / 4) * quart
