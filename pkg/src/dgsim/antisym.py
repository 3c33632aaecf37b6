"""Numerical kernels for antisymmetric matrices.

Pfaffians, restrictions, canonical (block-diagonal) forms, matrix
exponentials into SO(m), and factorizations of special orthogonal
matrices into plane rotations restricted to an adjacency graph.

All indices are 0-based.  The canonical form of a real antisymmetric
matrix M is

    R @ M @ R.T = blkdiag([[0, l_0], [-l_0, 0]], ..., 0-block)

with ``R`` special orthogonal, the ``l_j`` sorted descending, and any
kernel routed to the trailing subspaces.  For even-dimensional
full-rank input with negative Pfaffian no such form exists with all
``l_j`` nonnegative and ``det R = +1`` simultaneously (the Pfaffian
sign is an SO-conjugation invariant); in that case the last ``l`` is
returned negative and ``det R = +1`` is kept.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import atan2, pi

import numpy as np
import scipy.linalg

ANTISYM_TOL = 1e-12
ORTHO_TOL = 1e-10


class DimensionError(ValueError):
    """Operation requires a different matrix dimension (e.g. even size)."""


class DecompositionError(RuntimeError):
    """A requested factorization does not exist for the given input."""


def check_antisymmetric(M, tol: float = ANTISYM_TOL) -> np.ndarray:
    """Validate and return ``M`` as a square antisymmetric ndarray."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    if M.size:
        scale = max(1.0, float(np.abs(M).max()))
        if np.abs(M + M.T).max() > tol * scale:
            raise ValueError("matrix is not antisymmetric within tolerance")
    return M


def check_rotation(R, tol: float = ORTHO_TOL) -> np.ndarray:
    """Validate and return ``R`` as a special orthogonal ndarray."""
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {R.shape}")
    m = R.shape[0]
    if np.abs(R.T @ R - np.eye(m)).max() > tol:
        raise ValueError("matrix is not orthogonal within tolerance")
    if abs(np.linalg.det(R) - 1.0) > max(tol, 1e-8):
        raise ValueError("matrix has determinant != +1")
    return R


def pfaffian(M) -> complex | float:
    """Pfaffian of an even-dimensional antisymmetric matrix.

    Skew-symmetric tridiagonalization with partial pivoting, O(m^3).
    Satisfies Pf(M)^2 = det(M).
    """
    M = check_antisymmetric(M)
    m = M.shape[0]
    if m % 2:
        raise DimensionError("Pfaffian requires even dimension")
    if m == 0:
        return 1.0
    A = M.astype(complex) if np.iscomplexobj(M) else M.astype(float)
    A = A.copy()
    val = 1.0 + 0j if np.iscomplexobj(A) else 1.0
    for k in range(0, m - 1, 2):
        kp = k + 1 + int(np.abs(A[k + 1:, k]).argmax())
        if kp != k + 1:
            A[[k + 1, kp]] = A[[kp, k + 1]]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            val = -val
        if A[k + 1, k] == 0.0:
            return 0.0
        val *= A[k, k + 1]
        if k + 2 < m:
            tau = A[k, k + 2:] / A[k, k + 1]
            col = A[k + 2:, k + 1]
            A[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return val


def pfaffian_reference(M) -> complex | float:
    """Pfaffian via the signed sum over perfect matchings.

    Factorial cost; intended as an independent cross-check for small
    matrices (m <= 8 keeps it instantaneous).
    """
    M = check_antisymmetric(M)
    m = M.shape[0]
    if m % 2:
        raise DimensionError("Pfaffian requires even dimension")

    def expand(indices):
        if not indices:
            return 1.0
        a = indices[0]
        total = 0.0
        for pos in range(1, len(indices)):
            b = indices[pos]
            rest = indices[1:pos] + indices[pos + 1:]
            sign = -1.0 if pos % 2 == 0 else 1.0
            total += sign * M[a, b] * expand(rest)
        return total

    return expand(tuple(range(m)))


def pfaffian_restricted(M, J) -> complex | float:
    """Pfaffian of the restriction of ``M`` to the index tuple ``J``.

    ``J`` must be strictly increasing with an even number of entries;
    the empty restriction has Pfaffian 1.
    """
    M = check_antisymmetric(M)
    J = tuple(int(j) for j in J)
    if len(J) % 2:
        raise DimensionError("restriction must have even size")
    if any(b <= a for a, b in zip(J, J[1:])):
        raise IndexError("restriction indices must be strictly increasing")
    if J and (J[0] < 0 or J[-1] >= M.shape[0]):
        raise IndexError("restriction index out of range")
    if not J:
        return 1.0
    return pfaffian(M[np.ix_(J, J)])


def pfaffian_all_restrictions(M) -> np.ndarray:
    """Pfaffians of every even-sized restriction of ``M`` at once.

    Returns an array ``pf`` of length ``2**m`` with ``pf[mask]`` the
    Pfaffian of the restriction to the set bits of ``mask`` (masks of
    odd popcount hold 0, the empty mask holds 1).  Dynamic program over
    the first-row expansion, O(2^m * m); used to evaluate all moments
    of a Gaussian state in one pass.
    """
    M = check_antisymmetric(M)
    m = M.shape[0]
    if m > 20:
        raise DimensionError("all-restrictions table limited to m <= 20")
    dtype = complex if np.iscomplexobj(M) else float
    pf = np.zeros(1 << m, dtype=dtype)
    pf[0] = 1.0
    for mask in range(1, 1 << m):
        bits = [j for j in range(m) if mask >> j & 1]
        if len(bits) % 2:
            continue
        a = bits[0]
        acc = 0.0
        sign = 1.0
        for b in bits[1:]:
            acc += sign * M[a, b] * pf[mask & ~(1 << a) & ~(1 << b)]
            sign = -sign
        pf[mask] = acc
    return pf


def _real_planes(M, vecs):
    """Real orthonormal row pairs from positive-eigenvalue eigenvectors."""
    rows = []
    for v in vecs:
        x = np.sqrt(2.0) * v.real
        y = np.sqrt(2.0) * v.imag
        rows.append(y)
        rows.append(x)
    return rows


def block_diagonalize(M, tol: float = 1e-10):
    """Canonical form of a real antisymmetric matrix.

    Returns ``(R, lambdas)`` with ``R`` special orthogonal such that
    ``R @ M @ R.T`` is block diagonal with blocks
    ``[[0, l], [-l, 0]]`` in descending order of ``l`` and the kernel
    (a single zero row/column for odd dimension) in the trailing
    subspaces.  See the module docstring for the one case where the
    last ``l`` comes out negative.
    """
    M = check_antisymmetric(np.asarray(M, dtype=float))
    m = M.shape[0]
    if m == 0:
        return np.eye(0), []
    scale = max(1.0, float(np.abs(M).max()))
    w, V = np.linalg.eigh(1j * M)
    pos = [(w[i], V[:, i]) for i in range(m) if w[i] > tol * scale]
    pos.sort(key=lambda p: -p[0])
    lambdas = [float(val) for val, _ in pos]
    rows = _real_planes(M, [v for _, v in pos])
    # Kernel: real orthonormal completion of the plane rows.
    k = m - len(rows)
    if k:
        basis = np.array(rows) if rows else np.zeros((0, m))
        proj = np.eye(m) - basis.T @ basis
        u, s, _ = np.linalg.svd(proj)
        rows.extend(u[:, i] for i in range(k))
    R = np.array(rows)
    if np.linalg.det(R) < 0:
        if k:
            R[-1] = -R[-1]
        else:
            # Flip the weakest plane; its block parameter changes sign.
            R[[-2, -1]] = R[[-1, -2]]
            lambdas[-1] = -lambdas[-1]
    return R, lambdas


def canonical_matrix(lambdas, dim: int) -> np.ndarray:
    """Assemble the block-diagonal canonical form for given parameters."""
    C = np.zeros((dim, dim))
    for j, lam in enumerate(lambdas):
        C[2 * j, 2 * j + 1] = lam
        C[2 * j + 1, 2 * j] = -lam
    return C


def expm_antisym(h) -> np.ndarray:
    """Matrix exponential of a real antisymmetric matrix (lands in SO)."""
    h = check_antisymmetric(np.asarray(h, dtype=float))
    return scipy.linalg.expm(h)


@dataclass(frozen=True)
class PlaneRotation:
    """Rotation by ``angle`` in the coordinate plane spanned by two axes."""

    axes: tuple[int, int]
    angle: float

    def __post_init__(self):
        j, k = self.axes
        if j == k:
            raise ValueError("plane rotation needs two distinct axes")
        a = self.angle
        a = atan2(np.sin(a), np.cos(a))
        if a <= -pi:
            a = pi
        object.__setattr__(self, "angle", float(a))

    def matrix(self, dim: int) -> np.ndarray:
        return plane_rotation_matrix(dim, self.axes[0], self.axes[1], self.angle)


def plane_rotation_matrix(dim: int, j: int, k: int, angle: float) -> np.ndarray:
    """exp(angle * s_jk) with s_jk = |j><k| - |k><j|."""
    R = np.eye(dim)
    c, s = np.cos(angle), np.sin(angle)
    R[j, j] = c
    R[k, k] = c
    R[j, k] = s
    R[k, j] = -s
    return R


def _spanning_tree(m: int, adjacency) -> dict[int, list[int]]:
    """BFS spanning tree of the adjacency graph; raises if disconnected."""
    neighbors: dict[int, list[int]] = {v: [] for v in range(m)}
    for j in range(m):
        for k in range(j + 1, m):
            if adjacency(j, k) or adjacency(k, j):
                neighbors[j].append(k)
                neighbors[k].append(j)
    tree: dict[int, list[int]] = {v: [] for v in range(m)}
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for v in frontier:
            for u in neighbors[v]:
                if u not in seen:
                    seen.add(u)
                    tree[v].append(u)
                    tree[u].append(v)
                    nxt.append(u)
        frontier = nxt
    if len(seen) != m:
        raise DecompositionError("adjacency graph is disconnected")
    return tree


def plane_decompose(R, adjacency) -> list[PlaneRotation]:
    """Factor a special orthogonal matrix into allowed plane rotations.

    ``adjacency(j, k)`` says whether a rotation in the (j, k) plane is
    allowed; the allowed pairs must form a connected graph.  The
    returned rotations satisfy, with ``acc`` starting at the identity
    and updated as ``acc = rot.matrix(m) @ acc`` in list order,
    ``acc == R``.  At most one rotation per (column, row) pair plus one
    sign fix per column is emitted: count <= m^2 (well under the
    documented C * m^3 envelope with C = 1).
    """
    R = check_rotation(R)
    m = R.shape[0]
    tree = _spanning_tree(m, adjacency)
    A = R.copy()
    applied: list[PlaneRotation] = []

    def rotate(a: int, b: int, angle: float):
        """Left-multiply A by the (a, b) plane rotation."""
        c, s = np.cos(angle), np.sin(angle)
        ra, rb = A[a].copy(), A[b].copy()
        A[a] = c * ra + s * rb
        A[b] = -s * ra + c * rb
        applied.append(PlaneRotation((a, b), angle))

    remaining = set(range(m))
    order: list[int] = []
    work = {v: set(n) for v, n in tree.items()}
    while len(order) < m - 1:
        leaf = next(v for v in sorted(work) if len(work[v]) == 1)
        order.append(leaf)
        (p,) = work[leaf]
        work[p].discard(leaf)
        del work[leaf]

    for c in order:
        # BFS from c over the remaining vertices: parent = next hop to c.
        parent = {c: None}
        depth = {c: 0}
        frontier = [c]
        while frontier:
            nxt = []
            for v in frontier:
                for u in tree[v]:
                    if u in remaining and u not in parent:
                        parent[u] = v
                        depth[u] = depth[v] + 1
                        nxt.append(u)
            frontier = nxt
        for r in sorted(parent, key=lambda v: -depth[v]):
            if r == c:
                continue
            if abs(A[r, c]) < 1e-15:
                continue
            p = parent[r]
            rotate(p, r, atan2(A[r, c], A[p, c]))
        if A[c, c] < 0:
            u = min(v for v in tree[c] if v in remaining and v != c)
            rotate(c, u, pi)
        remaining.discard(c)

    result = [PlaneRotation(g.axes, -g.angle) for g in reversed(applied)]
    return [g for g in result if abs(g.angle) > 1e-15]
