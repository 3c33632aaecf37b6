"""Exact dense reference implementation at small qubit counts.

Everything here is brute force on 2^n x 2^n complex matrices: Majorana
operators, Majorana moments, quadratic-Hamiltonian exponentials, the
convolution and embedding unitaries, fermionic swaps, Born
probabilities, and a moment-based Gaussianity check.  It exists to
validate the polynomial-time covariance-matrix paths, so sizes are
hard-capped (n <= 6 for single-register operators, n <= 4 for the
2n-qubit convolution/Choi constructions).

Index conventions are 0-based throughout: Majorana operator 2q acts as
X on qubit line q behind a Z string, operator 2q+1 acts as Y.  With
this convention i*gamma_0*gamma_1 = -Z on line 0, so a state with
<Z_q> = z carries covariance entry M[2q, 2q+1] = -z.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .antisym import check_antisymmetric, pfaffian_all_restrictions

ORACLE_MAX_QUBITS = 6
ORACLE_MAX_PAIRED = 4


class OracleCapError(ValueError):
    """Requested size exceeds the dense-oracle hard limit."""


def _check_cap(n: int, limit: int = ORACLE_MAX_QUBITS):
    if not 1 <= n:
        raise ValueError("qubit count must be positive")
    if n > limit:
        raise OracleCapError(f"dense oracle capped at {limit} qubits, got {n}")


PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# Single-qubit Pauli products: sigma_a sigma_b = _MUL_PHASE[a][b] * sigma_{_MUL_CODE[a][b]}
_MUL_CODE = np.zeros((4, 4), dtype=int)
_MUL_PHASE = np.zeros((4, 4), dtype=complex)
for _a in range(4):
    for _b in range(4):
        _prod = PAULIS[_a] @ PAULIS[_b]
        for _c in range(4):
            _tr = np.trace(PAULIS[_c].conj().T @ _prod) / 2
            if abs(_tr) > 0.5:
                _MUL_CODE[_a, _b] = _c
                _MUL_PHASE[_a, _b] = complex(_tr)
                break


def _pauli_string_dense(codes) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for c in codes:
        out = np.kron(out, PAULIS[c])
    return out


def _majorana_codes(n: int, a: int) -> tuple[int, ...]:
    """Pauli-string codes of Majorana operator ``a`` on ``n`` lines."""
    if not 0 <= a < 2 * n:
        raise IndexError(f"Majorana index {a} out of range for n={n}")
    q = a // 2
    return (3,) * q + (1 if a % 2 == 0 else 2,) + (0,) * (n - q - 1)


def majorana(n: int, a: int) -> np.ndarray:
    """Dense Majorana operator: Z-string, then X (even a) or Y (odd a)."""
    _check_cap(n, 2 * ORACLE_MAX_PAIRED)
    return _pauli_string_dense(_majorana_codes(n, a))


def monomial_string(n: int, J) -> tuple[complex, tuple[int, ...]]:
    """Ordered Majorana product gamma_J as (phase, Pauli-string codes)."""
    codes = [0] * n
    phase = 1.0 + 0j
    prev = -1
    for a in J:
        if a <= prev:
            raise IndexError("monomial indices must be strictly increasing")
        prev = a
        for q, c in enumerate(_majorana_codes(n, a)):
            if c:
                phase *= _MUL_PHASE[codes[q], c]
                codes[q] = int(_MUL_CODE[codes[q], c])
    return phase, tuple(codes)


def majorana_monomial(n: int, J) -> np.ndarray:
    """Dense ordered product gamma_J."""
    phase, codes = monomial_string(n, J)
    return phase * _pauli_string_dense(codes)


def pauli_tensor(A: np.ndarray) -> np.ndarray:
    """Coefficients c with A = sum_P c[P] * P over Pauli strings P.

    Returns an array of shape (4,)*n indexed by per-line Pauli codes.
    Recursive block transform, O(n 4^n).
    """
    dim = A.shape[0]
    if dim == 1:
        return A.reshape(())
    h = dim // 2
    blocks = (A[:h, :h], A[:h, h:], A[h:, :h], A[h:, h:])
    comps = (
        (blocks[0] + blocks[3]) / 2,          # I
        (blocks[1] + blocks[2]) / 2,          # X
        1j * (blocks[1] - blocks[2]) / 2,     # Y
        (blocks[0] - blocks[3]) / 2,          # Z
    )
    return np.stack([pauli_tensor(c) for c in comps])


def from_pauli_tensor(C: np.ndarray) -> np.ndarray:
    """Inverse of :func:`pauli_tensor`."""
    if C.ndim == 0:
        return C.reshape(1, 1)
    return sum(np.kron(PAULIS[p], from_pauli_tensor(C[p])) for p in range(4))


class MomentTable:
    """All Majorana moments A_J = Tr(gamma_J^dag A) of an n-line operator.

    Stored as a complex array of length 4^n indexed by the bitmask of J
    over the 2n Majorana indices.
    """

    def __init__(self, n: int, values: np.ndarray):
        self.n = n
        self.values = values

    def __getitem__(self, J) -> complex:
        mask = 0
        for a in J:
            bit = 1 << int(a)
            if not 0 <= int(a) < 2 * self.n or mask & bit:
                raise IndexError(f"bad moment index tuple {tuple(J)}")
            mask |= bit
        return complex(self.values[mask])

    def items(self):
        for mask in range(len(self.values)):
            J = tuple(a for a in range(2 * self.n) if mask >> a & 1)
            yield J, complex(self.values[mask])


def moments(A: np.ndarray) -> MomentTable:
    """Moment table of a dense operator via its Pauli coefficients."""
    n = int(A.shape[0]).bit_length() - 1
    if A.shape != (1 << n, 1 << n):
        raise ValueError("operator dimension is not a power of two")
    C = pauli_tensor(A).reshape(-1)
    # Monomial string/phase for every subset, reusing the subset without
    # its top Majorana index (already computed earlier in the scan).
    nmaj = 2 * n
    strides = 4 ** np.arange(n - 1, -1, -1)
    codes = np.zeros((1 << nmaj, n), dtype=int)
    phases = np.zeros(1 << nmaj, dtype=complex)
    phases[0] = 1.0
    values = np.zeros(1 << nmaj, dtype=complex)
    values[0] = np.trace(A)
    for mask in range(1, 1 << nmaj):
        top = mask.bit_length() - 1
        rest = mask & ~(1 << top)
        cs = codes[rest].copy()
        ph = phases[rest]
        for q, c in enumerate(_majorana_codes(n, top)):
            if c:
                ph *= _MUL_PHASE[cs[q], c]
                cs[q] = _MUL_CODE[cs[q], c]
        codes[mask] = cs
        phases[mask] = ph
        # A_J = conj(phase) * Tr(P A) = conj(phase) * 2^n * c_P
        values[mask] = np.conj(ph) * (1 << n) * C[int(cs @ strides)]
    return MomentTable(n, values)


def wick_moment_array(M_ext: np.ndarray) -> np.ndarray:
    """Moments of the displaced Gaussian with real extended carrier M_ext.

    ``M_ext`` is (2n+1)x(2n+1) real antisymmetric holding the covariance
    block M and mean column mu (extended covariance = i * M_ext).
    Returns the length-4^n moment array in MomentTable layout.
    """
    M_ext = check_antisymmetric(np.asarray(M_ext, dtype=float))
    m = M_ext.shape[0]
    if m % 2 == 0:
        raise ValueError("extended carrier must have odd dimension")
    nmaj = m - 1
    pf = pfaffian_all_restrictions(M_ext)
    out = np.zeros(1 << nmaj, dtype=complex)
    ext_bit = 1 << nmaj
    for mask in range(1 << nmaj):
        size = bin(mask).count("1")
        if size % 2 == 0:
            out[mask] = (1j) ** (size // 2) * pf[mask]
        else:
            out[mask] = -1j * (1j) ** ((size + 1) // 2) * pf[mask | ext_bit]
    return out


def gaussian_dense(M_ext: np.ndarray) -> np.ndarray:
    """Dense displaced Gaussian state from its real extended carrier.

    Assembles rho = 2^{-n} sum_J rho_J gamma_J through the Pauli
    coefficient tensor (O(n 4^n) instead of summing dense monomials).
    """
    nmaj = M_ext.shape[0] - 1
    n = nmaj // 2
    _check_cap(n, 2 * ORACLE_MAX_PAIRED)
    vals = wick_moment_array(M_ext)
    strides = 4 ** np.arange(n - 1, -1, -1)
    C = np.zeros(1 << (2 * n), dtype=complex)
    for mask in range(1 << nmaj):
        J = [a for a in range(nmaj) if mask >> a & 1]
        ph, cs = monomial_string(n, J)
        C[int(np.array(cs) @ strides)] += vals[mask] * ph / (1 << n)
    return from_pauli_tensor(C.reshape((4,) * n))


def covariance_from_dense(A: np.ndarray) -> np.ndarray:
    """Real extended carrier (M and mu) read off a dense state's moments."""
    table = moments(A)
    nmaj = 2 * table.n
    M_ext = np.zeros((nmaj + 1, nmaj + 1))
    for j in range(nmaj):
        mu = table[(j,)]
        M_ext[j, nmaj] = mu.real
        M_ext[nmaj, j] = -mu.real
        for k in range(j + 1, nmaj):
            # rho_{(j,k)} = i M_{jk}
            M_ext[j, k] = table[(j, k)].imag
            M_ext[k, j] = -M_ext[j, k]
    return M_ext


def is_gaussian(A: np.ndarray, tol: float = 1e-7) -> tuple[bool, float]:
    """Moment-based Gaussianity check for a dense state.

    Declares A (displaced) Gaussian iff every Majorana moment matches
    the Wick reconstruction from A's own first and second moments.
    Returns (verdict, max deviation).
    """
    table = moments(A)
    wick = wick_moment_array(covariance_from_dense(A))
    dev = float(np.abs(table.values - wick).max())
    return dev <= tol, dev


def exp_quadratic(n: int, h, d) -> np.ndarray:
    """Dense displaced Gaussian unitary exp(1/2 gamma^T h gamma + i d^T gamma)."""
    _check_cap(n, 2 * ORACLE_MAX_PAIRED)
    h = check_antisymmetric(np.asarray(h, dtype=float))
    d = np.asarray(d, dtype=float)
    if h.shape != (2 * n, 2 * n) or d.shape != (2 * n,):
        raise ValueError("generator dimensions do not match n")
    H = np.zeros((1 << n, 1 << n), dtype=complex)
    gammas = [majorana(n, a) for a in range(2 * n)]
    for j in range(2 * n):
        if d[j]:
            H += 1j * d[j] * gammas[j]
        for k in range(j + 1, 2 * n):
            if h[j, k]:
                H += h[j, k] * (gammas[j] @ gammas[k])
    return scipy.linalg.expm(H)


def conv_unitary(n: int) -> np.ndarray:
    """Convolution (beamsplitter) unitary W on 2n lines.

    W conjugates each Majorana pair (gamma_a, gamma_{2n+a}) by a 45-degree
    plane rotation, i.e. gamma_a -> (gamma_a - gamma_{2n+a})/sqrt(2), the
    50/50 beamsplitter that underlies the convolution-based Gaussianity
    test.  Since conjugation by exp(theta g_j g_k) rotates the plane by
    angle 2*theta, the generator coefficient is pi/8 per pair.  (With a
    pi/4 coefficient the conjugation is a full 90-degree transfer, the
    convolution degenerates to a register swap, and the state test
    accepts everything; that reading is rejected by the dense
    counterexamples in the test suite.)
    """
    _check_cap(n, ORACLE_MAX_PAIRED)
    h = np.zeros((4 * n, 4 * n))
    for a in range(2 * n):
        h[a, 2 * n + a] = np.pi / 8
        h[2 * n + a, a] = -np.pi / 8
    return exp_quadratic(2 * n, h, np.zeros(4 * n))


def is_even(A: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff A commutes with the total parity operator Z...Z."""
    n = int(A.shape[0]).bit_length() - 1
    par = _pauli_string_dense((3,) * n)
    return bool(np.abs(par @ A @ par - A).max() <= tol * max(1.0, np.abs(A).max()))


def check_state(A: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate Hermiticity, unit trace, and positive semidefiniteness."""
    A = np.asarray(A, dtype=complex)
    if np.abs(A - A.conj().T).max() > tol:
        raise ValueError("state is not Hermitian")
    if abs(np.trace(A) - 1.0) > tol:
        raise ValueError("state trace is not 1")
    if np.linalg.eigvalsh(A).min() < -1e-9:
        raise ValueError("state has a negative eigenvalue")
    return A


def partial_trace_second(A: np.ndarray, n_keep: int) -> np.ndarray:
    """Trace out all lines after the first ``n_keep``."""
    dim = A.shape[0]
    dk = 1 << n_keep
    dt = dim // dk
    return np.einsum("ikjk->ij", A.reshape(dk, dt, dk, dt))


def fermionic_convolution(rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Even-state convolution Tr_2[W (rho tensor sigma) W^dag]."""
    n = int(rho.shape[0]).bit_length() - 1
    _check_cap(n, ORACLE_MAX_PAIRED)
    if rho.shape != sigma.shape:
        raise ValueError("convolution inputs must have equal dimension")
    for name, op in (("rho", rho), ("sigma", sigma)):
        if not is_even(op):
            raise ValueError(f"{name} is not an even operator")
    W = conv_unitary(n)
    joint = W @ np.kron(rho, sigma) @ W.conj().T
    return partial_trace_second(joint, n)


def fswap(n: int, a: int, b: int) -> np.ndarray:
    """Dense fermionic swap of lines a and b (0-based, a < b).

    Adjacent swaps come from the four-term quadratic exponent
    (pi/4)(g_p g_s - g_q g_r - g_p g_q - g_r g_s) over the Majorana
    quadruple (p,q,r,s) = (2a, 2a+1, 2a+2, 2a+3); non-adjacent swaps
    are built by conjugation with adjacent ones.
    """
    if not 0 <= a < b < n:
        raise ValueError("need 0 <= a < b < n")
    if b > a + 1:
        S1 = fswap(n, a, a + 1)
        return S1 @ fswap(n, a + 1, b) @ S1
    h = np.zeros((2 * n, 2 * n))
    p, q, r, s = 2 * a, 2 * a + 1, 2 * a + 2, 2 * a + 3
    for (j, k), c in (((p, s), np.pi / 4), ((q, r), -np.pi / 4),
                      ((p, q), -np.pi / 4), ((r, s), -np.pi / 4)):
        h[j, k] = c
        h[k, j] = -c
    return exp_quadratic(n, h, np.zeros(2 * n))


def embed_V(n: int) -> np.ndarray:
    """Embedding unitary exp(-i (pi/4) gamma_{2n+1}) on n+1 lines (0-based index)."""
    _check_cap(n + 1, 2 * ORACLE_MAX_PAIRED)
    return scipy.linalg.expm(-1j * (np.pi / 4) * majorana(n + 1, 2 * n + 1))


def max_entangled(n: int) -> np.ndarray:
    """Dense fermionic maximally entangled state on 2n lines.

    Pure even Gaussian state whose covariance pairs Majorana subspace a
    with subspace 2n+a; assembled from that covariance through the Wick
    expansion.  The coupling sign is pinned by positivity of the dense
    matrix (the opposite sign gives an operator with negative
    eigenvalues) and by the Choi-state Gaussianity test for the
    identity unitary.
    """
    _check_cap(n, ORACLE_MAX_PAIRED)
    m = 4 * n
    M_ext = np.zeros((m + 1, m + 1))
    for a in range(2 * n):
        M_ext[a, 2 * n + a] = -1.0
        M_ext[2 * n + a, a] = 1.0
    return gaussian_dense(M_ext)


def born_probability(rho: np.ndarray, K, x) -> float:
    """Probability of outcome bits x on lines K, computed densely."""
    n = int(rho.shape[0]).bit_length() - 1
    K = tuple(int(k) for k in K)
    x = tuple(int(b) for b in x)
    if len(K) != len(x):
        raise ValueError("line subset and bitstring lengths differ")
    diag = np.ones(1 << n)
    for line, bit in zip(K, x):
        if not 0 <= line < n:
            raise IndexError(f"line {line} out of range")
        z = (np.arange(1 << n) >> (n - 1 - line)) & 1
        diag *= (z == bit)
    return float(np.real(np.sum(diag * np.diag(rho))))


def phase_aligned_distance(U: np.ndarray, V: np.ndarray) -> float:
    """Max-entry distance between U and V after optimal global-phase alignment."""
    tr = np.trace(U.conj().T @ V)
    phase = tr / abs(tr) if abs(tr) > 1e-12 else 1.0
    return float(np.abs(U * phase - V).max())
