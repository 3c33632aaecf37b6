"""Displaced Gaussian states as covariance data (M, mu).

A state is stored through the real carrier of its extended covariance
matrix: Sigma = i*M with M real antisymmetric 2n x 2n, and mean vector
mu with mu_j = Tr(gamma_j rho).  The extended carrier

    M_ext = [[M, mu], [-mu^T, 0]]        ((2n+1) x (2n+1), real)

packs both; the complex extended covariance is i*M_ext.  Sign
convention (fixed by the literal Jordan-Wigner form in the dense
oracle): a product state with <Z_q> = z_q has M[2q, 2q+1] = -z_q.

Admissibility: the canonical values of M_ext must satisfy lambda <= 1;
pure states have every nonzero canonical value equal to 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .antisym import block_diagonalize, check_antisymmetric, pfaffian_restricted

ADMISSIBILITY_TOL = 1e-9
PURITY_TOL = 1e-7
SATURATION_TOL = 1e-9


class AdmissibilityError(ValueError):
    """Covariance data does not describe a quantum state."""


class SaturationError(ValueError):
    """Thermal parameters diverge because some modes are (nearly) pure."""

    def __init__(self, modes):
        self.modes = tuple(modes)
        super().__init__(
            f"thermal generator saturates: modes {self.modes} are pure "
            "within tolerance (arctanh diverges)"
        )


def validate(M_ext, tol: float = ADMISSIBILITY_TOL):
    """Check a real extended carrier for admissibility.

    Returns (valid, pure, lambdas) where lambdas are the canonical
    values of M_ext sorted descending.  Valid iff all lambdas <= 1+tol;
    pure iff additionally every nonzero lambda equals 1 within 1e-7.
    The matrix rank (2 * number of nonzero lambdas) is implied by the
    returned list but deliberately not enforced.
    """
    M_ext = check_antisymmetric(np.asarray(M_ext, dtype=float))
    if M_ext.shape[0] % 2 == 0:
        raise ValueError("extended carrier must have odd dimension")
    _, lambdas = block_diagonalize(M_ext)
    valid = all(lam <= 1.0 + tol for lam in lambdas)
    pure = valid and all(abs(lam - 1.0) <= PURITY_TOL for lam in lambdas)
    return valid, pure, lambdas


@dataclass(frozen=True)
class DGaussState:
    """Displaced Gaussian state (n, M, mu); immutable after construction."""

    n: int
    M: np.ndarray
    mu: np.ndarray
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        M = check_antisymmetric(np.asarray(self.M, dtype=float))
        mu = np.asarray(self.mu, dtype=float)
        if M.shape != (2 * self.n, 2 * self.n) or mu.shape != (2 * self.n,):
            raise ValueError("covariance dimensions do not match n")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "mu", mu)
        if self.check:
            valid, _, lambdas = validate(self.M_ext)
            if not valid:
                raise AdmissibilityError(
                    f"canonical values exceed 1: {[l for l in lambdas if l > 1 + ADMISSIBILITY_TOL]}"
                )

    @property
    def M_ext(self) -> np.ndarray:
        m = 2 * self.n
        out = np.zeros((m + 1, m + 1))
        out[:m, :m] = self.M
        out[:m, m] = self.mu
        out[m, :m] = -self.mu
        return out

    @property
    def is_even(self) -> bool:
        return bool(np.abs(self.mu).max(initial=0.0) < 1e-12)

    def canonical_lambdas(self) -> list[float]:
        """Canonical values of the extended carrier, padded to n entries."""
        _, lambdas = block_diagonalize(self.M_ext)
        return lambdas + [0.0] * (self.n - len(lambdas))


@dataclass(frozen=True)
class DiagonalSpec:
    """Z-diagonal product state parameters: rho = tensor of (1 + lambda_q Z)/2."""

    lambdas: tuple[float, ...]

    def __post_init__(self):
        lams = tuple(float(x) for x in self.lambdas)
        if any(abs(x) > 1.0 + 1e-12 for x in lams):
            raise ValueError("diagonal parameters must lie in [-1, 1]")
        object.__setattr__(self, "lambdas", lams)


def from_diagonal(spec: DiagonalSpec | list | tuple) -> DGaussState:
    """Diagonal product state with M[2q, 2q+1] = -lambda_q and mu = 0."""
    if not isinstance(spec, DiagonalSpec):
        spec = DiagonalSpec(tuple(spec))
    n = len(spec.lambdas)
    M = np.zeros((2 * n, 2 * n))
    for q, lam in enumerate(spec.lambdas):
        M[2 * q, 2 * q + 1] = -lam
        M[2 * q + 1, 2 * q] = lam
    return DGaussState(n, M, np.zeros(2 * n), check=False)


def wick_moment(state: DGaussState, J) -> complex:
    """Moment Tr(gamma_J^dag rho) from the extended covariance.

    Even |J| = 2p: i^p * Pf(M_ext restricted to J); odd |J|: append the
    extension index 2n and multiply by -i (the alpha prefactor for odd
    moments), giving -i * i^{(|J|+1)/2} * Pf(M_ext restricted).
    """
    J = tuple(int(j) for j in J)
    if any(not 0 <= j < 2 * state.n for j in J):
        raise IndexError(f"moment index out of range in {J}")
    if len(J) % 2 == 0:
        return (1j) ** (len(J) // 2) * pfaffian_restricted(state.M_ext, J)
    Jt = J + (2 * state.n,)
    return -1j * (1j) ** (len(Jt) // 2) * pfaffian_restricted(state.M_ext, Jt)


def purity(state: DGaussState) -> float:
    """Tr(rho^2) = prod_j (1 + lambda_j^2)/2 over canonical values."""
    return float(np.prod([(1 + lam * lam) / 2 for lam in state.canonical_lambdas()]))


def _thermal_carrier(h, d) -> np.ndarray:
    h = check_antisymmetric(np.asarray(h, dtype=float))
    d = np.asarray(d, dtype=float)
    m = h.shape[0]
    if d.shape != (m,):
        raise ValueError("h and d dimensions differ")
    G = np.zeros((m + 1, m + 1))
    G[:m, :m] = h
    G[:m, m] = d
    G[m, :m] = -d
    return G


def _odd_function(G: np.ndarray, f) -> np.ndarray:
    """Apply an odd real function to a real antisymmetric matrix.

    Uses the Hermitian matrix iG: result = i * f_applied(iG), which is
    again real antisymmetric.  (A direct series in G would evaluate the
    trigonometric counterpart of f instead, since the squares of G's
    canonical blocks are negative.)
    """
    w, V = np.linalg.eigh(1j * G)
    out = 1j * (V * f(w)) @ V.conj().T
    return np.real(out)


def from_thermal(h, d) -> DGaussState:
    """State e^{-H}/Tr(e^{-H}) for H = (i/2) gamma^T h gamma + d^T gamma.

    In each canonical plane of the extended generator with parameter
    beta the state carries lambda = tanh(beta); equivalently
    M_ext = i*tanh(i*G) for the extended carrier G = [[h, d], [-d^T, 0]].
    """
    G = _thermal_carrier(h, d)
    M_ext = _odd_function(G, np.tanh)
    m = G.shape[0] - 1
    return DGaussState(m // 2, M_ext[:m, :m], M_ext[:m, m], check=False)


def to_thermal(state: DGaussState) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of from_thermal; raises SaturationError on pure modes."""
    lambdas = state.canonical_lambdas()
    saturated = [j for j, lam in enumerate(lambdas) if lam >= 1.0 - SATURATION_TOL]
    if saturated:
        raise SaturationError(saturated)
    G = _odd_function(state.M_ext, np.arctanh)
    m = 2 * state.n
    return G[:m, :m], G[:m, m]


def dense(state: DGaussState) -> np.ndarray:
    """Exact dense density matrix via the Wick expansion (oracle-capped)."""
    if state.n > oracle.ORACLE_MAX_QUBITS:
        raise oracle.OracleCapError(
            f"dense() capped at {oracle.ORACLE_MAX_QUBITS} qubits, got n={state.n}"
        )
    return oracle.gaussian_dense(state.M_ext)


def from_dense(A: np.ndarray) -> DGaussState:
    """Covariance data of a dense state (moments of degree <= 2)."""
    M_ext = oracle.covariance_from_dense(oracle.check_state(A))
    m = M_ext.shape[0] - 1
    return DGaussState(m // 2, M_ext[:m, :m], M_ext[:m, m])
