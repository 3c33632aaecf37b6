"""End-to-end circuit execution on the covariance representation.

A circuit is an input-state specification, an ordered gate list, and a
measurement request.  Evolution updates the real extended carrier
M_ext in place; each gate touches at most four rows and columns, so a
g-gate circuit costs O(g n) plus O(n^2) bookkeeping, never more than
O(n^2) memory.

Measurement uses the determinant formula: the probability of outcome
bits x on lines K is 2^{-|K|} sqrt(det(I - M_rho M_{K,x})), evaluated
through the 2|K| x 2|K| compression of M_rho onto the measured
Majorana axes.  Sampling draws bits through the chain rule over these
joint probabilities.

RNG contract: ``sample`` consumes numpy's default_rng(seed) by drawing
a (shots, |K|) uniform block up front; shot i uses row i.  A partition
of the shot range that slices the same block row-wise reproduces the
sequential output exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .antisym import check_antisymmetric, plane_decompose
from .state import DGaussState, from_diagonal
from .unitary import FSWAP, LINE1, MATCHGATE, Gate, GateSequence, gate_update


class NumericalAdmissibilityError(RuntimeError):
    """A probability determinant fell below the clamping tolerance."""


DET_CLAMP = 1e-10


@dataclass(frozen=True)
class MeasurementOp:
    """Computational-basis projector data: outcome bits x on lines K."""

    K: tuple[int, ...]
    x: tuple[int, ...]

    def __post_init__(self):
        K = tuple(int(k) for k in self.K)
        x = tuple(int(b) for b in self.x)
        if len(K) != len(x):
            raise ValueError("line subset and outcome lengths differ")
        if any(b not in (0, 1) for b in x):
            raise ValueError("outcome bits must be 0 or 1")
        if any(b <= a for a, b in zip(K, K[1:])):
            raise ValueError("measured lines must be strictly increasing")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "x", x)


def measurement_cov(n: int, m: MeasurementOp) -> np.ndarray:
    """Real covariance carrier of the projector O(K, x), times 2^{|K|-n}.

    Line q occupies Majorana axes (2q, 2q+1); outcome bit b contributes
    the canonical block with parameter -(-1)^b there (<Z_q> = (-1)^b
    and the carrier convention is M[2q, 2q+1] = -<Z_q>).
    """
    M = np.zeros((2 * n, 2 * n))
    for line, bit in zip(m.K, m.x):
        if not 0 <= line < n:
            raise IndexError(f"measured line {line} out of range")
        c = -((-1) ** bit)
        M[2 * line, 2 * line + 1] = c
        M[2 * line + 1, 2 * line] = -c
    return M


def _expectation_from_M(M: np.ndarray, m: MeasurementOp) -> float:
    k = len(m.K)
    if k == 0:
        return 1.0
    idx = []
    for line in m.K:
        idx.extend((2 * line, 2 * line + 1))
    C = np.zeros((2 * k, 2 * k))
    for j, bit in enumerate(m.x):
        c = -((-1) ** bit)
        C[2 * j, 2 * j + 1] = c
        C[2 * j + 1, 2 * j] = -c
    # det(I - M_rho M_meas) = det(I_{2k} - S C) with S the compression
    # of M_rho onto the measured axes.
    S = M[np.ix_(idx, idx)]
    det = float(np.real(np.linalg.det(np.eye(2 * k) - S @ C)))
    if det < -DET_CLAMP:
        raise NumericalAdmissibilityError(
            f"measurement determinant {det} is negative beyond tolerance"
        )
    return float(np.sqrt(max(det, 0.0))) / (1 << k)


def expectation(s: DGaussState, m: MeasurementOp) -> float:
    """Probability Tr[O(K,x) rho] via the determinant formula."""
    return _expectation_from_M(s.M, m)


def overlap(rho: DGaussState, sigma: DGaussState) -> float:
    """Tr(rho sigma) for even sigma: 2^{-n} sqrt(det(I - M_rho M_sigma)).

    Even-degree moments of a displaced state involve only its
    covariance block, so rho's mean never enters; sigma must be even.
    """
    if rho.n != sigma.n:
        raise ValueError("overlap inputs have different sizes")
    if not sigma.is_even:
        raise ValueError("overlap requires the second state to be even")
    det = float(np.real(np.linalg.det(np.eye(2 * rho.n) - rho.M @ sigma.M)))
    if det < -DET_CLAMP:
        raise NumericalAdmissibilityError(f"overlap determinant {det} negative")
    return float(np.sqrt(max(det, 0.0))) / (1 << rho.n)


# ---------------------------------------------------------------------------
# Product-state preparation

def _bloch_rotation_gates(n: int, r) -> list[Gate]:
    """Line-0 gates rotating the diagonal state lambda=|r| into Bloch vector r.

    Local covariance of line 0 lives on Majorana axes (0, 1, 2n); its
    axial vector a = (M[1,2n], -M[0,2n], M[0,1]) = (<Y>, -<X>, -<Z>)
    transforms by the same SO(3) rotation as the axes.  We build any Q
    taking the start vector (0,0,-|r|) to the target (r_y, -r_x, -r_z)
    and synthesize it from plane rotations on the three allowed pairs.
    """
    r = np.asarray(r, dtype=float)
    nr = float(np.linalg.norm(r))
    if nr < 1e-14:
        return []
    u = np.array([r[1], -r[0], -r[2]]) / nr
    # The start vector is -|r| e_z and the target is |r| u, so Q must
    # send e_z to -u; complete -u to a right-handed orthonormal frame.
    cols = [u]
    for seed in np.eye(3):
        v = seed - sum(np.dot(seed, c) * c for c in cols)
        if np.linalg.norm(v) > 1e-7:
            cols.append(v / np.linalg.norm(v))
        if len(cols) == 3:
            break
    Q = np.column_stack([cols[1], cols[2], -u])
    if np.linalg.det(Q) < 0:
        Q[:, 1] = -Q[:, 1]
    ext = 2 * n
    axis_map = {0: 0, 1: 1, 2: ext}
    gates = []
    for pr in plane_decompose(Q, lambda j, k: True):
        j, k = axis_map[pr.axes[0]], axis_map[pr.axes[1]]
        kind = LINE1 if ext in (j, k) else MATCHGATE
        gates.append(Gate(kind, axes=(j, k), angle=pr.angle))
    return gates


def _check_blochs(blochs) -> list[np.ndarray]:
    out = [np.asarray(r, dtype=float) for r in blochs]
    for r in out:
        if r.shape != (3,):
            raise ValueError("each Bloch vector needs three components")
        if np.linalg.norm(r) > 1.0 + 1e-9:
            raise ValueError(f"Bloch vector {r} is longer than 1")
    return out


def product_circuit(blochs) -> tuple[list[float], GateSequence]:
    """Diagonal input and gate list preparing a product of PURE Bloch states.

    Each qubit is synthesized on line 0 (the only line admitting
    arbitrary single-qubit gates) and routed to its target line by a
    chain of adjacent fermionic swaps, farthest target first.  The
    route requires pure inputs: a fermionic swap acts as a genuine
    qubit swap only past definite-parity states, and the intermediate
    lines hold pure |0> states exactly when every input is pure.  (A
    mixed diagonal state is a parity mixture; swapping a displaced
    state past it damps the displacement instead of moving it.)
    """
    blochs = _check_blochs(blochs)
    n = len(blochs)
    for r in blochs:
        if abs(np.linalg.norm(r) - 1.0) > 1e-9:
            raise ValueError("the circuit route requires pure Bloch vectors")
    lambdas0 = [1.0] * n
    gates: list[Gate] = []
    for target in range(n - 1, -1, -1):
        gates.extend(_bloch_rotation_gates(n, blochs[target]))
        for line in range(target):
            gates.append(Gate(FSWAP, line=line))
    return lambdas0, GateSequence(n, tuple(gates))


def product_covariance(blochs) -> tuple[np.ndarray, np.ndarray]:
    """Covariance data (M, mu) of a tensor product of single-qubit states.

    Direct second-moment assembly.  Majorana operators carry Z strings
    over lower lines, so the moments pick up prefix factors of the z
    components: with (x_q, y_q, z_q) the Bloch vector of line q,

        mu_{2q}   = (prod_{p<q} z_p) x_q,
        mu_{2q+1} = (prod_{p<q} z_p) y_q,
        M[2q, 2q+1] = -z_q,
        M[2q+s, 2q'+t] = L_s(q) (prod_{q<p<q'} z_p) R_t(q'),  q < q',

    with left factors L_0 = y_q, L_1 = -x_q and right factors
    R_0 = x_{q'}, R_1 = y_{q'}.
    """
    blochs = _check_blochs(blochs)
    n = len(blochs)
    M = np.zeros((2 * n, 2 * n))
    mu = np.zeros(2 * n)
    zs = np.array([r[2] for r in blochs])
    for q, r in enumerate(blochs):
        pre = float(np.prod(zs[:q]))
        mu[2 * q] = pre * r[0]
        mu[2 * q + 1] = pre * r[1]
        M[2 * q, 2 * q + 1] = -r[2]
        M[2 * q + 1, 2 * q] = r[2]
        for qp in range(q + 1, n):
            between = float(np.prod(zs[q + 1:qp]))
            rp = blochs[qp]
            for s, left in ((0, r[1]), (1, -r[0])):
                for t, right in ((0, rp[0]), (1, rp[1])):
                    val = left * between * right
                    M[2 * q + s, 2 * qp + t] = val
                    M[2 * qp + t, 2 * q + s] = -val
    return M, mu


class NonGaussianProductError(ValueError):
    """Product state requested that no displaced Gaussian state represents."""


def product_is_gaussian(blochs, tol: float = 1e-9) -> bool:
    """Whether the tensor product of these Bloch states is Gaussian.

    A product of single-qubit states is a displaced Gaussian state
    exactly when every qubit after the first mixed one is diagonal:
    transverse displacement carries a Z string over all lower lines,
    and mixedness anywhere under that string breaks Wick factorization
    of the odd moments.  (Dense counterexample: (1+0.5Z)/2 x (1+0.6X)/2
    violates Gaussianity with third-moment deviation 0.45.)
    """
    blochs = _check_blochs(blochs)
    first_mixed = None
    for q, r in enumerate(blochs):
        if first_mixed is not None and q > first_mixed:
            if np.hypot(r[0], r[1]) > tol:
                return False
        if first_mixed is None and np.linalg.norm(r) < 1.0 - tol:
            first_mixed = q
    return True


def prepare_product(blochs) -> DGaussState:
    """Displaced Gaussian state of a tensor product of single-qubit states.

    Pure inputs go through the circuit route (line-0 synthesis plus
    fermionic-swap chains); representable mixed inputs use the direct
    covariance assembly, since a fermionic swap cannot move a displaced
    qubit past a parity-mixed line.  Products outside the Gaussian
    class (see product_is_gaussian) raise NonGaussianProductError.
    """
    blochs = _check_blochs(blochs)
    n = len(blochs)
    if not product_is_gaussian(blochs):
        raise NonGaussianProductError(
            "a qubit after the first mixed one is transversely displaced; "
            "this product state is not a displaced Gaussian state"
        )
    if all(abs(np.linalg.norm(r) - 1.0) <= 1e-12 for r in blochs):
        lambdas0, seq = product_circuit(blochs)
        return run(Circuit(n, ("lambdas", lambdas0), seq))
    return DGaussState(n, *product_covariance(blochs))


# ---------------------------------------------------------------------------
# Circuits

@dataclass(frozen=True)
class Circuit:
    """Input spec + gate list (+ optional measurement, handled by callers).

    ``input_spec`` is one of ("lambdas", list), ("bloch", list of
    3-vectors), or ("covariance", (M, mu)).
    """

    n: int
    input_spec: tuple
    gates: GateSequence

    def __post_init__(self):
        if self.gates.n != self.n:
            raise ValueError("gate list size differs from circuit size")
        kind = self.input_spec[0]
        if kind not in ("lambdas", "bloch", "covariance"):
            raise ValueError(f"unknown input kind {kind!r}")

    def input_state(self) -> DGaussState:
        kind, payload = self.input_spec
        if kind == "lambdas":
            if len(payload) != self.n:
                raise ValueError("diagonal input length differs from n")
            return from_diagonal(payload)
        if kind == "bloch":
            if len(payload) != self.n:
                raise ValueError("Bloch input length differs from n")
            return prepare_product(payload)
        M, mu = payload
        return DGaussState(self.n, check_antisymmetric(np.asarray(M, dtype=float)),
                           np.asarray(mu, dtype=float))


def run(c: Circuit) -> DGaussState:
    """Fold the circuit's gates over its input state.

    The extended carrier is updated in place; each gate multiplies at
    most four rows and the matching columns by its small orthogonal
    block.  The output state is validated once at the end.
    """
    state = c.input_state()
    Me = state.M_ext.copy()
    for g in c.gates:
        rows, Q = gate_update(g, c.n)
        Me[rows, :] = Q @ Me[rows, :]
        Me[:, rows] = Me[:, rows] @ Q.T
    m = 2 * c.n
    Me = (Me - Me.T) / 2
    return DGaussState(c.n, Me[:m, :m], Me[:m, m], check=False)


def sample(s: DGaussState, K, shots: int, seed: int) -> list[str]:
    """Draw computational-basis outcomes on lines K, chain-rule style.

    Deterministic for a given seed (see the module docstring for the
    exact RNG contract).  Joint prefix probabilities are memoized, so
    repeated shots cost dictionary lookups after the first visit.
    """
    K = tuple(int(k) for k in K)
    k = len(K)
    if shots < 1:
        raise ValueError("need at least one shot")
    if k == 0:
        return [""] * shots
    uniforms = np.random.default_rng(seed).random((shots, k))
    joint: dict[tuple[int, ...], float] = {(): 1.0}

    def prefix_prob(x: tuple[int, ...]) -> float:
        if x not in joint:
            op = MeasurementOp(K[: len(x)], x)
            joint[x] = _expectation_from_M(s.M, op)
        return joint[x]

    out = []
    for i in range(shots):
        x: tuple[int, ...] = ()
        for j in range(k):
            p_pref = prefix_prob(x)
            if p_pref <= 0.0:
                # Forced branch on an impossible prefix: extend by the
                # likelier child deterministically.
                p0 = prefix_prob(x + (0,))
                x = x + (0 if p0 >= prefix_prob(x + (1,)) else 1,)
                continue
            p0 = prefix_prob(x + (0,)) / p_pref
            if p0 < -1e-9 or p0 > 1 + 1e-9:
                raise NumericalAdmissibilityError(
                    f"conditional probability {p0} outside [0, 1]"
                )
            x = x + (0 if uniforms[i, j] < p0 else 1,)
        out.append("".join(map(str, x)))
    return out
