"""Block-generator calculus for Hudson-Parthasarathy cocycles of the CCR flow.

A generator acts on ``h (x) k^`` with ``k^ = C + k``. It is stored by its four
blocks relative to ``h (x) k^ = h + (h (x) k)``; the noise part ``h (x) k`` is
ordered with the ``h`` index outermost. ``BlockGenerator.matrix()`` is the
assembled block form and ``tensor_matrix()`` the same operator reindexed by
pairs ``(i, a)`` with ``a = 0`` the vacuum direction of ``k^``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .matcore import (
    DEFAULT_TOL,
    BlockPartition,
    ConsistencyError,
    DimensionError,
    Tolerance,
    ValidationError,
    as_matrix,
    coefficients,
    commuting_family,
    dag,
    in_algebra,
    is_projection,
    is_psd,
    opnorm,
)


@dataclass(frozen=True, eq=False)
class BlockGenerator:
    n: int
    d: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        n, d = self.n, self.d
        if n < 1 or d < 0:
            raise DimensionError("need n >= 1 and d >= 0")
        object.__setattr__(self, "A", as_matrix(self.A, n, n))
        object.__setattr__(self, "B", as_matrix(self.B, n, n * d))
        object.__setattr__(self, "C", as_matrix(self.C, n * d, n))
        object.__setattr__(self, "D", as_matrix(self.D, n * d, n * d))

    @classmethod
    def from_matrix(cls, F, n: int, d: int) -> "BlockGenerator":
        F = as_matrix(F, n * (1 + d), n * (1 + d))
        return cls(n, d, F[:n, :n], F[:n, n:], F[n:, :n], F[n:, n:])

    @classmethod
    def from_tensor_matrix(cls, T, n: int, d: int) -> "BlockGenerator":
        perm = tensor_permutation(n, d)
        T = as_matrix(T, n * (1 + d), n * (1 + d))
        F = np.empty_like(T)
        F[np.ix_(perm, perm)] = T
        return cls.from_matrix(F, n, d)

    @classmethod
    def zero(cls, n: int, d: int) -> "BlockGenerator":
        return cls.from_matrix(np.zeros((n * (1 + d),) * 2), n, d)

    @property
    def dim(self) -> int:
        return self.n * (1 + self.d)

    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    def tensor_matrix(self) -> np.ndarray:
        perm = tensor_permutation(self.n, self.d)
        return self.matrix()[np.ix_(perm, perm)]

    def adjoint(self) -> "BlockGenerator":
        return BlockGenerator.from_matrix(dag(self.matrix()), self.n, self.d)

    def __repr__(self):
        return f"BlockGenerator(n={self.n}, d={self.d})"


def tensor_permutation(n: int, d: int) -> np.ndarray:
    """``perm[i*(1+d) + a]`` is the block-form index of the pair ``(i, a)``."""
    perm = np.empty(n * (1 + d), dtype=int)
    for i in range(n):
        perm[i * (1 + d)] = i
        for a in range(d):
            perm[i * (1 + d) + 1 + a] = n + i * d + a
    return perm


def delta(n: int, d: int) -> np.ndarray:
    return np.diag(np.r_[np.zeros(n), np.ones(n * d)]).astype(complex)


@dataclass(frozen=True, eq=False)
class LocalProjectionPair:
    """A projection ``P`` on ``k`` together with a vector ``u`` in ``Ker P``."""

    P: np.ndarray
    u: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        P = as_matrix(self.P)
        d = P.shape[0]
        u = np.asarray(self.u, dtype=complex).reshape(-1)
        if P.shape != (d, d) or u.shape != (d,):
            raise DimensionError("P must be d x d and u of length d")
        if not is_projection(P, self.tol):
            raise ValidationError("P is not a projection")
        if np.linalg.norm(P @ u) > self.tol.atol:
            raise ValidationError("u must lie in Ker P")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "u", u)

    @property
    def d(self) -> int:
        return self.P.shape[0]

    def __repr__(self):
        return f"LocalProjectionPair(d={self.d}, rank={int(round(np.trace(self.P).real))})"


def gamma_left(F: BlockGenerator) -> np.ndarray:
    M = F.matrix()
    return M + dag(M) + dag(M) @ delta(F.n, F.d) @ M


def is_contraction_generator(F: BlockGenerator, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_psd(-gamma_left(F), tol)


def projection_generator(L, P, n: int, d: int) -> BlockGenerator:
    """Assemble ``[[-L*L, L*], [L, P - I]]``."""
    L = as_matrix(L, n * d, n)
    P = as_matrix(P, n * d, n * d)
    return BlockGenerator(n, d, -dag(L) @ L, dag(L), L, P - np.eye(n * d))


def in_commutative_ampliation(F: BlockGenerator, partition: BlockPartition | None,
                              tol: Tolerance = DEFAULT_TOL) -> bool:
    """``F`` lies in ``N (x) B(k^)``.

    With a partition ``N`` is its block masa; without one, the test is whether
    some commutative ``N`` exists, i.e. whether the coefficient matrices of
    ``F`` and their adjoints all commute.
    """
    T = F.tensor_matrix()
    if partition is None:
        return commuting_family(coefficients(T, F.n, 1 + F.d, 1 + F.d), tol)
    if partition.n != F.n:
        raise DimensionError("partition size differs from dim h")
    return in_algebra(T, partition, 1 + F.d, tol)


class ProjectionGeneratorError(ValueError):
    """``F`` does not generate a projection-valued cocycle.

    ``reason`` is one of ``not-in-algebra``, ``identity-violated`` or
    ``structure-violated``.
    """

    def __init__(self, reason: str, residual: float = float("nan")):
        super().__init__(f"{reason} (residual {residual:.3g})")
        self.reason = reason
        self.residual = residual


def identity_residual(F: BlockGenerator) -> float:
    """``||F + F* Delta F||``."""
    M = F.matrix()
    return opnorm(M + dag(M) @ delta(F.n, F.d) @ M)


def structure_residual(F: BlockGenerator, partition: BlockPartition | None,
                       tol: Tolerance = DEFAULT_TOL) -> float:
    """Largest violation among the block relations ``B = C*``, ``A = -C*C``, ``PC = 0``
    and ``P = D + I`` a projection in ``N (x) B(k)``; ``inf`` if ``P`` leaves the algebra."""
    n, d = F.n, F.d
    P = F.D + np.eye(n * d)
    L = F.C
    if partition is not None and not in_algebra(P, partition, d, tol):
        return float("inf")
    return max(
        opnorm(P - dag(P)),
        opnorm(P @ P - P),
        opnorm(P @ L),
        opnorm(F.B - dag(L)),
        opnorm(F.A + dag(L) @ L),
    )


def projection_tests(F: BlockGenerator, partition: BlockPartition | None = None,
                     tol: Tolerance = DEFAULT_TOL) -> tuple[bool, bool, bool]:
    """The two algebraic characterisations, evaluated independently.

    Returns ``(in_algebra, identity_form, block_form)``; the last two include
    algebra membership.
    """
    member = in_commutative_ampliation(F, partition, tol)
    scale = 1 + opnorm(F.matrix()) ** 2
    ident = member and tol.small(identity_residual(F), scale)
    struct = member and tol.small(structure_residual(F, partition, tol), scale)
    return member, ident, struct


def classify_projection_generator(F: BlockGenerator, partition: BlockPartition | None = None,
                                  tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(L, P)`` if ``F`` generates a projection-valued cocycle.

    Raises ``ProjectionGeneratorError`` otherwise, and ``ConsistencyError`` if
    the identity form ``F + F*DF = 0`` and the block form disagree.
    """
    member, ident, struct = projection_tests(F, partition, tol)
    if not member:
        raise ProjectionGeneratorError("not-in-algebra")
    if ident != struct:
        raise ConsistencyError(
            f"identity test ({ident}) and block-structure test ({struct}) disagree"
        )
    if not ident:
        # blame the noise block first: P = D + I must be a projection killing L
        P = F.D + np.eye(F.n * F.d)
        scale = 1 + opnorm(F.matrix()) ** 2
        proj_res = max(opnorm(P - dag(P)), opnorm(P @ P - P), opnorm(P @ F.C))
        if not tol.small(proj_res, scale):
            raise ProjectionGeneratorError("structure-violated", proj_res)
        raise ProjectionGeneratorError("identity-violated", identity_residual(F))
    return F.C.copy(), F.D + np.eye(F.n * F.d)


def is_projection_generator(F: BlockGenerator, partition: BlockPartition | None = None,
                            tol: Tolerance = DEFAULT_TOL) -> bool:
    try:
        classify_projection_generator(F, partition, tol)
    except ProjectionGeneratorError:
        return False
    return True


def is_local(F: BlockGenerator, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``F`` lies in ``I_h (x) B(k^)``."""
    K = 1 + F.d
    T4 = F.tensor_matrix().reshape(F.n, K, F.n, K)
    f = T4[0, :, 0, :]
    for i in range(F.n):
        for j in range(F.n):
            target = f if i == j else 0
            if np.max(np.abs(T4[i, :, j, :] - target), initial=0.0) > tol.atol:
                return False
    return True


def from_local_pair(pair: LocalProjectionPair, n: int = 1) -> BlockGenerator:
    P, u = pair.P, pair.u
    d = pair.d
    f = np.zeros((1 + d, 1 + d), dtype=complex)
    f[0, 0] = -np.vdot(u, u)
    f[0, 1:] = np.conj(u)
    f[1:, 0] = u
    f[1:, 1:] = P - np.eye(d)
    return BlockGenerator.from_tensor_matrix(np.kron(np.eye(n), f), n, d)


def to_local_pair(F: BlockGenerator, tol: Tolerance = DEFAULT_TOL) -> LocalProjectionPair:
    """Inverse of ``from_local_pair`` for local projection generators."""
    if not is_local(F, tol):
        raise ValidationError("generator is not local")
    L, P = classify_projection_generator(F, BlockPartition.single(F.n), tol)
    d = F.d
    return LocalProjectionPair(P[:d, :d], L[:d, 0], tol)


def partial_isometry_defect(H: BlockGenerator) -> np.ndarray:
    """``H + H* + H*DH + HDH + HDH* + HDH*DH``, evaluated term by term as written."""
    M = H.matrix()
    Md = dag(M)
    Dl = delta(H.n, H.d)
    return M + Md + Md @ Dl @ M + M @ Dl @ M + M @ Dl @ Md + M @ Dl @ Md @ Dl @ M


def theta_pair(H: BlockGenerator) -> tuple[np.ndarray, np.ndarray]:
    """Generators of ``(X^H)* X^H`` and ``X^H (X^H)*``."""
    M = H.matrix()
    Md = dag(M)
    Dl = delta(H.n, H.d)
    return M + Md + Md @ Dl @ M, M + Md + M @ Dl @ Md


def expectation_semigroup(F: BlockGenerator, t: float) -> np.ndarray:
    if t < 0:
        raise ValidationError("t must be non-negative")
    return expm(t * F.A)
