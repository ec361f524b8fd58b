"""Dense complex linear algebra with one explicit tolerance policy.

Matrices are plain ``numpy`` complex arrays. Operators on ``h (x) fiber`` are
indexed by pairs ``(i, a)`` with the ``h`` index outermost, i.e. flat index
``i * fiber_dim + a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class ValidationError(ValueError):
    """An input violates a documented precondition."""


class ConsistencyError(RuntimeError):
    """Two independent routes to the same answer disagree (a library bug)."""


@dataclass(frozen=True)
class Tolerance:
    atol: float = 1e-9
    rank_rtol: float | None = None

    def __post_init__(self):
        if not self.atol > 0:
            raise ValueError("atol must be positive")
        if self.rank_rtol is not None and not self.rank_rtol > 0:
            raise ValueError("rank_rtol must be positive")

    def rank_cutoff(self, dim: int) -> float:
        if self.rank_rtol is not None:
            return self.rank_rtol
        return max(dim, 1) * np.finfo(float).eps

    def small(self, residual: float, scale: float = 1.0) -> bool:
        return residual <= self.atol * max(1.0, scale)


DEFAULT_TOL = Tolerance()


def as_matrix(M, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce to a 2-d complex array, checking shape and finiteness."""
    M = np.asarray(M, dtype=complex)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of ndim {M.ndim}")
    if rows is not None and M.shape[0] != rows:
        raise DimensionError(f"expected {rows} rows, got {M.shape[0]}")
    if cols is not None and M.shape[1] != cols:
        raise DimensionError(f"expected {cols} columns, got {M.shape[1]}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    return M


def _square(M) -> np.ndarray:
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M


def dag(M: np.ndarray) -> np.ndarray:
    return np.conj(M).T


def opnorm(M) -> float:
    """Spectral norm; zero for empty matrices."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    if M.ndim == 1:
        return float(np.linalg.norm(M))
    return float(np.linalg.norm(M, 2))


def is_hermitian(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    M = _square(M)
    return opnorm(M - dag(M)) <= tol.atol


def is_psd(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    M = _square(M)
    if M.size == 0:
        return True
    if not is_hermitian(M, tol):
        return False
    H = (M + dag(M)) / 2
    return float(np.linalg.eigvalsh(H).min()) >= -tol.atol * (1 + opnorm(M))


def rank(M, tol: Tolerance = DEFAULT_TOL) -> int:
    M = as_matrix(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol.rank_cutoff(max(M.shape)) * s[0]))


def is_projection(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    M = _square(M)
    return opnorm(M - dag(M)) <= tol.atol and opnorm(M @ M - M) <= tol.atol


def is_partial_isometry(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    M = as_matrix(M)
    return opnorm(M @ dag(M) @ M - M) <= tol.atol


def leq_projection(p, q, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``p <= q`` for projections, i.e. ``pq = p``."""
    return opnorm(as_matrix(p) @ as_matrix(q) - p) <= tol.atol


def range_basis(p, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ``ran p`` as columns, chosen deterministically.

    Columns of ``p`` are orthogonalised in index order (Gram-Schmidt with
    reorthogonalisation) and kept when their residual is not negligible. For a
    projection every nonzero singular value is 1, so this fixes the tie-break
    by lowest index.
    """
    p = as_matrix(p)
    dim = p.shape[0]
    scale = max(opnorm(p), 1.0)
    cutoff = max(tol.atol, 1e3 * tol.rank_cutoff(dim)) * scale
    basis: list[np.ndarray] = []
    for j in range(p.shape[1]):
        v = p[:, j].copy()
        for _ in range(2):
            for b in basis:
                v = v - b * np.vdot(b, v)
        nv = np.linalg.norm(v)
        if nv > cutoff:
            basis.append(v / nv)
    if not basis:
        return np.zeros((dim, 0), dtype=complex)
    return np.column_stack(basis)


def projection_onto(vectors) -> np.ndarray:
    V = as_matrix(vectors)
    return V @ dag(V)


@dataclass(frozen=True)
class BlockPartition:
    """Partition of ``{0..n-1}`` representing the masa spanned by block projections."""

    n: int
    blocks: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if self.n < 1:
            raise ValidationError("partition dimension must be positive")
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise ValidationError("partition blocks must be non-empty")
            for i in b:
                if i in seen:
                    raise ValidationError(f"index {i} appears in two blocks")
                seen.add(i)
        if seen != set(range(self.n)):
            raise ValidationError(f"blocks do not cover 0..{self.n - 1}")

    @classmethod
    def single(cls, n: int) -> "BlockPartition":
        return cls(n, (tuple(range(n)),))

    @classmethod
    def discrete(cls, n: int) -> "BlockPartition":
        return cls(n, tuple((i,) for i in range(n)))

    def projector(self, b: int) -> np.ndarray:
        P = np.zeros((self.n, self.n), dtype=complex)
        idx = list(self.blocks[b])
        P[idx, idx] = 1.0
        return P

    def assemble(self, fibers: Sequence[np.ndarray]) -> np.ndarray:
        """``sum_B P_B (x) T_B`` for one fiber operator per block."""
        if len(fibers) != len(self.blocks):
            raise DimensionError("need one fiber operator per block")
        fibers = [as_matrix(f) for f in fibers]
        out = np.zeros((self.n * fibers[0].shape[0], self.n * fibers[0].shape[1]), dtype=complex)
        for b, f in enumerate(fibers):
            out += np.kron(self.projector(b), f)
        return out

    def fiber(self, T, b: int, fiber_rows: int, fiber_cols: int | None = None) -> np.ndarray:
        """Fiber of ``T`` at the first index of block ``b``."""
        fiber_cols = fiber_rows if fiber_cols is None else fiber_cols
        T4 = as_matrix(T).reshape(self.n, fiber_rows, self.n, fiber_cols)
        i = self.blocks[b][0]
        return T4[i, :, i, :]


def _fiber_view(T, n: int, fiber_rows: int, fiber_cols: int) -> np.ndarray:
    T = as_matrix(T)
    if T.shape != (n * fiber_rows, n * fiber_cols):
        raise DimensionError(
            f"expected shape {(n * fiber_rows, n * fiber_cols)}, got {T.shape}"
        )
    return T.reshape(n, fiber_rows, n, fiber_cols)


def in_algebra_rect(
    T, partition: BlockPartition, fiber_rows: int, fiber_cols: int,
    tol: Tolerance = DEFAULT_TOL,
) -> bool:
    """Membership of a (possibly rectangular) ``T`` in ``N (x) B(fiber_cols, fiber_rows)``."""
    n = partition.n
    T4 = _fiber_view(T, n, fiber_rows, fiber_cols)
    off = T4.copy()
    for i in range(n):
        off[i, :, i, :] = 0
    if np.max(np.abs(off), initial=0.0) > tol.atol:
        return False
    for block in partition.blocks:
        ref = T4[block[0], :, block[0], :]
        for i in block[1:]:
            if np.max(np.abs(T4[i, :, i, :] - ref), initial=0.0) > tol.atol:
                return False
    return True


def in_algebra(T, partition: BlockPartition, fiber_dim: int, tol: Tolerance = DEFAULT_TOL) -> bool:
    return in_algebra_rect(T, partition, fiber_dim, fiber_dim, tol)


def coefficients(T, n: int, fiber_rows: int, fiber_cols: int) -> list[np.ndarray]:
    """The ``n x n`` coefficient matrices ``T_ab`` with ``T = sum_ab T_ab (x) |a><b|``."""
    T4 = _fiber_view(T, n, fiber_rows, fiber_cols)
    return [T4[:, a, :, b] for a in range(fiber_rows) for b in range(fiber_cols)]


def commuting_family(mats: Iterable[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether the matrices (with their adjoints) generate a commutative algebra."""
    gens: list[np.ndarray] = []
    for M in mats:
        M = as_matrix(M)
        if np.max(np.abs(M), initial=0.0) > tol.atol:
            gens.append(M)
            gens.append(dag(M))
    if not gens:
        return True
    # Frobenius norms: an upper bound for the spectral norm, and far cheaper here
    stack = np.stack(gens)
    norms = np.linalg.norm(stack, axis=(1, 2))
    comm = np.einsum("iab,jbc->ijac", stack, stack)
    comm = comm - comm.transpose(1, 0, 2, 3)
    bound = tol.atol * np.maximum(1.0, np.outer(norms, norms))
    return bool(np.all(np.linalg.norm(comm, axis=(2, 3)) <= bound))


def pisometry_between(
    p, q, partition: BlockPartition | None = None, tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray | None:
    """Canonical partial isometry ``D`` with ``D*D = p`` and ``DD* = q``.

    With a partition, ``p`` and ``q`` are operators on ``h (x) k`` in
    ``N (x) B(k)`` and the construction runs fiber by fiber, so that ``D`` lies
    in the same algebra. Returns ``None`` when (blockwise) ranks differ.
    """
    p = _square(p)
    q = _square(q)
    if p.shape != q.shape:
        raise DimensionError("p and q must have equal dimension")
    if not (is_projection(p, tol) and is_projection(q, tol)):
        raise ValidationError("pisometry_between needs projections")
    if partition is None:
        Bp = range_basis(p, tol)
        Bq = range_basis(q, tol)
        if Bp.shape[1] != Bq.shape[1]:
            return None
        return Bq @ dag(Bp)
    dim = p.shape[0]
    if dim % partition.n:
        raise DimensionError("projection dimension is not a multiple of the partition size")
    d = dim // partition.n
    if not (in_algebra(p, partition, d, tol) and in_algebra(q, partition, d, tol)):
        raise ValidationError("p and q must lie in N (x) B(k) for the given partition")
    fibers = []
    for b in range(len(partition.blocks)):
        Db = pisometry_between(partition.fiber(p, b, d), partition.fiber(q, b, d), None, tol)
        if Db is None:
            return None
        fibers.append(Db)
    return partition.assemble(fibers)
