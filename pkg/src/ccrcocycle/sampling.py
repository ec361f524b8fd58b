"""Seeded random constructions of valid (and deliberately invalid) inputs."""
from __future__ import annotations

import numpy as np

from .endo import NormalHom
from .generators import BlockGenerator, LocalProjectionPair, projection_generator
from .matcore import BlockPartition, dag


def complex_normal(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    if d == 0:
        return np.zeros((0, 0), dtype=complex)
    Q, R = np.linalg.qr(complex_normal(rng, d, d))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_projection(d: int, r: int, rng: np.random.Generator) -> np.ndarray:
    V = random_unitary(d, rng)[:, :r]
    return V @ dag(V)


def random_partition(n: int, rng: np.random.Generator, max_blocks: int = 2) -> BlockPartition:
    k = int(rng.integers(1, min(n, max_blocks) + 1))
    labels = np.r_[np.arange(k), rng.integers(0, k, size=n - k)]
    rng.shuffle(labels)
    return BlockPartition(n, tuple(tuple(np.flatnonzero(labels == b)) for b in range(k)))


def _column_in(proj: np.ndarray, rng, size: float = 1.0) -> np.ndarray:
    v = proj @ complex_normal(rng, proj.shape[0], 1)
    nv = np.linalg.norm(v)
    return v * (size / nv) if nv > 1e-12 else np.zeros_like(v)


def random_projection_generator(n: int, d: int, rng: np.random.Generator,
                                partition: BlockPartition | None = None,
                                l_size: float = 1.0):
    """``(F, partition, L, P)`` with ``F`` a projection generator in ``N (x) B(k^)``."""
    partition = random_partition(n, rng) if partition is None else partition
    Ps, Ls = [], []
    for _ in partition.blocks:
        P = random_projection(d, int(rng.integers(0, d + 1)), rng)
        Ps.append(P)
        Ls.append(_column_in(np.eye(d) - P, rng, l_size * rng.uniform(0.2, 1.0)))
    L, P = partition.assemble(Ls), partition.assemble(Ps)
    return projection_generator(L, P, n, d), partition, L, P


PERTURBATIONS = ("noise", "vacuum", "generic", "coupling")


def perturb_generator(F: BlockGenerator, rng: np.random.Generator,
                      size: float = 0.1, kind: str | None = None) -> BlockGenerator:
    """A nearby generator that is not a projection generator.

    ``kind`` is one of ``PERTURBATIONS`` (random when ``None``): a Hermitian
    perturbation of the noise block, a perturbation of the vacuum block, a
    non-Hermitian perturbation of everything, or an off-block coupling of
    ``h`` inside the vacuum block (needs ``n > 1``).
    """
    n, d = F.n, F.d
    M = F.matrix().copy()
    if kind is None:
        kind = PERTURBATIONS[int(rng.integers(0, 4 if n > 1 else 3))]
    if kind not in PERTURBATIONS or (kind == "coupling" and n < 2):
        raise ValueError(f"unsupported perturbation {kind!r} for n={n}")
    if kind == "noise" and d:
        X = complex_normal(rng, d, d)
        X = size * (X + dag(X)) / opn(X + dag(X))
        M[n:, n:] += np.kron(np.eye(n), X)
    elif kind == "vacuum" or not d:
        X = complex_normal(rng, n, n)
        M[:n, :n] += size * (X + dag(X)) / opn(X + dag(X))
    elif kind == "generic":
        X = complex_normal(rng, *M.shape)
        M += size * X / opn(X)
    else:
        i, j = rng.choice(n, size=2, replace=False)
        M[i, j] += size
        M[j, i] += size
    return BlockGenerator.from_matrix(M, n, d)


def opn(X) -> float:
    return float(np.linalg.norm(X, 2)) if X.size else 1.0


def random_subordinate_pair(n: int, d: int, rng: np.random.Generator,
                            partition: BlockPartition | None = None):
    """``(F, G)`` projection generators with ``X^F <= X^G``, sharing a partition."""
    partition = random_partition(n, rng) if partition is None else partition
    Ps, Qs, Ls, Ms = [], [], [], []
    for _ in partition.blocks:
        rq = int(rng.integers(0, d + 1))
        U = random_unitary(d, rng)
        Q = U[:, :rq] @ dag(U[:, :rq])
        rp = int(rng.integers(0, rq + 1))
        P = U[:, :rp] @ dag(U[:, :rp])
        L = _column_in(np.eye(d) - P, rng, rng.uniform(0.2, 1.0))
        Ps.append(P)
        Qs.append(Q)
        Ls.append(L)
        Ms.append((np.eye(d) - Q) @ L)
    F = projection_generator(partition.assemble(Ls), partition.assemble(Ps), n, d)
    G = projection_generator(partition.assemble(Ms), partition.assemble(Qs), n, d)
    return F, G, partition


def random_nested_triple(rng: np.random.Generator, n_max: int = 2, d_max: int = 4):
    """Projection generators ``F1, F2, F3`` with ``X^F1 <= X^F2 <= X^F3``.

    Fibers use a common eigenbasis with ranks ``r1 <= r2 <= r3`` and
    ``L_{i+1} = Q_{i+1}^perp L_i`` on a discrete partition.
    """
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    part = BlockPartition.discrete(n)
    Ps: list[list[np.ndarray]] = [[], [], []]
    Ls: list[list[np.ndarray]] = [[], [], []]
    for _ in range(n):
        U = random_unitary(d, rng)
        ranks = sorted(rng.integers(0, d + 1, size=3))
        L = complex_normal(rng, d, 1)
        for i, r in enumerate(ranks):
            Q = U[:, :r] @ dag(U[:, :r])
            L = (np.eye(d) - Q) @ L
            Ps[i].append(Q)
            Ls[i].append(L)
    return [projection_generator(part.assemble(Ls[i]), part.assemble(Ps[i]), n, d)
            for i in range(3)]


def random_intertwiner_data(n: int, d: int, rng: np.random.Generator,
                            partition: BlockPartition | None = None):
    """``(F, G, D, E, K, partition)`` satisfying every intertwiner precondition.

    ``D`` is a generic partial isometry from ``ran P`` onto ``ran Q`` (a random
    unitary between the ranges, not the canonical choice).
    """
    partition = random_partition(n, rng) if partition is None else partition
    Ps, Qs, Ls, Ms, Ds, Es, Ks = [], [], [], [], [], [], []
    for _ in partition.blocks:
        r = int(rng.integers(0, d + 1))
        Up, Uq = random_unitary(d, rng), random_unitary(d, rng)
        P = Up[:, :r] @ dag(Up[:, :r])
        Q = Uq[:, :r] @ dag(Uq[:, :r])
        Ds.append(Uq[:, :r] @ random_unitary(r, rng) @ dag(Up[:, :r]))
        Ps.append(P)
        Qs.append(Q)
        Ls.append(_column_in(np.eye(d) - P, rng, rng.uniform(0.0, 1.0)))
        Ms.append(_column_in(np.eye(d) - Q, rng, rng.uniform(0.0, 1.0)))
        Es.append(_column_in(Q, rng, rng.uniform(0.0, 1.0)))
        Ks.append(np.array([[rng.normal()]]))
    F = projection_generator(partition.assemble(Ls), partition.assemble(Ps), n, d)
    G = projection_generator(partition.assemble(Ms), partition.assemble(Qs), n, d)
    D = partition.assemble(Ds)
    E = partition.assemble(Es)
    K = partition.assemble(Ks)
    return F, G, D, E, K, partition


def random_local_pair(d: int, rng: np.random.Generator, rank: int | None = None,
                      coordinate: bool = False) -> LocalProjectionPair:
    r = int(rng.integers(0, d + 1)) if rank is None else rank
    if coordinate:
        mask = np.zeros(d)
        mask[rng.choice(d, size=r, replace=False)] = 1
        P = np.diag(mask).astype(complex)
    else:
        P = random_projection(d, r, rng)
    u = _column_in(np.eye(d) - P, rng, rng.uniform(0.0, 1.0)).reshape(-1)
    return LocalProjectionPair(P, u)


def random_hom(rng: np.random.Generator, m_max: int = 3, j_max: int = 3,
               extra_max: int = 2) -> NormalHom:
    m = int(rng.integers(1, m_max + 1))
    j = int(rng.integers(1, j_max + 1))
    n = m * j + int(rng.integers(0, extra_max + 1))
    V = random_unitary(n, rng)[:, : m * j]
    return NormalHom(m, j, n, V)


def random_commutant_projection(hom: NormalHom, rng: np.random.Generator) -> np.ndarray:
    q = random_projection(hom.j, int(rng.integers(0, hom.j + 1)), rng)
    perp = np.eye(hom.n) - hom.V @ dag(hom.V)
    W = np.linalg.eigh(perp)[1][:, hom.m * hom.j:]
    k = W.shape[1]
    qp = random_projection(k, int(rng.integers(0, k + 1)), rng) if k else np.zeros((0, 0))
    return hom.V @ np.kron(np.eye(hom.m), q) @ dag(hom.V) + W @ qp @ dag(W)
