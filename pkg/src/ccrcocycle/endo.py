"""Subordinates of a single normal *-homomorphism ``B(C^m) -> B(C^n)``.

Every such map is, up to unitary equivalence, ``S -> V (S (x) I_j) V*`` for an
isometry ``V: C^m (x) C^j -> C^n``; that canonical form is what ``NormalHom``
stores. Complete positivity is checked through Choi matrices.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .matcore import (
    DEFAULT_TOL,
    ConsistencyError,
    DimensionError,
    Tolerance,
    ValidationError,
    as_matrix,
    dag,
    is_projection,
    is_psd,
    opnorm,
    range_basis,
)


@dataclass(frozen=True, eq=False)
class NormalHom:
    m: int
    j: int
    n: int
    V: np.ndarray

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.j < 0:
            raise DimensionError("need m, n >= 1 and j >= 0")
        if self.m * self.j > self.n:
            raise DimensionError("m*j exceeds n")
        V = as_matrix(self.V, self.n, self.m * self.j) if self.j else np.zeros((self.n, 0), complex)
        if opnorm(dag(V) @ V - np.eye(self.m * self.j)) > 1e-9:
            raise ValidationError("V is not an isometry")
        object.__setattr__(self, "V", V)

    def __repr__(self):
        return f"NormalHom(m={self.m}, j={self.j}, n={self.n})"


@dataclass(frozen=True, eq=False)
class CPMap:
    """``S -> sum_r K_r S K_r*`` from ``B(C^source)`` to ``B(C^target)``."""

    source: int
    target: int
    kraus: tuple[np.ndarray, ...]

    def __call__(self, S) -> np.ndarray:
        S = as_matrix(S, self.source, self.source)
        out = np.zeros((self.target, self.target), dtype=complex)
        for K in self.kraus:
            out += K @ S @ dag(K)
        return out

    def choi(self) -> np.ndarray:
        return choi_matrix(self, self.source)


def matrix_unit(m: int, a: int, b: int) -> np.ndarray:
    E = np.zeros((m, m), dtype=complex)
    E[a, b] = 1
    return E


def choi_matrix(phi: Callable[[np.ndarray], np.ndarray], m: int) -> np.ndarray:
    """``sum_ab E_ab (x) phi(E_ab)``."""
    blocks = [[phi(matrix_unit(m, a, b)) for b in range(m)] for a in range(m)]
    return np.block(blocks)


def apply(hom: NormalHom, S) -> np.ndarray:
    S = as_matrix(S, hom.m, hom.m)
    return hom.V @ np.kron(S, np.eye(hom.j)) @ dag(hom.V)


def unit(hom: NormalHom) -> np.ndarray:
    return hom.V @ dag(hom.V)


def as_cp_map(hom: NormalHom) -> CPMap:
    kraus = tuple(hom.V @ np.kron(np.eye(hom.m), np.eye(hom.j)[:, [r]]) for r in range(hom.j))
    return CPMap(hom.m, hom.n, kraus)


def commutant_decomposition(hom: NormalHom, P, tol: Tolerance = DEFAULT_TOL):
    """Split ``P`` as ``V (I (x) q) V* + q'`` with ``q'`` below ``I - VV*``.

    Returns ``(q, q', residual)``; the residual measures how far ``P`` is from
    having that form with ``q``, ``q'`` projections.
    """
    P = as_matrix(P, hom.n, hom.n)
    V, m, j = hom.V, hom.m, hom.j
    R = dag(V) @ P @ V
    # partial trace over C^m gives q when R = I_m (x) q
    q = np.trace(R.reshape(m, j, m, j), axis1=0, axis2=2) / m if j else np.zeros((0, 0))
    perp = np.eye(hom.n) - V @ dag(V)
    q_prime = perp @ P @ perp
    residual = max(
        opnorm(R - np.kron(np.eye(m), q)) if j else 0.0,
        opnorm(V @ dag(V) @ P @ perp),
        opnorm(q @ q - q) if j else 0.0,
        opnorm(q_prime @ q_prime - q_prime),
    )
    return q, q_prime, residual


def is_commutant_projection(hom: NormalHom, P, tol: Tolerance = DEFAULT_TOL) -> bool:
    P = as_matrix(P, hom.n, hom.n)
    if not is_projection(P, tol):
        raise ValidationError("P is not a projection")
    commutes = all(
        opnorm(P @ X - X @ P) <= tol.atol
        for X in (apply(hom, matrix_unit(hom.m, a, b))
                  for a in range(hom.m) for b in range(hom.m))
    )
    structural = commutant_decomposition(hom, P, tol)[2] <= tol.atol * 10
    if commutes != structural:
        raise ConsistencyError("commutation test and canonical-form test disagree")
    return commutes


def _require_commutant(hom, P, tol):
    if not is_commutant_projection(hom, P, tol):
        raise ValidationError("P is not in the commutant of the range of the homomorphism")


def subordinate(hom: NormalHom, P, tol: Tolerance = DEFAULT_TOL) -> CPMap:
    """``S -> P alpha(S)`` for a commutant projection ``P``; checks ``alpha - gamma`` is CP."""
    P = as_matrix(P, hom.n, hom.n)
    _require_commutant(hom, P, tol)
    PV = P @ hom.V
    kraus = tuple(PV @ np.kron(np.eye(hom.m), np.eye(hom.j)[:, [r]]) for r in range(hom.j))
    gamma = CPMap(hom.m, hom.n, kraus)
    if not is_psd(choi_matrix(lambda S: apply(hom, S), hom.m) - gamma.choi(), tol):
        raise ConsistencyError("alpha - gamma has a non-PSD Choi matrix")
    return gamma


def subordinate_hom(hom: NormalHom, q, tol: Tolerance = DEFAULT_TOL) -> NormalHom:
    """The subordinate for ``P = V (I (x) q) V*`` as a homomorphism in canonical form."""
    q = as_matrix(q, hom.j, hom.j)
    if not is_projection(q, tol):
        raise ValidationError("q must be a projection on C^j")
    cols = range_basis(q, tol)
    return NormalHom(hom.m, cols.shape[1], hom.n, hom.V @ np.kron(np.eye(hom.m), cols))


def difference_choi(alpha: NormalHom, beta: NormalHom) -> np.ndarray:
    return choi_matrix(lambda S: apply(alpha, S) - apply(beta, S), alpha.m)


def dominates_endo(alpha: NormalHom, beta: NormalHom, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``alpha - beta`` is CP; decided structurally and by the Choi matrix."""
    if (alpha.m, alpha.n) != (beta.m, beta.n):
        raise DimensionError("homomorphisms have different source/target dimensions")
    bI = unit(beta)
    structural = True
    for a in range(alpha.m):
        for b in range(alpha.m):
            Eab = matrix_unit(alpha.m, a, b)
            aE = apply(alpha, Eab)
            if (opnorm(bI @ aE - aE @ bI) > tol.atol
                    or opnorm(apply(beta, Eab) - bI @ aE) > tol.atol):
                structural = False
    choi = is_psd(difference_choi(alpha, beta), tol)
    if structural != choi:
        raise ConsistencyError("structural domination test and Choi test disagree")
    return structural


def is_two_positive(phi: Callable[[np.ndarray], np.ndarray], m: int,
                    tol: Tolerance = DEFAULT_TOL, samples: int = 64, seed: int = 0) -> bool:
    """Sampled test that ``id_2 (x) phi`` maps positive matrices to positive ones.

    Inputs are the block matrices ``[[I, S], [S*, S*S]]`` for every matrix unit
    ``S`` and ``samples`` random rank-one positives on ``C^2 (x) C^m``. Exact
    for ``m <= 2``, where 2-positivity coincides with complete positivity.
    """
    if m <= 2:
        return is_psd(choi_matrix(phi, m), tol)
    rng = np.random.default_rng(seed)

    def amp(X):
        X4 = X.reshape(2, m, 2, m)
        return np.block([[phi(X4[0, :, 0, :]), phi(X4[0, :, 1, :])],
                         [phi(X4[1, :, 0, :]), phi(X4[1, :, 1, :])]])

    inputs = []
    for a in range(m):
        for b in range(m):
            S = matrix_unit(m, a, b)
            inputs.append(np.block([[np.eye(m), S], [dag(S), dag(S) @ S]]))
    for _ in range(samples):
        x = rng.normal(size=2 * m) + 1j * rng.normal(size=2 * m)
        inputs.append(np.outer(x, np.conj(x)))
    return all(is_psd(amp(X), tol) for X in inputs)


def same_subordinate(hom: NormalHom, P1, P2, tol: Tolerance = DEFAULT_TOL) -> bool:
    P1 = as_matrix(P1, hom.n, hom.n)
    P2 = as_matrix(P2, hom.n, hom.n)
    _require_commutant(hom, P1, tol)
    _require_commutant(hom, P2, tol)
    as_maps = all(
        opnorm((P1 - P2) @ apply(hom, matrix_unit(hom.m, a, b))) <= tol.atol
        for a in range(hom.m) for b in range(hom.m)
    )
    aI = unit(hom)
    structural = opnorm(aI @ P1 - aI @ P2) <= tol.atol
    if as_maps != structural:
        raise ConsistencyError("map comparison and alpha(I)-compression test disagree")
    return as_maps


def coordinate_commutant_projections(hom: NormalHom, tol: Tolerance = DEFAULT_TOL,
                                     limit: int = 12) -> Iterator[np.ndarray]:
    """Commutant projections ``V (I (x) q) V* + q'`` with ``q``, ``q'`` coordinate projections.

    ``q'`` is diagonal in the canonical basis of ``ran(I - VV*)``. At most
    ``2**limit`` projections are produced.
    """
    perp = np.eye(hom.n) - unit(hom)
    W = range_basis(perp, tol)
    free = hom.j + W.shape[1]
    if free > limit:
        raise ValidationError(f"{2 ** free} coordinate projections exceed the enumeration limit")
    for bits in itertools.product((0, 1), repeat=free):
        q = np.diag(bits[:hom.j]).astype(complex)
        qp = np.diag(bits[hom.j:]).astype(complex)
        P = hom.V @ np.kron(np.eye(hom.m), q) @ dag(hom.V) + W @ qp @ dag(W)
        yield P


def distinct_subordinates(hom: NormalHom, projections: Sequence[np.ndarray] | None = None,
                          tol: Tolerance = DEFAULT_TOL) -> list[tuple[np.ndarray, CPMap]]:
    """One ``(P, gamma_P)`` per distinct subordinate among the given commutant projections."""
    if projections is None:
        projections = list(coordinate_commutant_projections(hom, tol))
    reps: list[tuple[np.ndarray, CPMap]] = []
    for P in projections:
        if not any(same_subordinate(hom, P, R, tol) for R, _ in reps):
            reps.append((P, subordinate(hom, P, tol)))
    return reps
