"""Order and equivalence of projection-cocycle generators.

``dominates`` decides ``X^F <= X^G`` (no common algebra needed).
``equivalent_projections`` and ``construct_intertwiner`` handle equivalence
through a partial-isometry-valued cocycle ``X^H``, which does need a common
commutative algebra. The ``*_sigma`` functions are the relations on the
subordinates of the CCR flow, parametrised by local projection pairs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .generators import (
    BlockGenerator,
    LocalProjectionPair,
    ProjectionGeneratorError,
    classify_projection_generator,
    delta,
    from_local_pair,
    gamma_left,
    is_contraction_generator,
    partial_isometry_defect,
    theta_pair,
)
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
    in_algebra_rect,
    opnorm,
    pisometry_between,
    range_basis,
    rank,
)


@dataclass
class RelationReport:
    relation: str
    holds: bool
    witnesses: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)


def _projection_data(F: BlockGenerator, partition, tol, name):
    try:
        return classify_projection_generator(F, partition, tol)
    except ProjectionGeneratorError as exc:
        raise ValidationError(f"{name} is not a projection generator: {exc.reason}") from exc


def compare(G: BlockGenerator, F: BlockGenerator, tol: Tolerance = DEFAULT_TOL,
            partition_f: BlockPartition | None = None,
            partition_g: BlockPartition | None = None) -> RelationReport:
    """Decide ``X^F <= X^G`` algebraically and structurally; the two must agree."""
    if (F.n, F.d) != (G.n, G.d):
        raise DimensionError("generators act on different spaces")
    L, P = _projection_data(F, partition_f, tol, "F")
    M, Q = _projection_data(G, partition_g, tol, "G")
    Gm, Fm = G.matrix(), F.matrix()
    algebraic = opnorm(Gm + Gm @ delta(F.n, F.d) @ Fm)
    Qperp = np.eye(Q.shape[0]) - Q
    structural = max(opnorm(P @ Q - P), opnorm(M - Qperp @ L))
    scale = (1 + opnorm(Fm)) * (1 + opnorm(Gm))
    alg_ok = tol.small(algebraic, scale)
    str_ok = tol.small(structural, scale)
    if alg_ok != str_ok:
        raise ConsistencyError(
            f"G + G Delta F residual {algebraic:.3g} and P<=Q, M=Q'L residual "
            f"{structural:.3g} disagree"
        )
    return RelationReport("dominates", alg_ok, {},
                          {"algebraic": algebraic, "structural": structural})


def dominates(G: BlockGenerator, F: BlockGenerator, tol: Tolerance = DEFAULT_TOL,
              partition_f: BlockPartition | None = None,
              partition_g: BlockPartition | None = None) -> bool:
    """``X^F_t <= X^G_t`` for all ``t``."""
    return compare(G, F, tol, partition_f, partition_g).holds


def equivalent_projections(F: BlockGenerator, G: BlockGenerator, partition: BlockPartition,
                           tol: Tolerance = DEFAULT_TOL) -> np.ndarray | None:
    """A partial isometry ``D`` in ``N (x) B(k)`` from ``P`` onto ``Q``, or ``None``."""
    _, P = _projection_data(F, partition, tol, "F")
    _, Q = _projection_data(G, partition, tol, "G")
    return pisometry_between(P, Q, partition, tol)


def _check_common_algebra(F, G, D, E, K, partition, tol):
    n, d = F.n, F.d
    if partition is not None:
        ok = (in_algebra(F.tensor_matrix(), partition, 1 + d, tol)
              and in_algebra(G.tensor_matrix(), partition, 1 + d, tol)
              and in_algebra(D, partition, d, tol)
              and in_algebra_rect(E, partition, d, 1, tol)
              and in_algebra(K, partition, 1, tol))
    else:
        family = (coefficients(F.tensor_matrix(), n, 1 + d, 1 + d)
                  + coefficients(G.tensor_matrix(), n, 1 + d, 1 + d)
                  + coefficients(D, n, d, d) + coefficients(E, n, d, 1) + [K])
        ok = commuting_family(family, tol)
    if not ok:
        raise ValidationError("F, G, D, E, K do not lie in a common commutative algebra")


def construct_intertwiner(F: BlockGenerator, G: BlockGenerator, D, E=None, K=None,
                          tol: Tolerance = DEFAULT_TOL,
                          partition: BlockPartition | None = None) -> BlockGenerator:
    """Build ``H`` with ``(X^H)* X^H = X^F`` and ``X^H (X^H)* = X^G``.

    ``C = M + E``, ``B = L* - E*D``, noise block ``D - I`` and
    ``A = -(L*L + M*M + E*E)/2 + iK``. Since ``BB* = L*L + E*E`` and
    ``C*C = M*M + E*E`` here, the real part of ``A`` is also
    ``-(BB* + C*C - E*E)/2``; the sign of ``E*E`` matters once ``E != 0``.
    Postconditions are checked before returning.
    """
    if (F.n, F.d) != (G.n, G.d):
        raise DimensionError("generators act on different spaces")
    n, d = F.n, F.d
    L, P = _projection_data(F, partition, tol, "F")
    M, Q = _projection_data(G, partition, tol, "G")
    D = as_matrix(D, n * d, n * d)
    E = np.zeros((n * d, n), dtype=complex) if E is None else as_matrix(E, n * d, n)
    K = np.zeros((n, n), dtype=complex) if K is None else as_matrix(K, n, n)
    if opnorm(dag(D) @ D - P) > tol.atol:
        raise ValidationError("D*D != P")
    if opnorm(D @ dag(D) - Q) > tol.atol:
        raise ValidationError("DD* != Q")
    Qperp = np.eye(n * d) - Q
    if opnorm(Qperp @ E) > tol.atol * max(1.0, opnorm(E)):
        raise ValidationError("Q-perp E != 0")
    if opnorm(K - dag(K)) > tol.atol * max(1.0, opnorm(K)):
        raise ValidationError("K is not self-adjoint")
    _check_common_algebra(F, G, D, E, K, partition, tol)

    C = M + E
    B = dag(L) - dag(E) @ D
    A = -0.5 * (dag(L) @ L + dag(M) @ M + dag(E) @ E) + 1j * K
    H = BlockGenerator(n, d, A, B, C, D - np.eye(n * d))

    scale = (1 + opnorm(H.matrix())) ** 2
    t_f, t_g = theta_pair(H)
    if not (tol.small(opnorm(t_f - F.matrix()), scale)
            and tol.small(opnorm(t_g - G.matrix()), scale)):
        raise ConsistencyError("constructed H does not intertwine F and G")
    if not is_contraction_generator(H, Tolerance(tol.atol * scale)):
        raise ConsistencyError("constructed H is not a contraction generator")
    if not tol.small(opnorm(partial_isometry_defect(H)), scale):
        raise ConsistencyError("constructed H fails the partial-isometry identity")
    return H


def extract_intertwiner_data(F: BlockGenerator, G: BlockGenerator,
                             H: BlockGenerator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Recover ``(D, E, K)`` from an intertwiner ``H``; inverse of ``construct_intertwiner``."""
    n, d = H.n, H.d
    D = H.D + np.eye(n * d)
    E = H.C - G.C
    B, C = H.B, H.C
    real_part = -0.5 * (B @ dag(B) + dag(C) @ C - dag(E) @ E)
    K = (H.A - real_part) / 1j
    return D, E, K


def intertwiner_residuals(F: BlockGenerator, G: BlockGenerator, H: BlockGenerator) -> dict:
    t_f, t_g = theta_pair(H)
    return {
        "theta_F": opnorm(t_f - F.matrix()),
        "theta_G": opnorm(t_g - G.matrix()),
        "partial_isometry": opnorm(partial_isometry_defect(H)),
        "contraction_max_eig": float(np.linalg.eigvalsh(
            (gamma_left(H) + dag(gamma_left(H))) / 2).max()),
    }


# relations on subordinates of the CCR flow, via local projection pairs

def _same_d(a: LocalProjectionPair, b: LocalProjectionPair):
    if a.d != b.d:
        raise DimensionError("pairs have different noise dimension")


def local_pair_leq(a: LocalProjectionPair, b: LocalProjectionPair,
                   tol: Tolerance = DEFAULT_TOL) -> bool:
    """``a <= b`` in Sub(sigma): ``P_a <= P_b`` and ``u_a - u_b`` in ``ran P_b`` and ``ker P_a``."""
    _same_d(a, b)
    w = a.u - b.u
    scale = 1 + np.linalg.norm(a.u) + np.linalg.norm(b.u)
    direct = (opnorm(a.P @ b.P - a.P) <= tol.atol
              and np.linalg.norm(b.P @ w - w) <= tol.atol * scale
              and np.linalg.norm(a.P @ w) <= tol.atol * scale)
    via_generators = dominates(from_local_pair(b), from_local_pair(a), tol)
    if direct != via_generators:
        raise ConsistencyError("local pair order disagrees with generator dominance")
    return direct


def sim_sigma(a: LocalProjectionPair, b: LocalProjectionPair,
              tol: Tolerance = DEFAULT_TOL) -> bool:
    _same_d(a, b)
    return rank(a.P, tol) == rank(b.P, tol)


def sim_sigma_witness(a: LocalProjectionPair, b: LocalProjectionPair,
                      tol: Tolerance = DEFAULT_TOL) -> BlockGenerator | None:
    """Intertwiner ``H`` between the generators of ``a`` and ``b``, or ``None``."""
    _same_d(a, b)
    F, G = from_local_pair(a), from_local_pair(b)
    D = pisometry_between(a.P, b.P, None, tol)
    if D is None:
        return None
    return construct_intertwiner(F, G, D, tol=tol, partition=BlockPartition.single(1))


def cles_sigma(a: LocalProjectionPair, b: LocalProjectionPair,
               tol: Tolerance = DEFAULT_TOL) -> tuple[bool, LocalProjectionPair | None]:
    """Subequivalence ``a`` precedes ``b``, with witness ``a'`` such that ``a ~ a' <= b``."""
    _same_d(a, b)
    r = rank(a.P, tol)
    if r > rank(b.P, tol):
        return False, None
    basis = range_basis(b.P, tol)[:, :r]
    witness = LocalProjectionPair(basis @ dag(basis), b.u, tol)
    if not (sim_sigma(a, witness, tol) and local_pair_leq(witness, b, tol)):
        raise ConsistencyError("subequivalence witness failed validation")
    return True, witness


def antisymmetry_check(a: LocalProjectionPair, b: LocalProjectionPair,
                       tol: Tolerance = DEFAULT_TOL) -> bool:
    both = cles_sigma(a, b, tol)[0] and cles_sigma(b, a, tol)[0]
    return (not both) or sim_sigma(a, b, tol)


def is_strict_chain(chain: list[LocalProjectionPair], tol: Tolerance = DEFAULT_TOL) -> bool:
    """Consecutive elements are strictly increasing for the subordination order."""
    for lo, hi in zip(chain, chain[1:]):
        if not local_pair_leq(lo, hi, tol) or local_pair_leq(hi, lo, tol):
            return False
    return True


def build_chain(d: int, tol: Tolerance = DEFAULT_TOL) -> list[LocalProjectionPair]:
    """Maximal chain ``(P_r, 0)``, ``P_r`` the projection onto the first ``r`` coordinates."""
    if d < 1:
        raise ValidationError("d must be positive")
    chain = []
    for r in range(d + 1):
        P = np.diag([1.0] * r + [0.0] * (d - r)).astype(complex)
        chain.append(LocalProjectionPair(P, np.zeros(d), tol))
    if not is_strict_chain(chain, tol):
        raise ConsistencyError("projection chain is not strictly increasing")
    # a strict chain has strictly increasing ranks in {0..d}, so 1 + d is maximal
    ranks = [rank(p.P, tol) for p in chain]
    if ranks != list(range(d + 1)):
        raise ConsistencyError("chain ranks are not 0..d")
    return chain


def can_extend_above(chain: list[LocalProjectionPair], tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether some pair lies strictly above the top of ``chain``.

    Strictly larger pairs have strictly larger rank, so this is possible
    exactly when the top has rank below ``d``.
    """
    top = chain[-1]
    return rank(top.P, tol) < top.d
