"""Repeated-interaction approximation of the left Hudson-Parthasarathy QSDE.

This is a numerical oracle, not part of the algebraic theory: time ``[0, N tau)``
is cut into ``N`` slices, each carrying a copy of ``k^ = C + k``, and the
cocycle is the ordered product ``X_N = M<1> M<2> ... M<N>`` of a step matrix
acting on ``h`` and one slice at a time. The step is ``I + scale(F, tau)``
with the time block scaled by ``tau``, creation/annihilation blocks by
``sqrt(tau)`` and the number block left alone, which is first order.

States are arrays of shape ``(n, 1+d, ..., 1+d)`` (one axis per slice) and the
full operator on ``h (x) k^(x)N`` is never formed. Strong continuity of
``t -> X_t`` has no finite-``tau`` counterpart and is not modelled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .generators import BlockGenerator
from .matcore import DimensionError, ValidationError, as_matrix, dag


@dataclass(frozen=True, eq=False)
class SimVector:
    data: np.ndarray

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def slices(self) -> int:
        return self.data.ndim - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def __sub__(self, other: "SimVector") -> "SimVector":
        return SimVector(self.data - other.data)

    def __repr__(self):
        return f"SimVector(shape={self.data.shape}, norm={self.norm:.6g})"


def step_matrix(F: BlockGenerator, tau: float) -> np.ndarray:
    """``I + scale(F, tau)`` in ``h (x) k^`` tensor order."""
    if tau <= 0:
        raise ValidationError("tau must be positive")
    K = 1 + F.d
    w = np.r_[np.sqrt(tau), np.ones(F.d)]
    scale = np.outer(w, w)
    T4 = F.tensor_matrix().reshape(F.n, K, F.n, K) * scale[None, :, None, :]
    return np.eye(F.n * K, dtype=complex) + T4.reshape(F.n * K, F.n * K)


@dataclass(frozen=True, eq=False)
class DiscreteCocycle:
    F: BlockGenerator
    tau: float
    N: int
    step: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.N < 0:
            raise ValidationError("slice count must be non-negative")
        object.__setattr__(self, "step", step_matrix(self.F, self.tau))

    @property
    def horizon(self) -> float:
        return self.N * self.tau

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.F.n,) + (1 + self.F.d,) * self.N


def _apply_slot(S: np.ndarray, data: np.ndarray, slot: int) -> np.ndarray:
    """Apply ``S`` (on ``h (x) k^``) to ``h`` and slice ``slot`` (1-based)."""
    n, K = data.shape[0], data.shape[slot]
    pre = int(np.prod(data.shape[1:slot], dtype=int))
    v = data.reshape(n, pre, K, -1)
    out = np.einsum("xayb,ypbq->xpaq", S.reshape(n, K, n, K), v)
    return out.reshape(data.shape)


def _check(c: DiscreteCocycle, v: SimVector, last: int):
    if v.data.shape != c.shape:
        raise DimensionError(f"vector shape {v.data.shape} does not match {c.shape}")
    if last > c.N or last < 0:
        raise DimensionError(f"slot {last} outside 1..{c.N}")


def shift_apply(c: DiscreteCocycle, v: SimVector, s_slots: int, inner_steps: int) -> SimVector:
    """``sigma_s(X_t) v``: the step product placed in slots ``s+1 .. s+inner_steps``."""
    if s_slots < 0 or inner_steps < 0:
        raise DimensionError("slot counts must be non-negative")
    _check(c, v, s_slots + inner_steps)
    data = v.data
    for slot in range(s_slots + inner_steps, s_slots, -1):
        data = _apply_slot(c.step, data, slot)
    return SimVector(data)


def evolve(c: DiscreteCocycle, v: SimVector, steps: int | None = None) -> SimVector:
    """``X_steps v`` with ``X_steps = M<1> ... M<steps>``."""
    return shift_apply(c, v, 0, c.N if steps is None else steps)


def evolve_adjoint(c: DiscreteCocycle, v: SimVector, steps: int | None = None) -> SimVector:
    steps = c.N if steps is None else steps
    _check(c, v, steps)
    Sd = dag(c.step)
    data = v.data
    for slot in range(1, steps + 1):
        data = _apply_slot(Sd, data, slot)
    return SimVector(data)


def vacuum(n: int, d: int, N: int, u=None) -> SimVector:
    u = np.eye(n, dtype=complex)[:, 0] if u is None else np.asarray(u, dtype=complex)
    data = np.zeros((n,) + (1 + d,) * N, dtype=complex)
    data[(slice(None),) + (0,) * N] = u
    return SimVector(data)


def exponential_vector(f, tau: float, u=None) -> SimVector:
    """Normalised product vector with slice ``i`` equal to ``(1, sqrt(tau) f_i)``.

    ``f`` has one entry in ``C^d`` per slice; ``u`` is the ``h`` component
    (default the scalar 1, i.e. ``n = 1``).
    """
    f = np.asarray(f, dtype=complex)
    if f.ndim == 1:
        f = f[:, None]
    u = np.array([1.0], dtype=complex) if u is None else np.asarray(u, dtype=complex)
    data = u
    for fi in f:
        sl = np.r_[1.0, np.sqrt(tau) * fi]
        data = np.multiply.outer(data, sl / np.linalg.norm(sl))
    return SimVector(np.asarray(data))


def single_excitation(n: int, d: int, N: int, slot: int, direction: int, u=None) -> SimVector:
    """``u`` tensor vacuum except ``e_direction`` in slice ``slot`` (1-based)."""
    v = vacuum(n, d, N, u).data
    out = np.zeros_like(v)
    idx = [slice(None)] + [0] * N
    src = tuple(idx)
    idx[slot] = 1 + direction
    out[tuple(idx)] = v[src]
    return SimVector(out)


def random_vector(n: int, d: int, N: int, rng: np.random.Generator) -> SimVector:
    shape = (n,) + (1 + d,) * N
    data = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return SimVector(data / np.linalg.norm(data))


def inner(a: SimVector, b: SimVector) -> complex:
    return complex(np.vdot(a.data, b.data))


def vacuum_expectation(c: DiscreteCocycle, steps: int | None = None) -> np.ndarray:
    """``<e_i (x) vac, X_steps (e_j (x) vac)>`` as an ``n x n`` matrix.

    Each step touches its own slice only, so compressing slice by slice onto
    the vacuum is exact and the state is never built; this allows ``N`` far
    beyond the sizes :func:`evolve` can hold.
    """
    steps = c.N if steps is None else steps
    if not 0 <= steps <= c.N:
        raise DimensionError(f"steps {steps} outside 0..{c.N}")
    n, K = c.F.n, 1 + c.F.d
    vac_block = c.step.reshape(n, K, n, K)[:, 0, :, 0]
    out = np.eye(n, dtype=complex)
    for _ in range(steps):
        out = out @ vac_block
    return out


def standard_probes(n: int, d: int, N: int, seed: int = 0, count: int = 1,
                    exponential: Sequence | None = None) -> list[SimVector]:
    """Vacuum, one single-excitation vector, discretised exponential vectors of
    random step functions and ``count`` seeded random vectors, all of unit norm."""
    rng = np.random.default_rng(seed)
    u = rng.normal(size=n) + 1j * rng.normal(size=n)
    u /= np.linalg.norm(u)
    probes = [vacuum(n, d, N, u)]
    if d and N:
        probes.append(single_excitation(n, d, N, 1 + int(rng.integers(N)), int(rng.integers(d)), u))
    fs = [] if exponential is None else [np.asarray(f, dtype=complex) for f in exponential]
    if not fs and d:
        fs = [rng.normal(size=(N, d)) + 1j * rng.normal(size=(N, d))]
    for f in fs:
        if f.ndim == 1:
            f = f[:, None]
        if f.shape != (N, d):
            raise DimensionError(f"exponential probe must have shape {(N, d)}")
        # unit time scale: probe amplitudes do not depend on tau
        probes.append(exponential_vector(f, 1.0, u))
    for _ in range(count):
        probes.append(random_vector(n, d, N, rng))
    return probes


def defect_report(c: DiscreteCocycle, steps: int | None, probes: Sequence[SimVector],
                  other: DiscreteCocycle | None = None) -> dict:
    """Per-probe and maximal defects of ``X = X_steps``.

    ``hermiticity = ||(X - X*) v||``, ``idempotence = ||(X^2 - X) v||``,
    ``contractivity = ||X v|| - ||v||`` and, given ``other`` (``X^G``),
    ``subordination = ||(X X^G - X) v||``.
    """
    if not probes:
        raise ValidationError("need at least one probe")
    rows = []
    for v in probes:
        Xv = evolve(c, v, steps)
        row = {
            "norm": v.norm,
            "hermiticity": (Xv - evolve_adjoint(c, v, steps)).norm,
            "idempotence": (evolve(c, Xv, steps) - Xv).norm,
            "contractivity": Xv.norm - v.norm,
        }
        if other is not None:
            row["subordination"] = (evolve(c, evolve(other, v, steps), steps) - Xv).norm
        rows.append(row)
    keys = [k for k in rows[0] if k != "norm"]
    return {"per_probe": rows, "max": {k: max(r[k] for r in rows) for k in keys}}


# Defects below this are rounding noise of an identity that holds exactly in the
# discrete model (e.g. hermiticity for commuting Hermitian steps).
EXACT_FLOOR = 1e-12


def rate_study(F: BlockGenerator, taus: Sequence[float], N: int, probes: Sequence[SimVector],
               G: BlockGenerator | None = None, window: tuple[float, float] = (0.3, 0.7)) -> dict:
    """Defects at each ``tau`` (fixed slice count) and successive ratios.

    A defect series passes when every ratio lies in ``window`` or the defect is
    already at the exact floor at both ends of the step.
    """
    defects: dict[str, list[float]] = {}
    for tau in taus:
        c = DiscreteCocycle(F, tau, N)
        other = DiscreteCocycle(G, tau, N) if G is not None else None
        rep = defect_report(c, N, probes, other)["max"]
        for k, val in rep.items():
            if k != "contractivity":
                defects.setdefault(k, []).append(val)
    out = {"taus": list(taus), "slices": N, "defects": defects, "ratios": {}, "pass": {}}
    lo, hi = window
    for k, series in defects.items():
        ratios = []
        ok = True
        for a, b in zip(series, series[1:]):
            if a <= EXACT_FLOOR and b <= EXACT_FLOOR:
                ratios.append(None)
                continue
            r = b / a if a > 0 else float("inf")
            ratios.append(r)
            ok = ok and lo <= r <= hi
        out["ratios"][k] = ratios
        out["pass"][k] = ok
    return out


def horizon_probes(n: int, d: int, N: int, T: float, seed: int = 0, count: int = 2,
                   pieces: int = 4) -> list[SimVector]:
    """Probes with a fixed continuous-time meaning, resolved on ``N`` slices.

    The vacuum and ``count`` exponential vectors of random step functions with
    ``pieces`` constant pieces on ``[0, T)``; slice ``i`` carries the value of
    the piece containing its left endpoint, scaled by ``sqrt(T / N)``. The
    same seed gives the same continuum vectors for every ``N``.
    """
    rng = np.random.default_rng(seed)
    u = rng.normal(size=n) + 1j * rng.normal(size=n)
    u /= np.linalg.norm(u)
    probes = [vacuum(n, d, N, u)]
    idx = (np.arange(N) * pieces) // N
    for _ in range(count if d else 0):
        values = rng.normal(size=(pieces, d)) + 1j * rng.normal(size=(pieces, d))
        probes.append(exponential_vector(values[idx], T / N, u))
    return probes


def horizon_study(F: BlockGenerator, T: float, slice_counts: Sequence[int], seed: int = 0,
                  count: int = 2, G: BlockGenerator | None = None) -> dict:
    """Defects at a fixed horizon ``T`` with ``tau = T / N`` for each ``N``.

    At a fixed slice count the horizon shrinks with ``tau``, so a wrong vacuum
    block only costs ``O(T)``; holding ``T`` fixed keeps such defects visible.
    Probes come from :func:`horizon_probes`, so every resolution tests the
    same continuum vectors. ``limit`` is the first-order Richardson estimate
    ``2 d(tau/2) - d(tau)`` from the last two resolutions (meaningful when the
    slice counts double): near zero for defects that are ``O(tau)``.
    """
    if T <= 0:
        raise ValidationError("horizon must be positive")
    defects: dict[str, list[float]] = {}
    for N in slice_counts:
        probes = horizon_probes(F.n, F.d, N, T, seed=seed, count=count, pieces=min(slice_counts))
        c = DiscreteCocycle(F, T / N, N)
        other = DiscreteCocycle(G, T / N, N) if G is not None else None
        for k, val in defect_report(c, N, probes, other)["max"].items():
            defects.setdefault(k, []).append(val)
    ratios = {k: [b / a if a > EXACT_FLOOR else None for a, b in zip(s, s[1:])]
              for k, s in defects.items()}
    limit = {k: 2 * s[-1] - s[-2] if len(s) > 1 else None for k, s in defects.items()}
    return {"horizon": T, "slices": list(slice_counts), "defects": defects, "ratios": ratios,
            "limit": limit}


def dense_cocycle(c: DiscreteCocycle, steps: int | None = None) -> np.ndarray:
    """Materialised ``X_steps`` on ``h (x) k^(x)N``; only for tiny test cases."""
    steps = c.N if steps is None else steps
    n, K, N = c.F.n, 1 + c.F.d, c.N
    dim = n * K ** N
    if dim > 4096:
        raise ValidationError("dense cocycle too large")
    X = np.eye(dim, dtype=complex)
    S = as_matrix(c.step).reshape(n, K, n, K)
    for slot in range(1, steps + 1):
        # build M<slot> as an explicit kron with a permutation of the h/slot factors
        Mi = np.einsum("xayb,pq,rs->xparyqbs", S, np.eye(K ** (slot - 1)),
                       np.eye(K ** (N - slot)))
        X = X @ Mi.reshape(dim, dim)
    return X
