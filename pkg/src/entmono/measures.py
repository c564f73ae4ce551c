"""Entanglement measures and the convex-roof optimizer.

Entropy of entanglement for pure states, Wootters concurrence and the
closed-form entanglement of formation for two-qubit mixed states, the tangle
across a qubit-vs-rest cut, and a multi-start convex-roof minimizer for
mixed-state extensions. Logarithms are base 2 throughout and 0*log(0) is 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    import numba
    from numba import njit as _njit
    from numba import prange as _prange

    # The default TBB probe is noisy on some installs; workqueue is always
    # available and the restart loop is embarrassingly parallel anyway.
    numba.config.THREADING_LAYER = "workqueue"
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False
    _prange = range

    def _njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap

from . import linalg
from .states import (
    DensityMatrix,
    Ensemble,
    PureState,
    cut_matrix,
    normalize_cut,
    rng_stream,
)

MEASURE_TANGLE = "tangle"
MEASURE_EOF = "eof"

# Pure-state functionals the roof optimizer can average; both are evaluated
# across the cut "first subsystem vs the rest".
ROOF_FUNCTIONALS = ("entropy", "tangle")


def _xlog2x(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = x * np.log2(x)
    return np.where(x > 0.0, out, 0.0)


def binary_entropy(x) -> np.ndarray:
    """h(x) = -x log2 x - (1-x) log2 (1-x), elementwise."""
    x = np.asarray(x, dtype=float)
    return -_xlog2x(x) - _xlog2x(1.0 - x)


def eof_from_tangle(tau) -> np.ndarray:
    """Entanglement of formation as a function of squared concurrence.

    h((1 + sqrt(1 - tau)) / 2), elementwise; exactly 0 at tau=0 and 1 at tau=1.
    """
    tau = np.asarray(tau, dtype=float)
    x = 0.5 * (1.0 + np.sqrt(np.clip(1.0 - tau, 0.0, 1.0)))
    return binary_entropy(x)


def entropy_of_entanglement(state: PureState, cut) -> float:
    """Von Neumann entropy (bits) of either reduced state across `cut`.

    Computed from the squared singular values of the amplitude matrix, which
    are the common spectrum of both sides.
    """
    s = np.linalg.svd(cut_matrix(state, cut), compute_uv=False)
    p = np.clip(s * s, 0.0, 1.0)
    return float(-np.sum(_xlog2x(p)))


def _require_two_qubits(rho: DensityMatrix):
    if rho.dims != (2, 2):
        raise ValueError(f"expected a two-qubit state with dims (2, 2), got {rho.dims}")


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    max(0, l1 - l2 - l3 - l4) with l_i the descending square roots of the
    eigenvalues of rho @ spin_flip(rho). Tiny negative or imaginary parts
    from rounding are discarded.
    """
    _require_two_qubits(rho)
    return float(concurrence_of_matrices(rho.matrix[None])[0])


def concurrence_of_matrices(mats: np.ndarray) -> np.ndarray:
    """Concurrence for a batch of two-qubit density matrices (..., 4, 4)."""
    flipped = linalg._SIGMA_YY @ mats.conj() @ linalg._SIGMA_YY
    ev = np.linalg.eigvals(mats @ flipped).real
    # Exact zeros of the product come back as ~1e-16 solver noise, which the
    # square root would blow up to ~1e-8; floor them first.
    ev[ev < 1e-13] = 0.0
    lam = np.sort(np.sqrt(ev), axis=-1)
    c = lam[..., 3] - lam[..., 2] - lam[..., 1] - lam[..., 0]
    return np.clip(c, 0.0, 1.0)


def eof_closed_form(rho: DensityMatrix) -> float:
    """Two-qubit entanglement of formation via the concurrence closed form."""
    _require_two_qubits(rho)
    c = concurrence(rho)
    return float(eof_from_tangle(c * c))


def tangle_pure(state: PureState, cut) -> float:
    """Squared concurrence of a pure state across a qubit-vs-rest cut.

    The kept side of `cut` must be a single qubit; the value is 4 det(rho_A)
    = 2 (1 - Tr rho_A^2) of that qubit's reduced state.
    """
    kept = normalize_cut(state.dims, cut)
    if len(kept) != 1 or state.dims[kept[0]] != 2:
        raise ValueError(f"cut must keep exactly one qubit, got indices {kept} of dims {state.dims}")
    m = cut_matrix(state, kept)
    g = m @ m.conj().T
    det = g[0, 0].real * g[1, 1].real - abs(g[0, 1]) ** 2
    return float(np.clip(4.0 * det, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Convex roof
# ---------------------------------------------------------------------------


@dataclass
class RoofConfig:
    """Settings for the convex-roof optimizer.

    ensemble_size defaults to max(4, rank^2). `restarts` random isometry
    starts run in addition to the deterministic eigen-decomposition start,
    so the reported value never exceeds the eigen-ensemble average. A sweep
    visits every member pair once; a restart counts as converged when a
    full sweep improves it by less than `tol`.
    """

    ensemble_size: int | None = None
    restarts: int = 32
    tol: float = 1e-8
    max_sweeps: int = 5000
    seed: int = 0


@dataclass
class RoofResult:
    """Best ensemble found, its average value, and a convergence flag."""

    value: float
    ensemble: Ensemble
    iterations: int
    converged: bool


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


def _weighted_terms(members: np.ndarray, d0: int, functional: str) -> np.ndarray:
    """p * f(psi / sqrt(p)) for unnormalized members (..., D), p = |psi|^2.

    The cut is (first subsystem of dimension d0) vs the rest; members with
    vanishing weight contribute 0.
    """
    if d0 == 2:
        half = members.shape[-1] // 2
        u = members[..., :half]
        w = members[..., half:]
        g00 = _abs2(u).sum(-1)
        g11 = _abs2(w).sum(-1)
        g01 = np.sum(u * w.conj(), axis=-1)
        p = g00 + g11
        psafe = np.where(p > 0.0, p, 1.0)
        det = np.clip(g00 * g11 - _abs2(g01), 0.0, None)
        tau = np.clip(4.0 * det / (psafe * psafe), 0.0, 1.0)
        f = tau if functional == "tangle" else eof_from_tangle(tau)
        return np.where(p > 1e-30, p * f, 0.0)
    if functional == "tangle":
        raise ValueError("the tangle functional needs a qubit on the kept side")
    # Generic entropy path for larger local dimension: per-member eigenvalues.
    d_rest = members.shape[-1] // d0
    m = members.reshape(members.shape[:-1] + (d0, d_rest))
    g = np.einsum("...ij,...kj->...ik", m, m.conj())
    p = np.einsum("...ii->...", g).real
    psafe = np.where(p > 0.0, p, 1.0)
    lam = np.clip(np.linalg.eigvalsh(g) / psafe[..., None], 0.0, 1.0)
    ent = -np.sum(_xlog2x(lam), axis=-1)
    return np.where(p > 1e-30, p * ent, 0.0)


# Rotation search grid: theta in [0, pi/2] (6 points, includes the identity
# at 0) crossed with 8 phases, then shrinking 5x5 local refinements around
# the best point. The incumbent is always a candidate, so sweeps never
# regress.
_TH_GRID, _PH_GRID = (g.ravel() for g in np.meshgrid(
    np.linspace(0.0, np.pi / 2, 6),
    np.linspace(0.0, 2.0 * np.pi, 8, endpoint=False),
    indexing="ij",
))
_TH_STEP = (np.pi / 2) / 5
_PH_STEP = 2.0 * np.pi / 8
_OFFSETS = np.linspace(-1.0, 1.0, 5)
_REFINE_STAGES = 5
_REFINE_SHRINK = 0.4


@_njit(cache=True)
def _term_scalar(g00, g11, g01sq, is_tangle):
    # p * f from the Gram entries of one member's (2, rest) reshape.
    p = g00 + g11
    if p <= 1e-30:
        return 0.0
    det = g00 * g11 - g01sq
    if det < 0.0:
        det = 0.0
    tau = 4.0 * det / (p * p)
    if tau > 1.0:
        tau = 1.0
    if is_tangle:
        return p * tau
    x = 0.5 * (1.0 + math.sqrt(1.0 - tau))
    y = 1.0 - x
    ent = -x * math.log2(x)
    if y > 0.0:
        ent -= y * math.log2(y)
    return p * ent


@_njit(cache=True)
def _rot_objective(g00a, g11a, g01a, g00b, g11b, g01b, q00, q11, u, v, c, s, is_tangle):
    # Objective of the rotated pair A = c*a + s*b, B = -conj(s)*a + c*b,
    # expressed through the pair's quadratic-form coefficients. For
    # X = alpha*a + beta*b the Gram entries are
    #   g00(X) = |alpha|^2 g00a + |beta|^2 g00b + 2 Re(alpha conj(beta) q00)
    # and likewise for g11; g01(X) picks up the mixed terms u and v.
    aa = c * c
    bb = s.real * s.real + s.imag * s.imag

    ab = c * s.conjugate()
    g00 = aa * g00a + bb * g00b + 2.0 * (ab * q00).real
    g11 = aa * g11a + bb * g11b + 2.0 * (ab * q11).real
    g01 = aa * g01a + bb * g01b + ab * u + ab.conjugate() * v
    total = _term_scalar(g00, g11, g01.real * g01.real + g01.imag * g01.imag, is_tangle)

    ab = -s.conjugate() * c
    g00 = bb * g00a + aa * g00b + 2.0 * (ab * q00).real
    g11 = bb * g11a + aa * g11b + 2.0 * (ab * q11).real
    g01 = bb * g01a + aa * g01b + ab * u + ab.conjugate() * v
    return total + _term_scalar(g00, g11, g01.real * g01.real + g01.imag * g01.imag, is_tangle)


@_njit(cache=True)
def _refine_restart_dim2(members, tol, max_sweeps, th_grid, ph_grid, offsets,
                         stages, shrink, th_step, ph_step, is_tangle):
    """Pair-rotation coordinate descent for one restart, in place.

    Two bookkeeping shortcuts keep the tail sweeps cheap: a pair whose
    members are unchanged since its last visit would reproduce the identity
    rotation and is skipped exactly (version stamps), and a pair whose
    members have only seen sub-grid-cell rotations since its last visit
    skips the coarse scan and goes straight to local refinement around the
    identity. Returns (sweeps used, converged flag).
    """
    n, dim = members.shape
    half = dim // 2
    version = np.zeros(n, np.int64)
    big_version = np.zeros(n, np.int64)
    last_visit = np.full((n, n), -1, np.int64)
    last_big = np.full((n, n), -1, np.int64)
    stamp = 0
    big_stamp = 0
    sweeps = 0
    converged = False
    while sweeps < max_sweeps:
        gain = 0.0
        for a in range(n - 1):
            for b in range(a + 1, n):
                key = version[a] + version[b]
                if last_visit[a, b] == key:
                    continue
                g00a = 0.0
                g11a = 0.0
                g00b = 0.0
                g11b = 0.0
                g01a = 0.0 + 0.0j
                g01b = 0.0 + 0.0j
                q00 = 0.0 + 0.0j
                q11 = 0.0 + 0.0j
                u = 0.0 + 0.0j
                v = 0.0 + 0.0j
                for d in range(half):
                    a0 = members[a, d]
                    a1 = members[a, half + d]
                    b0 = members[b, d]
                    b1 = members[b, half + d]
                    g00a += a0.real * a0.real + a0.imag * a0.imag
                    g11a += a1.real * a1.real + a1.imag * a1.imag
                    g00b += b0.real * b0.real + b0.imag * b0.imag
                    g11b += b1.real * b1.real + b1.imag * b1.imag
                    g01a += a0 * a1.conjugate()
                    g01b += b0 * b1.conjugate()
                    q00 += a0 * b0.conjugate()
                    q11 += a1 * b1.conjugate()
                    u += a0 * b1.conjugate()
                    v += b0 * a1.conjugate()

                base = _rot_objective(g00a, g11a, g01a, g00b, g11b, g01b,
                                      q00, q11, u, v, 1.0, 0.0j, is_tangle)
                best_t = 0.0
                best_p = 0.0
                cur = base
                big_key = big_version[a] + big_version[b]
                if last_big[a, b] != big_key:
                    for g in range(th_grid.size):
                        c = math.cos(th_grid[g])
                        s = math.sin(th_grid[g]) * complex(math.cos(ph_grid[g]),
                                                           math.sin(ph_grid[g]))
                        val = _rot_objective(g00a, g11a, g01a, g00b, g11b, g01b,
                                             q00, q11, u, v, c, s, is_tangle)
                        if val < cur:
                            cur = val
                            best_t = th_grid[g]
                            best_p = ph_grid[g]
                dt = th_step
                dp = ph_step
                for _ in range(stages):
                    next_t = best_t
                    next_p = best_p
                    for i in range(offsets.size):
                        for j in range(offsets.size):
                            t = best_t + dt * offsets[i]
                            p = best_p + dp * offsets[j]
                            c = math.cos(t)
                            s = math.sin(t) * complex(math.cos(p), math.sin(p))
                            val = _rot_objective(g00a, g11a, g01a, g00b, g11b, g01b,
                                                 q00, q11, u, v, c, s, is_tangle)
                            if val < cur:
                                cur = val
                                next_t = t
                                next_p = p
                    best_t = next_t
                    best_p = next_p
                    dt *= shrink
                    dp *= shrink
                last_big[a, b] = big_key

                if base - cur > 1e-15:
                    c = math.cos(best_t)
                    s = math.sin(best_t) * complex(math.cos(best_p), math.sin(best_p))
                    sc = s.conjugate()
                    for d in range(dim):
                        xa = members[a, d]
                        xb = members[b, d]
                        members[a, d] = c * xa + s * xb
                        members[b, d] = -sc * xa + c * xb
                    gain += base - cur
                    stamp += 1
                    version[a] = stamp
                    stamp += 1
                    version[b] = stamp
                    if abs(best_t) > th_step:
                        big_stamp += 1
                        big_version[a] = big_stamp
                        big_stamp += 1
                        big_version[b] = big_stamp
                else:
                    last_visit[a, b] = key
        sweeps += 1
        if gain < tol:
            converged = True
            break
    return sweeps, converged


@_njit(cache=True, parallel=True)
def _refine_all_dim2(members, tol, max_sweeps, th_grid, ph_grid, offsets,
                     stages, shrink, th_step, ph_step, is_tangle,
                     sweep_counts, converged):
    # Restarts are independent, so the parallel loop is deterministic.
    for r in _prange(members.shape[0]):
        s, c = _refine_restart_dim2(members[r], tol, max_sweeps, th_grid, ph_grid,
                                    offsets, stages, shrink, th_step, ph_step,
                                    is_tangle)
        sweep_counts[r] = s
        converged[r] = c


def _best_rotations(objective, init_cur):
    """Coarse grid then shrinking local grids; returns per-entry (theta, phi).

    `objective(cos_t, sin_p)` scores (..., G) grids; `init_cur` is the
    identity-rotation score so the result never regresses.
    """
    theta = np.zeros(init_cur.shape)
    phi = np.zeros(init_cur.shape)
    cur = init_cur

    obj = objective(np.cos(_TH_GRID), np.sin(_TH_GRID) * np.exp(1j * _PH_GRID))
    best = np.argmin(obj, axis=-1)
    bobj = np.take_along_axis(obj, best[..., None], -1)[..., 0]
    better = bobj < cur
    theta = np.where(better, _TH_GRID[best], theta)
    phi = np.where(better, _PH_GRID[best], phi)
    cur = np.minimum(bobj, cur)

    dt, dp = _TH_STEP, _PH_STEP
    k = _OFFSETS.size
    for _ in range(_REFINE_STAGES):
        tg = theta[..., None, None] + dt * _OFFSETS[:, None]
        pg = phi[..., None, None] + dp * _OFFSETS[None, :]
        tg, pg = np.broadcast_arrays(tg, pg)
        tg = tg.reshape(theta.shape + (k * k,))
        pg = pg.reshape(phi.shape + (k * k,))
        obj = objective(np.cos(tg), np.sin(tg) * np.exp(1j * pg))
        best = np.argmin(obj, axis=-1)
        bobj = np.take_along_axis(obj, best[..., None], -1)[..., 0]
        better = bobj < cur
        theta = np.where(better, np.take_along_axis(tg, best[..., None], -1)[..., 0], theta)
        phi = np.where(better, np.take_along_axis(pg, best[..., None], -1)[..., 0], phi)
        cur = np.minimum(bobj, cur)
        dt *= _REFINE_SHRINK
        dp *= _REFINE_SHRINK
    return theta, phi, cur


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Partition all index pairs of 0..n-1 into rounds of disjoint pairs."""
    m = n + (n % 2)
    arr = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = arr[i], arr[m - 1 - i]
            if a < n and b < n:
                pairs.append((a, b) if a < b else (b, a))
        rounds.append(pairs)
        arr = [arr[0], arr[-1]] + arr[1:-1]
    return rounds


def _sweep_batched(members, rounds, d0, functional):
    """One sweep of pair rotations on a batch of restarts, in place.

    Fallback path; pairs within a round are disjoint, so updating them
    together equals updating them one by one.
    """
    gain = np.zeros(members.shape[0])
    for pairs in rounds:
        ai = [p[0] for p in pairs]
        bi = [p[1] for p in pairs]
        pa = members[:, ai]
        pb = members[:, bi]
        base = _weighted_terms(pa, d0, functional) + _weighted_terms(pb, d0, functional)

        def objective(ct, sp):
            a = ct[..., None] * pa[..., None, :] + sp[..., None] * pb[..., None, :]
            b = -sp.conj()[..., None] * pa[..., None, :] + ct[..., None] * pb[..., None, :]
            return _weighted_terms(a, d0, functional) + _weighted_terms(b, d0, functional)

        theta, phi, cur = _best_rotations(objective, base)
        c = np.cos(theta)[..., None]
        s = (np.sin(theta) * np.exp(1j * phi))[..., None]
        members[:, ai] = c * pa + s * pb
        members[:, bi] = -s.conj() * pa + c * pb
        gain += np.clip(base - cur, 0.0, None).sum(axis=-1)
    return gain


def convex_roof(functional: str, rho: DensityMatrix, config: RoofConfig | None = None) -> RoofResult:
    """Minimize the ensemble average of a pure-state functional over
    decompositions of `rho`.

    Every decomposition of a rank-k state into n >= k pure states arises from
    an n x k isometry mixing the weighted eigenvectors, so the search runs
    multi-start coordinate descent over that manifold using two-row
    Givens-with-phase updates. The result is an upper bound on the true roof
    and is monotonically nonincreasing across sweeps. Non-convergence is
    reported through `converged`, never raised.
    """
    if functional not in ROOF_FUNCTIONALS:
        raise ValueError(f"unknown functional {functional!r}; known: {ROOF_FUNCTIONALS}")
    cfg = config or RoofConfig()
    d0 = rho.dims[0]
    dim = rho.matrix.shape[0]

    w, v = np.linalg.eigh(rho.matrix)
    w = np.clip(w[::-1], 0.0, None)
    v = v[:, ::-1]
    rank = int(np.sum(w > 1e-12))

    if rank <= 1:
        member = PureState(v[:, 0] / np.linalg.norm(v[:, 0]), rho.dims)
        value = float(_weighted_terms(member.amplitudes[None], d0, functional)[0])
        return RoofResult(value, Ensemble(np.array([1.0]), (member,)), 0, True)

    n = cfg.ensemble_size if cfg.ensemble_size is not None else max(4, rank * rank)
    if n < rank:
        raise ValueError(f"ensemble size {n} is below the state rank {rank}")

    # Rows of `basis` are the weighted eigenvectors sqrt(l_i) e_i; an
    # isometry V maps them to unnormalized members V @ basis whose mixture
    # reproduces rho for any V with V^dag V = I.
    basis = (v[:, :rank] * np.sqrt(w[:rank])).T
    n_starts = cfg.restarts + 1
    members = np.empty((n_starts, n, dim), dtype=complex)
    members[0] = np.eye(n, rank) @ basis
    for r in range(1, n_starts):
        rng = rng_stream(cfg.seed, r)
        g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
        q, _ = np.linalg.qr(g)
        members[r] = q @ basis

    if d0 == 2 and _HAVE_NUMBA:
        sweep_counts = np.zeros(n_starts, dtype=np.int64)
        converged = np.zeros(n_starts, dtype=np.bool_)
        _refine_all_dim2(members, cfg.tol, int(cfg.max_sweeps), _TH_GRID, _PH_GRID,
                         _OFFSETS, _REFINE_STAGES, _REFINE_SHRINK, _TH_STEP, _PH_STEP,
                         functional == "tangle", sweep_counts, converged)
    else:
        # Lockstep batched fallback: all restarts sweep together, converged
        # ones drop out of the active set.
        rounds = _round_robin(n)
        total_sweeps = 0
        converged = np.zeros(n_starts, dtype=bool)
        sweep_counts = np.zeros(n_starts, dtype=int)
        active = np.arange(n_starts)
        while total_sweeps < cfg.max_sweeps and active.size:
            sub = members[active]
            gain = _sweep_batched(sub, rounds, d0, functional)
            members[active] = sub
            total_sweeps += 1
            sweep_counts[active] = total_sweeps
            done = gain < cfg.tol
            converged[active[done]] = True
            active = active[~done]

    totals = _weighted_terms(members, d0, functional).sum(axis=1)
    best = int(np.argmin(totals))
    chosen = members[best]

    weights = np.einsum("ij,ij->i", chosen, chosen.conj()).real
    keep = weights > 1e-12
    kept = chosen[keep]
    p = weights[keep]
    states = tuple(PureState(vec / math.sqrt(pi), rho.dims) for vec, pi in zip(kept, p))
    ensemble = Ensemble(p / p.sum(), states)
    value = float(_weighted_terms(kept, d0, functional).sum())
    return RoofResult(value, ensemble, int(sweep_counts[best]), bool(converged[best]))
