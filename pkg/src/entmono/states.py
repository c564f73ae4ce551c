"""Construction, validation, and seeded sampling of pure and mixed states.

Basis convention: the first subsystem is the most significant digit of the
basis-state index, so for qubits |abc> sits at index 4a + 2b + c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg

NORM_TOL = 1e-10

NAMED_STATES = ("product", "bell", "max_entangled", "ghz", "w", "counterexample")


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based (Philox) generator for `seed`.

    Parallel workers draw from disjoint streams by passing consecutive
    stream offsets; stream i of seed s equals stream 0 of seed s + i.
    """
    return np.random.Generator(np.random.Philox(key=(int(seed) + int(stream)) % (1 << 64)))


def _as_dims(dims) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if not out or any(d < 1 for d in out):
        raise ValueError(f"subsystem dimensions must be positive, got {out}")
    return out


@dataclass(frozen=True)
class PureState:
    """Unit-norm amplitude vector tagged with its subsystem dimensions."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        dims = _as_dims(self.dims)
        if amps.ndim != 1 or amps.size != math.prod(dims):
            raise ValueError(f"amplitude count {amps.size} does not match dims {dims}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm is {norm}, expected 1")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix tagged with subsystem dimensions."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        dims = _as_dims(self.dims)
        if math.prod(dims) != m.shape[0]:
            raise ValueError(f"matrix dimension {m.shape[0]} does not match dims {dims}")
        asym = float(np.max(np.abs(m - m.conj().T)))
        if asym > linalg.HERMITICITY_TOL:
            raise ValueError(f"density matrix is not Hermitian (max asymmetry {asym:.3e})")
        m = (m + m.conj().T) / 2.0
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"trace is {tr}, expected 1")
        low = float(np.linalg.eigvalsh(m)[0])
        if low < -linalg.EIGENVALUE_CLIP:
            raise ValueError(f"density matrix has negative eigenvalue {low:.3e}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)


@dataclass(frozen=True)
class Ensemble:
    """Probability-weighted list of pure states on common dimensions."""

    weights: np.ndarray
    members: tuple[PureState, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        members = tuple(self.members)
        if w.ndim != 1 or w.size != len(members) or w.size == 0:
            raise ValueError("weights and members must be nonempty and of equal length")
        if np.any(w < -1e-12) or abs(float(w.sum()) - 1.0) > NORM_TOL:
            raise ValueError("weights must be nonnegative and sum to 1")
        dims = members[0].dims
        if any(s.dims != dims for s in members):
            raise ValueError("ensemble members must share the same dims")
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))
        object.__setattr__(self, "members", members)


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Schmidt form of a bipartite pure state, coefficients descending.

    Column i of `left_vectors`/`right_vectors` pairs with `coefficients[i]`;
    the state is sum_i c_i (left_i (x) right_i).
    """

    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if np.any(c < -1e-12) or np.any(np.diff(c) > 1e-12):
            raise ValueError("coefficients must be nonnegative and descending")
        if abs(float(np.sum(c * c)) - 1.0) > NORM_TOL:
            raise ValueError("squared coefficients must sum to 1")
        object.__setattr__(self, "coefficients", c)


def normalize_cut(dims, cut) -> tuple[int, ...]:
    """Return `cut` as a sorted tuple of kept subsystem indices.

    Accepts a single index or an iterable; the cut must be a nonempty proper
    subset of the subsystems.
    """
    if isinstance(cut, (int, np.integer)):
        cut = (int(cut),)
    kept = tuple(sorted({int(i) for i in cut}))
    n = len(dims)
    if not kept or len(kept) >= n:
        raise ValueError(f"cut must keep a nonempty proper subset of the {n} subsystems")
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError(f"cut indices must lie in 0..{n - 1}, got {kept}")
    return kept


def cut_matrix(state: PureState, cut) -> np.ndarray:
    """Amplitudes reshaped to a (kept, rest) matrix along the given cut."""
    kept = normalize_cut(state.dims, cut)
    rest = tuple(i for i in range(len(state.dims)) if i not in kept)
    t = state.amplitudes.reshape(state.dims)
    t = np.transpose(t, kept + rest)
    d_left = math.prod(state.dims[i] for i in kept)
    return t.reshape(d_left, -1)


def haar_random_pure(dims, seed: int) -> PureState:
    """Haar-distributed pure state: normalized complex Gaussian vector."""
    dims = _as_dims(dims)
    if any(d < 2 for d in dims):
        raise ValueError(f"each subsystem dimension must be at least 2, got {dims}")
    rng = rng_stream(seed)
    n = math.prod(dims)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(z / np.linalg.norm(z), dims)


def ginibre_random_density(dim: int, rank: int, seed: int, dims=None) -> DensityMatrix:
    """Random density matrix G G^dag / Tr(G G^dag), G complex Gaussian dim x rank.

    `dims` optionally tags the result with a subsystem split (default: one
    subsystem of size `dim`).
    """
    dim = int(dim)
    rank = int(rank)
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in 1..{dim}, got {rank}")
    dims = (dim,) if dims is None else _as_dims(dims)
    if math.prod(dims) != dim:
        raise ValueError(f"dims {dims} do not multiply to {dim}")
    rng = rng_stream(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, dims)


def named_state(name: str, d: int = 2) -> PureState:
    """One of the named states: product, bell, max_entangled, ghz, w, counterexample.

    `max_entangled` is sum_i |ii>/sqrt(d) for local dimension `d`; the others
    ignore `d`. `counterexample` is the three-qubit state with amplitudes
    1/sqrt(2), 1/2, 1/2 on |100>, |010>, |001>, whose pairwise formation
    entanglements add up to more than its 1|23 entropy.
    """
    if name == "product":
        return PureState(np.full(4, 0.5), (2, 2))
    if name == "bell":
        amps = np.zeros(4)
        amps[0] = amps[3] = 1.0 / math.sqrt(2.0)
        return PureState(amps, (2, 2))
    if name == "max_entangled":
        d = int(d)
        if d < 2:
            raise ValueError(f"local dimension must be at least 2, got {d}")
        amps = np.zeros(d * d)
        amps[:: d + 1] = 1.0 / math.sqrt(d)
        return PureState(amps, (d, d))
    if name == "ghz":
        amps = np.zeros(8)
        amps[0] = amps[7] = 1.0 / math.sqrt(2.0)
        return PureState(amps, (2, 2, 2))
    if name == "w":
        amps = np.zeros(8)
        amps[4] = amps[2] = amps[1] = 1.0 / math.sqrt(3.0)
        return PureState(amps, (2, 2, 2))
    if name == "counterexample":
        amps = np.zeros(8)
        amps[4] = 1.0 / math.sqrt(2.0)
        amps[2] = amps[1] = 0.5
        return PureState(amps, (2, 2, 2))
    raise ValueError(f"unknown state name {name!r}; known: {NAMED_STATES}")


def schmidt(state: PureState, cut) -> SchmidtDecomposition:
    """Schmidt decomposition of `state` along `cut` via SVD.

    Phases are fixed by rotating each left vector so its first component of
    magnitude above 1e-12 is real positive.
    """
    m = cut_matrix(state, cut)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    right = vh.copy()
    for i in range(s.size):
        nz = np.nonzero(np.abs(u[:, i]) > 1e-12)[0]
        if nz.size:
            phase = u[nz[0], i] / abs(u[nz[0], i])
            u[:, i] /= phase
            right[i] *= phase
    return SchmidtDecomposition(s, u, right.T)


def to_density(state: PureState) -> DensityMatrix:
    """Outer product |psi><psi| of a pure state."""
    psi = state.amplitudes
    return DensityMatrix(np.outer(psi, psi.conj()), state.dims)


def mix(ensemble: Ensemble) -> DensityMatrix:
    """Weighted mixture sum_i p_i |psi_i><psi_i| of an ensemble."""
    dims = ensemble.members[0].dims
    n = math.prod(dims)
    acc = np.zeros((n, n), dtype=complex)
    for p, member in zip(ensemble.weights, ensemble.members):
        acc += p * np.outer(member.amplitudes, member.amplitudes.conj())
    return DensityMatrix(acc, dims)


def reduced_density(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state of `rho` on the kept subsystems."""
    keep = tuple(sorted({int(i) for i in ([keep] if isinstance(keep, (int, np.integer)) else keep)}))
    sub = linalg.partial_trace(rho.matrix, rho.dims, keep)
    return DensityMatrix(sub, tuple(rho.dims[i] for i in keep))
