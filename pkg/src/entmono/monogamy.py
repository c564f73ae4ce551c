"""Monogamy audits over sampled tripartite records.

A record holds one state's triple (E_A(BC), E_AB, E_AC) and its residual;
the audits here check tangle and formation monogamy inequalities, fit the
minimal power alpha making (x^a + y^a)^(1/a) <= E hold, and evaluate the
dimension-dependent lower bounds on E_A(BC).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .measures import (
    MEASURE_EOF,
    MEASURE_TANGLE,
    RoofConfig,
    concurrence,
    concurrence_of_matrices,
    convex_roof,
    eof_closed_form,
    eof_from_tangle,
    entropy_of_entanglement,
    tangle_pure,
)
from .states import DensityMatrix, PureState, haar_random_pure, reduced_density, to_density

ALPHA_BRACKET_LOW = 1e-3
ALPHA_DEFAULT_CAP = 512.0
ALPHA_TOL = 1e-9


@dataclass(frozen=True)
class MonogamyRecord:
    """One state's (E_A(BC), E_AB, E_AC) triple plus residual.

    Deliberately unvalidated so synthetic violations can be constructed for
    the audits to catch.
    """

    e_abc: float
    e_ab: float
    e_ac: float
    residual: float
    measure_id: str
    state_seed: int | str = ""


def _require_three_qubits(dims):
    if tuple(dims) != (2, 2, 2):
        raise ValueError(f"expected three qubits with dims (2, 2, 2), got {tuple(dims)}")


def ckw_residual(state: PureState, tag: int | str = "") -> MonogamyRecord:
    """Tangle triple of a pure three-qubit state; residual is nonnegative."""
    _require_three_qubits(state.dims)
    rho = to_density(state)
    e_abc = tangle_pure(state, 0)
    e_ab = concurrence(reduced_density(rho, (0, 1))) ** 2
    e_ac = concurrence(reduced_density(rho, (0, 2))) ** 2
    return MonogamyRecord(e_abc, e_ab, e_ac, e_abc - e_ab - e_ac, MEASURE_TANGLE, tag)


def ckw_mixed(rho: DensityMatrix, config: RoofConfig | None = None,
              tag: int | str = "") -> MonogamyRecord:
    """Tangle triple of a mixed three-qubit state via the convex roof.

    The roof value is an upper bound on the true minimum, so a nonnegative
    residual is evidence rather than proof; a residual below -1e-6 signals
    an optimizer or theory problem and triggers a warning.
    """
    _require_three_qubits(rho.dims)
    e_abc = convex_roof("tangle", rho, config).value
    e_ab = concurrence(reduced_density(rho, (0, 1))) ** 2
    e_ac = concurrence(reduced_density(rho, (0, 2))) ** 2
    residual = e_abc - e_ab - e_ac
    if residual < -1e-6:
        warnings.warn(f"mixed tangle residual {residual:.3e} below -1e-6; "
                      "roof optimizer or theory alarm", stacklevel=2)
    return MonogamyRecord(e_abc, e_ab, e_ac, residual, MEASURE_TANGLE, tag)


def triple_eof(state: PureState, tag: int | str = "") -> MonogamyRecord:
    """Formation triple of a pure three-qubit state; residual may be negative."""
    _require_three_qubits(state.dims)
    rho = to_density(state)
    e_abc = entropy_of_entanglement(state, 0)
    e_ab = eof_closed_form(reduced_density(rho, (0, 1)))
    e_ac = eof_closed_form(reduced_density(rho, (0, 2)))
    return MonogamyRecord(e_abc, e_ab, e_ac, e_abc - e_ab - e_ac, MEASURE_EOF, tag)


def sample_pure_records(measure_id: str, count: int, seed: int) -> list[MonogamyRecord]:
    """Records for `count` Haar-random pure three-qubit states.

    State i is drawn with seed `seed + i` and matches ckw_residual /
    triple_eof on that state exactly; the measure math is vectorized across
    the batch.
    """
    if measure_id not in (MEASURE_TANGLE, MEASURE_EOF):
        raise ValueError(f"unknown measure {measure_id!r}")
    if count < 1:
        raise ValueError("count must be at least 1")
    amps = np.empty((count, 8), dtype=complex)
    for i in range(count):
        amps[i] = haar_random_pure((2, 2, 2), seed + i).amplitudes

    t = amps.reshape(count, 2, 2, 2)
    rho_ab = np.einsum("nabc,nxyc->nabxy", t, t.conj()).reshape(count, 4, 4)
    rho_ac = np.einsum("nabc,nxby->nacxy", t, t.conj()).reshape(count, 4, 4)
    g = np.einsum("nabc,nxbc->nax", t, t.conj())
    det_a = np.clip(g[:, 0, 0].real * g[:, 1, 1].real - np.abs(g[:, 0, 1]) ** 2, 0.0, None)
    tau_a = np.clip(4.0 * det_a, 0.0, 1.0)

    c_ab = concurrence_of_matrices(rho_ab)
    c_ac = concurrence_of_matrices(rho_ac)
    if measure_id == MEASURE_TANGLE:
        e_abc, e_ab, e_ac = tau_a, c_ab * c_ab, c_ac * c_ac
    else:
        # For a qubit reduced state the entropy is the same function of the
        # cut tangle that the formation closed form uses.
        e_abc = eof_from_tangle(tau_a)
        e_ab = eof_from_tangle(c_ab * c_ab)
        e_ac = eof_from_tangle(c_ac * c_ac)

    return [
        MonogamyRecord(float(e_abc[i]), float(e_ab[i]), float(e_ac[i]),
                       float(e_abc[i] - e_ab[i] - e_ac[i]), measure_id, seed + i)
        for i in range(count)
    ]


def monotonicity_audit(records, tol: float = 1e-8) -> list[MonogamyRecord]:
    """Records where a reduced entanglement exceeds the joint one beyond `tol`."""
    return [r for r in records if max(r.e_ab, r.e_ac) > r.e_abc + tol]


# ---------------------------------------------------------------------------
# Alpha-power fitting
# ---------------------------------------------------------------------------


@dataclass
class AlphaFitReport:
    """Fit of the minimal alpha with (e_ab^a + e_ac^a)^(1/a) <= e_abc.

    `alphas` carries per-record minima: NaN for skipped records (a zero
    side needs only alpha -> 0+) and inf for records admitting no finite
    alpha (max side reaches e_abc with the other side still positive).
    alpha_min = max over the finite entries, capped at alpha_cap; it is inf
    exactly when `finite` is False.
    """

    alpha_min: float
    finite: bool
    alphas: list[float]
    sample_size: int
    skipped: int
    infinite: int
    validation_violations: int
    alpha_cap: float


def _power_mean(x: float, y: float, alpha: float) -> float:
    if math.isinf(alpha):
        return max(x, y)
    if x <= 0.0 and y <= 0.0:
        return 0.0
    # Factor out the max for numerical stability at large alpha.
    m = max(x, y)
    return m * (((x / m) ** alpha + (y / m) ** alpha) ** (1.0 / alpha))


def _record_alpha(r: MonogamyRecord, cap: float) -> float:
    x, y = r.e_ab, r.e_ac
    if min(x, y) <= 0.0:
        return math.nan
    if max(x, y) >= r.e_abc - 1e-9:
        return math.inf
    lo, hi = ALPHA_BRACKET_LOW, cap
    if _power_mean(x, y, lo) <= r.e_abc:
        return lo
    if _power_mean(x, y, hi) > r.e_abc:
        return math.inf
    while hi - lo > ALPHA_TOL:
        mid = 0.5 * (lo + hi)
        if _power_mean(x, y, mid) <= r.e_abc:
            hi = mid
        else:
            lo = mid
    return hi


def count_alpha_violations(records, alpha: float, tol: float = 1e-9) -> int:
    """Records whose power mean at `alpha` exceeds e_abc by more than `tol`."""
    return sum(1 for r in records if _power_mean(r.e_ab, r.e_ac, alpha) > r.e_abc + tol)


def alpha_fit(records, alpha_cap: float = ALPHA_DEFAULT_CAP) -> AlphaFitReport:
    """Fit the minimal alpha over `records` by per-record bisection.

    The power mean is continuous and nonincreasing in alpha, so each record
    has a minimal alpha found on the bracket [1e-3, alpha_cap]. A record
    that admits no finite alpha witnesses an equality-style monogamy
    violation and flips `finite` off.
    """
    records = list(records)
    if not records:
        raise ValueError("alpha_fit needs at least one record")
    alphas = [_record_alpha(r, alpha_cap) for r in records]
    finite_alphas = [a for a in alphas if math.isfinite(a)]
    skipped = sum(1 for a in alphas if math.isnan(a))
    infinite = sum(1 for a in alphas if math.isinf(a))
    if infinite:
        alpha_min = math.inf
    elif finite_alphas:
        alpha_min = min(max(finite_alphas), alpha_cap)
    else:
        alpha_min = ALPHA_BRACKET_LOW
    violations = count_alpha_violations(records, alpha_min)
    return AlphaFitReport(alpha_min, not math.isinf(alpha_min), alphas, len(records),
                          skipped, infinite, violations, alpha_cap)


def equality_audit(records, epsilon: float, delta: float) -> list[MonogamyRecord]:
    """Witnesses against equality-style monogamy.

    Returns records whose joint entanglement sits within `epsilon` of the
    larger reduced one while the smaller reduced one still exceeds `delta`.
    """
    return [
        r for r in records
        if r.e_abc - max(r.e_ab, r.e_ac) < epsilon and min(r.e_ab, r.e_ac) > delta
    ]


# ---------------------------------------------------------------------------
# Dimension-dependent bounds
# ---------------------------------------------------------------------------


class BoundCheck(NamedTuple):
    passed: bool
    slack: float


@dataclass
class BoundAuditReport:
    """Sample-consistent constant for the dimension-dependent bound.

    c_empirical is the largest c the sample allows; records with a zero
    entanglement on the raised side carry no constraint and are counted in
    the exclusion fields.
    """

    c_empirical: float
    violations: int | None
    c_supplied: float | None
    dims: tuple[int, int, int]
    exponent: int
    sample_size: int
    excluded_zero_e_ac: int
    excluded_zero_e_ab: int


def _check_dims(dims) -> tuple[int, int, int]:
    out = tuple(int(d) for d in dims)
    if len(out) != 3 or any(d < 2 for d in out):
        raise ValueError(f"dims must be three integers >= 2, got {dims}")
    return out


def _power_bound(e_abc, e_ab, e_ac, dims, c, exponent) -> BoundCheck:
    d_a, d_b, d_c = _check_dims(dims)
    branch_ab = e_ab + c / (d_a * d_c * math.log2(min(d_a, d_c)) ** exponent) * e_ac ** exponent
    branch_ac = e_ac + c / (d_a * d_b * math.log2(min(d_a, d_b)) ** exponent) * e_ab ** exponent
    slack = e_abc - max(branch_ab, branch_ac)
    return BoundCheck(slack >= 0.0, slack)


def formation_bound(record: MonogamyRecord, dims, c: float) -> BoundCheck:
    """Eighth-power lower bound on a formation record's joint entanglement."""
    if record.measure_id != MEASURE_EOF:
        raise ValueError(f"bound applies to formation records, got {record.measure_id!r}")
    return _power_bound(record.e_abc, record.e_ab, record.e_ac, dims, c, 8)


def regularised_bound_arith(e_abc: float, e_ab: float, e_ac: float, dims, c: float) -> BoundCheck:
    """Fourth-power bound on externally supplied regularised-entropy values."""
    if min(e_abc, e_ab, e_ac) < 0.0 or c < 0.0:
        raise ValueError("entanglement values and c must be nonnegative")
    return _power_bound(e_abc, e_ab, e_ac, dims, c, 4)


def empirical_c(records, dims, exponent: int = 8, c: float | None = None) -> BoundAuditReport:
    """Largest bound constant consistent with a record sample.

    Minimizes (e_abc - e_ab) * d_A * d_C * log2(min(d_A, d_C))^exponent /
    e_ac^exponent over records with e_ac > 0 and the symmetric branch over
    e_ab > 0. When `c` is supplied, also counts records violating the bound
    at that c by more than 1e-9.
    """
    records = list(records)
    if not records:
        raise ValueError("empirical_c needs at least one record")
    if exponent not in (4, 8):
        raise ValueError(f"exponent must be 4 or 8, got {exponent}")
    d_a, d_b, d_c = _check_dims(dims)

    ratios = []
    excluded_ac = excluded_ab = 0
    for r in records:
        if r.e_ac > 0.0:
            ratios.append((r.e_abc - r.e_ab) * d_a * d_c
                          * math.log2(min(d_a, d_c)) ** exponent / r.e_ac ** exponent)
        else:
            excluded_ac += 1
        if r.e_ab > 0.0:
            ratios.append((r.e_abc - r.e_ac) * d_a * d_b
                          * math.log2(min(d_a, d_b)) ** exponent / r.e_ab ** exponent)
        else:
            excluded_ab += 1
    if not ratios:
        raise ValueError("no record constrains the bound (all have zero reduced entanglement)")

    violations = None
    if c is not None:
        violations = sum(
            1 for r in records
            if _power_bound(r.e_abc, r.e_ab, r.e_ac, dims, c, exponent).slack < -1e-9
        )
    return BoundAuditReport(min(ratios), violations, c, (d_a, d_b, d_c), exponent,
                            len(records), excluded_ac, excluded_ab)


def piecewise_bound(e_ab: float, e_ac: float, e_abc: float) -> float:
    """Piecewise monogamy bound: max below 4/5 of e_abc, shifted sum above.

    The mixed region (one coordinate below the 4/5 threshold, the other
    above) extends as max(e_ab, e_ac), which keeps the function continuous
    on the shared boundary and at least max everywhere.
    """
    if not (0.0 <= e_ab <= e_abc and 0.0 <= e_ac <= e_abc):
        raise ValueError(f"need 0 <= e_ab, e_ac <= e_abc, got ({e_ab}, {e_ac}, {e_abc})")
    threshold = 0.8 * e_abc
    if e_ab > threshold and e_ac > threshold:
        return e_ab + e_ac - threshold
    return max(e_ab, e_ac)
