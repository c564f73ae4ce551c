import math

import numpy as np
import pytest

from entmono import linalg
from entmono.measures import (
    RoofConfig,
    binary_entropy,
    concurrence,
    convex_roof,
    entropy_of_entanglement,
    eof_closed_form,
    eof_from_tangle,
    tangle_pure,
)
from entmono.states import (
    DensityMatrix,
    PureState,
    ginibre_random_density,
    haar_random_pure,
    mix,
    named_state,
    reduced_density,
    to_density,
)

# High-precision closed-form value at squared concurrence 1/2, frozen from a
# 30-digit evaluation of the binary-entropy formula.
EOF_AT_HALF_TANGLE = 0.6008760366928561


def random_unitary(dim, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_entropy_bell_product_counterexample():
    assert abs(entropy_of_entanglement(named_state("bell"), (0,)) - 1.0) < 1e-12
    assert abs(entropy_of_entanglement(named_state("product"), (0,))) < 1e-12
    ce = named_state("counterexample")
    assert abs(entropy_of_entanglement(ce, (0,)) - 1.0) < 1e-9


def test_entropy_sides_agree():
    # Independent of the SVD route: eigenvalues of both reduced matrices.
    psi = haar_random_pure((2, 2, 2), 41)
    rho = to_density(psi)
    for cut, rest in [((0,), (1, 2)), ((1,), (0, 2))]:
        left = np.linalg.eigvalsh(reduced_density(rho, cut).matrix)
        right = np.linalg.eigvalsh(reduced_density(rho, rest).matrix)
        s_left = -sum(p * math.log2(p) for p in left if p > 1e-15)
        s_right = -sum(p * math.log2(p) for p in right if p > 1e-15)
        assert abs(s_left - s_right) < 1e-9
        assert abs(entropy_of_entanglement(psi, cut) - s_left) < 1e-9


def test_concurrence_bell_and_product():
    assert abs(concurrence(to_density(named_state("bell"))) - 1.0) < 1e-12
    assert concurrence(to_density(named_state("product"))) < 1e-12


def test_concurrence_w_reduced():
    # For a|01> + b|10> mixed with |00>, concurrence is 2|ab|; the W state
    # reduces to that form with a = b = 1/sqrt(3), so C = 2/3.
    rho_ab = reduced_density(to_density(named_state("w")), (0, 1))
    assert abs(concurrence(rho_ab) - 2.0 / 3.0) < 1e-9


def test_concurrence_matches_psd_sandwich():
    # Cross-check against the Hermitian square-root route
    # sqrt(sqrt(rho) rho~ sqrt(rho)).
    for seed in range(5):
        rho = ginibre_random_density(4, 4, 300 + seed, dims=(2, 2)).matrix
        root = linalg.sqrt_psd(rho)
        r = linalg.sqrt_psd(root @ linalg.spin_flip(rho) @ root)
        lam = np.sort(np.linalg.eigvalsh(r))[::-1]
        expected = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
        got = concurrence(DensityMatrix(rho, (2, 2)))
        assert abs(got - expected) < 1e-9


def test_concurrence_local_unitary_invariance():
    rho = ginibre_random_density(4, 3, 71, dims=(2, 2))
    base = concurrence(rho)
    for seed in range(3):
        u = np.kron(random_unitary(2, 500 + seed), random_unitary(2, 600 + seed))
        rotated = DensityMatrix(u @ rho.matrix @ u.conj().T, (2, 2))
        assert abs(concurrence(rotated) - base) < 1e-9


def test_concurrence_rejects_wrong_dims():
    with pytest.raises(ValueError, match="dims"):
        concurrence(DensityMatrix(np.eye(4) / 4, (4,)))


def test_eof_endpoints_exact():
    assert eof_from_tangle(0.0) == 0.0
    assert eof_from_tangle(1.0) == 1.0


def test_eof_counterexample_value():
    rho_ab = reduced_density(to_density(named_state("counterexample")), (0, 1))
    val = eof_closed_form(rho_ab)
    assert abs(concurrence(rho_ab) ** 2 - 0.5) < 1e-9
    assert abs(val - EOF_AT_HALF_TANGLE) < 1e-9
    assert abs(val - 0.6009) < 1e-3


def test_eof_strictly_increasing():
    grid = np.linspace(0.0, 1.0, 1000)
    values = eof_from_tangle(grid)
    assert np.all(np.diff(values) > 0)


def test_binary_entropy_convention():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert abs(binary_entropy(0.5) - 1.0) < 1e-15


def test_eof_convexity_spot_check():
    rng = np.random.default_rng(4)
    for seed in range(5):
        r1 = ginibre_random_density(4, 4, 800 + seed, dims=(2, 2))
        r2 = ginibre_random_density(4, 4, 900 + seed, dims=(2, 2))
        p = float(rng.uniform(0.1, 0.9))
        mixed = DensityMatrix(p * r1.matrix + (1 - p) * r2.matrix, (2, 2))
        lhs = eof_closed_form(mixed)
        rhs = p * eof_closed_form(r1) + (1 - p) * eof_closed_form(r2)
        assert lhs <= rhs + 1e-9


def test_tangle_named_states():
    assert abs(tangle_pure(named_state("ghz"), (0,)) - 1.0) < 1e-12
    assert abs(tangle_pure(named_state("w"), (0,)) - 8.0 / 9.0) < 1e-12
    zero_pair = PureState(np.array([1.0, 0, 0, 0]), (2, 2))
    assert tangle_pure(zero_pair, (0,)) == 0.0


def test_tangle_equals_concurrence_squared():
    for seed in range(5):
        psi = haar_random_pure((2, 2), 1000 + seed)
        tau = tangle_pure(psi, (0,))
        c = concurrence(to_density(psi))
        assert abs(tau - c * c) < 1e-9


def test_tangle_needs_single_qubit():
    psi = haar_random_pure((2, 2, 2), 1)
    with pytest.raises(ValueError, match="one qubit"):
        tangle_pure(psi, (0, 1))


# ---------------------------------------------------------------------------
# Convex roof
# ---------------------------------------------------------------------------


def ensemble_average(result, functional):
    acc = 0.0
    for p, member in zip(result.ensemble.weights, result.ensemble.members):
        if functional == "tangle":
            acc += p * tangle_pure(member, (0,))
        else:
            acc += p * entropy_of_entanglement(member, (0,))
    return acc


def test_roof_pure_input_is_singleton():
    psi = haar_random_pure((2, 2), 9)
    res = convex_roof("entropy", to_density(psi))
    assert len(res.ensemble.members) == 1
    assert res.converged
    assert abs(res.value - entropy_of_entanglement(psi, (0,))) < 1e-9


def test_roof_matches_closed_form_rank2():
    for seed in range(4):
        rho = ginibre_random_density(4, 2, 1400 + seed, dims=(2, 2))
        res = convex_roof("entropy", rho, RoofConfig(seed=seed))
        target = eof_closed_form(rho)
        assert res.value >= target - 1e-9
        assert abs(res.value - target) < 1e-3


def test_roof_separable_mixture_vanishes():
    basis = PureState(np.array([1.0, 0, 0, 0]), (2, 2))
    plus = PureState(np.full(4, 0.5), (2, 2))
    rho = DensityMatrix(
        0.5 * to_density(basis).matrix + 0.5 * to_density(plus).matrix, (2, 2))
    res = convex_roof("entropy", rho, RoofConfig(seed=0))
    assert res.value < 1e-6


def test_roof_result_invariants():
    rho = ginibre_random_density(4, 3, 77, dims=(2, 2))
    res = convex_roof("entropy", rho, RoofConfig(seed=3))
    assert np.max(np.abs(mix(res.ensemble).matrix - rho.matrix)) < 1e-8
    assert abs(res.value - ensemble_average(res, "entropy")) < 1e-9


def test_roof_not_above_eigen_average():
    rho = ginibre_random_density(4, 4, 177, dims=(2, 2))
    w, v = np.linalg.eigh(rho.matrix)
    avg = sum(
        wi * entropy_of_entanglement(PureState(v[:, i], (2, 2)), (0,))
        for i, wi in enumerate(w) if wi > 1e-12
    )
    res = convex_roof("entropy", rho, RoofConfig(seed=5))
    assert res.value <= avg + 1e-12


def test_roof_tangle_functional():
    rho = ginibre_random_density(8, 2, 88, dims=(2, 2, 2))
    res = convex_roof("tangle", rho, RoofConfig(seed=7))
    assert res.value >= 0.0
    assert abs(res.value - ensemble_average(res, "tangle")) < 1e-9


def test_roof_generic_local_dimension():
    # Qutrit pair exercises the non-qubit fallback path.
    rho = ginibre_random_density(9, 2, 99, dims=(3, 3))
    res = convex_roof("entropy", rho, RoofConfig(restarts=4, seed=1))
    w, v = np.linalg.eigh(rho.matrix)
    avg = sum(
        wi * entropy_of_entanglement(PureState(v[:, i], (3, 3)), (0,))
        for i, wi in enumerate(w) if wi > 1e-12
    )
    assert 0.0 <= res.value <= avg + 1e-12
    assert np.max(np.abs(mix(res.ensemble).matrix - rho.matrix)) < 1e-8


def test_roof_rejects_unknown_functional():
    rho = ginibre_random_density(4, 2, 5, dims=(2, 2))
    with pytest.raises(ValueError, match="unknown functional"):
        convex_roof("negativity", rho)


def test_roof_rejects_small_ensemble():
    rho = ginibre_random_density(4, 4, 6, dims=(2, 2))
    with pytest.raises(ValueError, match="below the state rank"):
        convex_roof("entropy", rho, RoofConfig(ensemble_size=2))
