import numpy as np
import pytest

import qkdattack.optimizer as op
from qkdattack.information import Povm, conditional_probs, mutual_info_ae
from qkdattack.keyrate import bb84_closed_form_iae
from qkdattack.optimizer import (
    AttackResult,
    OptimizerConfig,
    SearchState,
    local_search_step,
    optimize_attack,
    optimize_povm,
    random_povm,
)
from qkdattack.states import BB84, SARG04, SIX_STATE, alpha_range, purified_state


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(step_tolerance=0.0)
    cfg = OptimizerConfig()
    assert cfg.restarts == 32 and cfg.alpha_grid_points == 41


def test_random_povm_valid_and_deterministic():
    a = random_povm(4, 4, seed=3)
    b = random_povm(4, 4, seed=3)
    assert np.array_equal(a.elements, b.elements)
    assert np.max(np.abs(a.elements.sum(axis=0) - np.eye(4))) < 1e-9
    c = random_povm(4, 4, seed=4)
    assert not np.allclose(a.elements, c.elements)


def test_random_povm_single_outcome_is_identity():
    povm = random_povm(4, 1, seed=0)
    assert np.allclose(povm.elements[0], np.eye(4), atol=1e-9)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(21)
    for proto, key_on_basis in ((BB84, False), (SARG04, True)):
        ps = purified_state(proto, 0.1, sum(alpha_range(proto, 0.1)) / 2)
        rho_xt = op._conditional_stack(ps)
        m = random_povm(4, 4, seed=5).elements[None]
        h = rng.standard_normal((4, 4, 4)) + 1j * rng.standard_normal((4, 4, 4))
        h = (h + h.conj().transpose(0, 2, 1)) / 2
        g = op._gradient(op._probs(m, rho_xt), rho_xt, key_on_basis)
        analytic = float(np.einsum("rkij,kji->", g, h).real)
        eps = 1e-6
        f_plus = op._objective(op._probs(m + eps * h[None], rho_xt), key_on_basis)[0]
        f_minus = op._objective(op._probs(m - eps * h[None], rho_xt), key_on_basis)[0]
        numeric = (f_plus - f_minus) / (2 * eps)
        assert analytic == pytest.approx(numeric, abs=2e-6)


def test_local_search_monotone_and_complete():
    ps = purified_state(BB84, 0.1, 0.8)
    povm = random_povm(4, 4, seed=9)
    state = SearchState()
    trace = []
    for _ in range(120):
        povm, f = local_search_step(povm, ps, state)
        trace.append(f)
        assert np.max(np.abs(povm.elements.sum(axis=0) - np.eye(4))) < 1e-9
    assert all(b >= a for a, b in zip(trace, trace[1:]))
    assert trace[-1] > trace[0]
    assert state.iteration == 120


def test_optimize_povm_zero_noise():
    for proto, alpha in ((BB84, 1.0), (SIX_STATE, 1.0), (SARG04, 1.0)):
        ps = purified_state(proto, 0.0, alpha)
        _, f = optimize_povm(ps, 4, OptimizerConfig(restarts=4, max_iters=300))
        assert f <= 1e-8


def test_optimize_povm_deterministic():
    ps = purified_state(BB84, 0.1, 0.8)
    cfg = OptimizerConfig(restarts=6)
    povm_a, f_a = optimize_povm(ps, 4, cfg)
    povm_b, f_b = optimize_povm(ps, 4, cfg)
    assert f_a == f_b
    assert np.array_equal(povm_a.elements, povm_b.elements)


def test_optimize_povm_beats_fixed_reference():
    ps = purified_state(BB84, 0.1, 0.8)
    _, f = optimize_povm(ps, 4, OptimizerConfig(restarts=6))
    eye = np.eye(4, dtype=complex)
    reference = Povm(np.stack([np.outer(eye[k], eye[k]) for k in range(4)]))
    f_ref = mutual_info_ae(conditional_probs(reference, ps))
    assert f >= f_ref - 1e-12


def test_outcome_doubling_does_not_help():
    ps = purified_state(BB84, 0.1, 0.8)
    _, f4 = optimize_povm(ps, 4, OptimizerConfig(restarts=10))
    _, f8 = optimize_povm(ps, 8, OptimizerConfig(restarts=10))
    assert f8 - f4 <= 1e-5


def test_restart_calibration_bb84():
    # empirical calibration, frozen at first measurement: from Gaussian
    # starts at the optimal alpha, 45 of 64 seeded restarts reach the
    # closed-form optimum within 1e-4 (the rest sit at a lower critical
    # point near 0.2567); the multi-start maximum is what ships
    ps = purified_state(BB84, 0.1, 0.8)
    target = bb84_closed_form_iae(0.1)
    rho = op._conditional_stack(ps)
    factors = np.stack([op._random_factors(np.random.default_rng(7 + r), 4, 4) for r in range(32)])
    batch = op._Batch(factors, rho, 1e-9)
    batch.run(2000)
    hits = int(np.sum(np.abs(batch.f - target) <= 1e-4))
    assert hits >= 19  # 6/10 of restarts, with margin below the measured 70%
    assert np.max(batch.f) == pytest.approx(target, abs=1e-6)


def test_optimize_attack_result_invariants(light_config):
    result = optimize_attack(BB84, 0.1, light_config)
    assert isinstance(result, AttackResult)
    assert 0.0 <= result.i_ae <= 1.0
    lo, hi = alpha_range(BB84, 0.1)
    assert lo - 1e-12 <= result.best_alpha <= hi + 1e-12
    assert 1 <= result.restarts_agreeing <= light_config.restarts
    assert result.best_povm.n_outcomes == 4
    assert result.converged


def test_optimize_attack_matches_closed_form(light_config):
    result = optimize_attack(BB84, 0.1, light_config)
    assert result.i_ae == pytest.approx(bb84_closed_form_iae(0.1), abs=1e-6)
    assert result.best_alpha == pytest.approx(0.8, abs=1e-9)


def test_optimize_attack_monotone_in_q(light_config):
    values = [optimize_attack(BB84, q, light_config).i_ae for q in (0.05, 0.15, 0.25)]
    assert values[0] < values[1] < values[2]


def test_optimize_attack_sixstate_alpha_degenerate(light_config):
    result = optimize_attack(SIX_STATE, 0.12, light_config)
    assert result.best_alpha == pytest.approx(1 - 1.5 * 0.12, abs=1e-12)


def test_optimize_attack_rejects_bad_q(light_config):
    with pytest.raises(ValueError, match="q must lie"):
        optimize_attack(BB84, 0.7, light_config)


def test_canonical_labels_support_bit_guessing(light_config):
    # after relabeling, bit theta of the outcome is a better-than-chance
    # guess of x; for the basis-keyed protocol, bit x guesses theta
    result = optimize_attack(BB84, 0.1, light_config)
    ps = purified_state(BB84, 0.1, result.best_alpha)
    p = conditional_probs(result.best_povm, ps).probs
    acc = sum(
        0.25 * p[k, x, t]
        for k in range(4)
        for x in (0, 1)
        for t in (0, 1)
        if ((k >> t) & 1) == x
    )
    assert acc == pytest.approx(0.70, abs=0.02)

    result = optimize_attack(SARG04, 0.1, light_config)
    ps = purified_state(SARG04, 0.1, result.best_alpha)
    p = conditional_probs(result.best_povm, ps).probs
    acc = sum(
        0.25 * p[k, x, t]
        for k in range(4)
        for x in (0, 1)
        for t in (0, 1)
        if ((k >> x) & 1) == t
    )
    assert acc > 0.55
