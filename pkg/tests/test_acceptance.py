"""Acceptance gate: every shipped claim checked at its stated tolerance.

Each test prints one PASS/FAIL line on the real stdout so the summary
survives pytest's capture, then asserts.
"""

import time

import numpy as np
import pytest

from qkdattack.cli import cmd_threshold
from qkdattack.information import binary_entropy, conditional_probs
from qkdattack.keyrate import bb84_closed_form_iae, find_threshold, key_rate
from qkdattack.linalg import partial_trace
from qkdattack.optimizer import OptimizerConfig, optimize_attack
from qkdattack.simulator import empirical_stats, joint_distribution, sample_rounds
from qkdattack.states import (
    BB84,
    PROTOCOLS,
    SARG04,
    SIX_STATE,
    alpha_range,
    eve_conditional_state,
    purified_state,
    purify,
    qber_in_basis,
    rho_ab,
)

C1_GRID = (0.02, 0.05, 0.08, 0.10, 0.12, 0.15, 0.20, 0.25)

# default restart budget; the alpha grid is thinned since every family's
# optimum sits at an interval endpoint refined by golden section anyway
ATTACK_CONFIG = OptimizerConfig(restarts=32, alpha_grid_points=15, alpha_refine_iters=3)
THRESHOLD_CONFIG = OptimizerConfig(restarts=12, alpha_grid_points=15, alpha_refine_iters=3)


@pytest.fixture
def report(request):
    """Print one criterion line on the live terminal, bypassing capture."""
    manager = request.config.pluginmanager.getplugin("capturemanager")

    def _line(num: int, ok: bool, detail: str) -> None:
        text = f"\n[criterion {num}] {'PASS' if ok else 'FAIL'}: {detail}"
        if manager is None:
            print(text, flush=True)
        else:
            with manager.global_and_fixture_disabled():
                print(text, flush=True)

    return _line


@pytest.fixture(scope="module")
def bb84_attacks():
    t0 = time.time()
    results = {q: optimize_attack(BB84, q, ATTACK_CONFIG) for q in C1_GRID}
    results["seconds"] = time.time() - t0
    return results


def test_criterion_1_bb84_closed_form(bb84_attacks, report):
    diffs = {q: abs(bb84_attacks[q].i_ae - bb84_closed_form_iae(q)) for q in C1_GRID}
    worst = max(diffs.values())
    ok = worst <= 1e-4
    report(
        1,
        ok,
        f"bb84 optimizer vs closed form on {len(C1_GRID)} points, "
        f"max |diff| = {worst:.2e} (tol 1e-4, {bb84_attacks['seconds']:.0f}s at 32 restarts)",
    )
    assert ok


def test_criterion_2_bb84_threshold(report):
    rep = find_threshold(BB84, 1e-3, THRESHOLD_CONFIG)
    ok = abs(rep.threshold_q - 0.154) <= 0.003
    report(2, ok, f"bb84 threshold {rep.threshold_q:.4f} vs 0.154 +/- 0.003")
    assert ok


def test_criterion_3_sixstate_threshold(report):
    rep = find_threshold(SIX_STATE, 1e-3, THRESHOLD_CONFIG)
    ok = abs(rep.threshold_q - 0.204) <= 0.003
    report(3, ok, f"sixstate threshold {rep.threshold_q:.4f} vs 0.204 +/- 0.003")
    assert ok


def test_criterion_4_sarg04_threshold(report):
    # the bit-valued reading (key on x) lands near 0.139 and misses; the
    # shipped estimator keys on the basis, the documented alternative
    rep = find_threshold(SARG04, 1e-3, THRESHOLD_CONFIG)
    ok = abs(rep.threshold_q - 0.175) <= 0.003
    report(4, ok, f"sarg04 threshold {rep.threshold_q:.4f} vs 0.175 +/- 0.003 (basis-keyed estimator)")
    assert ok


def test_criterion_5_bb84_maximum(bb84_attacks, report):
    i_max = bb84_attacks[0.25].i_ae
    ok = abs(i_max - 0.5) <= 1e-4
    report(5, ok, f"bb84 i_ae(0.25) = {i_max:.6f} vs 0.5 +/- 1e-4")
    assert ok


def test_criterion_6_sixstate_below_bb84(bb84_attacks, report):
    gaps = {}
    for q in (0.02, 0.05, 0.08, 0.10, 0.12):
        six = optimize_attack(SIX_STATE, q, ATTACK_CONFIG)
        gaps[q] = six.i_ae - bb84_attacks[q].i_ae
    worst = max(gaps.values())
    ok = worst <= 1e-6
    report(6, ok, f"sixstate i_ae <= bb84 i_ae on (0, 0.12], max gap = {worst:.2e}")
    assert ok


def test_criterion_7_structural_invariants(bb84_attacks, report):
    checks = []

    povm = bb84_attacks[0.10].best_povm
    checks.append(np.max(np.abs(povm.elements.sum(axis=0) - np.eye(4))) <= 1e-9)
    checks.append(float(np.min(np.linalg.eigvalsh(povm.elements))) >= -1e-9)

    rng = np.random.default_rng(100)
    protos = list(PROTOCOLS.values())
    round_trip = 0.0
    for _ in range(30):
        proto = protos[rng.integers(len(protos))]
        q = float(rng.uniform(0.0, 0.45))
        lo, hi = alpha_range(proto, q)
        rho, params = rho_ab(proto, q, float(rng.uniform(lo, hi)))
        ps = purify(params)
        back = partial_trace(np.outer(ps.psi, ps.psi.conj()), [2, 2, 4], keep=[0, 1])
        round_trip = max(round_trip, float(np.max(np.abs(back - rho))))
    checks.append(round_trip <= 1e-10)

    signal = 0.0
    for proto in protos:
        lo, hi = alpha_range(proto, 0.13)
        ps = purified_state(proto, 0.13, (lo + hi) / 2)
        marginals = [
            sum(0.5 * eve_conditional_state(ps, x, t)[0] for x in (0, 1))
            for t in range(proto.basis_count)
        ]
        for m in marginals[1:]:
            signal = max(signal, float(np.max(np.abs(m - marginals[0]))))
    checks.append(signal <= 1e-10)

    qber_err = 0.0
    for proto in protos:
        for q in (0.0, 0.07, 0.2):
            lo, hi = alpha_range(proto, q)
            rho, _ = rho_ab(proto, q, (lo + hi) / 2)
            for theta in range(proto.basis_count):
                # the sarg04 family pins only its computational-basis error
                # at q; its Hadamard-basis error is 3q/2 by construction
                expect = 1.5 * q if (proto.name == "sarg04" and theta == 1) else q
                qber_err = max(qber_err, abs(qber_in_basis(rho, proto, theta) - expect))
    checks.append(qber_err <= 1e-12)

    two_path = 0.0
    for proto in protos:
        lo, hi = alpha_range(proto, 0.09)
        ps = purified_state(proto, 0.09, (lo + hi) / 2)
        jd = joint_distribution(ps, povm)
        cd = conditional_probs(povm, ps, basis_count=proto.basis_count)
        recovered = jd.probs.sum(axis=2).transpose(2, 0, 1) * (2 * proto.basis_count)
        two_path = max(two_path, float(np.max(np.abs(recovered - cd.probs))))
    checks.append(two_path <= 1e-10)

    ok = all(checks)
    report(
        7,
        ok,
        "structural invariants "
        f"(povm={checks[0] and checks[1]}, purify={round_trip:.1e}<=1e-10, "
        f"no-signal={signal:.1e}<=1e-10, qber={qber_err:.1e}<=1e-12, "
        f"two-path={two_path:.1e}<=1e-10)",
    )
    assert ok


def test_criterion_8_monte_carlo(bb84_attacks, report):
    t0 = time.time()
    result = bb84_attacks[0.10]
    ps = purified_state(BB84, 0.10, result.best_alpha)
    jd = joint_distribution(ps, result.best_povm)
    samples = sample_rounds(jd, 10**6, seed=2024)
    qhat, ihat, _ = empirical_stats(samples, BB84.basis_count)
    band = 3 * np.sqrt(0.1 * 0.9 / 10**6)
    ok = abs(qhat - 0.10) <= band and abs(ihat - result.i_ae) <= 0.01
    report(
        8,
        ok,
        f"monte carlo at bb84 q=0.1, n=1e6: |qber {qhat:.5f} - 0.1| <= {band:.5f}, "
        f"|i {ihat:.5f} - {result.i_ae:.5f}| <= 0.01 ({time.time() - t0:.0f}s)",
    )
    assert ok


def test_criterion_9_threshold_determinism(tmp_path, report):
    cfg = OptimizerConfig(restarts=8, alpha_grid_points=9, alpha_refine_iters=2)
    a = cmd_threshold(SIX_STATE, 2e-3, cfg, str(tmp_path / "a.json"))
    b = cmd_threshold(SIX_STATE, 2e-3, cfg, str(tmp_path / "b.json"))
    a["manifest"].pop("duration_seconds")
    b["manifest"].pop("duration_seconds")
    same = a == b and f"{a['threshold_q']:.17g}" == f"{b['threshold_q']:.17g}"
    report(9, same, f"threshold reruns identical to all digits ({a['threshold_q']:.6g})")
    assert same


def test_reported_attack_values_follow_rate_identity(bb84_attacks):
    # consistency of the shipped artifacts, not a numbered criterion: at the
    # published threshold the rate vanishes within band width
    for q in C1_GRID:
        r = key_rate(q, bb84_attacks[q].i_ae)
        assert r == pytest.approx(1 - binary_entropy(q) - bb84_attacks[q].i_ae, abs=1e-12)
