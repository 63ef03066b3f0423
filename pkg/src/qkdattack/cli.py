"""Command-line front end emitting CSV curves and JSON reports.

Subcommands: curve (key-rate sweep as CSV), threshold (bisection report),
attack (single-point dump with the optimal POVM), simulate (Monte Carlo
cross-check).  Every artifact embeds a run manifest, or gets a sidecar
``<out>.manifest.json`` when the format has no room for one (CSV); reruns
with the same manifest arguments are byte-identical except for the recorded
duration.

Exit codes: 0 success, 2 usage or I/O error, 3 numerical failure (optimizer
did not produce a trustworthy result).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__
from .information import binary_entropy
from .optimizer import OptimizerConfig, optimize_attack
from .simulator import empirical_stats, joint_distribution, sample_rounds
from .states import PROTOCOLS, Protocol, purified_state
from .keyrate import (
    bb84_closed_form_iae,
    find_threshold,
    key_rate,
    reference_thresholds,
    tabulate_curve,
)

_FMT = "%.10g"


def _manifest(command: str, protocol: Protocol, params: dict, config: OptimizerConfig, t0: float) -> dict:
    return {
        "command": command,
        "protocol": protocol.name,
        "params": params,
        "config": asdict(config),
        "version": __version__,
        "duration_seconds": round(time.time() - t0, 3),
    }


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _write_json(path: str, payload: dict) -> None:
    _write_text(path, json.dumps(payload, indent=2) + "\n")


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def cmd_curve(
    protocol: Protocol,
    q_min: float,
    q_max: float,
    steps: int,
    config: OptimizerConfig,
    out_path: str,
) -> list:
    """CSV sweep of (q, i_ab, i_ae, rate, alpha, robust) over a QBER grid.

    For the two-basis bit-encoding protocol an extra column holds the
    analytic optimum wherever it is defined (q <= 1/4).  More than half the
    grid points non-robust counts as a numerical failure.
    """
    if not (0.0 <= q_min <= q_max <= 0.5) or (steps > 1 and q_min == q_max):
        raise UsageError(f"need 0 <= q_min < q_max <= 0.5, got [{q_min}, {q_max}]")
    if steps < 1:
        raise UsageError(f"steps must be positive, got {steps}")
    t0 = time.time()
    grid = np.linspace(q_min, q_max, steps)
    points = tabulate_curve(protocol, grid, config)

    closed = protocol.name == "bb84"
    header = "q,i_ab,i_ae,rate,alpha,robust" + (",i_ae_closed_form" if closed else "")
    lines = [header]
    for pt in points:
        row = [_FMT % v for v in (pt.q, pt.i_ab, pt.i_ae, pt.rate, pt.alpha)]
        row.append("true" if pt.robust else "false")
        if closed:
            row.append(_FMT % bb84_closed_form_iae(pt.q) if pt.q <= 0.25 else "")
        lines.append(",".join(row))
    _write_text(out_path, "\n".join(lines) + "\n")
    _write_json(
        out_path + ".manifest.json",
        _manifest("curve", protocol, {"q_min": q_min, "q_max": q_max, "steps": steps}, config, t0),
    )
    bad = sum(1 for pt in points if not pt.robust)
    if 2 * bad > len(points):
        raise NumericalFailure(f"{bad} of {len(points)} grid points are non-robust")
    return points


def cmd_threshold(protocol: Protocol, tolerance: float, config: OptimizerConfig, out_path: str) -> dict:
    """JSON report of the zero-crossing of the key rate."""
    t0 = time.time()
    try:
        rep = find_threshold(protocol, tolerance, config)
    except ValueError as exc:
        raise NumericalFailure(str(exc)) from exc
    payload = {
        "manifest": _manifest("threshold", protocol, {"tolerance": tolerance}, config, t0),
        "threshold_q": rep.threshold_q,
        "bracket": list(rep.bracket),
        "rate_low": rep.rate_low,
        "rate_high": rep.rate_high,
        "estimator": "basis-keyed" if protocol.key_on_basis else "bit-keyed",
        "references": rep.references,
    }
    _write_json(out_path, payload)
    return payload


def cmd_attack(protocol: Protocol, q: float, config: OptimizerConfig, out_path: str) -> dict:
    """JSON dump of the optimized attack at one error rate, POVM included."""
    if not 0.0 <= q <= 0.5:
        raise UsageError(f"q must lie in [0, 0.5], got {q}")
    t0 = time.time()
    result = optimize_attack(protocol, q, config)
    robust = 4 * result.restarts_agreeing >= config.restarts
    if not robust and not result.converged:
        raise NumericalFailure(
            f"only {result.restarts_agreeing}/{config.restarts} restarts agree and the best did not converge"
        )
    payload = {
        "manifest": _manifest("attack", protocol, {"q": q}, config, t0),
        "q": q,
        "i_ae": result.i_ae,
        "i_ab": 1.0 - binary_entropy(q),
        "rate": key_rate(q, result.i_ae),
        "best_alpha": result.best_alpha,
        "restarts_agreeing": result.restarts_agreeing,
        "converged": result.converged,
        "robust": robust,
        "povm_elements": [
            {"real": m.real.tolist(), "imag": m.imag.tolist()} for m in result.best_povm.elements
        ],
    }
    _write_json(out_path, payload)
    return payload


def cmd_simulate(
    protocol: Protocol,
    q: float,
    n_rounds: int,
    seed: int,
    config: OptimizerConfig,
    out_path: str,
) -> dict:
    """Monte Carlo report: sampled statistics against the analytic attack.

    The error rate is estimated over every sifted round; the information and
    guess statistics are estimated on the rounds whose basis enters the
    attack estimator (all rounds for two-basis protocols, the first basis
    pair for the three-basis one) so they estimate the same quantity the
    optimizer maximizes.
    """
    if not 0.0 <= q <= 0.5:
        raise UsageError(f"q must lie in [0, 0.5], got {q}")
    if n_rounds < 1000:
        raise UsageError(f"n_rounds must be at least 1000, got {n_rounds}")
    t0 = time.time()
    result = optimize_attack(protocol, q, config)
    ps = purified_state(protocol, q, result.best_alpha)
    jd = joint_distribution(ps, result.best_povm)
    samples = sample_rounds(jd, n_rounds, seed)
    qber_hat = float(np.mean(samples["y"] != samples["x"]))
    attack_rounds = samples[samples["theta"] < protocol.attack_basis_count]
    if len(attack_rounds) < 1000:
        raise UsageError(
            f"only {len(attack_rounds)} rounds fall in the attack bases; raise n_rounds"
        )
    _, i_ae_hat, accuracy = empirical_stats(
        attack_rounds, protocol.attack_basis_count, key_on_basis=protocol.key_on_basis
    )
    payload = {
        "manifest": _manifest(
            "simulate", protocol, {"q": q, "n_rounds": n_rounds, "sample_seed": seed}, config, t0
        ),
        "qber_hat": qber_hat,
        "i_ae_hat": i_ae_hat,
        "guess_accuracy": accuracy,
        "key_on_basis": protocol.key_on_basis,
        "analytic": {"q": q, "i_ae": result.i_ae, "best_alpha": result.best_alpha},
        "delta": {"qber": qber_hat - q, "i_ae": i_ae_hat - result.i_ae},
        "sifted_fraction": jd.sifted_fraction,
        "n_rounds": n_rounds,
        "n_attack_rounds": int(len(attack_rounds)),
    }
    _write_json(out_path, payload)
    return payload


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdattack",
        description="Optimal immediate-measurement eavesdropping: curves, thresholds, Monte Carlo checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    defaults = OptimizerConfig()

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--protocol", required=True, choices=sorted(PROTOCOLS))
        p.add_argument("--restarts", type=int, default=defaults.restarts)
        p.add_argument("--seed", type=int, default=defaults.seed)
        p.add_argument("--alpha-grid-points", type=int, default=defaults.alpha_grid_points)
        p.add_argument("--out", required=True, help="output file path")

    p_curve = sub.add_parser("curve", help="key-rate sweep over a QBER grid, CSV output")
    common(p_curve)
    p_curve.add_argument("--q-min", type=float, default=0.0)
    p_curve.add_argument("--q-max", type=float, default=0.25)
    p_curve.add_argument("--steps", type=int, default=26)

    p_thr = sub.add_parser("threshold", help="bisection for the zero key-rate QBER, JSON output")
    common(p_thr)
    p_thr.add_argument("--tolerance", type=float, default=1e-3)

    p_att = sub.add_parser("attack", help="optimized attack at a single QBER, JSON output")
    common(p_att)
    p_att.add_argument("--q", type=float, required=True)

    p_sim = sub.add_parser("simulate", help="Monte Carlo cross-validation, JSON output")
    common(p_sim)
    p_sim.add_argument("--q", type=float, required=True)
    p_sim.add_argument("--n-rounds", type=int, default=10**5)
    p_sim.add_argument("--sample-seed", type=int, default=0)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    protocol = PROTOCOLS[args.protocol]
    config = OptimizerConfig(
        restarts=args.restarts, seed=args.seed, alpha_grid_points=args.alpha_grid_points
    )
    try:
        if args.command == "curve":
            points = cmd_curve(protocol, args.q_min, args.q_max, args.steps, config, args.out)
            print(f"wrote {len(points)} rows to {args.out}")
        elif args.command == "threshold":
            payload = cmd_threshold(protocol, args.tolerance, config, args.out)
            print(f"threshold_q = {payload['threshold_q']:.6g} (wrote {args.out})")
        elif args.command == "attack":
            payload = cmd_attack(protocol, args.q, config, args.out)
            print(f"i_ae = {payload['i_ae']:.10g} at q = {args.q:g} (wrote {args.out})")
        else:
            payload = cmd_simulate(
                protocol, args.q, args.n_rounds, args.sample_seed, config, args.out
            )
            print(
                f"qber_hat = {payload['qber_hat']:.6g}, i_ae_hat = {payload['i_ae_hat']:.6g} "
                f"(wrote {args.out})"
            )
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
