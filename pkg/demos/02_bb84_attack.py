"""Optimize the memoryless attack on bb84 and compare to the closed form.

Run:  python3 demos/02_bb84_attack.py
"""

import numpy as np

from qkdattack import BB84, OptimizerConfig, bb84_closed_form_iae, optimize_attack

CONFIG = OptimizerConfig(restarts=8, alpha_grid_points=9, alpha_refine_iters=2)


def main() -> None:
    print("q      i_ae (optimizer)  i_ae (closed form)  |diff|     alpha*   agree")
    for q in (0.02, 0.06, 0.10, 0.14, 0.18, 0.22, 0.25):
        res = optimize_attack(BB84, q, CONFIG)
        ref = bb84_closed_form_iae(q)
        print(
            f"{q:.2f}   {res.i_ae:.10f}    {ref:.10f}      {abs(res.i_ae - ref):.1e}"
            f"    {res.best_alpha:.4f}   {res.restarts_agreeing}/{CONFIG.restarts}"
        )

    res = optimize_attack(BB84, 0.10, CONFIG)
    povm = res.best_povm
    print(f"\noptimal POVM at q = 0.10 ({povm.n_outcomes} outcomes on dim {povm.dim}):")
    print(f"  completeness: max |sum E_k - I| = {np.max(np.abs(povm.elements.sum(axis=0) - np.eye(4))):.2e}")
    for k, el in enumerate(povm.elements):
        evals = np.linalg.eigvalsh(el)
        rank = int(np.sum(evals > 1e-9))
        print(f"  E_{k}: trace = {el.trace().real:.4f}, rank = {rank}")
    print("  each outcome votes one bit per basis; ties in the unread basis are exact")


if __name__ == "__main__":
    main()
