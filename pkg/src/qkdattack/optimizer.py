"""Multi-start search for the adversary's optimal measurement.

The objective (I(X : K, Theta), or I(Theta : K, X) when the key bit is the
basis choice) is not concave in the POVM, so a single ascent
can stall in a local maximum.  Each restart parameterizes the measurement by
factors A_k with M_k = A_k^dag A_k (PSD by construction), takes a gradient
step on the factors, renormalizes with the S^(-1/2) sandwich where
S = sum_k M_k, and keeps the step only if the objective improved.  Step sizes
adapt multiplicatively (x1.2 on accept, x0.5 on reject, floor 1e-12).
Restart r draws its starting point from seed + r, so every reported number is
reproducible bit for bit and stable under restart-count changes.

All restarts advance in lockstep through stacked (restarts, n_outcomes, d, d)
arrays; this is an implementation detail, each restart's trajectory depends
only on its own start.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .information import Povm, lambda_fn
from .states import Protocol, PurifiedState, alpha_range, eve_conditional_state, purified_state

_INIT_STEP = 0.1
_STEP_FLOOR = 1e-12
_EIG_FLOOR = 1e-12
_STALL_LIMIT = 80
_AGREE_TOL = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 2000
    step_tolerance: float = 1e-9
    seed: int = 7
    alpha_grid_points: int = 41
    alpha_refine_iters: int = 3

    def __post_init__(self) -> None:
        if self.restarts < 1 or self.max_iters < 1 or self.alpha_grid_points < 1:
            raise ValueError("restarts, max_iters and alpha_grid_points must be positive")
        if self.step_tolerance <= 0:
            raise ValueError("step_tolerance must be positive")


@dataclass
class AttackResult:
    q: float
    protocol: Protocol
    i_ae: float
    best_alpha: float
    best_povm: Povm
    restarts_agreeing: int
    converged: bool


def _lam(t: np.ndarray) -> np.ndarray:
    # unvalidated fast path of lambda_fn for internal arrays
    return np.where(t > 1e-14, -t * np.log2(np.maximum(t, 1e-300)), 0.0)


def _conditional_stack(ps: PurifiedState, basis_count: int | None = None) -> np.ndarray:
    """Adversary states rho_E^(x,theta) stacked as (2, basis_count, d, d).

    Defaults to the protocol's attack basis count, the set of bases entering
    the adversary's estimator.
    """
    b = ps.protocol.attack_basis_count if basis_count is None else basis_count
    out = np.empty((2, b, 4, 4), dtype=complex)
    for x in (0, 1):
        for theta in range(b):
            out[x, theta], _ = eve_conditional_state(ps, x, theta)
    return out


def _renormalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map factor stacks (r, k, d, d) onto the completeness manifold.

    Returns (normalized factors, their POVM elements).  Gram eigenvalues are
    floored at 1e-12 before inversion; random factor stacks are full rank
    almost surely, so the floor only guards degenerate proposals.
    """
    m = np.einsum("rkji,rkjl->rkil", a.conj(), a)
    s = m.sum(axis=1)
    w, v = np.linalg.eigh(s)
    inv_sqrt = 1.0 / np.sqrt(np.clip(w, _EIG_FLOOR, None))
    r = np.einsum("rij,rj,rlj->ril", v, inv_sqrt, v.conj())
    a_n = np.einsum("rkij,rjl->rkil", a, r)
    m_n = np.einsum("rkji,rkjl->rkil", a_n.conj(), a_n)
    return a_n, m_n


def _probs(m: np.ndarray, rho_xt: np.ndarray) -> np.ndarray:
    """p(k | x, theta) for POVM stacks, shape (r, k, 2, basis_count)."""
    flat = rho_xt.reshape(-1, rho_xt.shape[-1], rho_xt.shape[-1])
    p = np.einsum("rkij,cji->rkc", m, flat).real
    return np.clip(p.reshape(m.shape[0], m.shape[1], 2, rho_xt.shape[1]), 0.0, 1.0)


def _objective(p: np.ndarray, key_on_basis: bool = False) -> np.ndarray:
    """Adversary information per restart from probability stacks (r, k, 2, b).

    Marginalizes over the key variable: the bit axis for key_on_basis
    (I(Theta : K, X)), the basis axis otherwise (I(X : K, Theta)).
    """
    b = p.shape[3]
    h_k_xt = _lam(p).sum(axis=(1, 2, 3)) / (2 * b)
    if key_on_basis:
        h_marg = _lam(p.mean(axis=3)).sum(axis=(1, 2)) / 2
    else:
        h_marg = _lam(p.mean(axis=2)).sum(axis=(1, 2)) / b
    return h_marg - h_k_xt


def _gradient(p: np.ndarray, rho_xt: np.ndarray, key_on_basis: bool = False) -> np.ndarray:
    """d I / d M_k evaluated at the current probabilities.

    Both variants share the form (log2 p - log2 pbar) / (2 b); only the axis
    of the marginal pbar differs.
    """
    b = p.shape[3]
    if key_on_basis:
        pbar = p.mean(axis=3)[:, :, :, None]
    else:
        pbar = p.mean(axis=2)[:, :, None, :]
    ratio = np.log2(np.maximum(p, 1e-18)) - np.log2(np.maximum(pbar, 1e-18))
    return np.einsum("rkxb,xbij->rkij", ratio / (2 * b), rho_xt)


class _Batch:
    """Lockstep state of several independent local searches."""

    def __init__(
        self,
        factors: np.ndarray,
        rho_xt: np.ndarray,
        step_tolerance: float,
        key_on_basis: bool = False,
    ):
        self.rho_xt = rho_xt
        self.tol = step_tolerance
        self.key_on_basis = key_on_basis
        self.a, self.m = _renormalize(factors)
        self.p = _probs(self.m, rho_xt)
        self.f = _objective(self.p, key_on_basis)
        n = factors.shape[0]
        self.step = np.full(n, _INIT_STEP)
        self.stall = np.zeros(n, dtype=int)
        self.active = np.ones(n, dtype=bool)
        self.converged = np.zeros(n, dtype=bool)
        self.iters = 0

    def step_once(self) -> None:
        idx = np.flatnonzero(self.active)
        if idx.size == 0:
            return
        a = self.a[idx]
        g = _gradient(self.p[idx], self.rho_xt, self.key_on_basis)
        direction = np.einsum("rkij,rkjl->rkil", a, g)
        cand = a + self.step[idx][:, None, None, None] * direction
        a_n, m_n = _renormalize(cand)
        p_n = _probs(m_n, self.rho_xt)
        f_n = _objective(p_n, self.key_on_basis)
        improved = f_n > self.f[idx]
        # improvements below tol + 1e-7|f| do not reset the stall window,
        # otherwise asymptotic creep keeps slow restarts alive to max_iters
        significant = f_n > self.f[idx] + self.tol + 1e-7 * np.abs(f_n)
        up = idx[improved]
        self.a[up], self.m[up] = a_n[improved], m_n[improved]
        self.p[up], self.f[up] = p_n[improved], f_n[improved]
        self.step[up] *= 1.2
        self.step[idx[~improved]] *= 0.5
        np.maximum(self.step, _STEP_FLOOR, out=self.step)
        self.stall[idx] += 1
        self.stall[idx[significant]] = 0
        done = idx[self.stall[idx] >= _STALL_LIMIT]
        self.converged[done] = True
        self.active[done] = False
        self.iters += 1

    def run(self, max_iters: int) -> None:
        while self.iters < max_iters and self.active.any():
            self.step_once()


@dataclass
class SearchState:
    """Mutable state threaded through local_search_step calls."""

    step_size: float = _INIT_STEP
    objective: float = 0.0
    iteration: int = 0
    converged: bool = False
    _batch: _Batch | None = field(default=None, repr=False)


def _random_factors(rng: np.random.Generator, n_outcomes: int, dim: int) -> np.ndarray:
    return rng.standard_normal((n_outcomes, dim, dim)) + 1j * rng.standard_normal((n_outcomes, dim, dim))


def random_povm(dim: int, n_outcomes: int, seed: int) -> Povm:
    """Haar-unstructured random POVM: Gaussian factors, sandwich-normalized."""
    if dim < 1 or n_outcomes < 1:
        raise ValueError("dim and n_outcomes must be positive")
    rng = np.random.default_rng(seed)
    factors = _random_factors(rng, n_outcomes, dim)[None]
    _, m = _renormalize(factors)
    return Povm(m[0])


def _factor_of_povm(povm: Povm) -> np.ndarray:
    """Hermitian square roots of the elements, a valid factor stack."""
    w, v = np.linalg.eigh(povm.elements)
    w = np.clip(w, 0.0, None)
    return np.einsum("kij,kj,klj->kil", v, np.sqrt(w), v.conj())


def local_search_step(povm: Povm, ps: PurifiedState, state: SearchState) -> tuple[Povm, float]:
    """One accept/reject ascent iteration; updates ``state`` in place."""
    if state._batch is None:
        state._batch = _Batch(
            _factor_of_povm(povm)[None],
            _conditional_stack(ps),
            1e-9,
            ps.protocol.key_on_basis,
        )
        state.objective = float(state._batch.f[0])
    batch = state._batch
    batch.step_once()
    state.step_size = float(batch.step[0])
    state.objective = float(batch.f[0])
    state.iteration = batch.iters
    state.converged = bool(batch.converged[0])
    return Povm(batch.m[0].copy()), state.objective


def _canonical_order(m: np.ndarray, p: np.ndarray, key_on_basis: bool = False) -> np.ndarray:
    """Relabel outcomes so bit r of index k is the guess for revealed value r.

    Bit theta of k guesses the key bit given announced basis theta; in the
    key_on_basis convention bit x of k guesses the basis given revealed bit x.
    The objective is invariant under outcome permutations, so the optimizer
    returns labels in arbitrary order.  The relabeling maximizes the expected
    guess accuracy over all bijections; a per-outcome argmax is not enough
    because optimal measurements carry exact posterior ties (an outcome can
    be informative in one basis and uniform in the other), which must be
    broken jointly to keep the labeling a bijection.
    """
    n, b = p.shape[0], p.shape[2]
    reveal = 2 if key_on_basis else b
    if n != 2**reveal or n > 8:
        return m
    # score[k, s]: guess-accuracy mass if outcome k is relabeled to slot s
    bits = (np.arange(n)[:, None] >> np.arange(reveal)[None, :]) & 1
    score = np.zeros((n, n))
    for s in range(n):
        if key_on_basis:
            score[:, s] = sum(p[:, x, bits[s, x]] for x in range(2))
        else:
            score[:, s] = sum(p[:, bits[s, t], t] for t in range(b))
    best_perm, best_val = None, -np.inf
    for perm in itertools.permutations(range(n)):
        val = score[np.arange(n), perm].sum()
        if val > best_val + 1e-15:
            best_perm, best_val = perm, val
    out = np.empty_like(m)
    out[list(best_perm)] = m
    return out


def _optimize_povm_full(
    ps: PurifiedState, n_outcomes: int, config: OptimizerConfig
) -> tuple[np.ndarray, float, int, bool]:
    key_on_basis = ps.protocol.key_on_basis
    rho_xt = _conditional_stack(ps)
    factors = np.stack(
        [
            _random_factors(np.random.default_rng(config.seed + r), n_outcomes, 4)
            for r in range(config.restarts)
        ]
    )
    batch = _Batch(factors, rho_xt, config.step_tolerance, key_on_basis)
    batch.run(config.max_iters)
    best = int(np.argmax(batch.f))
    f_best = float(batch.f[best])
    agreeing = int(np.count_nonzero(batch.f >= f_best - _AGREE_TOL))
    m = _canonical_order(batch.m[best], batch.p[best], key_on_basis)
    return m, max(f_best, 0.0), agreeing, bool(batch.converged[best])


def optimize_povm(ps: PurifiedState, n_outcomes: int, config: OptimizerConfig) -> tuple[Povm, float]:
    """Best measurement found over config.restarts independent ascents."""
    m, f, _, _ = _optimize_povm_full(ps, n_outcomes, config)
    return Povm(m), f


def optimize_attack(protocol: Protocol, q: float, config: OptimizerConfig) -> AttackResult:
    """Maximize the adversary's information jointly over the source weight alpha and the POVM.

    Coarse grid over the admissible alpha interval, then golden-section
    refinement around the best grid point; the measurement is re-optimized
    from scratch at every probed alpha.
    """
    if not 0.0 <= q <= 0.5:
        raise ValueError(f"q must lie in [0, 0.5], got {q}")
    lo, hi = alpha_range(protocol, q)
    n_out = protocol.povm_outcomes
    cache: dict[float, tuple[np.ndarray, float, int, bool]] = {}

    def evaluate(alpha: float) -> float:
        alpha = min(max(alpha, lo), hi)
        if alpha not in cache:
            ps = purified_state(protocol, q, alpha)
            cache[alpha] = _optimize_povm_full(ps, n_out, config)
        return cache[alpha][1]

    if hi - lo < 1e-12:
        grid = np.array([lo])
    else:
        grid = np.linspace(lo, hi, config.alpha_grid_points)
    values = np.array([evaluate(a) for a in grid])
    best_i = int(np.argmax(values))

    if hi - lo >= 1e-12:
        a_lo = grid[max(best_i - 1, 0)]
        a_hi = grid[min(best_i + 1, len(grid) - 1)]
        for _ in range(config.alpha_refine_iters):
            x1 = a_hi - _INVPHI * (a_hi - a_lo)
            x2 = a_lo + _INVPHI * (a_hi - a_lo)
            if evaluate(x1) >= evaluate(x2):
                a_hi = x2
            else:
                a_lo = x1

    best_alpha = max(cache, key=lambda a: cache[a][1])
    m, f, agreeing, converged = cache[best_alpha]
    return AttackResult(
        q=q,
        protocol=protocol,
        i_ae=f,
        best_alpha=float(best_alpha),
        best_povm=Povm(m),
        restarts_agreeing=agreeing,
        converged=converged,
    )
