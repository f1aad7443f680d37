"""
Potential-function tracer and lemma verifiers.

Clusters are grouped into size classes ``S_i`` (``|C|`` in ``[2^i, 2^(i+1))``).
Each class carries a try counter ``tau_i`` and a wasted-iteration counter
``w_i``; its potential is

    phi_i = (w_i / |U_i|) * (2^i)^(1 - 2/alpha) * sum_{C in U_i} cost_alpha(C)^(2/alpha)

over the undiscovered clusters ``U_i`` of the class (``phi_i = 0`` when
``U_i`` is empty). Counters advance once per selected center:

- the center lands in an undiscovered cluster of class ``i``: ``tau_i`` grows
  by one unless it already equals ``k_i``; the cluster moves to the hit set;
- the center lands in a hit cluster: every class ``j`` with ``tau_j < k_j``
  grows both ``tau_j`` and ``w_j`` by one.

The tracer observes a live seeding run through the shared CenterSet; the
verifiers replay stored traces or enumerate exact conditional expectations
over every possible next center.
"""

import math
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from dalpha_seeding.constants import LEMMA_RELATIVE_SLACK, SeedingMethod
from dalpha_seeding.core.diagnostics import cluster_moment, hit_cost_factor, weight_classes
from dalpha_seeding.core.geometry import add_center, cluster_costs
from dalpha_seeding.core.models import (
    AlphaHitCostCheck,
    CenterSet,
    ClusterCosts,
    Dataset,
    HitCostCheck,
    LemmaReport,
    PotentialState,
    SeedingConfig,
    SeedingTrace,
)
from dalpha_seeding.core.seeding import seed as dalpha_seed
from dalpha_seeding.exceptions import InvariantViolationError, UsageError
from dalpha_seeding.utils.logging import get_logger
from dalpha_seeding.utils.rng import stream

logger = get_logger(__name__)

COUNTER_CHECK = "counter_bounds"
WASTED_CHECK = "wasted_covers_undiscovered"
POTENTIAL_CHECK = "potential_upper_bound"
DECREASE_CHECK = "potential_hit_new"
HIT_COST_CHECK = "cost_hit_alpha_sampling"
ALPHA_HIT_CHECK = "alpha_cost_hit_alpha_sampling"
UNIFORM_HIT_CHECK = "alpha_cost_hit_uniform_sampling"


def _require_alpha(alpha: float) -> None:
    if not alpha >= 2.0 or math.isinf(alpha):
        raise UsageError("the potential needs a finite alpha >= 2", {"alpha": alpha})


def _class_potentials(
    alpha: float,
    w: Dict[int, int],
    undiscovered: Dict[int, FrozenSet[int]],
    alpha_norm: np.ndarray,
) -> Dict[int, float]:
    phi: Dict[int, float] = {}
    for i, clusters in undiscovered.items():
        if not clusters or w[i] == 0:
            phi[i] = 0.0
            continue
        weight = (2.0**i) ** (1.0 - 2.0 / alpha)
        total = float(sum(alpha_norm[c] for c in clusters))
        phi[i] = w[i] / len(clusters) * weight * total
    return phi


def init_state(ds: Dataset, alpha: float) -> PotentialState:
    """
    Counters at time zero: all zero, every cluster undiscovered, ``phi = 0``.

    Raises:
        UsageError: If the dataset is unlabeled or ``alpha`` is not finite and >= 2
    """
    _require_alpha(alpha)
    classes = weight_classes(ds)
    return PotentialState(
        alpha=alpha,
        t=0,
        cluster_class=classes.cluster_class,
        class_sizes=dict(classes.histogram),
        tau={i: 0 for i in classes.histogram},
        w={i: 0 for i in classes.histogram},
        undiscovered={i: frozenset(cs) for i, cs in classes.members.items()},
        hit=frozenset(),
        phi={i: 0.0 for i in classes.histogram},
        phi_total=0.0,
    )


def advance(state: PotentialState, chosen_cluster: int, costs: ClusterCosts) -> PotentialState:
    """
    Apply one counter update for a center chosen from ``chosen_cluster``.

    ``costs`` must describe the center set after the selection.

    Raises:
        UsageError: If the cluster id is out of range
        InvariantViolationError: If the cluster is both (or neither) hit and undiscovered
    """
    if not 0 <= chosen_cluster < len(state.cluster_class):
        raise UsageError("unknown cluster id", {"cluster": chosen_cluster})
    i = state.cluster_class[chosen_cluster]
    in_undiscovered = chosen_cluster in state.undiscovered[i]
    in_hit = chosen_cluster in state.hit
    if in_undiscovered == in_hit:
        raise InvariantViolationError(
            "cluster must be exactly one of undiscovered or hit",
            {"cluster": chosen_cluster, "undiscovered": in_undiscovered, "hit": in_hit},
        )

    tau = dict(state.tau)
    w = dict(state.w)
    undiscovered = dict(state.undiscovered)
    hit = state.hit
    if in_undiscovered:
        if tau[i] < state.class_sizes[i]:
            tau[i] += 1
        undiscovered[i] = undiscovered[i] - {chosen_cluster}
        hit = hit | {chosen_cluster}
    else:
        for j in tau:
            if state.tau[j] < state.class_sizes[j]:
                tau[j] += 1
                w[j] += 1

    phi = _class_potentials(state.alpha, w, undiscovered, costs.alpha_norm)
    return PotentialState(
        alpha=state.alpha,
        t=state.t + 1,
        cluster_class=state.cluster_class,
        class_sizes=state.class_sizes,
        tau=tau,
        w=w,
        undiscovered=undiscovered,
        hit=hit,
        phi=phi,
        phi_total=float(sum(phi.values())),
    )


def _record_counter_bounds(report: LemmaReport, state: PotentialState) -> None:
    """``0 <= w_i <= tau_i <= k_i`` and ``|U_i| >= k_i - tau_i`` for every class."""
    margins = []
    for i, k_i in state.class_sizes.items():
        margins.extend(
            [
                state.w[i],
                state.tau[i] - state.w[i],
                k_i - state.tau[i],
                len(state.undiscovered[i]) - (k_i - state.tau[i]),
            ]
        )
    margin = float(min(margins))
    report.check(COUNTER_CHECK).record(margin, bool(margin >= 0))


class PotentialTracer:
    """
    Seeding observer that keeps the potential state of a live run.

    Pass an instance as ``observer`` to any seeding procedure; it reads the
    shared CenterSet after every insertion.

    Attributes:
        state: Current PotentialState
        history: States after every step (when ``keep_history``)
        report: Per-step counter-bound checks
    """

    def __init__(self, ds: Dataset, alpha: float, keep_history: bool = False):
        self.ds = ds
        self.labels = ds.require_labels()
        self.state = init_state(ds, alpha)
        self.keep_history = keep_history
        self.history: List[PotentialState] = []
        self.report = LemmaReport()

    def __call__(self, cs: CenterSet, z: int) -> None:
        costs = cluster_costs(cs, self.ds, self.state.alpha)
        self.state = advance(self.state, int(self.labels[z]), costs)
        _record_counter_bounds(self.report, self.state)
        if self.keep_history:
            self.history.append(self.state)


def _relative_slack(bound: float, value: float) -> float:
    scale = max(abs(bound), abs(value))
    if scale == 0.0:
        return 0.0
    return (bound - value) / scale


def verify_run(ds: Dataset, trace: SeedingTrace, alpha: Optional[float] = None) -> LemmaReport:
    """
    Replay a complete seeding trace and check the deterministic lemmas.

    Checks, after all ``k`` centers:

    - ``w_i >= |U_i|`` for every class;
    - ``phi >= cost^(2)(undiscovered clusters) / 2``;

    plus the counter bounds after every step.

    Args:
        ds: Labeled dataset the trace was produced on
        trace: Trace with exactly one center per reference cluster
        alpha: Potential exponent; defaults to the trace's alpha

    Raises:
        UsageError: If the trace does not match the dataset
    """
    labels = ds.require_labels()
    alpha = trace.alpha if alpha is None else alpha
    _require_alpha(alpha)
    if trace.n_points != ds.n or len(trace.centers) != ds.k:
        raise UsageError(
            "trace does not match the dataset",
            {"n": ds.n, "k": ds.k, "trace_n": trace.n_points, "trace_k": len(trace.centers)},
        )
    if trace.clusters is not None and [int(labels[z]) for z in trace.centers] != trace.clusters:
        raise UsageError("trace clusters disagree with the dataset labels")

    cs = CenterSet.empty(ds)
    tracer = PotentialTracer(ds, alpha)
    for z in trace.centers:
        add_center(cs, int(z))
        tracer(cs, int(z))

    report = tracer.report
    state = tracer.state
    wasted = report.check(WASTED_CHECK)
    for i in state.class_sizes:
        margin = float(state.w[i] - len(state.undiscovered[i]))
        wasted.record(margin, bool(margin >= 0))

    costs = cluster_costs(cs, ds, alpha)
    undiscovered = [c for clusters in state.undiscovered.values() for c in clusters]
    half_cost = float(costs.cost2[undiscovered].sum()) / 2.0 if undiscovered else 0.0
    slack = _relative_slack(state.phi_total, half_cost)
    report.check(POTENTIAL_CHECK).record(slack, bool(slack >= -LEMMA_RELATIVE_SLACK))

    if not report.passed:
        logger.warning(f"lemma violation on trace with seed {trace.rng_seed}")
    return report


# --------------------------------------------------------------------------
# Exact-expectation checks
# --------------------------------------------------------------------------


def _draw_weights(cs: CenterSet, members: np.ndarray, alpha: float) -> np.ndarray:
    """D^alpha weights restricted to ``members``, normalized to sum 1 (zeros if none)."""
    sq = cs.nearest_sq[members]
    top = float(sq.max()) if sq.size else 0.0
    if top == 0.0:
        return np.zeros(members.shape[0])
    weights = np.where(sq > 0.0, (sq / top) ** (alpha / 2.0), 0.0)
    return weights / weights.sum()


def expected_potential_changes(
    ds: Dataset, cs: CenterSet, state: PotentialState, class_i: int
) -> Dict[int, float]:
    """
    ``E[phi_j(t) - phi_j(t-1)]`` for every class ``j``, conditioned on the next
    center landing in an undiscovered cluster of class ``class_i``.

    Enumerates every point of those clusters with its D^alpha probability,
    performs the real center addition and recomputes the potentials.

    Raises:
        UsageError: If the class has no undiscovered cluster with positive cost
    """
    labels = ds.require_labels()
    clusters = state.undiscovered.get(class_i, frozenset())
    if not clusters:
        raise UsageError("class has no undiscovered cluster", {"class": class_i})
    members = np.flatnonzero(np.isin(labels, sorted(clusters)))
    probabilities = _draw_weights(cs, members, state.alpha)
    if not probabilities.any():
        raise UsageError("undiscovered clusters of the class have zero cost", {"class": class_i})

    expected = {j: 0.0 for j in state.phi}
    for z, p in zip(members, probabilities):
        if p == 0.0:
            continue
        trial = add_center(cs.copy(), int(z))
        after = advance(state, int(labels[z]), cluster_costs(trial, ds, state.alpha))
        for j in expected:
            expected[j] += float(p) * (after.phi[j] - state.phi[j])
    return expected


def expected_decrease_check(
    ds: Dataset, cs: CenterSet, state: PotentialState, class_i: int
) -> float:
    """Largest expected potential change over all classes (should be <= 0)."""
    return max(expected_potential_changes(ds, cs, state, class_i).values())


def _cluster_members(ds: Dataset, cluster: int) -> np.ndarray:
    labels = ds.require_labels()
    if not 0 <= cluster < (ds.k or 0):
        raise UsageError("unknown cluster id", {"cluster": cluster})
    return np.flatnonzero(labels == cluster)


def _costs_after(cs: CenterSet, members: np.ndarray, z: int) -> np.ndarray:
    """Squared nearest distances of ``members`` after adding center ``z``."""
    points = cs.points
    dist = ((points[members] - points[z]) ** 2).sum(axis=1)
    return np.minimum(cs.nearest_sq[members], dist)


def hit_cost_check(ds: Dataset, cs: CenterSet, cluster: int, alpha: float) -> HitCostCheck:
    """
    Expected ``cost^(2)(C, T + {z})`` for ``z`` drawn from ``C`` by D^alpha,
    against ``(4e + (alpha + 1)^2 * g_C^(2/alpha)) * cost^(2)(C, mu_C)``.

    A cluster whose points all sit at distance zero passes trivially and is
    flagged degenerate.
    """
    members = _cluster_members(ds, cluster)
    points = ds.points[members]
    sse = float(((points - points.mean(axis=0)) ** 2).sum())
    g_c = cluster_moment(points, alpha)
    rhs = hit_cost_factor(alpha, g_c if g_c is not None else 0.0) * sse

    probabilities = _draw_weights(cs, members, alpha)
    if not probabilities.any():
        lhs = float(cs.nearest_sq[members].sum())
        return HitCostCheck(cluster=cluster, lhs=lhs, rhs=rhs, passed=True, degenerate=True)

    lhs = 0.0
    for z, p in zip(members, probabilities):
        if p > 0.0:
            lhs += p * float(_costs_after(cs, members, int(z)).sum())
    passed = bool(lhs <= rhs + LEMMA_RELATIVE_SLACK * max(abs(rhs), abs(lhs)))
    return HitCostCheck(cluster=cluster, lhs=lhs, rhs=rhs, passed=passed)


def alpha_hit_cost_checks(
    ds: Dataset, cs: CenterSet, cluster: int, alpha: float
) -> AlphaHitCostCheck:
    """
    Exact expected ``cost^(alpha)`` of a cluster after one more center from it.

    - D^alpha draw with the current centers ``T`` kept:
      ``E[cost^(alpha)(C, T + {z})] <= 2^(2 alpha) * cost^(alpha)(C, mu_C)``;
    - uniform draw on its own:
      ``E[cost^(alpha)(C, {z})] <= 2^alpha * cost^(alpha)(C, mu_C)``.
    """
    members = _cluster_members(ds, cluster)
    points = ds.points[members]
    half = alpha / 2.0
    centroid_cost = float((((points - points.mean(axis=0)) ** 2).sum(axis=1) ** half).sum())
    dalpha_rhs = 2.0 ** (2.0 * alpha) * centroid_cost
    uniform_rhs = 2.0**alpha * centroid_cost
    tolerance = LEMMA_RELATIVE_SLACK

    uniform_lhs = 0.0
    for z in range(points.shape[0]):
        uniform_lhs += float((((points - points[z]) ** 2).sum(axis=1) ** half).sum())
    uniform_lhs /= points.shape[0]
    uniform_passed = bool(uniform_lhs <= uniform_rhs + tolerance * max(uniform_rhs, uniform_lhs))

    probabilities = _draw_weights(cs, members, alpha)
    degenerate = not bool(probabilities.any())
    if degenerate:
        dalpha_lhs = float((cs.nearest_sq[members] ** half).sum())
        dalpha_passed = True
    else:
        dalpha_lhs = 0.0
        for z, p in zip(members, probabilities):
            if p > 0.0:
                dalpha_lhs += p * float((_costs_after(cs, members, int(z)) ** half).sum())
        dalpha_passed = bool(dalpha_lhs <= dalpha_rhs + tolerance * max(dalpha_rhs, dalpha_lhs))

    return AlphaHitCostCheck(
        cluster=cluster,
        dalpha_lhs=dalpha_lhs,
        dalpha_rhs=dalpha_rhs,
        dalpha_passed=dalpha_passed,
        uniform_lhs=uniform_lhs,
        uniform_rhs=uniform_rhs,
        uniform_passed=uniform_passed,
        degenerate=degenerate,
    )


def sample_mid_run_states(
    ds: Dataset, alpha: float, n_states: int, seed: int = 0
) -> List[Tuple[CenterSet, PotentialState]]:
    """
    Snapshots ``(centers, potential state)`` taken at a random step of
    independent D^alpha runs on ``ds``.

    Run ``r`` draws from ``stream(seed, r)`` and stops after a uniform number
    of centers in ``[1, k - 1]``, ``k`` being the number of reference clusters.
    """
    k = ds.k or 0
    if k < 2:
        raise UsageError("mid-run states need at least two reference clusters")
    snapshots: List[Tuple[CenterSet, PotentialState]] = []
    for run in range(n_states):
        rng = stream(seed, run)
        stop = int(rng.integers(1, k))
        tracer = PotentialTracer(ds, alpha)
        config = SeedingConfig(alpha=alpha, k=stop, method=SeedingMethod.DALPHA, rng_seed=seed)
        cs, _ = dalpha_seed(ds, config, rng=rng, observer=tracer)
        snapshots.append((cs, tracer.state))
    return snapshots


def run_state_checks(ds: Dataset, alpha: float, n_states: int, seed: int = 0) -> LemmaReport:
    """
    Exact-expectation lemma suite on sampled mid-run states.

    For every state: the expected potential change of each class with a
    costly undiscovered cluster, and the hit-cost bounds of one random cluster.
    """
    report = LemmaReport()
    decrease = report.check(DECREASE_CHECK)
    hit = report.check(HIT_COST_CHECK)
    alpha_hit = report.check(ALPHA_HIT_CHECK)
    uniform_hit = report.check(UNIFORM_HIT_CHECK)
    picker = stream(seed, n_states, 1)

    for cs, state in sample_mid_run_states(ds, alpha, n_states, seed):
        scale = max(abs(state.phi_total), 1e-300)
        for i, clusters in state.undiscovered.items():
            members = np.flatnonzero(np.isin(ds.require_labels(), sorted(clusters)))
            if not clusters or not bool((cs.nearest_sq[members] > 0.0).any()):
                continue
            change = expected_decrease_check(ds, cs, state, i)
            decrease.record(-change / scale, bool(change <= LEMMA_RELATIVE_SLACK * scale))

        cluster = int(picker.integers(ds.k or 1))
        result = hit_cost_check(ds, cs, cluster, alpha)
        hit.record(_relative_slack(result.rhs, result.lhs), result.passed)
        pair = alpha_hit_cost_checks(ds, cs, cluster, alpha)
        alpha_hit.record(_relative_slack(pair.dalpha_rhs, pair.dalpha_lhs), pair.dalpha_passed)
        uniform_hit.record(_relative_slack(pair.uniform_rhs, pair.uniform_lhs), pair.uniform_passed)

    logger.info(f"state checks: {n_states} state(s), {report.violations} violation(s)")
    return report
