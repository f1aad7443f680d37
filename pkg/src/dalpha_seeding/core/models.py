"""
Core data models for dalpha-seeding.

This module defines the Pydantic models that represent the package's domain
entities: datasets and center sets (numpy-backed), seeding configuration and
traces, instance specifications, diagnostic reports, potential-function
state, and experiment configuration/results.
"""

import math
from pathlib import Path
from typing import Annotated, Any, Dict, FrozenSet, List, Optional, Union

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    ValidationError,
    field_validator,
    model_validator,
)

from dalpha_seeding.constants import InstanceFamily, SeedEvent, SeedingMethod
from dalpha_seeding.exceptions import NumericRangeError, UsageError


def _parse_float_or_inf(value: Any) -> Any:
    """Accept 'inf' / 'infinity' (any case, optional sign) for infinite values."""
    if isinstance(value, str) and value.strip().lower().lstrip("+") in ("inf", "infinity", "∞"):
        return math.inf
    return value


def _dump_float_or_inf(value: float) -> Union[float, str]:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


# Float that round-trips +inf through JSON as the string "inf"
FloatOrInf = Annotated[
    float,
    BeforeValidator(_parse_float_or_inf),
    PlainSerializer(_dump_float_or_inf, when_used="json"),
]


def usage_error_from(error: ValidationError, model_name: str) -> UsageError:
    """The UsageError a validator raised, or one summarizing ``error``."""
    for entry in error.errors():
        cause = entry.get("ctx", {}).get("error")
        if isinstance(cause, UsageError):
            return cause
    messages = [f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in error.errors()]
    return UsageError(f"invalid {model_name}", {"errors": messages})


class DomainModel(BaseModel):
    """Base for models whose validation failures surface as UsageError."""

    def __init__(self, **data: Any) -> None:
        try:
            super().__init__(**data)
        except ValidationError as e:
            raise usage_error_from(e, type(self).__name__) from e


# --------------------------------------------------------------------------
# Geometry
# --------------------------------------------------------------------------


class Dataset(DomainModel):
    """
    A point set with an optional reference clustering.

    ``points`` is stored as a C-contiguous float64 ``(n, d)`` array; a 1-D
    input is read as ``n`` points in one dimension. ``labels`` (when given)
    must use every cluster id in ``[0, k)``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: np.ndarray
    labels: Optional[np.ndarray] = None

    @field_validator("points", mode="before")
    def validate_points(cls, v):
        """Convert to a contiguous float64 matrix and check finiteness."""
        arr = np.asarray(v, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise UsageError("points must be an (n, d) array", {"ndim": arr.ndim})
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise UsageError("a dataset needs n >= 1 and d >= 1", {"shape": arr.shape})
        if not np.all(np.isfinite(arr)):
            raise UsageError("all coordinates must be finite")
        return np.ascontiguousarray(arr)

    @field_validator("labels", mode="before")
    def validate_labels(cls, v):
        """Convert to int64 and check that every id in [0, k) occurs."""
        if v is None:
            return None
        arr = np.asarray(v)
        if arr.ndim != 1:
            raise UsageError("labels must be one-dimensional")
        if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
            raise UsageError("labels must be integers")
        arr = arr.astype(np.int64)
        if arr.size == 0:
            raise UsageError("labels must not be empty")
        if arr.min() < 0:
            raise UsageError("labels must be non-negative")
        counts = np.bincount(arr)
        missing = np.flatnonzero(counts == 0)
        if missing.size:
            raise UsageError(
                "every cluster id in [0, k) must occur", {"missing": missing[:10].tolist()}
            )
        return arr

    @model_validator(mode="after")
    def check_label_length(self) -> "Dataset":
        if self.labels is not None and self.labels.shape[0] != self.points.shape[0]:
            raise UsageError(
                "labels and points disagree in length",
                {"points": self.points.shape[0], "labels": self.labels.shape[0]},
            )
        return self

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    @property
    def k(self) -> Optional[int]:
        """Number of reference clusters, or None when unlabeled."""
        if self.labels is None:
            return None
        return int(self.labels.max()) + 1

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def require_labels(self) -> np.ndarray:
        """Return the labels or raise UsageError when the dataset is unlabeled."""
        if self.labels is None:
            raise UsageError("this operation needs a labeled dataset")
        return self.labels

    def cluster_sizes(self) -> np.ndarray:
        """Number of points in each reference cluster."""
        return np.bincount(self.require_labels())

    def subset(self, clusters: List[int]) -> "Dataset":
        """Dataset restricted to the given clusters, relabeled in the given order."""
        labels = self.require_labels()
        mapping = np.full(self.k or 0, -1, dtype=np.int64)
        mapping[np.asarray(clusters, dtype=np.int64)] = np.arange(len(clusters))
        mask = mapping[labels] >= 0
        return Dataset(points=self.points[mask], labels=mapping[labels[mask]])


class CenterSet(BaseModel):
    """
    Ordered centers ``Z_t`` plus the nearest-center state of every point.

    ``nearest_center[x]`` is the insertion slot (position in ``centers``) of
    the closest center, ties going to the lowest slot; it is ``-1`` and
    ``nearest_sq`` is ``+inf`` while the set is empty.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    points: np.ndarray
    centers: List[int] = Field(default_factory=list)
    nearest_sq: np.ndarray
    nearest_center: np.ndarray
    is_center: np.ndarray

    @classmethod
    def empty(cls, ds: Dataset) -> "CenterSet":
        """A center set over ``ds`` with no centers yet."""
        n = ds.n
        return cls(
            points=ds.points,
            centers=[],
            nearest_sq=np.full(n, np.inf),
            nearest_center=np.full(n, -1, dtype=np.int64),
            is_center=np.zeros(n, dtype=bool),
        )

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def size(self) -> int:
        return len(self.centers)

    def copy(self) -> "CenterSet":
        """Independent copy sharing the (read-only) point matrix."""
        return CenterSet(
            points=self.points,
            centers=list(self.centers),
            nearest_sq=self.nearest_sq.copy(),
            nearest_center=self.nearest_center.copy(),
            is_center=self.is_center.copy(),
        )


class ClusterCosts(BaseModel):
    """
    Per-reference-cluster costs for the current center set.

    ``alpha_norm[C]`` is ``cost_alpha[C] ** (2 / alpha)`` evaluated without
    forming ``cost_alpha`` in unscaled form, so it stays finite for large alpha.
    Read the unscaled values through ``cost_alpha``; it raises once any entry
    overflows, and ``log_cost_alpha`` always holds the log-domain values.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    alpha: float
    cost2: np.ndarray
    raw_cost_alpha: np.ndarray = Field(..., description="Unscaled cost_alpha; may hold inf")
    log_cost_alpha: np.ndarray
    alpha_norm: np.ndarray

    @property
    def cost_alpha(self) -> np.ndarray:
        """
        Raises:
            NumericRangeError: If some cluster's unscaled cost overflows a float
        """
        overflow = ~np.isfinite(self.raw_cost_alpha)
        if overflow.any():
            raise NumericRangeError(
                "per-cluster alpha-cost is not representable as a finite float",
                log_value=float(self.log_cost_alpha[overflow].max()),
                details={"alpha": self.alpha, "clusters": np.flatnonzero(overflow).tolist()},
            )
        return self.raw_cost_alpha


# --------------------------------------------------------------------------
# Seeding
# --------------------------------------------------------------------------


class SeedingConfig(DomainModel):
    """Parameters of one seeding run."""

    model_config = ConfigDict(extra="forbid")

    alpha: FloatOrInf = Field(2.0, ge=0.0, description="Sampling exponent; inf = farthest point")
    k: int = Field(..., ge=1, description="Number of centers")
    method: SeedingMethod = Field(SeedingMethod.DALPHA)
    m_candidates: Optional[int] = Field(
        None, ge=1, description="Greedy candidates per step (default ceil(2 + ln k))"
    )
    rng_seed: int = Field(0, ge=0)

    @property
    def candidates(self) -> int:
        """Number of greedy candidates per step."""
        if self.m_candidates is not None:
            return self.m_candidates
        return int(math.ceil(2.0 + math.log(self.k)))


class SeedingTrace(BaseModel):
    """Per-step record of a seeding run."""

    method: SeedingMethod
    alpha: FloatOrInf
    k: int
    n_points: int
    rng_seed: int = 0
    centers: List[int] = Field(default_factory=list)
    clusters: Optional[List[int]] = Field(
        None, description="Reference cluster of each chosen center (labeled data only)"
    )
    events: Optional[List[SeedEvent]] = Field(
        None, description="new/hit event of each step (labeled data only)"
    )
    n_clusters: Optional[int] = Field(
        None, description="Number of reference clusters of the dataset (labeled data only)"
    )

    @property
    def undiscovered(self) -> Optional[int]:
        """Number of reference clusters that received no center, when known."""
        if self.clusters is None or self.n_clusters is None:
            return None
        return self.n_clusters - len(set(self.clusters))


# --------------------------------------------------------------------------
# Lloyd
# --------------------------------------------------------------------------


class LloydResult(BaseModel):
    """Outcome of Lloyd refinement."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    final_centers: np.ndarray
    assignment: np.ndarray
    iterations: int
    final_cost2: float
    converged: bool
    cost_history: List[float] = Field(default_factory=list)


# --------------------------------------------------------------------------
# Instances
# --------------------------------------------------------------------------


class MixtureComponent(DomainModel):
    """One component of a Gaussian or student-t mixture."""

    model_config = ConfigDict(extra="forbid")

    mean: List[float] = Field(..., min_length=1)
    variance: Optional[float] = Field(
        None, gt=0.0, description="sigma^2 for a scalar * identity covariance"
    )
    covariance: Optional[List[List[float]]] = Field(
        None, description="Full d x d covariance (scale matrix for student-t)"
    )
    weight: float = Field(1.0, gt=0.0)
    nu: Optional[float] = Field(None, description="Degrees of freedom (student-t only)")

    @model_validator(mode="after")
    def check_covariance(self) -> "MixtureComponent":
        if self.variance is not None and self.covariance is not None:
            raise UsageError("give either variance or covariance, not both")
        if self.covariance is not None:
            d = len(self.mean)
            if len(self.covariance) != d or any(len(row) != d for row in self.covariance):
                raise UsageError("covariance must be d x d", {"d": d})
        return self

    @property
    def dim(self) -> int:
        return len(self.mean)


class InstanceSpec(DomainModel):
    """Family and parameters of a generated (or loaded) instance."""

    model_config = ConfigDict(extra="forbid")

    family: InstanceFamily
    components: Optional[List[MixtureComponent]] = None
    n: Optional[int] = Field(None, ge=1)
    k: Optional[int] = Field(None, ge=1)
    n_per_cluster: Optional[int] = Field(None, ge=1)
    alpha: Optional[float] = Field(None, gt=0.0)
    m_samples: Optional[int] = Field(None, ge=1)
    path: Optional[Path] = None
    rng_seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def check_family_parameters(self) -> "InstanceSpec":
        required = {
            InstanceFamily.GAUSSIAN_MIXTURE: ("components", "n"),
            InstanceFamily.STUDENT_T_MIXTURE: ("components", "n"),
            InstanceFamily.SIMPLEX_LB: ("k", "n_per_cluster", "alpha"),
            InstanceFamily.GALPHA_LB: ("n", "alpha"),
            InstanceFamily.GREEDY_LB: ("k", "m_samples", "n_per_cluster"),
            InstanceFamily.CUSTOM_CSV: ("path",),
        }[self.family]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise UsageError(
                f"family '{self.family.value}' needs {', '.join(missing)}",
                {"missing": missing},
            )
        if self.components is not None and not self.components:
            raise UsageError("components must not be empty")
        return self

    @property
    def is_stochastic(self) -> bool:
        """Whether the generated points depend on ``rng_seed``."""
        return self.family not in (InstanceFamily.CUSTOM_CSV, InstanceFamily.GALPHA_LB)


# --------------------------------------------------------------------------
# Diagnostics
# --------------------------------------------------------------------------


class SigmaStats(BaseModel):
    """Per-cluster standard deviations around the centroid."""

    sizes: List[int]
    sigma: List[float]
    sigma_max: float
    sigma_min: float
    sigma_ratio: FloatOrInf
    ratio_infinite: bool
    opt_cost: float


class GAlphaResult(BaseModel):
    """Concentration moment g_alpha and its per-cluster contributions."""

    alpha: float
    value: Optional[float] = Field(None, description="Max over clusters; None if all excluded")
    per_cluster: List[Optional[float]]
    excluded: List[int] = Field(default_factory=list)
    approximate: bool = False


class WeightClasses(BaseModel):
    """Clusters grouped by size class [2^i, 2^{i+1})."""

    histogram: Dict[int, int]
    members: Dict[int, List[int]]
    cluster_class: List[int]
    ell: int


class BoundReport(BaseModel):
    """Theorem bound and the explicit constants from its proof."""

    alpha: float
    f_alpha: float
    h_alpha: float
    potential_constant: float
    hit_cost_factor: float
    bound_value: FloatOrInf
    explicit_bound: FloatOrInf


class ParamReport(BaseModel):
    """Instance parameters of a labeled dataset for a given alpha."""

    alpha: float
    k: int
    n: int
    sizes: List[int]
    sigma: List[float]
    sigma_max: float
    sigma_min: float
    sigma_ratio: FloatOrInf
    sigma_ratio_infinite: bool
    g_alpha: Optional[float]
    g_per_cluster: List[Optional[float]]
    g_excluded: List[int]
    g_approximate: bool
    standardized_moment_bound: Optional[float] = Field(
        None, description="2^(alpha+1) times the largest standardized alpha-moment"
    )
    weight_histogram: Dict[int, int]
    ell: int
    opt_cost: float
    bound_value: Optional[FloatOrInf] = None
    explicit_bound: Optional[FloatOrInf] = None


# --------------------------------------------------------------------------
# Potential
# --------------------------------------------------------------------------


class PotentialState(BaseModel):
    """Counters, undiscovered sets and potentials of the seeding analysis."""

    model_config = ConfigDict(frozen=True)

    alpha: float
    t: int = 0
    cluster_class: List[int]
    class_sizes: Dict[int, int]
    tau: Dict[int, int]
    w: Dict[int, int]
    undiscovered: Dict[int, FrozenSet[int]]
    hit: FrozenSet[int] = frozenset()
    phi: Dict[int, float]
    phi_total: float = 0.0


class LemmaCheck(BaseModel):
    """Outcome of one inequality checked over many instances."""

    name: str
    checked: int = 0
    violations: int = 0
    max_slack: Optional[float] = Field(
        None, description="Largest relative margin (bound - value) / scale observed"
    )
    min_slack: Optional[float] = Field(
        None, description="Smallest relative margin; negative beyond tolerance means violated"
    )

    def record(self, slack: float, ok: bool) -> None:
        self.checked += 1
        if not ok:
            self.violations += 1
        self.max_slack = slack if self.max_slack is None else max(self.max_slack, slack)
        self.min_slack = slack if self.min_slack is None else min(self.min_slack, slack)

    def merge(self, other: "LemmaCheck") -> None:
        self.checked += other.checked
        self.violations += other.violations
        for slack in (other.max_slack, other.min_slack):
            if slack is None:
                continue
            self.max_slack = slack if self.max_slack is None else max(self.max_slack, slack)
            self.min_slack = slack if self.min_slack is None else min(self.min_slack, slack)


class LemmaReport(BaseModel):
    """Collection of lemma checks."""

    checks: List[LemmaCheck] = Field(default_factory=list)

    def check(self, name: str) -> LemmaCheck:
        """Get (creating if needed) the check with the given name."""
        for entry in self.checks:
            if entry.name == name:
                return entry
        entry = LemmaCheck(name=name)
        self.checks.append(entry)
        return entry

    def merge(self, other: "LemmaReport") -> "LemmaReport":
        for entry in other.checks:
            self.check(entry.name).merge(entry)
        return self

    @property
    def violations(self) -> int:
        return sum(entry.violations for entry in self.checks)

    @property
    def passed(self) -> bool:
        return self.violations == 0


class HitCostCheck(BaseModel):
    """Expected 2-cost of a cluster after a D^alpha draw from it, against its bound."""

    cluster: int
    lhs: float
    rhs: float
    passed: bool
    degenerate: bool = False


class AlphaHitCostCheck(BaseModel):
    """Expected alpha-cost of a cluster after a D^alpha or a uniform draw from it."""

    cluster: int
    dalpha_lhs: float
    dalpha_rhs: float
    dalpha_passed: bool
    uniform_lhs: float
    uniform_rhs: float
    uniform_passed: bool
    degenerate: bool = False

    @property
    def passed(self) -> bool:
        return self.dalpha_passed and self.uniform_passed


# --------------------------------------------------------------------------
# Experiments
# --------------------------------------------------------------------------


class ExperimentConfig(DomainModel):
    """An alpha sweep with repeated trials."""

    model_config = ConfigDict(extra="forbid")

    instance: InstanceSpec
    alphas: List[FloatOrInf] = Field(..., min_length=1)
    methods: List[SeedingMethod] = Field(default_factory=lambda: [SeedingMethod.DALPHA])
    k: Optional[int] = Field(None, ge=1, description="Centers per run (default: cluster count)")
    m_candidates: Optional[int] = Field(None, ge=1)
    trials: int = Field(..., ge=1)
    run_lloyd: bool = False
    lloyd_max_iters: Optional[int] = Field(None, ge=1)
    lloyd_tol: Optional[float] = Field(None, ge=0.0)
    base_seed: int = Field(0, ge=0)
    resample_per_trial: bool = False
    check_lemmas: bool = False
    workers: Optional[int] = Field(None, ge=1)
    output_csv: Optional[Path] = None
    output_svg: Optional[Path] = None

    @field_validator("alphas")
    def validate_alphas(cls, v):
        for alpha in v:
            if math.isnan(alpha) or alpha < 0:
                raise UsageError("alphas must be >= 0", {"alpha": alpha})
        return v

    @field_validator("methods")
    def validate_methods(cls, v):
        if not v:
            raise UsageError("methods must not be empty")
        return v


class TrialResult(BaseModel):
    """Cost outcome of one (alpha, method, trial) run."""

    alpha: FloatOrInf
    method: SeedingMethod
    trial: int
    seed_cost2: float
    seed_ratio: float
    lloyd_cost2: Optional[float] = None
    lloyd_ratio: Optional[float] = None
    lloyd_iters: Optional[int] = None
    undiscovered: int = 0
    lemma_flags: str = ""


class SummaryRow(BaseModel):
    """Aggregate over the trials of one (alpha, method) pair."""

    alpha: FloatOrInf
    method: SeedingMethod
    trials: int
    mean_seed_ratio: float
    std_seed_ratio: float
    sem_seed_ratio: float
    mean_lloyd_ratio: Optional[float] = None
    std_lloyd_ratio: Optional[float] = None
    sem_lloyd_ratio: Optional[float] = None
    mean_lloyd_iters: Optional[float] = None
    mean_undiscovered: float = 0.0


class ExperimentOutcome(BaseModel):
    """Ordered trial results plus their summary."""

    results: List[TrialResult]
    summary: List[SummaryRow]
