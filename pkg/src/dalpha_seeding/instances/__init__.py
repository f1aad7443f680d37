"""
Instance factory.

Maps every InstanceFamily to the generator that builds it, so callers can go
from an InstanceSpec to a Dataset without knowing the family.
"""

from typing import Callable, Dict

from dalpha_seeding.constants import InstanceFamily
from dalpha_seeding.core.models import Dataset, InstanceSpec
from dalpha_seeding.data.storage import load_csv
from dalpha_seeding.instances.greedy import gen_greedy_lb
from dalpha_seeding.instances.mixtures import gen_gaussian_mixture, gen_student_t_mixture
from dalpha_seeding.instances.presets import preset_spec
from dalpha_seeding.instances.simplices import gen_galpha_lb, gen_regular_simplex, gen_simplex_lb
from dalpha_seeding.utils.logging import get_logger

logger = get_logger(__name__)

# Registry of instance builders
_instance_registry: Dict[InstanceFamily, Callable[[InstanceSpec], Dataset]] = {
    InstanceFamily.GAUSSIAN_MIXTURE: lambda s: gen_gaussian_mixture(s.components, s.n, s.rng_seed),
    InstanceFamily.STUDENT_T_MIXTURE: lambda s: gen_student_t_mixture(s.components, s.n, s.rng_seed),
    InstanceFamily.SIMPLEX_LB: lambda s: gen_simplex_lb(s.k, s.n_per_cluster, s.alpha, s.rng_seed),
    InstanceFamily.GALPHA_LB: lambda s: gen_galpha_lb(s.n, s.alpha),
    InstanceFamily.GREEDY_LB: lambda s: gen_greedy_lb(s.k, s.m_samples, s.n_per_cluster, s.rng_seed),
    InstanceFamily.CUSTOM_CSV: lambda s: load_csv(s.path),
}

_descriptions: Dict[InstanceFamily, str] = {
    InstanceFamily.GAUSSIAN_MIXTURE: "Gaussian mixture",
    InstanceFamily.STUDENT_T_MIXTURE: "Student-t mixture",
    InstanceFamily.SIMPLEX_LB: "Wide simplex cluster far from tight ones (sigma ratio)",
    InstanceFamily.GALPHA_LB: "Simplex cluster next to a spiked cluster (g_alpha)",
    InstanceFamily.GREEDY_LB: "Square groups of exponential segments (greedy)",
    InstanceFamily.CUSTOM_CSV: "Dataset loaded from CSV",
}


def create_instance(spec: InstanceSpec) -> Dataset:
    """
    Build the dataset described by ``spec``.

    Raises:
        UsageError: If the family parameters are invalid
        StorageError: If a CSV dataset cannot be read
    """
    builder = _instance_registry[spec.family]
    logger.debug(f"building {spec.family.value} instance (seed {spec.rng_seed})")
    return builder(spec)


def get_available_families() -> Dict[str, str]:
    """Family ids mapped to a short description."""
    return {family.value: _descriptions[family] for family in _instance_registry}


__all__ = [
    "create_instance",
    "gen_galpha_lb",
    "gen_gaussian_mixture",
    "gen_greedy_lb",
    "gen_regular_simplex",
    "gen_simplex_lb",
    "gen_student_t_mixture",
    "get_available_families",
    "preset_spec",
]
