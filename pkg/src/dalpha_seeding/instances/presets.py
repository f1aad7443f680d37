"""
Benchmark mixtures D1-D5.

D1/D2 place four components on the corners of a square of side ``2 delta``,
D3/D4 eight on the corners of a cube; D2 and D4 widen the first component.
D5 places four student-t components (nu = 1.6, 2, 5, 10) on the square.
"""

import itertools
from typing import List

from dalpha_seeding.constants import (
    DEFAULT_PRESET_DELTA,
    DEFAULT_PRESET_N,
    InstanceFamily,
    InstancePreset,
)
from dalpha_seeding.core.models import InstanceSpec, MixtureComponent

_WIDE_VARIANCE = {InstancePreset.D2: 400.0, InstancePreset.D4: 800.0}
_STUDENT_NU = (1.6, 2.0, 5.0, 10.0)


def _corners(dim: int, delta: float) -> List[List[float]]:
    return [[s * delta for s in signs] for signs in itertools.product((1.0, -1.0), repeat=dim)]


def preset_spec(
    name: InstancePreset,
    n: int = DEFAULT_PRESET_N,
    delta: float = DEFAULT_PRESET_DELTA,
    seed: int = 0,
) -> InstanceSpec:
    """
    InstanceSpec of a benchmark mixture.

    Args:
        name: Preset id (D1 .. D5)
        n: Number of points
        delta: Half edge length of the square/cube
        seed: Instance seed
    """
    name = InstancePreset(name)
    dim = 3 if name in (InstancePreset.D3, InstancePreset.D4) else 2
    corners = _corners(dim, delta)

    if name == InstancePreset.D5:
        components = [
            MixtureComponent(mean=mean, nu=nu) for mean, nu in zip(corners, _STUDENT_NU)
        ]
        family = InstanceFamily.STUDENT_T_MIXTURE
    else:
        wide = _WIDE_VARIANCE.get(name)
        components = [
            MixtureComponent(mean=mean, variance=wide if j == 0 and wide else 1.0)
            for j, mean in enumerate(corners)
        ]
        family = InstanceFamily.GAUSSIAN_MIXTURE

    return InstanceSpec(family=family, components=components, n=n, rng_seed=seed)
