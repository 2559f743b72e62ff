"""
Seeded synthetic instances: low-tubal-rank ground truth, Bernoulli +/-1
sparse corruption and Gaussian noise, plus the image corruption protocol
used for denoising experiments.

Each random quantity draws from its own substream of a PCG64 generator
spawned from the seed, and Gaussian samples come from a Box-Muller
transform of uniform draws, so stream positions never depend on the values
drawn.
"""
import logging
from typing import NamedTuple, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .exceptions import BadSpec
from .metrics import relative_error
from .tensor_algebra import t_product
from .tensor_types import Tensor3

logger = logging.getLogger(__name__)

# Substream order for make_instance
_STREAMS = ('p', 'q', 'support', 'signs', 'noise')


class SynthSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n1: int = Field(..., ge=1)
    n2: int = Field(..., ge=1)
    n3: int = Field(..., ge=1)
    r: int = Field(..., ge=1)
    rho: float = Field(..., ge=0, le=0.5)
    sigma: float = Field(..., ge=0)
    seed: int = Field(..., ge=0, lt=2 ** 64)

    @model_validator(mode='after')
    def _rank_fits(self):
        if self.r > min(self.n1, self.n2):
            raise ValueError(f"rank {self.r} exceeds min(n1, n2) = {min(self.n1, self.n2)}")
        return self

    @classmethod
    def build(cls, **kwargs) -> 'SynthSpec':
        try:
            return cls(**kwargs)
        except ValidationError as exc:
            raise BadSpec(str(exc)) from exc


class SynthInstance(NamedTuple):
    x: Tensor3
    l0: Tensor3
    s0: Tensor3
    e0: Tensor3


def _substreams(seed: int, count: int):
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def gaussian(rng: np.random.Generator, shape, std: float = 1.0) -> np.ndarray:
    """N(0, std^2) samples via Box-Muller; consumes exactly 2 * prod(shape) uniforms"""
    u1 = 1.0 - rng.random(shape)  # (0, 1]
    u2 = rng.random(shape)
    return std * np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def make_instance(spec: SynthSpec) -> SynthInstance:
    """X = P * Q + S0 + E0 with P ~ N(0, 1/n1), Q ~ N(0, 1/n2), S0 in {-1, 0, 1}"""
    if not isinstance(spec, SynthSpec):
        raise BadSpec(f"Expected a SynthSpec, got {type(spec).__name__}")
    n1, n2, n3, r = spec.n1, spec.n2, spec.n3, spec.r
    streams = dict(zip(_STREAMS, _substreams(spec.seed, len(_STREAMS))))

    p = Tensor3(gaussian(streams['p'], (n1, r, n3), std=np.sqrt(1.0 / n1)))
    q = Tensor3(gaussian(streams['q'], (r, n2, n3), std=np.sqrt(1.0 / n2)))
    l0 = t_product(p, q)

    support = streams['support'].random((n1, n2, n3)) < 2.0 * spec.rho
    signs = np.where(streams['signs'].random((n1, n2, n3)) < 0.5, 1.0, -1.0)
    s0 = Tensor3(np.where(support, signs, 0.0))

    e0 = Tensor3(gaussian(streams['noise'], (n1, n2, n3), std=spec.sigma))
    x = Tensor3(l0.data + s0.data + e0.data)
    logger.debug(f"Synthetic instance {n1}x{n2}x{n3} r={r} rho={spec.rho} sigma={spec.sigma} seed={spec.seed}")
    return SynthInstance(x, l0, s0, e0)


def rel_errors(l_hat: Tensor3, s_hat: Tensor3, l0: Tensor3, s0: Tensor3) -> Tuple[float, float]:
    """Relative Frobenius recovery errors (err_l, err_s).

    Raises:
        ZeroGroundTruth: l0 or s0 is the zero tensor.
    """
    return relative_error(l0, l_hat), relative_error(s0, s_hat)


def make_low_rank_image(height: int, width: int, rank: int, seed: int) -> Tensor3:
    """height x width x 3 image of tubal rank <= rank + 1 with values spanning [0, 255]"""
    if rank < 1 or rank > min(height, width):
        raise BadSpec(f"rank must lie in [1, {min(height, width)}], got {rank}")
    rng_p, rng_q = _substreams(seed, 2)
    p = Tensor3(gaussian(rng_p, (height, rank, 3)))
    q = Tensor3(gaussian(rng_q, (rank, width, 3)))
    lowrank = t_product(p, q).data
    lo, hi = lowrank.min(), lowrank.max()
    return Tensor3(255.0 * (lowrank - lo) / (hi - lo))


def corrupt_image(img: Tensor3, sparse_fraction: float = 0.0, gauss_variance: float = 0.0, seed: int = 0) -> Tensor3:
    """Corrupt an 8-bit-range image.

    A ``sparse_fraction`` of the pixel locations get independent uniform
    values in [0, 255] on every channel; then Gaussian noise with
    ``gauss_variance`` on the [0, 1]-scaled image is added and the result
    is clamped to [0, 255].
    """
    if not 0.0 <= sparse_fraction <= 1.0:
        raise BadSpec(f"sparse fraction must lie in [0, 1], got {sparse_fraction}")
    if gauss_variance < 0:
        raise BadSpec(f"Gaussian variance must be nonnegative, got {gauss_variance}")
    height, width, channels = img.dims
    rng_mask, rng_values, rng_noise = _substreams(seed, 3)

    out = np.array(img.data)
    mask = rng_mask.random((height, width)) < sparse_fraction
    values = 255.0 * rng_values.random((height, width, channels))
    out[mask] = values[mask]

    noise = gaussian(rng_noise, out.shape, std=np.sqrt(gauss_variance))
    out = np.clip(out + 255.0 * noise, 0.0, 255.0)
    return Tensor3(out)
