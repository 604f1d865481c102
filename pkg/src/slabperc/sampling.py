"""Bernoulli bond configurations and the uniform sheets that couple them across p.

Every random draw comes from a Philox counter-based stream keyed by a 64-bit
seed, so the uniform attached to bond ``i`` depends only on ``(seed, i)``.
Sub-streams for trials and nested samples are keyed by ``derive_seed(seed,
*path)``, which makes any loop over samples schedule independent.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import Region


def derive_seed(seed: int, *path: int) -> int:
    """64-bit seed for the sub-stream at ``path`` below ``seed``."""
    if not path:
        return int(seed)
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(x) for x in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def uniforms(seed: int, size: int) -> np.ndarray:
    return np.random.Generator(np.random.Philox(int(seed))).random(size)


def _check_p(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


@dataclass(frozen=True, eq=False)
class UniformSheet:
    region: Region
    u: np.ndarray = field(repr=False)
    seed: int

    @classmethod
    def draw(cls, region: Region, seed: int) -> "UniformSheet":
        return cls(region, uniforms(seed, region.n_bonds), int(seed))


@dataclass(frozen=True, eq=False)
class Config:
    """One bond configuration: ``state[i]`` is True when bond i is open."""

    region: Region
    state: np.ndarray = field(repr=False)
    p: float
    seed: int

    def __post_init__(self):
        if self.state.shape != (self.region.n_bonds,):
            raise ValueError(f"state has {self.state.size} entries, region has {self.region.n_bonds} bonds")

    @property
    def n_open(self) -> int:
        return int(self.state.sum())

    def __eq__(self, other):
        if not isinstance(other, Config):
            return NotImplemented
        return (self.region == other.region and self.p == other.p and self.seed == other.seed
                and np.array_equal(self.state, other.state))

    __hash__ = None

    @classmethod
    def from_bits(cls, region: Region, bits, p: float = float("nan"), seed: int = -1) -> "Config":
        return cls(region, np.asarray(bits, dtype=bool).copy(), p, seed)

    @classmethod
    def from_open_bonds(cls, region: Region, pairs, p: float = float("nan"), seed: int = -1) -> "Config":
        """Config whose open bonds are the given (site, site) pairs, in any orientation."""
        state = np.zeros(region.n_bonds, dtype=bool)
        lookup = {(int(a), int(b)): j for j, (a, b) in enumerate(zip(region.bond_u, region.bond_v))}
        for a, b in pairs:
            ia, ib = region.index(tuple(a)), region.index(tuple(b))
            key = (min(ia, ib), max(ia, ib))
            if key not in lookup:
                raise ValueError(f"{a} and {b} are not joined by a bond of the region")
            state[lookup[key]] = True
        return cls(region, state, p, seed)

    @classmethod
    def all_open(cls, region: Region) -> "Config":
        return cls(region, np.ones(region.n_bonds, dtype=bool), 1.0, -1)

    @classmethod
    def all_closed(cls, region: Region) -> "Config":
        return cls(region, np.zeros(region.n_bonds, dtype=bool), 0.0, -1)

    def to_json(self) -> str:
        return json.dumps(export_config(self), sort_keys=True)


def threshold(sheet: UniformSheet, p: float) -> Config:
    """Open exactly the bonds whose uniform is strictly below p."""
    _check_p(p)
    return Config(sheet.region, sheet.u < p, p, sheet.seed)


def sample(region: Region, p: float, seed: int) -> Config:
    """I.i.d. Bernoulli(p) bonds on the region, determined by (region, p, seed)."""
    _check_p(p)
    return threshold(UniformSheet.draw(region, seed), p)


def resample_conditional(config: Config, frozen: np.ndarray, seed2: int) -> Config:
    """Keep bonds flagged in ``frozen``; redraw every other bond at config.p from seed2."""
    fresh = uniforms(seed2, config.region.n_bonds) < config.p
    return Config(config.region, np.where(frozen, config.state, fresh), config.p, seed2)


def rle_encode(bits: np.ndarray) -> list:
    """Run lengths of a bit sequence, starting with a (possibly empty) run of zeros."""
    bits = np.asarray(bits, dtype=bool)
    if bits.size == 0:
        return []
    change = np.flatnonzero(bits[1:] != bits[:-1]) + 1
    bounds = np.concatenate(([0], change, [bits.size]))
    runs = np.diff(bounds).tolist()
    if bits[0]:
        runs.insert(0, 0)
    return runs


def rle_decode(runs: list, size: int) -> np.ndarray:
    out = np.zeros(size, dtype=bool)
    pos, val = 0, False
    for r in runs:
        if val:
            out[pos:pos + r] = True
        pos += r
        val = not val
    if pos != size:
        raise ValueError(f"run lengths cover {pos} bonds, expected {size}")
    return out


def export_config(config: Config) -> dict:
    """Replayable record: region header, p, seed, run-length-encoded bond bitmap."""
    obj = config.region.to_json()
    obj.update({"p": config.p, "seed": config.seed, "n_bonds": config.region.n_bonds,
                "rle": rle_encode(config.state)})
    return obj


def import_config(obj) -> Config:
    if isinstance(obj, str):
        obj = json.loads(obj)
    region = Region.from_json(obj)
    return Config(region, rle_decode(obj["rle"], region.n_bonds), obj["p"], obj["seed"])
