"""Seeded generators for benchmark elections.

Two families: spatial elections with inverse-distance utilities
(:func:`gen_euclidean`) and the adversarial unit-cost family on which the
buyout rule starves a small cohesive group (:func:`gen_prop_one`).

Randomness uses numpy's PCG64 via ``default_rng``, with one child stream
per entity kind spawned from a root ``SeedSequence``: stream 0 draws
candidates, stream 1 + k draws voter cluster k. Changing a cluster's size
therefore never shifts candidate coordinates or other clusters' draws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import Election, Num, Project, UtilityProfile, as_num
from .rules import TieBreaker

__all__ = [
    "Dist",
    "VoterCluster",
    "EuclideanConfig",
    "PropOneConfig",
    "standard_clusters",
    "gen_euclidean",
    "gen_prop_one",
]


@dataclass(frozen=True)
class Dist:
    """A one-dimensional sampling recipe.

    kinds: ``uniform`` (low, high), ``gauss`` (mean, stddev),
    ``beta`` (a, b). Gaussian draws are not clipped to [0, 1]; utilities
    stay well defined for any coordinate.
    """

    kind: str
    p1: float
    p2: float

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "gauss", "beta"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "uniform" and not self.p1 < self.p2:
            raise ValueError("uniform distribution needs low < high")
        if self.kind in ("gauss", "beta") and self.p2 <= 0:
            raise ValueError(f"{self.kind} distribution needs positive p2")
        if self.kind == "beta" and self.p1 <= 0:
            raise ValueError("beta distribution needs positive p1")

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(self.p1, self.p2, count)
        if self.kind == "gauss":
            return rng.normal(self.p1, self.p2, count)
        return rng.beta(self.p1, self.p2, count)


@dataclass(frozen=True)
class VoterCluster:
    """A block of voters sharing coordinate distributions."""

    count: int
    x: Dist
    y: Dist

    def __post_init__(self) -> None:
        if self.count <= 0:
            raise ValueError("cluster count must be positive")


def standard_clusters(dist: int) -> tuple[VoterCluster, ...]:
    """The three named voter layouts on the unit square.

    1: two uniform vertical bands (100 voters on the left, 50 on the
    right). 2: two Gaussian blobs at x = 0.25 and x = 0.75, y centered at
    0.5, sigma 0.1. 3: the same Gaussian x-coordinates with beta(1.5, 3)
    distributed y-coordinates.
    """
    if dist == 1:
        return (
            VoterCluster(100, Dist("uniform", 0.05, 0.4), Dist("uniform", 0.05, 0.95)),
            VoterCluster(50, Dist("uniform", 0.6, 0.95), Dist("uniform", 0.05, 0.95)),
        )
    if dist == 2:
        return (
            VoterCluster(100, Dist("gauss", 0.25, 0.1), Dist("gauss", 0.5, 0.1)),
            VoterCluster(50, Dist("gauss", 0.75, 0.1), Dist("gauss", 0.5, 0.1)),
        )
    if dist == 3:
        return (
            VoterCluster(100, Dist("gauss", 0.25, 0.1), Dist("beta", 1.5, 3.0)),
            VoterCluster(50, Dist("gauss", 0.75, 0.1), Dist("beta", 1.5, 3.0)),
        )
    raise ValueError(f"unknown standard distribution {dist}")


@dataclass(frozen=True)
class EuclideanConfig:
    """Configuration for spatial election generation.

    Utilities are 1 / (euclidean distance + lam), quantized to the nearest
    multiple of 1/quantization_denominator so the exact engine receives
    rationals. All projects share ``unit_cost``.
    """

    n_candidates: int = 150
    voter_clusters: tuple[VoterCluster, ...] = field(
        default_factory=lambda: standard_clusters(1)
    )
    lam: Num = Fraction(1)
    unit_cost: Num = Fraction(1)
    budget: Num = Fraction(10)
    quantization_denominator: int = 10**9
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", as_num(self.lam))
        object.__setattr__(self, "unit_cost", as_num(self.unit_cost))
        object.__setattr__(self, "budget", as_num(self.budget))
        if self.n_candidates <= 0:
            raise ValueError("need at least one candidate")
        if not self.voter_clusters:
            raise ValueError("need at least one voter cluster")
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.quantization_denominator <= 0:
            raise ValueError("quantization denominator must be positive")


def quantized_inverse_distance(
    vx: float, vy: float, cx: float, cy: float, lam: float, denominator: int
) -> Num:
    """1 / (distance + lam), rounded to the nearest 1/denominator."""
    utility = 1.0 / (math.hypot(vx - cx, vy - cy) + lam)
    return Fraction(round(utility * denominator), denominator)


def _coords_string(xs: Sequence[float], ys: Sequence[float]) -> str:
    return " ".join(f"{repr(float(x))} {repr(float(y))}" for x, y in zip(xs, ys))


def gen_euclidean(config: EuclideanConfig) -> Election:
    """Generate one spatial election, deterministically from the seed.

    Candidates are drawn uniformly from the unit square as (x, y) pairs
    from the candidate stream; each voter cluster draws its x vector and
    then its y vector from its own stream. Coordinates are recorded in the
    election metadata (space-separated float reprs) for plot output.
    """
    root = np.random.SeedSequence(config.seed)
    streams = root.spawn(1 + len(config.voter_clusters))
    cand_rng = np.random.default_rng(streams[0])
    cand_xy = cand_rng.uniform(0.0, 1.0, (config.n_candidates, 2))
    cand_x, cand_y = cand_xy[:, 0], cand_xy[:, 1]

    voter_x: list[float] = []
    voter_y: list[float] = []
    for k, cluster in enumerate(config.voter_clusters):
        rng = np.random.default_rng(streams[1 + k])
        voter_x.extend(cluster.x.sample(rng, cluster.count))
        voter_y.extend(cluster.y.sample(rng, cluster.count))

    lam = float(config.lam)
    denominator = config.quantization_denominator
    rows = [
        {
            c: quantized_inverse_distance(
                vx, vy, cand_x[c], cand_y[c], lam, denominator
            )
            for c in range(config.n_candidates)
        }
        for vx, vy in zip(voter_x, voter_y)
    ]
    n_voters = len(rows)
    projects = tuple(
        Project(c, f"c{c + 1}", config.unit_cost)
        for c in range(config.n_candidates)
    )
    metadata = {
        "generator": "euclidean",
        "seed": str(config.seed),
        "lambda": str(config.lam),
        "candidate_coords": _coords_string(cand_x, cand_y),
        "voter_coords": _coords_string(voter_x, voter_y),
    }
    return Election(
        projects=projects,
        n_voters=n_voters,
        budget=config.budget,
        scores=UtilityProfile.from_rows(n_voters, config.n_candidates, rows),
        metadata=metadata,
    )


@dataclass(frozen=True)
class PropOneConfig:
    """Size parameter for the adversarial unit-cost family."""

    ell: int = 1

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise ValueError("ell must be at least 1")


def gen_prop_one(config: PropOneConfig) -> tuple[Election, TieBreaker]:
    """Build the starved-minority instance family, plus its tie order.

    For parameter ell: a block C1 of ell unit-cost projects approved only
    by ell voters; a block C2 of 4*ell^2 - ell projects approved by all of
    the remaining 4*ell^2 voters; and a block C3 of 2*ell projects, each
    approved additionally by one subgroup of 2*ell of those voters. The
    budget equals the voter count (4*ell^2 + ell), so every voter starts
    with exactly one unit. Ties must favor C2, then C3, then C1 for the
    buyout rules to starve the C1 block; the returned tie order encodes
    that preference.
    """
    ell = config.ell
    n_c1 = ell
    n_c2 = 4 * ell * ell - ell
    n_c3 = 2 * ell
    c1_ids = list(range(n_c1))
    c2_ids = list(range(n_c1, n_c1 + n_c2))
    c3_ids = list(range(n_c1 + n_c2, n_c1 + n_c2 + n_c3))
    projects = tuple(
        Project(cid, name, Fraction(1))
        for cid, name in zip(
            c1_ids + c2_ids + c3_ids,
            [f"c1_{k + 1}" for k in range(n_c1)]
            + [f"c2_{k + 1}" for k in range(n_c2)]
            + [f"c3_{k + 1}" for k in range(n_c3)],
        )
    )
    one = Fraction(1)
    rows: list[dict[int, Num]] = []
    for _ in range(ell):
        rows.append({cid: one for cid in c1_ids})
    for j in range(2 * ell):
        c3_for_group = c3_ids[j]
        for _ in range(2 * ell):
            row = {cid: one for cid in c2_ids}
            row[c3_for_group] = one
            rows.append(row)
    n_voters = ell + 4 * ell * ell
    election = Election(
        projects=projects,
        n_voters=n_voters,
        budget=Fraction(n_voters),
        scores=UtilityProfile.from_rows(n_voters, len(projects), rows),
        metadata={"generator": "prop1", "ell": str(ell)},
    )
    tie = TieBreaker(order=tuple(c2_ids + c3_ids + c1_ids))
    return election, tie
