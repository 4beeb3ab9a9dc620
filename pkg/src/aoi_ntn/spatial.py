"""Ground-node and UAV point patterns (PPP + Poisson cluster process)."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyUavSet, NoAssociatedNodes, ValidationError
from .rng import stream

PPP_TAG = -1


@dataclass(frozen=True)
class Window:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValidationError("window", "x_max > x_min and y_max > y_min required")

    @classmethod
    def square(cls, side):
        return cls(0.0, float(side), 0.0, float(side))

    def area(self):
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def center(self):
        return 0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max)

    def uniform(self, rng, n):
        xs = rng.uniform(self.x_min, self.x_max, n)
        ys = rng.uniform(self.y_min, self.y_max, n)
        return np.column_stack([xs, ys])


@dataclass(frozen=True)
class SpatialConfig:
    """Composite PPP/PCP ground-node model plus UAV density.

    ``lambda1`` is the PPP intensity, ``lambda_p2`` the cluster-centre
    intensity and ``lambda_c2`` the per-cluster intensity inside a disc of
    radius ``r_c``. ``m1`` and ``m2`` are the mixture weights.
    """

    m1: float = 0.5
    lambda1: float = 0.01
    m2: float = 0.5
    lambda_p2: float = 0.002
    lambda_c2: float = 0.015
    r_c: float = 5.0
    lambda_a: float = 2.5e-4

    def __post_init__(self):
        if not (0.0 <= self.m1 <= 1.0 and 0.0 <= self.m2 <= 1.0):
            raise ValidationError("spatial.m1/m2", "fractions must lie in [0, 1]")
        if abs(self.m1 + self.m2 - 1.0) > 1e-12:
            raise ValidationError("spatial.m1+m2", f"must equal 1, got {self.m1 + self.m2!r}")
        for name in ("lambda1", "lambda_p2", "lambda_c2", "lambda_a"):
            if getattr(self, name) < 0:
                raise ValidationError(f"spatial.{name}", "density must be >= 0")
        if self.r_c <= 0:
            raise ValidationError("spatial.r_c", "cluster radius must be > 0")


@dataclass(frozen=True)
class PointPattern:
    """Planar points with an origin tag per point.

    ``origin[i] == PPP_TAG`` marks a PPP-born point; otherwise it is the
    index of the cluster parent in ``parents``.
    """

    points: np.ndarray
    origin: np.ndarray
    parents: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def __len__(self):
        return len(self.points)

    @property
    def is_ppp(self):
        return self.origin == PPP_TAG

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "origin_tag"])
            for (x, y), o in zip(self.points, self.origin):
                w.writerow([repr(float(x)), repr(float(y)), "ppp" if o == PPP_TAG else f"cluster({int(o)})"])


@dataclass(frozen=True)
class AssociationMap:
    assignment: np.ndarray  # ground index -> uav index
    load: np.ndarray  # uav index -> N_j
    uav_points: np.ndarray | None = None


def composite_density(cfg: SpatialConfig) -> float:
    return cfg.m1 * cfg.lambda1 + cfg.m2 * math.pi * cfg.r_c**2 * cfg.lambda_p2 * cfg.lambda_c2


def _ppp(lam, window, rng):
    n = rng.poisson(lam * window.area()) if lam > 0 else 0
    return window.uniform(rng, n)


def sample_ppp(lam: float, window: Window, seed: int) -> PointPattern:
    pts = _ppp(lam, window, stream(seed, "ppp"))
    return PointPattern(pts, np.full(len(pts), PPP_TAG, dtype=np.int64))


def sample_ground_pattern(cfg: SpatialConfig, window: Window, seed: int) -> PointPattern:
    """Superpose a PPP and a disc-cluster process.

    Parents are drawn inside ``window``; their offspring are kept even when
    they land just outside it (no edge correction). Parents themselves are
    cluster centres, not nodes.
    """
    background = _ppp(cfg.m1 * cfg.lambda1, window, stream(seed, "ground", "ppp"))

    crng = stream(seed, "ground", "pcp")
    parents = _ppp(cfg.m2 * cfg.lambda_p2, window, crng)
    counts = crng.poisson(cfg.lambda_c2 * math.pi * cfg.r_c**2, len(parents))
    total = int(counts.sum())
    # uniform on the disc: radius ~ r_c * sqrt(U)
    radius = cfg.r_c * np.sqrt(crng.uniform(0.0, 1.0, total))
    angle = crng.uniform(0.0, 2.0 * math.pi, total)
    owner = np.repeat(np.arange(len(parents), dtype=np.int64), counts)
    children = parents[owner] + np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])

    points = np.vstack([background, children]) if total else background
    origin = np.concatenate([np.full(len(background), PPP_TAG, dtype=np.int64), owner])
    return PointPattern(points.reshape(-1, 2), origin, parents)


def sample_uav_pattern(cfg: SpatialConfig, window: Window, seed: int) -> PointPattern:
    pts = _ppp(cfg.lambda_a, window, stream(seed, "uav"))
    return PointPattern(pts, np.full(len(pts), PPP_TAG, dtype=np.int64))


def associate_nearest(ground: PointPattern, uavs: PointPattern) -> AssociationMap:
    """Attach every ground node to its closest UAV (lowest index wins ties)."""
    m = len(uavs)
    if m == 0:
        raise EmptyUavSet("cannot associate ground nodes with an empty UAV set")
    if len(ground) == 0:
        return AssociationMap(np.empty(0, dtype=np.int64), np.zeros(m, dtype=np.int64), uavs.points)
    d2 = ((ground.points[:, None, :] - uavs.points[None, :, :]) ** 2).sum(axis=-1)
    # argmin returns the first minimum, which is the tie-break rule
    assignment = np.argmin(d2, axis=1).astype(np.int64)
    load = np.bincount(assignment, minlength=m).astype(np.int64)
    return AssociationMap(assignment, load, uavs.points)


def scheduling_probability(assoc: AssociationMap, uav: int) -> float:
    if not 0 <= uav < len(assoc.load):
        raise IndexError(f"no UAV with index {uav}")
    n = int(assoc.load[uav])
    if n == 0:
        raise NoAssociatedNodes(f"UAV {uav} serves no ground nodes")
    return 1.0 / n
