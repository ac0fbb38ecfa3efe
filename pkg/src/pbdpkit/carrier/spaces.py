"""Carrier spaces, point patterns, discrete measures and partitions.

Points are plain floats. On UnitInterval and Circle they are positions in
[0, 1]; on FiniteSites they are integer-valued site indices.
"""

import json
import math
from abc import ABC, abstractmethod
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, ClassVar

import numpy as np

SITE_MATCH_TOL = 1e-12
TRIANGLE_TOL = 1e-12


class CarrierSpace(ABC):
    """A compact space with a metric (or pseudometric) bounded by 1."""

    kind: ClassVar[str]

    @abstractmethod
    def pairwise(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Matrix of distances d0(xs[i], ys[j])."""

    @abstractmethod
    def contains_all(self, xs: np.ndarray) -> bool:
        """Whether every entry of ``xs`` is a point of the space."""

    @abstractmethod
    def center_of(self, points: Sequence[float]) -> float:
        """A point minimizing (or nearly) the largest distance to ``points``."""

    @property
    def is_metric(self) -> bool:
        """False for pseudometrics, where distinct points may be at distance 0."""
        return True

    def distance(self, x: float, y: float) -> float:
        return float(self.pairwise(np.array([x], dtype=float), np.array([y], dtype=float))[0, 0])

    def check(self, xs: Iterable[float]) -> None:
        """Raise ValueError unless every point lies in the space."""
        arr = np.fromiter(xs, dtype=float)
        if arr.size and not self.contains_all(arr):
            raise ValueError(f"Points outside the {self.kind} space: {arr.tolist()}")

    def sup_distance(self, points: Sequence[float], center: float) -> float:
        if not points:
            return 0.0
        return float(np.max(self.pairwise(np.asarray(points, dtype=float), np.array([center]))))

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind}


@dataclass(frozen=True)
class UnitInterval(CarrierSpace):
    """[0, 1] with d0(x, y) = |x - y|."""

    kind: ClassVar[str] = "interval"

    def pairwise(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return np.abs(np.subtract.outer(np.asarray(xs, float), np.asarray(ys, float)))

    def contains_all(self, xs: np.ndarray) -> bool:
        return bool(np.all((xs >= 0.0) & (xs <= 1.0)))

    def center_of(self, points: Sequence[float]) -> float:
        return (min(points) + max(points)) / 2.0


@dataclass(frozen=True)
class Circle(CarrierSpace):
    """Unit circle of fractional positions with d0(x, y) = |x - y| ^ (1 - |x - y|).

    Position 1 is the same point as 0.
    """

    kind: ClassVar[str] = "circle"

    def pairwise(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        gap = np.mod(np.abs(np.subtract.outer(np.asarray(xs, float), np.asarray(ys, float))), 1.0)
        return np.minimum(gap, 1.0 - gap)

    def contains_all(self, xs: np.ndarray) -> bool:
        return bool(np.all((xs >= 0.0) & (xs <= 1.0)))

    def center_of(self, points: Sequence[float]) -> float:
        # Midpoint of the shortest arc covering the points: the complement of the widest gap.
        ordered = sorted({p % 1.0 for p in points})
        gaps = [(ordered[(i + 1) % len(ordered)] - ordered[i]) % 1.0 for i in range(len(ordered))]
        if len(ordered) == 1:
            return ordered[0]
        widest = int(np.argmax(gaps))
        start = ordered[(widest + 1) % len(ordered)]
        arc = 1.0 - gaps[widest]
        return (start + arc / 2.0) % 1.0


@dataclass(frozen=True, eq=False)
class FiniteSites(CarrierSpace):
    """Finitely many sites with an explicit distance matrix.

    Pseudometrics are allowed, including the all-zero matrix, under which d1 only
    tells configurations apart by their sizes.

    Attributes:
        distances: Symmetric matrix with zero diagonal and entries in [0, 1]
        labels: Optional site names
    """

    kind: ClassVar[str] = "sites"

    distances: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        dist = np.array(self.distances, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1] or dist.shape[0] == 0:
            raise ValueError(f"Distance matrix must be square and nonempty, got {dist.shape}")
        if not np.all(np.isfinite(dist)) or np.any(dist < 0) or np.any(dist > 1):
            raise ValueError("Site distances must be finite and lie in [0, 1]")
        if not np.allclose(dist, dist.T, rtol=0.0, atol=0.0):
            raise ValueError("Site distance matrix must be symmetric")
        if np.any(np.diag(dist) != 0):
            raise ValueError("Site distance matrix must have a zero diagonal")
        # d[i, k] <= d[i, j] + d[j, k] for every triple, one intermediate site at a time
        for j in range(dist.shape[0]):
            if np.any(dist > dist[:, j : j + 1] + dist[j : j + 1, :] + TRIANGLE_TOL):
                raise ValueError("Site distances violate the triangle inequality")
        if self.labels and len(self.labels) != dist.shape[0]:
            raise ValueError("Number of site labels must match the distance matrix")
        dist.setflags(write=False)
        object.__setattr__(self, "distances", dist)

    @classmethod
    def from_points(cls, space: CarrierSpace, points: Sequence[float]) -> "FiniteSites":
        """Sites at ``points`` of another space, inheriting its metric."""
        arr = np.asarray(points, dtype=float)
        return cls(distances=space.pairwise(arr, arr), labels=tuple(f"{p:g}" for p in points))

    @classmethod
    def uniform(cls, count: int, distance: float = 1.0) -> "FiniteSites":
        """``count`` sites all at the same mutual distance (0 gives the zero pseudometric)."""
        dist = np.full((count, count), float(distance))
        np.fill_diagonal(dist, 0.0)
        return cls(distances=dist)

    @property
    def site_count(self) -> int:
        return int(self.distances.shape[0])

    @property
    def is_metric(self) -> bool:
        off_diagonal = self.distances[~np.eye(self.site_count, dtype=bool)]
        return bool(np.all(off_diagonal > 0))

    def _indices(self, xs: np.ndarray) -> np.ndarray:
        return np.asarray(np.rint(xs), dtype=int)

    def pairwise(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return self.distances[np.ix_(self._indices(xs), self._indices(ys))]

    def contains_all(self, xs: np.ndarray) -> bool:
        idx = np.rint(xs)
        return bool(np.all((idx == xs) & (idx >= 0) & (idx < self.site_count)))

    def center_of(self, points: Sequence[float]) -> float:
        members = self._indices(np.asarray(points, dtype=float))
        worst = self.distances[np.ix_(members, members)].max(axis=1)
        return float(members[int(np.argmin(worst))])

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "distances": self.distances.tolist()}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteSites) and np.array_equal(self.distances, other.distances)

    def __hash__(self) -> int:
        return hash((self.kind, self.distances.tobytes()))


@dataclass(frozen=True)
class PointPattern:
    """A finite multiset of points, stored sorted so equal multisets compare equal.

    Attributes:
        points: Sorted point coordinates (repeats allowed)
    """

    points: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(sorted(float(p) for p in self.points)))

    @classmethod
    def of(cls, points: Iterable[float]) -> "PointPattern":
        return cls(points=tuple(points))

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def add(self, *points: float) -> "PointPattern":
        return PointPattern(points=self.points + tuple(points))

    def remove(self, point: float) -> "PointPattern":
        """Drop one copy of ``point``."""
        items = list(self.points)
        try:
            items.remove(float(point))
        except ValueError:
            raise ValueError(f"Point {point} is not in the pattern") from None
        return PointPattern(points=tuple(items))

    def count_at(self, point: float) -> int:
        return sum(1 for p in self.points if p == point)

    def to_json(self) -> str:
        return json.dumps({"points": list(self.points)})

    @classmethod
    def from_json(cls, text: str) -> "PointPattern":
        return cls(points=tuple(json.loads(text)["points"]))


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted atoms; atoms at the same point are merged and kept sorted.

    Attributes:
        atoms: (point, weight) pairs with nonnegative weights
    """

    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        merged: dict[float, list[float]] = {}
        for point, weight in self.atoms:
            weight = float(weight)
            if not math.isfinite(weight) or weight < 0:
                raise ValueError(f"Atom weights must be finite and nonnegative, got {weight}")
            merged.setdefault(float(point), []).append(weight)
        atoms = tuple((point, math.fsum(ws)) for point, ws in sorted(merged.items()))
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_arrays(cls, points: Sequence[float], weights: Sequence[float]) -> "DiscreteMeasure":
        if len(points) != len(weights):
            raise ValueError("points and weights must have equal length")
        return cls(atoms=tuple(zip(points, weights, strict=True)))

    @cached_property
    def total(self) -> float:
        return math.fsum(w for _, w in self.atoms)

    @property
    def points(self) -> np.ndarray:
        return np.asarray([p for p, _ in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.asarray([w for _, w in self.atoms], dtype=float)

    def weight_at(self, point: float) -> float:
        return math.fsum(w for p, w in self.atoms if p == point)

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return DiscreteMeasure(atoms=tuple((p, w * factor) for p, w in self.atoms))

    def normalized(self) -> "DiscreteMeasure":
        if self.total <= 0:
            raise ValueError("Cannot normalize a measure with zero total mass")
        return self.scaled(1.0 / self.total)

    def to_json(self) -> str:
        return json.dumps({"atoms": [[p, w] for p, w in self.atoms]})

    @classmethod
    def from_json(cls, text: str) -> "DiscreteMeasure":
        return cls(atoms=tuple((p, w) for p, w in json.loads(text)["atoms"]))


@dataclass(frozen=True)
class Cell:
    """One partition cell: member site indices and the cell center."""

    members: tuple[int, ...]
    center: float


@dataclass(frozen=True)
class PartitionScheme:
    """Partition of a site list into cells, each with a center t_i.

    Resolution d0(G) is the largest distance from a site to its cell's center.

    Attributes:
        space: Carrier space the sites live in
        sites: Site locations (the support of the processes being shuffled)
        cells: Cells covering every site index exactly once
        resolution: d0(G); computed when omitted, checked when given
    """

    space: CarrierSpace
    sites: tuple[float, ...]
    cells: tuple[Cell, ...]
    resolution: float | None = field(default=None)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sites", tuple(float(s) for s in self.sites))
        seen = sorted(i for cell in self.cells for i in cell.members)
        if seen != list(range(len(self.sites))):
            raise ValueError("Partition cells must cover every site exactly once")
        if any(not cell.members for cell in self.cells):
            raise ValueError("Partition cells must be nonempty")
        self.space.check(self.sites)
        self.space.check(cell.center for cell in self.cells)

        computed = self.compute_resolution()
        if self.resolution is None:
            object.__setattr__(self, "resolution", computed)
        elif abs(self.resolution - computed) > 1e-12:
            raise ValueError(
                f"Stored resolution {self.resolution} disagrees with recomputed {computed}"
            )

    @classmethod
    def from_blocks(
        cls, space: CarrierSpace, sites: Sequence[float], sizes: Sequence[int]
    ) -> "PartitionScheme":
        """Contiguous index blocks of the given sizes, centered by ``space.center_of``."""
        if sum(sizes) != len(sites) or any(s <= 0 for s in sizes):
            raise ValueError(f"Block sizes {list(sizes)} do not tile {len(sites)} sites")
        cells = []
        start = 0
        for size in sizes:
            members = tuple(range(start, start + size))
            cells.append(Cell(members=members, center=space.center_of([sites[i] for i in members])))
            start += size
        return cls(space=space, sites=tuple(sites), cells=tuple(cells))

    @classmethod
    def single_cell(
        cls, space: CarrierSpace, sites: Sequence[float], center: float | None = None
    ) -> "PartitionScheme":
        if center is None:
            center = space.center_of(list(sites))
        return cls(
            space=space, sites=tuple(sites), cells=(Cell(tuple(range(len(sites))), center),)
        )

    @classmethod
    def per_site(cls, space: CarrierSpace, sites: Sequence[float]) -> "PartitionScheme":
        """One cell per site, centered on the site itself (resolution 0)."""
        cells = tuple(Cell(members=(i,), center=float(s)) for i, s in enumerate(sites))
        return cls(space=space, sites=tuple(sites), cells=cells)

    def compute_resolution(self) -> float:
        worst = 0.0
        for cell in self.cells:
            members = [self.sites[i] for i in cell.members]
            worst = max(worst, self.space.sup_distance(members, cell.center))
        return worst

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    @property
    def cell_sizes(self) -> list[int]:
        return [len(cell.members) for cell in self.cells]

    @cached_property
    def _cell_of_site(self) -> np.ndarray:
        owner = np.empty(len(self.sites), dtype=int)
        for index, cell in enumerate(self.cells):
            owner[list(cell.members)] = index
        return owner

    @cached_property
    def _sorted_sites(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.sites, kind="stable")
        return np.asarray(self.sites, dtype=float)[order], order

    def site_index(self, point: float) -> int:
        """Index of the site at ``point``.

        Raises:
            ValueError: If no site lies within SITE_MATCH_TOL of the point
        """
        values, order = self._sorted_sites
        pos = int(np.searchsorted(values, point))
        for candidate in (pos - 1, pos):
            if 0 <= candidate < values.size and abs(values[candidate] - point) <= SITE_MATCH_TOL:
                return int(order[candidate])
        raise ValueError(f"Point {point} is not covered by any partition cell")

    def cell_of(self, point: float) -> int:
        """Cell holding the site at ``point``; a cell center maps to its own cell."""
        try:
            return int(self._cell_of_site[self.site_index(point)])
        except ValueError:
            for index, cell in enumerate(self.cells):
                if abs(cell.center - point) <= SITE_MATCH_TOL:
                    return index
            raise

    def cell_counts(self, pattern: PointPattern) -> np.ndarray:
        """Number of pattern points in each cell."""
        counts = np.zeros(self.cell_count, dtype=int)
        for point in pattern.points:
            counts[self.cell_of(point)] += 1
        return counts


def space_from_dict(data: dict[str, Any]) -> CarrierSpace:
    """Inverse of ``CarrierSpace.to_dict``."""
    kind = data.get("kind")
    if kind == UnitInterval.kind:
        return UnitInterval()
    if kind == Circle.kind:
        return Circle()
    if kind == FiniteSites.kind:
        return FiniteSites(distances=np.asarray(data["distances"], dtype=float))
    raise ValueError(f"Unknown carrier space kind: {kind!r}")
