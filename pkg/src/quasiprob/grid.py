"""Discretized square [-1,1]^2, region masks and connected-component labeling.

Cells are addressed as ``(i, j)`` with ``i`` running along the first
coordinate and ``j`` along the second, so ``bits[i, j]`` is the cell whose
center is ``(x_i, y_j)``.

Open masks (superlevel sets) are labeled with 8-connectivity, their
complements with 4-connectivity.  The pairing keeps a set and its complement
from both crossing the same diagonal.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import ndimage

from .errors import EmptyMask, EvenResolution, ResolutionOutOfRange

MAX_RESOLUTION = 8192


class Adjacency(enum.Enum):
    FOUR = 4
    EIGHT = 8

    @property
    def structure(self) -> np.ndarray:
        if self is Adjacency.FOUR:
            return ndimage.generate_binary_structure(2, 1)
        return ndimage.generate_binary_structure(2, 2)


@dataclass(frozen=True)
class GridDomain:
    """Uniform ``n x n`` grid of cells covering [-1,1]^2 (``n`` odd)."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ResolutionOutOfRange(f"resolution must be an integer, got {self.n!r}")
        if self.n < 3 or self.n > MAX_RESOLUTION:
            raise ResolutionOutOfRange(f"resolution must lie in [3, {MAX_RESOLUTION}], got {self.n}")
        if self.n % 2 == 0:
            raise EvenResolution(f"resolution must be odd so (0,0) is a cell center, got {self.n}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @property
    def size(self) -> int:
        return self.n * self.n

    @property
    def cell_size(self) -> float:
        return 2.0 / self.n

    @property
    def center_index(self) -> tuple[int, int]:
        c = (self.n - 1) // 2
        return (c, c)

    @cached_property
    def axis(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        a = -1.0 + (2.0 * np.arange(self.n) + 1.0) / self.n
        a[(self.n - 1) // 2] = 0.0  # exact zero at the marker cell
        a.flags.writeable = False
        return a

    @cached_property
    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        x, y = np.meshgrid(self.axis, self.axis, indexing="ij")
        x.flags.writeable = False
        y.flags.writeable = False
        return x, y

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"cell ({i}, {j}) outside {self.n}x{self.n} grid")
        return float(self.axis[i]), float(self.axis[j])

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """Index of the cell containing the physical point ``(x, y)``."""
        i = min(int((x + 1.0) / self.cell_size), self.n - 1)
        j = min(int((y + 1.0) / self.cell_size), self.n - 1)
        return i, j

    def full(self) -> "RegionMask":
        return RegionMask(self, np.ones(self.shape, dtype=bool))

    def empty(self) -> "RegionMask":
        return RegionMask(self, np.zeros(self.shape, dtype=bool))

    @cached_property
    def _ring_bits(self) -> np.ndarray:
        bits = np.zeros(self.shape, dtype=bool)
        bits[0, :] = bits[-1, :] = bits[:, 0] = bits[:, -1] = True
        bits.flags.writeable = False
        return bits


def make_domain(n: int) -> GridDomain:
    return GridDomain(n)


@dataclass(frozen=True, eq=False)
class RegionMask:
    """Immutable boolean mask over a :class:`GridDomain`."""

    domain: GridDomain
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != self.domain.shape:
            raise ValueError(f"mask shape {bits.shape} does not match domain {self.domain.shape}")
        if bits.flags.writeable:
            bits = bits.copy()
            bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    def _check(self, other: "RegionMask") -> None:
        if other.domain != self.domain:
            raise ValueError("masks live on different domains")

    def complement(self) -> "RegionMask":
        return RegionMask(self.domain, ~self.bits)

    def __invert__(self) -> "RegionMask":
        return self.complement()

    def __or__(self, other: "RegionMask") -> "RegionMask":
        self._check(other)
        return RegionMask(self.domain, self.bits | other.bits)

    def __and__(self, other: "RegionMask") -> "RegionMask":
        self._check(other)
        return RegionMask(self.domain, self.bits & other.bits)

    def __sub__(self, other: "RegionMask") -> "RegionMask":
        self._check(other)
        return RegionMask(self.domain, self.bits & ~other.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RegionMask):
            return NotImplemented
        return self.domain == other.domain and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.domain, np.packbits(self.bits).tobytes()))

    def __contains__(self, cell: tuple[int, int]) -> bool:
        return bool(self.bits[cell])

    def popcount(self) -> int:
        return int(np.count_nonzero(self.bits))

    def is_empty(self) -> bool:
        return not self.bits.any()

    def is_full(self) -> bool:
        return bool(self.bits.all())

    def issubset(self, other: "RegionMask") -> bool:
        self._check(other)
        return not np.any(self.bits & ~other.bits)

    def isdisjoint(self, other: "RegionMask") -> bool:
        self._check(other)
        return not np.any(self.bits & other.bits)

    def dilate(self, adjacency: Adjacency = Adjacency.EIGHT) -> "RegionMask":
        """Mask grown by one cell layer under ``adjacency``."""
        return RegionMask(self.domain, ndimage.binary_dilation(self.bits, structure=adjacency.structure))

    def is_separated_from(self, other: "RegionMask", adjacency: Adjacency = Adjacency.EIGHT) -> bool:
        """True when no cell of ``other`` is in or adjacent to this mask."""
        return self.dilate(adjacency).isdisjoint(other)

    def __repr__(self) -> str:
        return f"RegionMask(n={self.domain.n}, popcount={self.popcount()})"


def boundary_ring(domain: GridDomain) -> RegionMask:
    """Outermost cell layer; it has ``4n - 4`` cells."""
    return RegionMask(domain, domain._ring_bits)


@dataclass(frozen=True, eq=False)
class ComponentLabeling:
    """Connected components of a mask.

    ``labels`` is 0 outside the mask and ``1..count`` inside.  The flag arrays
    are indexed by label, with index 0 unused (always False).
    """

    mask: RegionMask
    adjacency: Adjacency
    labels: np.ndarray
    count: int
    contains_marker: np.ndarray
    touches_ring: np.ndarray
    contains_full_ring: np.ndarray
    sizes: np.ndarray = field(repr=False)

    def component(self, label: int) -> RegionMask:
        if not 1 <= label <= self.count:
            raise IndexError(f"no component with label {label}")
        return RegionMask(self.mask.domain, self.labels == label)

    def components(self) -> list[RegionMask]:
        return [self.component(k) for k in range(1, self.count + 1)]

    def label_at(self, cell: tuple[int, int]) -> int:
        return int(self.labels[cell])

    def marker_label(self) -> int:
        """Label of the component holding the marker cell, 0 if none."""
        return self.label_at(self.mask.domain.center_index)

    def ring_labels(self) -> np.ndarray:
        return np.flatnonzero(self.touches_ring)


def label_components(mask: RegionMask, adjacency: Adjacency = Adjacency.EIGHT) -> ComponentLabeling:
    domain = mask.domain
    labels, count = ndimage.label(mask.bits, structure=adjacency.structure)
    ring = domain._ring_bits
    ring_counts = np.bincount(labels[ring], minlength=count + 1)
    ring_counts[0] = 0
    touches = ring_counts > 0
    full_ring = ring_counts == 4 * domain.n - 4
    marker = np.zeros(count + 1, dtype=bool)
    marker[labels[domain.center_index]] = True
    marker[0] = False
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    sizes[0] = 0
    for arr in (labels, touches, full_ring, marker, sizes):
        arr.flags.writeable = False
    return ComponentLabeling(
        mask=mask,
        adjacency=adjacency,
        labels=labels,
        count=int(count),
        contains_marker=marker,
        touches_ring=touches,
        contains_full_ring=full_ring,
        sizes=sizes,
    )


def is_solid(mask: RegionMask) -> bool:
    """Connected (8) with connected (4) complement; an empty complement counts as connected."""
    if mask.is_empty():
        raise EmptyMask("solidity is undefined for the empty mask")
    if label_components(mask, Adjacency.EIGHT).count != 1:
        return False
    return label_components(mask.complement(), Adjacency.FOUR).count <= 1
