"""Voxel grids, belief maps, environment generators, and the voxel text format.

Grids live on a regular lattice with cubic cells of edge ``resolution``
meters; the cell (i, j, k) spans ``[i*r, (i+1)*r)`` on x and so on, with its
center at ``(i + 0.5) * r``. Cell payloads are stored flat with x varying
fastest: ``flat = i + nx * (j + ny * k)``, which is also the payload order of
the on-disk format.
"""

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigurationError,
    DimensionMismatchError,
    MalformedHeaderError,
    PayloadSizeError,
)

# Tri-state belief payload values. Ground-truth environments only use the
# first two.
FREE = 0
OCCUPIED = 1
UNKNOWN = 2

VOXEL_MAGIC = "voxgrid"
VOXEL_VERSION = 1


@dataclass
class VoxelGrid3:
    """A dense 3-D voxel grid with a flat uint8 payload."""

    dims: tuple
    resolution: float
    cells: np.ndarray

    def __post_init__(self):
        nx, ny, nz = self.dims
        if nx < 1 or ny < 1 or nz < 1:
            raise ConfigurationError(f"grid dims must be positive, got {self.dims}")
        if not (self.resolution > 0.0 and np.isfinite(self.resolution)):
            raise ConfigurationError(f"resolution must be positive, got {self.resolution}")
        if self.cells.shape != (nx * ny * nz,):
            raise ConfigurationError(
                f"payload has {self.cells.shape} cells, dims imply {nx * ny * nz}"
            )

    @property
    def n_cells(self):
        nx, ny, nz = self.dims
        return nx * ny * nz

    @property
    def extent(self):
        """Edge lengths of the bounding box in meters."""
        return tuple(n * self.resolution for n in self.dims)

    def index(self, i, j, k):
        nx, ny, _ = self.dims
        return i + nx * (j + ny * k)

    def unflatten(self, flat):
        nx, ny, _ = self.dims
        return flat % nx, (flat // nx) % ny, flat // (nx * ny)

    def in_bounds(self, i, j, k):
        nx, ny, nz = self.dims
        return 0 <= i < nx and 0 <= j < ny and 0 <= k < nz

    def contains_point(self, point):
        for a in range(3):
            if not (0.0 <= point[a] < self.dims[a] * self.resolution):
                return False
        return True

    def world_to_cell(self, point):
        """Cell containing a point; boundary coordinates round down."""
        if not self.contains_point(point):
            raise ValueError(f"point {tuple(point)} outside grid extent {self.extent}")
        r = self.resolution
        return (
            int(np.floor(point[0] / r)),
            int(np.floor(point[1] / r)),
            int(np.floor(point[2] / r)),
        )

    def cell_center(self, i, j, k):
        r = self.resolution
        return ((i + 0.5) * r, (j + 0.5) * r, (k + 0.5) * r)

    def as_array3d(self):
        """Payload viewed as an (nx, ny, nz)-indexed array (no copy)."""
        nx, ny, nz = self.dims
        return self.cells.reshape(nz, ny, nx).transpose(2, 1, 0)

    def copy(self):
        return VoxelGrid3(self.dims, self.resolution, self.cells.copy())


@dataclass
class GroundTruthEnvironment:
    """The actual world: every cell is either free or occupied."""

    grid: VoxelGrid3

    @property
    def occupancy(self):
        return self.grid.cells

    @property
    def occupied_count(self):
        return int(np.count_nonzero(self.grid.cells))

    @property
    def free_count(self):
        return self.grid.n_cells - self.occupied_count


@dataclass
class BeliefMap:
    """Tri-state map of what the robots know, plus the prior on the rest.

    Unknown cells are modeled as independent Bernoulli(occupancy_prior)
    occupancies. ``version`` increments on every fusion so that cached
    view sets can be invalidated cheaply.
    """

    grid: VoxelGrid3
    occupancy_prior: float = 0.125
    version: int = field(default=0, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.occupancy_prior <= 1.0:
            raise ConfigurationError(
                f"occupancy prior must be in [0, 1], got {self.occupancy_prior}"
            )

    @classmethod
    def unknown(cls, dims, resolution, occupancy_prior=0.125):
        cells = np.full(dims[0] * dims[1] * dims[2], UNKNOWN, dtype=np.uint8)
        return cls(VoxelGrid3(tuple(dims), resolution, cells), occupancy_prior)

    @property
    def cells(self):
        return self.grid.cells

    def known_occupancy(self):
        """Occupancy with unknown treated as free (the optimistic world)."""
        return (self.grid.cells == OCCUPIED).astype(np.uint8)

    def known_free_mask(self):
        return (self.grid.cells == FREE).astype(np.uint8)

    def unknown_flat(self):
        return np.flatnonzero(self.grid.cells == UNKNOWN)

    @property
    def known_count(self):
        return int(np.count_nonzero(self.grid.cells != UNKNOWN))

    def copy(self):
        return BeliefMap(self.grid.copy(), self.occupancy_prior, self.version)


def sample_environment(belief, seed):
    """Draw one world consistent with the belief.

    Known cells are copied; each unknown cell is occupied independently with
    probability ``belief.occupancy_prior``. Deterministic in ``seed``.
    """
    rng = np.random.default_rng(seed)
    occ = (belief.cells == OCCUPIED).astype(np.uint8)
    unknown = belief.unknown_flat()
    if unknown.size:
        draws = rng.random(unknown.size) < belief.occupancy_prior
        occ[unknown[draws]] = 1
    return GroundTruthEnvironment(VoxelGrid3(belief.grid.dims, belief.grid.resolution, occ))


def _dims_from_extent(extent, resolution):
    dims = tuple(int(round(e / resolution)) for e in extent)
    if any(n < 1 for n in dims):
        raise ConfigurationError(
            f"extent {tuple(extent)} is below one cell at resolution {resolution}"
        )
    return dims


def generate_empty(extent, resolution):
    """An all-free environment spanning ``extent`` meters per axis."""
    dims = _dims_from_extent(extent, resolution)
    cells = np.zeros(dims[0] * dims[1] * dims[2], dtype=np.uint8)
    return GroundTruthEnvironment(VoxelGrid3(dims, resolution, cells))


def _axis_cell_range(lo, hi, resolution, n):
    """Indices of cells whose centers fall in [lo, hi), clipped to the grid."""
    first = int(np.ceil(lo / resolution - 0.5))
    last = int(np.ceil(hi / resolution - 0.5))  # exclusive
    return max(first, 0), min(last, n)


def generate_boxes(extent, resolution, box_count, box_size_range, seed,
                   start=None, clear_half_extent=0.5):
    """Random axis-aligned occupied boxes inside an otherwise free extent.

    Box edge lengths are drawn per-axis from ``box_size_range``; min corners
    are uniform over the extent, so boxes may be clipped at the boundary. A
    cube of half-edge ``clear_half_extent`` around ``start`` (default: the
    extent center) is forced free so robots always spawn in open space.
    """
    smin, smax = box_size_range
    if box_count < 0 or smin <= 0 or smax < smin:
        raise ConfigurationError(
            f"bad box parameters: count={box_count} size_range={box_size_range}"
        )
    dims = _dims_from_extent(extent, resolution)
    if start is None:
        start = tuple(e / 2.0 for e in extent)
    for a in range(3):
        if not 0.0 <= start[a] < extent[a]:
            raise ConfigurationError(f"start {tuple(start)} outside extent {tuple(extent)}")

    rng = np.random.default_rng(seed)
    occ3 = np.zeros((dims[2], dims[1], dims[0]), dtype=np.uint8)  # [k, j, i]
    for _ in range(box_count):
        size = rng.uniform(smin, smax, size=3)
        corner = rng.uniform(0.0, 1.0, size=3) * np.asarray(extent, dtype=float)
        i0, i1 = _axis_cell_range(corner[0], corner[0] + size[0], resolution, dims[0])
        j0, j1 = _axis_cell_range(corner[1], corner[1] + size[1], resolution, dims[1])
        k0, k1 = _axis_cell_range(corner[2], corner[2] + size[2], resolution, dims[2])
        occ3[k0:k1, j0:j1, i0:i1] = 1

    i0, i1 = _axis_cell_range(start[0] - clear_half_extent, start[0] + clear_half_extent,
                              resolution, dims[0])
    j0, j1 = _axis_cell_range(start[1] - clear_half_extent, start[1] + clear_half_extent,
                              resolution, dims[1])
    k0, k1 = _axis_cell_range(start[2] - clear_half_extent, start[2] + clear_half_extent,
                              resolution, dims[2])
    occ3[k0:k1, j0:j1, i0:i1] = 0

    if box_count > 0 and not occ3.any():
        raise ConfigurationError(
            "start clearing removed every occupied cell; enlarge the extent "
            "or the boxes"
        )
    return GroundTruthEnvironment(VoxelGrid3(dims, resolution, occ3.reshape(-1)))


def save_environment(env, path):
    grid = env.grid
    nx, ny, nz = grid.dims
    chars = np.where(grid.cells != 0, "1", "0")
    with open(path, "w") as fh:
        fh.write(f"{VOXEL_MAGIC} {VOXEL_VERSION}\n")
        fh.write(f"dims {nx} {ny} {nz}\n")
        fh.write(f"resolution {grid.resolution!r}\n")
        # One text row per (j, k) column of the lattice; readers ignore
        # the line structure.
        for row in chars.reshape(ny * nz, nx):
            fh.write("".join(row))
            fh.write("\n")


def load_environment(path):
    with open(path) as fh:
        text = fh.read()
    lines = text.splitlines()
    if len(lines) < 3:
        raise MalformedHeaderError(f"{path}: expected three header lines")
    magic = lines[0].split()
    if magic != [VOXEL_MAGIC, str(VOXEL_VERSION)]:
        raise MalformedHeaderError(f"{path}: bad magic line {lines[0]!r}")
    dims_parts = lines[1].split()
    if len(dims_parts) != 4 or dims_parts[0] != "dims":
        raise DimensionMismatchError(f"{path}: bad dims line {lines[1]!r}")
    try:
        dims = tuple(int(p) for p in dims_parts[1:])
    except ValueError:
        raise DimensionMismatchError(f"{path}: unparseable dims {lines[1]!r}") from None
    if any(n < 1 for n in dims):
        raise DimensionMismatchError(f"{path}: non-positive dims {dims}")
    res_parts = lines[2].split()
    if len(res_parts) != 2 or res_parts[0] != "resolution":
        raise MalformedHeaderError(f"{path}: bad resolution line {lines[2]!r}")
    try:
        resolution = float(res_parts[1])
    except ValueError:
        raise MalformedHeaderError(f"{path}: unparseable resolution {lines[2]!r}") from None
    if not (resolution > 0 and np.isfinite(resolution)):
        raise MalformedHeaderError(f"{path}: non-positive resolution {resolution}")

    payload = "".join("".join(line.split()) for line in lines[3:])
    n = dims[0] * dims[1] * dims[2]
    if len(payload) != n:
        raise PayloadSizeError(f"{path}: payload has {len(payload)} cells, dims imply {n}")
    data = np.frombuffer(payload.encode("ascii"), dtype=np.uint8)
    bad = (data != ord("0")) & (data != ord("1"))
    if bad.any():
        pos = int(np.flatnonzero(bad)[0])
        raise PayloadSizeError(f"{path}: payload character {payload[pos]!r} at cell {pos}")
    cells = (data == ord("1")).astype(np.uint8)
    return GroundTruthEnvironment(VoxelGrid3(dims, resolution, cells))


def environment_hash(env):
    """Stable content hash of dims, resolution, and payload."""
    grid = env.grid
    h = hashlib.sha256()
    h.update(f"{grid.dims[0]} {grid.dims[1]} {grid.dims[2]} {grid.resolution!r}".encode())
    h.update(np.ascontiguousarray(grid.cells).tobytes())
    return h.hexdigest()
