"""Numba kernels for voxel traversal, BFS, and exact-expectation sums.

Everything here operates on flat cell ids with x varying fastest:
``flat = i + nx * (j + ny * k)``. All kernels are deterministic; rays are
nudged off exact cell boundaries by ``ORIGIN_NUDGE`` (a fixed fraction of the
cell size added to every origin coordinate) so that boundary ties resolve the
same way on every run and platform.
"""

import numpy as np
from numba import njit, prange

# Fraction of one cell edge added to ray origins on each axis before
# traversal. Keeps rays off exact cell boundaries.
ORIGIN_NUDGE = 1e-9

# Sentinel "not covered yet" step used by the expectation kernels. Real step
# indices are small (trajectory depth), so 10_000 is safely out of range.
NO_STEP = 10_000


@njit(cache=True)
def walk_ray(occ, nx, ny, nz, res, ox, oy, oz, dx, dy, dz, max_range, out):
    """March one ray through the grid, writing visited flat ids into ``out``.

    ``occ`` is a flat uint8 array where nonzero blocks the ray. The cell
    containing the (nudged) origin is always visited first. Marching stops
    when the accumulated ray length exceeds ``max_range``, the ray leaves the
    grid, or a blocking cell is entered (the blocker is included).

    Returns ``(count, hit)``: number of ids written and whether a blocker
    ended the walk. An origin outside the grid yields ``(0, False)``.
    """
    ox = ox + ORIGIN_NUDGE * res
    oy = oy + ORIGIN_NUDGE * res
    oz = oz + ORIGIN_NUDGE * res
    i = int(np.floor(ox / res))
    j = int(np.floor(oy / res))
    k = int(np.floor(oz / res))
    if i < 0 or i >= nx or j < 0 or j >= ny or k < 0 or k >= nz:
        return 0, False
    n = 0
    flat = i + nx * (j + ny * k)
    out[n] = flat
    n += 1
    if occ[flat] != 0:
        return n, True

    if dx > 0.0:
        step_x = 1
        t_max_x = ((i + 1) * res - ox) / dx
        t_dx = res / dx
    elif dx < 0.0:
        step_x = -1
        t_max_x = (i * res - ox) / dx
        t_dx = -res / dx
    else:
        step_x = 0
        t_max_x = np.inf
        t_dx = np.inf
    if dy > 0.0:
        step_y = 1
        t_max_y = ((j + 1) * res - oy) / dy
        t_dy = res / dy
    elif dy < 0.0:
        step_y = -1
        t_max_y = (j * res - oy) / dy
        t_dy = -res / dy
    else:
        step_y = 0
        t_max_y = np.inf
        t_dy = np.inf
    if dz > 0.0:
        step_z = 1
        t_max_z = ((k + 1) * res - oz) / dz
        t_dz = res / dz
    elif dz < 0.0:
        step_z = -1
        t_max_z = (k * res - oz) / dz
        t_dz = -res / dz
    else:
        step_z = 0
        t_max_z = np.inf
        t_dz = np.inf

    while True:
        # Advance across the nearest cell boundary; ties prefer x, then y.
        if t_max_x <= t_max_y and t_max_x <= t_max_z:
            t = t_max_x
            t_max_x += t_dx
            i += step_x
        elif t_max_y <= t_max_z:
            t = t_max_y
            t_max_y += t_dy
            j += step_y
        else:
            t = t_max_z
            t_max_z += t_dz
            k += step_z
        if t > max_range:
            return n, False
        if i < 0 or i >= nx or j < 0 or j >= ny or k < 0 or k >= nz:
            return n, False
        flat = i + nx * (j + ny * k)
        out[n] = flat
        n += 1
        if occ[flat] != 0:
            return n, True


@njit(cache=True)
def segment_sweep(nx, ny, nz, res, ax, ay, az, bx, by, bz, out):
    """Collect every cell swept by the segment from a to b (pure geometry).

    Returns ``(count, inside)`` where ``inside`` is False when either
    endpoint lies outside the grid or the sweep exits it. A zero-length
    segment yields just the cell containing the point.
    """
    ax = ax + ORIGIN_NUDGE * res
    ay = ay + ORIGIN_NUDGE * res
    az = az + ORIGIN_NUDGE * res
    bx = bx + ORIGIN_NUDGE * res
    by = by + ORIGIN_NUDGE * res
    bz = bz + ORIGIN_NUDGE * res
    i = int(np.floor(ax / res))
    j = int(np.floor(ay / res))
    k = int(np.floor(az / res))
    if i < 0 or i >= nx or j < 0 or j >= ny or k < 0 or k >= nz:
        return 0, False
    ie = int(np.floor(bx / res))
    je = int(np.floor(by / res))
    ke = int(np.floor(bz / res))
    if ie < 0 or ie >= nx or je < 0 or je >= ny or ke < 0 or ke >= nz:
        return 0, False

    n = 0
    out[n] = i + nx * (j + ny * k)
    n += 1
    dx = bx - ax
    dy = by - ay
    dz = bz - az
    seg = np.sqrt(dx * dx + dy * dy + dz * dz)
    if seg <= 0.0:
        return n, True
    dx /= seg
    dy /= seg
    dz /= seg

    if dx > 0.0:
        step_x = 1
        t_max_x = ((i + 1) * res - ax) / dx
        t_dx = res / dx
    elif dx < 0.0:
        step_x = -1
        t_max_x = (i * res - ax) / dx
        t_dx = -res / dx
    else:
        step_x = 0
        t_max_x = np.inf
        t_dx = np.inf
    if dy > 0.0:
        step_y = 1
        t_max_y = ((j + 1) * res - ay) / dy
        t_dy = res / dy
    elif dy < 0.0:
        step_y = -1
        t_max_y = (j * res - ay) / dy
        t_dy = -res / dy
    else:
        step_y = 0
        t_max_y = np.inf
        t_dy = np.inf
    if dz > 0.0:
        step_z = 1
        t_max_z = ((k + 1) * res - az) / dz
        t_dz = res / dz
    elif dz < 0.0:
        step_z = -1
        t_max_z = (k * res - az) / dz
        t_dz = -res / dz
    else:
        step_z = 0
        t_max_z = np.inf
        t_dz = np.inf

    while True:
        if t_max_x <= t_max_y and t_max_x <= t_max_z:
            t = t_max_x
            t_max_x += t_dx
            i += step_x
        elif t_max_y <= t_max_z:
            t = t_max_y
            t_max_y += t_dy
            j += step_y
        else:
            t = t_max_z
            t_max_z += t_dz
            k += step_z
        if t > seg:
            return n, True
        if i < 0 or i >= nx or j < 0 or j >= ny or k < 0 or k >= nz:
            return n, False
        out[n] = i + nx * (j + ny * k)
        n += 1


@njit(cache=True)
def visible_cells(occ, nx, ny, nz, res, px, py, pz, dirs, max_range, seen, scratch, out):
    """Union of cells visited by a bundle of rays from one viewpoint.

    ``dirs`` is an (n, 3) array of unit directions. ``seen`` is a uint8
    scratch array over all cells (zeroed on entry, re-zeroed before return),
    ``scratch`` holds one ray's ids. Unique ids are written to ``out`` in
    first-visit order; returns the count.
    """
    n_out = 0
    for r in range(dirs.shape[0]):
        cnt, _hit = walk_ray(
            occ, nx, ny, nz, res, px, py, pz,
            dirs[r, 0], dirs[r, 1], dirs[r, 2], max_range, scratch,
        )
        for s in range(cnt):
            f = scratch[s]
            if seen[f] == 0:
                seen[f] = 1
                out[n_out] = f
                n_out += 1
    for s in range(n_out):
        seen[out[s]] = 0
    return n_out


@njit(cache=True)
def bfs_hops(free, nx, ny, nz, sources, hops, queue):
    """Multi-source BFS over the 6-connected free-cell lattice.

    ``free`` is a flat uint8 mask of traversable cells. ``hops`` (int32,
    same length) is filled with hop counts, -1 where unreachable or not
    free. ``queue`` is an int64 scratch of the same length.
    """
    hops[:] = -1
    head = 0
    tail = 0
    for s in range(sources.shape[0]):
        f = sources[s]
        if free[f] != 0 and hops[f] < 0:
            hops[f] = 0
            queue[tail] = f
            tail += 1
    nxy = nx * ny
    while head < tail:
        f = queue[head]
        head += 1
        d = hops[f] + 1
        i = f % nx
        j = (f // nx) % ny
        k = f // nxy
        if i > 0 and free[f - 1] != 0 and hops[f - 1] < 0:
            hops[f - 1] = d
            queue[tail] = f - 1
            tail += 1
        if i < nx - 1 and free[f + 1] != 0 and hops[f + 1] < 0:
            hops[f + 1] = d
            queue[tail] = f + 1
            tail += 1
        if j > 0 and free[f - nx] != 0 and hops[f - nx] < 0:
            hops[f - nx] = d
            queue[tail] = f - nx
            tail += 1
        if j < ny - 1 and free[f + nx] != 0 and hops[f + nx] < 0:
            hops[f + nx] = d
            queue[tail] = f + nx
            tail += 1
        if k > 0 and free[f - nxy] != 0 and hops[f - nxy] < 0:
            hops[f - nxy] = d
            queue[tail] = f - nxy
            tail += 1
        if k < nz - 1 and free[f + nxy] != 0 and hops[f + nxy] < 0:
            hops[f + nxy] = d
            queue[tail] = f + nxy
            tail += 1
    return tail


@njit(cache=True)
def enum_expectation(ray_cells, ray_offsets, ray_step, ray_action, active,
                     cell_bit, weights, n_bits, prior, gamma_pow,
                     min_step, touched):
    """Exact expected discounted weighted coverage over unknown-cell worlds.

    The instance is a bundle of rays in CSR form (``ray_cells`` ids,
    ``ray_offsets`` offsets). Each ray belongs to an action (``ray_action``)
    and a trajectory step (``ray_step``); ``active`` masks which actions are
    selected. Rays were traced with unknown cells transparent, so a cell's
    role per world follows from ``cell_bit``: -1 never blocks, -2 always
    blocks, >= 0 indexes a Bernoulli(prior) occupancy bit.

    For every one of the ``2**n_bits`` worlds the walk replays each active
    ray until its first blocker, scoring each cell the first time it is seen
    at its earliest step: ``weights[c] * gamma_pow[step]``. Returns the
    probability-weighted sum. ``min_step`` must arrive filled with NO_STEP
    and is restored before return; ``touched`` is id scratch.
    """
    n_rays = ray_offsets.shape[0] - 1
    total = 0.0
    for world in range(2 ** n_bits):
        prob = 1.0
        for b in range(n_bits):
            if (world >> b) & 1:
                prob *= prior
            else:
                prob *= 1.0 - prior
        value = 0.0
        n_touched = 0
        for r in range(n_rays):
            if active[ray_action[r]] == 0:
                continue
            step = ray_step[r]
            g = gamma_pow[step]
            for s in range(ray_offsets[r], ray_offsets[r + 1]):
                f = ray_cells[s]
                prev = min_step[f]
                if step < prev:
                    if prev == NO_STEP:
                        touched[n_touched] = f
                        n_touched += 1
                        value += weights[f] * g
                    else:
                        value += weights[f] * (g - gamma_pow[prev])
                    min_step[f] = step
                bit = cell_bit[f]
                if bit == -2:
                    break
                if bit >= 0 and (world >> bit) & 1:
                    break
        total += prob * value
        for s in range(n_touched):
            min_step[touched[s]] = NO_STEP
    return total


@njit(cache=True)
def sampled_expectation(ray_cells, ray_offsets, ray_step, ray_action, active,
                        cell_bit, weights, bit_worlds, gamma_pow,
                        min_step, touched):
    """Like ``enum_expectation`` but averaged over sampled worlds.

    ``bit_worlds`` is a (n_samples, n_bits) uint8 array of occupancy draws
    for the enumerated cells.
    """
    n_rays = ray_offsets.shape[0] - 1
    n_samples = bit_worlds.shape[0]
    total = 0.0
    for w in range(n_samples):
        value = 0.0
        n_touched = 0
        for r in range(n_rays):
            if active[ray_action[r]] == 0:
                continue
            step = ray_step[r]
            g = gamma_pow[step]
            for s in range(ray_offsets[r], ray_offsets[r + 1]):
                f = ray_cells[s]
                prev = min_step[f]
                if step < prev:
                    if prev == NO_STEP:
                        touched[n_touched] = f
                        n_touched += 1
                        value += weights[f] * g
                    else:
                        value += weights[f] * (g - gamma_pow[prev])
                    min_step[f] = step
                bit = cell_bit[f]
                if bit == -2:
                    break
                if bit >= 0 and bit_worlds[w, bit] != 0:
                    break
        total += value
        for s in range(n_touched):
            min_step[touched[s]] = NO_STEP
    return total / n_samples


@njit(cache=True)
def ray_chain_scalar(occ, nx, ny, nz, res, px, py, pz, dirs, max_range,
                     cell_state, weights, prior, scratch):
    """Per-ray independent expectation from one viewpoint, summed over rays.

    Rays are traced through ``occ`` (known-occupied cells block, unknown
    cells are transparent). ``cell_state`` is the flat tri-state belief
    payload (0 free, 1 occupied, 2 unknown). A cell on a ray is observed iff
    every unknown cell before it on that ray came up free, so its weight is
    scaled by that survival probability. Overlaps between rays are
    deliberately counted once per ray.
    """
    total = 0.0
    for r in range(dirs.shape[0]):
        cnt, _hit = walk_ray(
            occ, nx, ny, nz, res, px, py, pz,
            dirs[r, 0], dirs[r, 1], dirs[r, 2], max_range, scratch,
        )
        survive = 1.0
        for s in range(cnt):
            f = scratch[s]
            total += survive * weights[f]
            if cell_state[f] == 2:
                survive *= 1.0 - prior
    return total


@njit(cache=True, parallel=True)
def mark_observable(occ, nx, ny, nz, res, positions, dirs, max_range, n_steps, seen):
    """OR into ``seen`` every cell visible from any position and direction.

    Used for the analytic exploration volume: ``positions`` are free-cell
    centers, ``dirs`` stacks the ray tables of all four headings. Runs the
    positions in parallel; the only shared write sets ``seen`` flags to 1,
    so the result is independent of thread count and schedule.
    """
    for p in prange(positions.shape[0]):
        scratch = np.empty(n_steps, dtype=np.int64)
        px = positions[p, 0]
        py = positions[p, 1]
        pz = positions[p, 2]
        for r in range(dirs.shape[0]):
            cnt, _hit = walk_ray(
                occ, nx, ny, nz, res, px, py, pz,
                dirs[r, 0], dirs[r, 1], dirs[r, 2], max_range, scratch,
            )
            for s in range(cnt):
                seen[scratch[s]] = 1
