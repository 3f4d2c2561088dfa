"""Grids, belief maps, generators, and the voxel text format."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volex.errors import (
    ConfigurationError,
    DimensionMismatchError,
    MalformedHeaderError,
    PayloadSizeError,
)
from volex.grid import (
    FREE,
    OCCUPIED,
    UNKNOWN,
    BeliefMap,
    VoxelGrid3,
    environment_hash,
    generate_boxes,
    generate_empty,
    load_environment,
    sample_environment,
    save_environment,
)


def make_grid(dims, resolution=0.1):
    n = dims[0] * dims[1] * dims[2]
    return VoxelGrid3(tuple(dims), resolution, np.zeros(n, dtype=np.uint8))


class TestIndexing:
    def test_world_to_cell_floor_formula(self):
        # boundary coordinates belong to the upper cell
        grid = make_grid((4, 4, 4), 0.1)
        assert grid.world_to_cell((0.10, 0.19, 0.29)) == (1, 1, 2)

    def test_world_to_cell_matches_floor_everywhere(self):
        grid = make_grid((5, 4, 3), 0.1)
        rng = np.random.default_rng(0)
        for _ in range(200):
            p = rng.uniform(0.0, 0.0999, size=3) + rng.integers(0, [5, 4, 3]) * 0.1
            expected = tuple(int(np.floor(c / 0.1)) for c in p)
            assert grid.world_to_cell(p) == expected

    def test_world_to_cell_outside_raises(self):
        grid = make_grid((2, 2, 2), 0.1)
        with pytest.raises(ValueError):
            grid.world_to_cell((0.2, 0.1, 0.1))
        with pytest.raises(ValueError):
            grid.world_to_cell((-1e-9, 0.0, 0.0))

    def test_contains_point_is_half_open(self):
        grid = make_grid((2, 2, 2), 0.1)
        assert grid.contains_point((0.0, 0.0, 0.0))
        assert not grid.contains_point((0.2, 0.0, 0.0))

    def test_cell_center(self):
        grid = make_grid((3, 3, 3), 0.2)
        assert grid.cell_center(0, 1, 2) == pytest.approx((0.1, 0.3, 0.5))

    @given(st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6)),
           st.data())
    @settings(max_examples=60, deadline=None)
    def test_flat_index_round_trip(self, dims, data):
        grid = make_grid(dims)
        i = data.draw(st.integers(0, dims[0] - 1))
        j = data.draw(st.integers(0, dims[1] - 1))
        k = data.draw(st.integers(0, dims[2] - 1))
        flat = grid.index(i, j, k)
        assert 0 <= flat < grid.n_cells
        assert grid.unflatten(flat) == (i, j, k)

    def test_as_array3d_shares_payload(self):
        grid = make_grid((3, 2, 2))
        arr = grid.as_array3d()
        arr[2, 1, 0] = 7
        assert grid.cells[grid.index(2, 1, 0)] == 7

    def test_bad_dims_rejected(self):
        with pytest.raises(ConfigurationError):
            make_grid((0, 2, 2))
        with pytest.raises(ConfigurationError):
            VoxelGrid3((2, 2, 2), 0.1, np.zeros(7, dtype=np.uint8))


class TestGenerators:
    def test_empty_counts(self):
        env = generate_empty((1.0, 1.0, 1.0), 0.1)
        assert env.grid.n_cells == 1000
        assert env.free_count == 1000
        assert env.occupied_count == 0

    def test_box_count_zero_is_all_free(self):
        env = generate_boxes((1.0, 1.0, 1.0), 0.1, 0, (0.3, 0.5), seed=4)
        assert env.occupied_count == 0

    def test_single_box_occupied_count(self):
        # Seed 2 lands the box fully interior (verified against the
        # brute-force center-in-box count below): a 0.5 m cube at 0.1 m
        # is exactly 5x5x5 cells.
        env = generate_boxes((2.0, 2.0, 2.0), 0.1, 1, (0.5, 0.5), seed=2,
                             clear_half_extent=0.0)
        assert env.occupied_count == 125

        # independent oracle: replay the generator's draws, then count cell
        # centers inside [corner, corner + size) by exhaustive scan
        rng = np.random.default_rng(2)
        size = rng.uniform(0.5, 0.5, size=3)
        corner = rng.uniform(0.0, 1.0, size=3) * 2.0
        count = 0
        for k in range(20):
            for j in range(20):
                for i in range(20):
                    c = ((i + 0.5) * 0.1, (j + 0.5) * 0.1, (k + 0.5) * 0.1)
                    if all(corner[a] <= c[a] < corner[a] + size[a] for a in range(3)):
                        count += 1
        assert count == env.occupied_count

    def test_clipped_box_never_exceeds_analytic_volume(self):
        generated = 0
        for seed in range(8):
            try:
                env = generate_boxes((2.0, 2.0, 2.0), 0.1, 1, (0.5, 0.5),
                                     seed=seed, clear_half_extent=0.0)
            except ConfigurationError:
                # the box clipped to nothing at the boundary; the generator
                # reports that rather than returning an all-free "boxes" map
                continue
            generated += 1
            assert 0 < env.occupied_count <= 125
        assert generated >= 5

    def test_start_region_is_cleared(self):
        env = generate_boxes((2.0, 2.0, 2.0), 0.1, 12, (0.4, 0.8), seed=1)
        grid = env.grid
        center = grid.world_to_cell((1.0, 1.0, 1.0))
        assert env.occupancy[grid.index(*center)] == 0

    def test_degenerate_extent_rejected(self):
        with pytest.raises(ConfigurationError):
            generate_empty((0.01, 1.0, 1.0), 0.1)

    def test_bad_box_parameters_rejected(self):
        with pytest.raises(ConfigurationError):
            generate_boxes((1.0, 1.0, 1.0), 0.1, -1, (0.3, 0.5), seed=0)
        with pytest.raises(ConfigurationError):
            generate_boxes((1.0, 1.0, 1.0), 0.1, 1, (0.5, 0.3), seed=0)


class TestBeliefMap:
    def test_fresh_map_is_all_unknown(self):
        belief = BeliefMap.unknown((4, 4, 2), 0.1)
        assert belief.known_count == 0
        assert belief.unknown_flat().size == 32

    def test_prior_validation(self):
        with pytest.raises(ConfigurationError):
            BeliefMap.unknown((2, 2, 2), 0.1, occupancy_prior=1.5)

    def test_sample_environment_law_of_large_numbers(self):
        # 10^4 unknown cells at prior 0.125: the sampled occupied fraction
        # lands within 0.01 of the prior (about 3 sigma is 0.01).
        belief = BeliefMap.unknown((100, 10, 10), 0.1, occupancy_prior=0.125)
        env = sample_environment(belief, seed=9)
        fraction = env.occupied_count / env.grid.n_cells
        assert abs(fraction - 0.125) < 0.01

    def test_sample_environment_respects_known_cells(self):
        belief = BeliefMap.unknown((3, 3, 1), 0.1, occupancy_prior=1.0)
        belief.cells[0] = FREE
        belief.cells[1] = OCCUPIED
        env = sample_environment(belief, seed=0)
        assert env.occupancy[0] == 0
        assert env.occupancy[1] == 1
        assert env.occupancy[2:].all()  # prior 1.0 fills the rest

    def test_sample_environment_deterministic(self):
        belief = BeliefMap.unknown((5, 5, 2), 0.1)
        a = sample_environment(belief, seed=3)
        b = sample_environment(belief, seed=3)
        assert np.array_equal(a.occupancy, b.occupancy)

    def test_copy_is_independent(self):
        belief = BeliefMap.unknown((2, 2, 1), 0.1)
        clone = belief.copy()
        clone.cells[0] = FREE
        assert belief.cells[0] == UNKNOWN


class TestVoxelFormat:
    def test_hand_constructed_file_decodes(self, tmp_path):
        path = tmp_path / "tiny.vox"
        path.write_text("voxgrid 1\ndims 2 2 1\nresolution 0.1\n0110\n")
        env = load_environment(path)
        assert env.grid.dims == (2, 2, 1)
        occupied = [env.grid.unflatten(int(f))
                    for f in np.flatnonzero(env.occupancy)]
        assert occupied == [(1, 0, 0), (0, 1, 0)]

    def test_round_trip_preserves_hash(self, tmp_path):
        env = generate_boxes((1.5, 1.2, 0.9), 0.3, 3, (0.3, 0.6), seed=12)
        path = tmp_path / "env.vox"
        save_environment(env, path)
        loaded = load_environment(path)
        assert environment_hash(loaded) == environment_hash(env)
        assert loaded.grid.resolution == env.grid.resolution

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.vox"
        path.write_text("boxgrid 1\ndims 1 1 1\nresolution 0.1\n0\n")
        with pytest.raises(MalformedHeaderError):
            load_environment(path)

    def test_missing_header_lines(self, tmp_path):
        path = tmp_path / "bad.vox"
        path.write_text("voxgrid 1\n")
        with pytest.raises(MalformedHeaderError):
            load_environment(path)

    def test_bad_dims_line(self, tmp_path):
        path = tmp_path / "bad.vox"
        path.write_text("voxgrid 1\ndims 2 two 1\nresolution 0.1\n00\n")
        with pytest.raises(DimensionMismatchError):
            load_environment(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "bad.vox"
        path.write_text("voxgrid 1\ndims 2 2 1\nresolution 0.1\n011\n")
        with pytest.raises(PayloadSizeError):
            load_environment(path)

    def test_stray_payload_character(self, tmp_path):
        path = tmp_path / "bad.vox"
        path.write_text("voxgrid 1\ndims 2 2 1\nresolution 0.1\n01x0\n")
        with pytest.raises(PayloadSizeError):
            load_environment(path)

    def test_payload_order_is_x_fastest(self, tmp_path):
        env = generate_empty((0.3, 0.2, 0.2), 0.1)
        env.grid.cells[env.grid.index(2, 0, 0)] = 1
        path = tmp_path / "env.vox"
        save_environment(env, path)
        lines = path.read_text().splitlines()
        assert lines[3] == "001"

    def test_hash_changes_with_payload(self):
        a = generate_empty((0.5, 0.5, 0.5), 0.1)
        b = generate_empty((0.5, 0.5, 0.5), 0.1)
        b.grid.cells[0] = 1
        assert environment_hash(a) != environment_hash(b)
