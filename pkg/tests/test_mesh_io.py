"""Tests for mesh and weight file I/O."""

import numpy as np
import pytest

from htv import construct, cpwl, fixtures, mesh_io
from htv.errors import InvariantViolation, ParseError


class TestMeshRoundTrip:
    def test_pyramid_file(self, tmp_path):
        path = tmp_path / "pyramid.mesh"
        mesh_io.write_mesh(fixtures.pyramid_2d(), path)
        mesh = mesh_io.read_mesh(path)
        assert cpwl.region_count(mesh) == 5
        assert cpwl.htv(mesh) == pytest.approx(16.0, abs=1e-10)

    def test_bit_identical_values(self, tmp_path):
        rng = np.random.default_rng(0)
        for seed in range(3):
            mesh = fixtures.random_delaunay_2d(seed)
            path = tmp_path / f"m{seed}.mesh"
            mesh_io.write_mesh(mesh, path)
            back = mesh_io.read_mesh(path)
            assert np.array_equal(back.vertices, mesh.vertices)
            assert np.array_equal(back.simplices, mesh.simplices)
            assert np.array_equal(back.values, mesh.values)
            assert back.name == mesh.name

    def test_metadata_survives(self, tmp_path):
        mesh = fixtures.hat_1d()
        mesh.meta["construction"] = "handmade"
        path = tmp_path / "hat.mesh"
        mesh_io.write_mesh(mesh, path)
        assert mesh_io.read_mesh(path).meta["construction"] == "handmade"

    def test_double_write_identical_bytes(self, tmp_path):
        a, b = tmp_path / "a.mesh", tmp_path / "b.mesh"
        mesh_io.write_mesh(fixtures.pyramid_2d(), a)
        mesh_io.write_mesh(fixtures.pyramid_2d(), b)
        assert a.read_bytes() == b.read_bytes()


class TestMeshParseErrors:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.mesh"
        path.write_text("")
        with pytest.raises(ParseError):
            mesh_io.read_mesh(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            mesh_io.read_mesh(tmp_path / "nope.mesh")

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.mesh"
        path.write_text("{not json")
        with pytest.raises(ParseError, match=r":1:"):
            mesh_io.read_mesh(path)

    def test_wrong_format_marker(self, tmp_path):
        path = tmp_path / "wrong.mesh"
        path.write_text('{"format": "something-else"}')
        with pytest.raises(ParseError, match="format"):
            mesh_io.read_mesh(path)

    def test_missing_field_named(self, tmp_path):
        path = tmp_path / "missing.mesh"
        path.write_text('{"format": "htv-mesh", "dim": 2}')
        with pytest.raises(ParseError, match="vertices"):
            mesh_io.read_mesh(path)

    def test_invariant_violations_surface(self, tmp_path):
        path = tmp_path / "degenerate.mesh"
        path.write_text(
            '{"format": "htv-mesh", "dim": 2,'
            ' "vertices": [[0,0],[1,0],[2,0]],'
            ' "simplices": [[0,1,2]], "values": [0,0,0]}'
        )
        with pytest.raises(InvariantViolation):
            mesh_io.read_mesh(path)


class TestWeightsRoundTrip:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        net = construct.MlpWeights(
            layers=(
                (rng.standard_normal((4, 2)), rng.standard_normal(4)),
                (rng.standard_normal((1, 4)), rng.standard_normal(1)),
            ),
            input_dim=2,
        )
        path = tmp_path / "net.mlp"
        mesh_io.write_mlp_weights(net, path)
        back = mesh_io.read_mlp_weights(path)
        assert back.input_dim == 2
        for (w1, b1), (w2, b2) in zip(back.layers, net.layers):
            assert np.array_equal(w1, w2)
            assert np.array_equal(b1, b2)


class TestRbfFiles:
    def test_round_trip(self, tmp_path):
        centers, weights = fixtures.default_rbf_mixture()
        path = tmp_path / "mix.rbf"
        mesh_io.write_rbf_mixture(centers, weights, path)
        c, w = mesh_io.read_rbf_mixture(path)
        assert np.array_equal(c, centers)
        assert np.array_equal(w, weights)

    def test_misaligned_rejected(self, tmp_path):
        path = tmp_path / "bad.rbf"
        path.write_text('{"format": "htv-rbf", "centers": [[0,0]], "weights": [1, 2]}')
        with pytest.raises(ParseError):
            mesh_io.read_rbf_mixture(path)
