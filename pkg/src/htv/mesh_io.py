"""Mesh, network-weight and RBF-mixture files.

Everything is self-describing JSON: small fixtures diff cleanly and the
float repr round-trips bit-exactly, so write followed by read returns
identical values.  Parse failures raise :class:`ParseError` naming the
offending field; structural problems in otherwise well-formed files
surface as the usual mesh invariant violations.
"""

import json

import numpy as np

from .construct import MlpWeights
from .cpwl import SimplicialCpwl
from .errors import ParseError

MESH_FORMAT = "htv-mesh"
MLP_FORMAT = "htv-mlp"
RBF_FORMAT = "htv-rbf"


def _load_json(path, expected_format):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not text.strip():
        raise ParseError(f"{path}: empty file")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    fmt = doc.get("format")
    if fmt != expected_format:
        raise ParseError(f"{path}: format {fmt!r}, expected {expected_format!r}")
    return doc


def _field(doc, path, key, kind):
    if key not in doc:
        raise ParseError(f"{path}: missing field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"{path}: field {key!r} has the wrong type")
    return value


def read_mesh(path):
    """Load a mesh file, validating structure and mesh invariants."""
    doc = _load_json(path, MESH_FORMAT)
    dim = _field(doc, path, "dim", int)
    vertices = np.asarray(_field(doc, path, "vertices", list), dtype=float)
    simplices = np.asarray(_field(doc, path, "simplices", list))
    values = np.asarray(_field(doc, path, "values", list), dtype=float)
    if vertices.ndim != 2 or vertices.shape[1] != dim:
        raise ParseError(f"{path}: vertices do not match dim={dim}")
    if not np.issubdtype(simplices.dtype, np.integer):
        raise ParseError(f"{path}: simplices must be integer index lists")
    meta = dict(doc.get("meta") or {})
    if doc.get("units"):
        meta.setdefault("units", doc["units"])
    return SimplicialCpwl(
        vertices, simplices, values, name=doc.get("name", ""), meta=meta
    )


def write_mesh(mesh, path):
    """Write a mesh file; reading it back reproduces the values bit-exactly."""
    doc = {
        "format": MESH_FORMAT,
        "version": 1,
        "name": mesh.name,
        "units": mesh.meta.get("units", ""),
        "meta": mesh.meta,
        "dim": mesh.dim,
        "vertices": mesh.vertices.tolist(),
        "simplices": mesh.simplices.tolist(),
        "values": mesh.values.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_mlp_weights(path):
    """Load ReLU network weights."""
    doc = _load_json(path, MLP_FORMAT)
    input_dim = _field(doc, path, "input_dim", int)
    raw = _field(doc, path, "layers", list)
    layers = []
    for k, layer in enumerate(raw):
        if not isinstance(layer, dict):
            raise ParseError(f"{path}: layer {k} must be an object")
        layers.append(
            (
                _field(layer, f"{path} layer {k}", "weights", list),
                _field(layer, f"{path} layer {k}", "bias", list),
            )
        )
    return MlpWeights(layers=tuple(layers), input_dim=input_dim)


def write_mlp_weights(weights, path):
    doc = {
        "format": MLP_FORMAT,
        "version": 1,
        "input_dim": weights.input_dim,
        "layers": [
            {"weights": w.tolist(), "bias": b.tolist()} for w, b in weights.layers
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_rbf_mixture(path):
    """Load Gaussian RBF mixture coefficients: (centers (K, d), weights (K,))."""
    doc = _load_json(path, RBF_FORMAT)
    centers = np.asarray(_field(doc, path, "centers", list), dtype=float)
    weights = np.asarray(_field(doc, path, "weights", list), dtype=float)
    if centers.ndim != 2 or weights.ndim != 1 or len(centers) != len(weights):
        raise ParseError(f"{path}: centers and weights do not align")
    return centers, weights


def write_rbf_mixture(centers, weights, path):
    doc = {
        "format": RBF_FORMAT,
        "version": 1,
        "centers": np.asarray(centers, dtype=float).tolist(),
        "weights": np.asarray(weights, dtype=float).tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
