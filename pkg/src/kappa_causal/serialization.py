"""On-disk format for algebra elements and states.

A file is one JSON header line followed by the samples.  In binary mode the
samples are raw little-endian ``complex64``; in text mode the header itself
carries ``real`` and ``imag`` lists and nothing follows it.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import AlgebraElement, Picture
from .numerics import Field1D, Field2D, Grid, make_grid
from .representation import StateVector

FORMAT_VERSION = 1
_DTYPE = np.dtype("<c8")


def _grid_dict(g: Grid) -> dict:
    return {"L": g.half_width, "N": g.n_points}


def _grid_from(d: dict) -> Grid:
    return make_grid(d["L"], d["N"])


def _write(path, header: dict, values: np.ndarray, binary: bool):
    header = dict(header, version=FORMAT_VERSION, shape=list(values.shape))
    path = Path(path)
    if binary:
        header["encoding"] = "complex64"
        with path.open("wb") as fh:
            fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
            fh.write(np.ascontiguousarray(values, dtype=_DTYPE).tobytes())
    else:
        header["encoding"] = "json"
        header["real"] = values.real.ravel().tolist()
        header["imag"] = values.imag.ravel().tolist()
        path.write_text(json.dumps(header, sort_keys=True) + "\n")


def _read(path) -> tuple[dict, np.ndarray]:
    raw = Path(path).read_bytes()
    line, sep, payload = raw.partition(b"\n")
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: missing JSON header") from exc
    if header.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {header.get('version')!r}")
    shape = tuple(header["shape"])
    if header["encoding"] == "complex64":
        values = np.frombuffer(payload, dtype=_DTYPE)
        if values.size != int(np.prod(shape)):
            raise ValueError(f"{path}: payload holds {values.size} samples, header says {shape}")
        values = values.astype(complex).reshape(shape)
    elif header["encoding"] == "json":
        values = (np.asarray(header["real"]) + 1j * np.asarray(header["imag"])).reshape(shape)
    else:
        raise ValueError(f"{path}: unknown encoding {header['encoding']!r}")
    return header, values


def save_element(f: AlgebraElement, path, binary: bool = True):
    header = {"kind": "element", "picture": f.picture.value, "kappa": f.kappa,
              "hermitian": f.hermitian, "grids": [_grid_dict(f.grid0), _grid_dict(f.grid1)]}
    _write(path, header, f.values, binary)


def load_element(path) -> AlgebraElement:
    header, values = _read(path)
    if header.get("kind") != "element":
        raise ValueError(f"{path}: not an algebra element")
    g0, g1 = (_grid_from(d) for d in header["grids"])
    return AlgebraElement(Picture(header["picture"]), Field2D(g0, g1, values),
                          header["kappa"], header["hermitian"])


def save_state(state: StateVector, path, binary: bool = True):
    header = {"kind": "state", "norm": state.phi.norm(), "grids": [_grid_dict(state.grid)]}
    _write(path, header, state.values, binary)


def load_state(path) -> StateVector:
    """Read a state; single-precision payloads are renormalised on load."""
    header, values = _read(path)
    if header.get("kind") != "state":
        raise ValueError(f"{path}: not a state vector")
    return StateVector.normalized(Field1D(_grid_from(header["grids"][0]), values))
