"""JSON file formats for algebras, weightings, bialgebras, paths and sampled loops.

Arrays are nested lists.  Complex arrays are written as ``{"re": ..., "im": ...}``.
Python's float repr is the shortest string that round-trips, so files are lossless.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

import numpy as np

from . import catalog
from .bialgebra import Bialgebra
from .group_flow import AlgebraPath
from .lie_core import LieAlgebra
from .loop_fourier import SampledLoop
from .torus_weight import TorusWeighting


class FormatError(ValueError):
    """Input file does not follow the expected layout."""


def encode_array(a) -> Any:
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return {"re": a.real.tolist(), "im": a.imag.tolist()}
    return a.tolist()


def decode_array(obj) -> np.ndarray:
    if isinstance(obj, dict):
        if set(obj) != {"re", "im"}:
            raise FormatError("complex arrays need exactly the keys 're' and 'im'")
        return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    try:
        return np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as e:
        raise FormatError(f"not a numeric array: {e}") from None


def _require(d: dict, key: str, what: str):
    if not isinstance(d, dict) or key not in d:
        raise FormatError(f"{what} is missing the field {key!r}")
    return d[key]


# --- algebras -------------------------------------------------------------------------

def algebra_to_json(g: LieAlgebra) -> dict:
    d = {"name": g.name, "field": g.field, "labels": list(g.labels),
         "structure": encode_array(g.structure)}
    if g.form is not None:
        d["form"] = encode_array(g.form)
    if g.realization is not None:
        d["realization"] = encode_array(g.realization)
    return d


def algebra_from_json(d: dict) -> LieAlgebra:
    if isinstance(d, dict) and "catalog" in d:
        return catalog.algebra(d["catalog"])
    c = decode_array(_require(d, "structure", "algebra"))
    form = decode_array(d["form"]) if d.get("form") is not None else None
    real = decode_array(d["realization"]) if d.get("realization") is not None else None
    return LieAlgebra(c, tuple(d.get("labels", ())), form, d.get("field", "real"), real,
                      d.get("name", ""))


# --- weightings ---------------------------------------------------------------------------

def weighting_to_json(w: TorusWeighting) -> dict:
    return {"algebra": algebra_to_json(w.algebra), "weights": list(w.weights)}


def weighting_from_json(d: dict) -> TorusWeighting:
    g = algebra_from_json(_require(d, "algebra", "weighting"))
    weights = _require(d, "weights", "weighting")
    if not all(isinstance(k, int) for k in weights):
        raise FormatError("weights must be integers")
    return TorusWeighting(g, tuple(weights))


# --- bialgebras --------------------------------------------------------------------------

def bialgebra_to_json(bi: Bialgebra) -> dict:
    return {"name": bi.name, "g": algebra_to_json(bi.g), "delta": encode_array(bi.delta)}


def bialgebra_from_json(d: dict) -> Bialgebra:
    if isinstance(d, dict) and "catalog" in d:
        return catalog.bialgebra(d["catalog"])
    g = algebra_from_json(_require(d, "g", "bialgebra"))
    return Bialgebra(g, decode_array(_require(d, "delta", "bialgebra")), d.get("name", ""))


# --- paths and loops -------------------------------------------------------------------------

def path_to_json(p: AlgebraPath) -> dict:
    return p.to_json()


def path_from_json(g: LieAlgebra, d: dict) -> AlgebraPath:
    _require(d, "samples", "path")
    try:
        return AlgebraPath.from_json(g, d)
    except (TypeError, IndexError) as e:
        raise FormatError(f"bad path samples: {e}") from None


def loop_to_json(s: SampledLoop) -> dict:
    return {"S": s.S, "samples": encode_array(s.values)}


def loop_from_json(d: dict) -> SampledLoop:
    """``{"samples": [...]}`` on the uniform grid, or ``{"S": ..., "modes": [[m, re, im], ...]}``."""
    if "samples" in d:
        vals = decode_array(d["samples"])
        if "S" in d and int(d["S"]) != vals.shape[0]:
            raise FormatError("S does not match the number of samples")
        return SampledLoop(vals)
    modes = np.asarray(_require(d, "modes", "loop"), dtype=float)
    S = int(_require(d, "S", "loop"))
    if modes.ndim != 2 or modes.shape[1] != 3:
        raise FormatError("modes must be rows [m, re, im]")
    theta = 2 * np.pi * np.arange(S) / S
    vals = sum((re + 1j * im) * np.exp(1j * int(m) * theta) for m, re, im in modes)
    return SampledLoop(np.asarray(vals))


# --- files ------------------------------------------------------------------------------------

def read_json(path: Union[str, Path]) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(obj, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
