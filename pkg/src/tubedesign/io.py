"""Design JSON files.

Schema::

    {
      "domain": "fourier" | "real",
      "model": {"kind": "fourier" | "polynomial", "n": 3, "variance": [a, b, c, d]},
      "atoms": [{"x": 0.25, "w": 0.5}, {"x": "inf", "w": 0.5}],
      "mobius": [a, b, c, d]            (optional; used by ``transform``)
    }

``"inf"`` and ``"-inf"`` both denote the single point at infinity.
"""

import json
from math import isfinite
from numbers import Real
from pathlib import Path
from typing import NamedTuple, Optional

from .bases import INF, Model, is_infinite
from .errors import DesignValidationError, TubeDesignError
from .mobius import MobiusParams
from .moments import Design

__all__ = [
    "DesignDocument",
    "DesignFileError",
    "design_to_dict",
    "dump_design",
    "load_document",
    "parse_design",
    "parse_design_text",
]


class DesignFileError(DesignValidationError):
    """A design file is malformed; the message names the offending field."""


class DesignDocument(NamedTuple):
    model: Model
    design: Design
    mobius: Optional[MobiusParams] = None


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, Real) or not isfinite(value):
        raise DesignFileError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _params(value, where):
    if not isinstance(value, list) or len(value) != 4:
        raise DesignFileError(f"{where}: expected a list of four numbers")
    return tuple(_number(v, f"{where}[{i}]") for i, v in enumerate(value))


def _from_dict(doc, source):
    if not isinstance(doc, dict):
        raise DesignFileError(f"{source}: top level must be an object")
    unknown = set(doc) - {"domain", "model", "atoms", "mobius"}
    if unknown:
        raise DesignFileError(f"{source}: unknown field(s) {sorted(unknown)}")
    domain = doc.get("domain")
    if domain not in ("fourier", "real"):
        raise DesignFileError(f"{source}: 'domain' must be 'fourier' or 'real', got {domain!r}")

    spec = doc.get("model")
    if not isinstance(spec, dict):
        raise DesignFileError(f"{source}: 'model' must be an object")
    kind = spec.get("kind")
    if kind not in ("fourier", "polynomial"):
        raise DesignFileError(f"{source}: 'model.kind' must be 'fourier' or 'polynomial', got {kind!r}")
    n = spec.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise DesignFileError(f"{source}: 'model.n' must be an integer >= 2, got {n!r}")
    variance = _params(spec.get("variance", [1, 0, 0, 1]), f"{source}: 'model.variance'")
    try:
        model = Model(kind, n, variance)
    except (TubeDesignError, ValueError) as exc:
        raise DesignFileError(f"{source}: 'model': {exc}") from exc
    if model.domain != domain:
        raise DesignFileError(f"{source}: model kind {kind!r} does not live on domain {domain!r}")

    atoms = doc.get("atoms")
    if not isinstance(atoms, list) or not atoms:
        raise DesignFileError(f"{source}: 'atoms' must be a non-empty list")
    points, weights = [], []
    for i, atom in enumerate(atoms):
        where = f"{source}: 'atoms[{i}]'"
        if not isinstance(atom, dict) or set(atom) != {"x", "w"}:
            raise DesignFileError(f"{where}: expected an object with fields 'x' and 'w'")
        x = atom["x"]
        if x in ("inf", "-inf"):
            if domain != "real":
                raise DesignFileError(f"{where}.x: the point at infinity needs domain 'real'")
            x = INF
        else:
            x = _number(x, f"{where}.x")
        w = _number(atom["w"], f"{where}.w")
        if w <= 0:
            raise DesignFileError(f"{where}.w: weight must be positive, got {w}")
        points.append(x)
        weights.append(w)
    try:
        design = Design(tuple(points), tuple(weights), domain)
    except DesignValidationError as exc:
        raise DesignFileError(f"{source}: 'atoms': {exc}") from exc

    mobius = None
    if "mobius" in doc:
        mobius = MobiusParams(*_params(doc["mobius"], f"{source}: 'mobius'"))
    return DesignDocument(model, design, mobius)


def parse_design_text(text, source="<string>") -> DesignDocument:
    """Parse and validate a design document from a JSON string."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DesignFileError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    return _from_dict(doc, source)


def load_document(path) -> DesignDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DesignFileError(f"{path}: cannot read file ({exc.strerror})") from exc
    return parse_design_text(text, str(path))


def parse_design(path):
    """``(Model, Design)`` from a design file."""
    doc = load_document(path)
    return doc.model, doc.design


def design_to_dict(model: Model, design: Design, mobius=None):
    out = {
        "domain": design.domain,
        "model": {"kind": model.kind, "n": model.n, "variance": [float(v) for v in model.variance]},
        "atoms": [{"x": "inf" if is_infinite(x) else float(x), "w": float(w)} for x, w in design.atoms],
    }
    if mobius is not None:
        out["mobius"] = [float(v) for v in mobius]
    return out


def dump_design(model: Model, design: Design, mobius=None, indent=2) -> str:
    """JSON text at full double precision; :func:`parse_design_text` inverts it exactly."""
    return json.dumps(design_to_dict(model, design, mobius), indent=indent)
