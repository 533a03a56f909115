"""JSON round-trips for matrices, map specifications, witnesses and states.

Exact matrices serialise every entry as ``{"re": "p/q", "im": "r/s"}``;
the float variant writes doubles instead and reads back into the nearest
rationals of those doubles.  Output is key-sorted so that the same object
always produces the same bytes.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np
from gmpy2 import mpq

from .linalg import BipartiteDims
from .maps import BreuerHall, Conjugated, Psi, Reduction, Transpose, Witness
from .matrix import Matrix, to_mpq
from .states import BipartiteState

FIXTURES_ENV = "WITNESSFORGE_FIXTURES"
_BUILTIN_FIXTURES = Path(__file__).with_name("fixtures")


def _q(x) -> str:
    return str(mpq(x))


def matrix_to_json(M: Matrix, exact: bool = True) -> dict:
    if exact:
        cell = lambda r, i: {"re": _q(r), "im": _q(i)}  # noqa: E731
    else:
        cell = lambda r, i: {"re": float(r), "im": float(i)}  # noqa: E731
    entries = [[cell(M.re[a, b], M.im[a, b]) for b in range(M.cols)] for a in range(M.rows)]
    return {"rows": M.rows, "cols": M.cols, "entries": entries}


def _read_number(x):
    # floats become their exact binary value; strings and ints parse exactly
    return to_mpq(x)


def matrix_from_json(obj: dict) -> Matrix:
    rows, cols = obj["rows"], obj["cols"]
    entries = obj["entries"]
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise ValueError("entries do not match the declared shape")
    re = np.empty((rows, cols), dtype=object)
    im = np.empty((rows, cols), dtype=object)
    for a, row in enumerate(entries):
        for b, e in enumerate(row):
            re[a, b] = _read_number(e["re"])
            im[a, b] = _read_number(e.get("im", 0))
    return Matrix(re, im)


def mapspec_to_json(spec) -> dict:
    if isinstance(spec, Reduction):
        return {"variant": "reduction", "n": spec.n}
    if isinstance(spec, Transpose):
        return {"variant": "transpose", "n": spec.n}
    if isinstance(spec, Psi):
        return {"variant": "psi", "k": spec.k}
    if isinstance(spec, BreuerHall):
        return {"variant": "breuer-hall", "k": spec.k, "U": matrix_to_json(spec.U)}
    if isinstance(spec, Conjugated):
        return {
            "variant": "conjugated",
            "inner": mapspec_to_json(spec.inner),
            "U1": matrix_to_json(spec.U1),
            "U2": matrix_to_json(spec.U2),
        }
    raise TypeError(f"not a map specification: {spec!r}")


def mapspec_from_json(obj: dict):
    v = obj["variant"]
    if v == "reduction":
        return Reduction(obj["n"])
    if v == "transpose":
        return Transpose(obj["n"])
    if v == "psi":
        return Psi(obj["k"])
    if v == "breuer-hall":
        U = matrix_from_json(obj["U"]) if "U" in obj else None
        return BreuerHall(obj["k"], U)
    if v == "conjugated":
        return Conjugated(mapspec_from_json(obj["inner"]), matrix_from_json(obj["U1"]), matrix_from_json(obj["U2"]))
    raise ValueError(f"unknown map variant {v!r}")


def witness_to_json(W: Witness, exact: bool = True) -> dict:
    out = matrix_to_json(W.matrix, exact)
    out["dA"], out["dB"] = W.dims.dA, W.dims.dB
    out["source"] = mapspec_to_json(W.source) if W.source is not None else None
    return out


def witness_from_json(obj: dict) -> Witness:
    src = obj.get("source")
    return Witness(matrix_from_json(obj), BipartiteDims(obj["dA"], obj["dB"]),
                   mapspec_from_json(src) if src else None)


def state_to_json(S: BipartiteState, exact: bool = True) -> dict:
    out = matrix_to_json(S.matrix, exact)
    out["dA"], out["dB"] = S.dims.dA, S.dims.dB
    out["certificates"] = S.certificate_list()
    return out


def state_from_json(obj: dict) -> BipartiteState:
    certs = [c for c in obj.get("certificates", []) if not c.startswith("schmidt-number-bound:")]
    bound = [int(c.split(":")[1]) for c in obj.get("certificates", []) if c.startswith("schmidt-number-bound:")]
    return BipartiteState(
        matrix_from_json(obj),
        BipartiteDims(obj["dA"], obj["dB"]),
        frozenset(certs),
        schmidt_number_bound=bound[0] if bound else None,
    )


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def write_json(obj: dict, path) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def fixtures_dir() -> Path:
    override = os.environ.get(FIXTURES_ENV)
    return Path(override) if override else _BUILTIN_FIXTURES


def fixture_path(name: str) -> Path:
    return fixtures_dir() / f"{name}.json"


def load_fixture(name: str) -> dict:
    path = fixture_path(name)
    if not path.is_file():
        raise FileNotFoundError(f"no golden file {path}")
    return read_json(path)
