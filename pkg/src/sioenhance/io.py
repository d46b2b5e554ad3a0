"""JSON encodings for states, Kraus sets and reports.

State:  {"dim": d, "entries": [[[re, im], ...], ...]}
Kraus:  {"dim": d, "operators": [<d x d array of [re, im]>, ...]}

Floats are written with ``repr`` (shortest round-trip form, at most 17
significant digits) so a dump followed by a load is bit-identical.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .channel import KrausSet, kraus_set
from .errors import ParseError
from .state import DEFAULT_TOL, DensityMatrix, validate_density


def matrix_to_pairs(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"{where}: expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ParseError(f"{where}: non-finite number")
    return x


def pairs_to_matrix(rows, dim: int, where: str = "entries") -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != dim:
        raise ParseError(f"{where}: expected {dim} rows")
    out = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{where}[{i}]: expected {dim} columns")
        for j, pair in enumerate(row):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ParseError(f"{where}[{i}][{j}]: expected a [re, im] pair")
            out[i, j] = complex(_number(pair[0], f"{where}[{i}][{j}]"), _number(pair[1], f"{where}[{i}][{j}]"))
    return out


def _dim(obj, keys) -> int:
    if not isinstance(obj, dict):
        raise ParseError("top-level JSON value must be an object")
    for k in keys:
        if k not in obj:
            raise ParseError(f"missing key {k!r}")
    d = obj["dim"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise ParseError(f"dim must be a positive integer, got {d!r}")
    return d


def _strict_loads(text: str):
    def reject(token):
        raise ParseError(f"non-finite number {token} in JSON")

    try:
        return json.loads(text, parse_constant=reject)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def state_to_json(rho: DensityMatrix | np.ndarray) -> dict:
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return {"dim": int(m.shape[0]), "entries": matrix_to_pairs(m)}


def state_from_json(obj, tol: float = DEFAULT_TOL) -> DensityMatrix:
    d = _dim(obj, ("dim", "entries"))
    return validate_density(pairs_to_matrix(obj["entries"], d), tol)


def kraus_to_json(ops) -> dict:
    ops = list(ops)
    return {"dim": int(ops[0].shape[0]), "operators": [matrix_to_pairs(k) for k in ops]}


def kraus_from_json(obj, tol: float = DEFAULT_TOL) -> KrausSet:
    d = _dim(obj, ("dim", "operators"))
    ops = obj["operators"]
    if not isinstance(ops, list) or not ops:
        raise ParseError("operators must be a non-empty list")
    return kraus_set([pairs_to_matrix(k, d, f"operators[{n}]") for n, k in enumerate(ops)], tol)


def load_state(path, tol: float = DEFAULT_TOL) -> DensityMatrix:
    with open(path) as fh:
        return state_from_json(_strict_loads(fh.read()), tol)


def load_kraus(path, tol: float = DEFAULT_TOL) -> KrausSet:
    with open(path) as fh:
        return kraus_from_json(_strict_loads(fh.read()), tol)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def result_to_json(res) -> dict:
    return {
        "cInput": res.c_input,
        "cMax": res.c_max,
        "pMax": res.p_max,
        "lambdaMax": res.lambda_max,
        "blocks": [
            {
                "indices": [int(i) for i in b.indices],
                "weight": b.weight,
                "lambda": b.lambda_max,
                "phi": [float(x) for x in b.phi],
                "blockPMax": b.p_max,
                "argmin": b.argmin,
                "winning": b.winning,
                "iterations": b.iterations,
            }
            for b in res.blocks
        ],
        "zeroSector": [int(i) for i in res.decomposition.zero_sector],
        "kraus": kraus_to_json([res.optimal_kraus]),
        "failure": kraus_to_json([res.failure_kraus]),
    }


def search_to_json(rep) -> dict:
    return {
        "bestCoherence": rep.best_coherence,
        "bestDiagonal": [float(x) for x in rep.best_diagonal],
        "samples": rep.samples,
        "seed": rep.seed,
    }


def trials_to_json(rep) -> dict:
    return {
        "trials": rep.trials,
        "successes": rep.successes,
        "empiricalP": rep.empirical_p,
        "stdError": rep.std_error,
        "seed": rep.seed,
    }
