"""CSV/text formats shared by the CLI and the experiment runner.

Matrices are headerless CSV with one row per sample; vectors are
single-column CSV (a single comma-separated row is also accepted on
read).  All numbers are printed with 17 significant digits so outputs
round-trip and reruns are byte-identical.
"""

import numpy as np

from .core import WeightVector, oscar_weights, slope_weights

__all__ = [
    "fmt",
    "read_vector",
    "write_vector",
    "read_matrix",
    "write_matrix",
    "build_weights",
    "parse_kv_config",
]


def fmt(x):
    """One float, 17 significant digits."""
    return format(float(x), ".17g")


def _parse_float(tok, where):
    try:
        return float(tok)
    except ValueError:
        raise ValueError(f"could not parse number {tok!r} in {where}") from None


def read_vector(path):
    """Single-column CSV, or a single comma-separated row."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty vector file")
    if len(lines) == 1 and "," in lines[0]:
        toks = lines[0].split(",")
    else:
        toks = lines
    return np.array([_parse_float(t.strip(), path) for t in toks])


def write_vector(path, v):
    with open(path, "w", encoding="utf-8") as fh:
        for x in np.asarray(v, dtype=np.float64):
            fh.write(fmt(x) + "\n")


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        rows = []
        for ln in fh:
            ln = ln.strip()
            if not ln:
                continue
            rows.append([_parse_float(t.strip(), path) for t in ln.split(",")])
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged rows")
    return np.array(rows)


def write_matrix(path, M):
    M = np.asarray(M, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for row in M:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def build_weights(spec, p):
    """Weight vector from a spec string.

    Forms: ``uniform:LAM``, ``oscar:LAM1:LAM2``, ``slope:Q``,
    ``file:PATH`` (single-column CSV of length p).
    """
    parts = str(spec).split(":")
    kind = parts[0].strip().lower()
    try:
        if kind == "uniform" and len(parts) == 2:
            return oscar_weights(p, float(parts[1]), 0.0)
        if kind == "oscar" and len(parts) == 3:
            return oscar_weights(p, float(parts[1]), float(parts[2]))
        if kind == "slope" and len(parts) == 2:
            return slope_weights(p, float(parts[1]))
        if kind == "file" and len(parts) >= 2:
            w = read_vector(":".join(parts[1:]))
            if w.shape[0] != p:
                raise ValueError(f"weight file has length {w.shape[0]}, expected {p}")
            return WeightVector(w)
    except ValueError as e:
        raise ValueError(f"invalid weight spec {spec!r}: {e}") from None
    raise ValueError(
        f"invalid weight spec {spec!r}; expected uniform:LAM, oscar:L1:L2, slope:Q or file:PATH"
    )


def parse_kv_config(text):
    """Flat ``key = value`` lines; '#' starts a comment; keys lowercase."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip().lower()] = val.strip()
    return out
