"""Deterministic workload generators and a plain-text interchange format.

Every generator takes an explicit seed, so a scenario is reproducible from
its config alone. The text format exists so a workload can be pinned to a
file, inspected, and replayed: a one-line header

    <kind> <size> <density> <seed>

followed by kind-specific entry lines. Floats are written with repr
precision and round-trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("graph", "dense", "sparse", "seq")

_BASES = "ACGT"


class InputFormatError(ValueError):
    pass


@dataclass
class Workload:
    kind: str
    size: int
    density: float
    seed: int
    payload: dict


def generate_graph(n: int, density: float, seed: int) -> dict:
    """Random directed graph as CSR; no self loops.

    Each ordered pair i->j holds an edge with probability `density`.
    Wide frontiers spread relaxation work over every partition, which is
    what the distributed shortest-path runs exercise.
    """
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, False)
    counts = mask.sum(axis=1)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.nonzero(mask)[1].astype(np.int32)
    return {"indptr": indptr, "indices": indices}

def generate_dense(n: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    return {
        "a": rng.standard_normal((n, n)),
        "b": rng.standard_normal((n, n)),
    }

def generate_sparse(n: int, density: float, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < density
    nnz = int(mask.sum())
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(mask.sum(axis=1), out=indptr[1:])
    indices = np.nonzero(mask)[1].astype(np.int32)
    data = rng.standard_normal(nnz)
    x = rng.standard_normal(n)
    return {"data": data, "indices": indices, "indptr": indptr, "x": x}

def generate_seq(n: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    return {
        "a": rng.integers(0, 4, n, dtype=np.int8),
        "b": rng.integers(0, 4, n, dtype=np.int8),
    }


def generate(kind: str, size: int, density: float, seed: int) -> Workload:
    if kind == "graph":
        payload = generate_graph(size, density, seed)
    elif kind == "dense":
        payload = generate_dense(size, seed)
    elif kind == "sparse":
        payload = generate_sparse(size, density, seed)
    elif kind == "seq":
        payload = generate_seq(size, seed)
    else:
        raise InputFormatError(f"unknown workload kind {kind!r}")
    return Workload(kind, size, density, seed, payload)


def write_input(path: str, wl: Workload) -> None:
    lines = [f"{wl.kind} {wl.size} {wl.density!r} {wl.seed}"]
    p = wl.payload
    if wl.kind == "graph":
        indptr, indices = p["indptr"], p["indices"]
        for u in range(wl.size):
            for e in range(indptr[u], indptr[u + 1]):
                lines.append(f"{u} {indices[e]}")
    elif wl.kind == "dense":
        for tag in ("a", "b"):
            for i, row in enumerate(p[tag]):
                lines.append(f"{tag} {i} " + " ".join(repr(float(v)) for v in row))
    elif wl.kind == "sparse":
        lines.append("x " + " ".join(repr(float(v)) for v in p["x"]))
        indptr, indices, data = p["indptr"], p["indices"], p["data"]
        for i in range(wl.size):
            for e in range(indptr[i], indptr[i + 1]):
                lines.append(f"e {i} {indices[e]} {float(data[e])!r}")
    elif wl.kind == "seq":
        for tag in ("a", "b"):
            lines.append(tag + " " + "".join(_BASES[v] for v in p[tag]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_input(path: str) -> Workload:
    with open(path) as fh:
        raw = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not raw:
        raise InputFormatError(f"{path}: empty workload file")
    head = raw[0].split()
    if len(head) != 4:
        raise InputFormatError(f"{path}: malformed header {raw[0]!r}")
    kind, size_s, density_s, seed_s = head
    if kind not in KINDS:
        raise InputFormatError(f"{path}: unknown kind {kind!r}")
    try:
        size, density, seed = int(size_s), float(density_s), int(seed_s)
    except ValueError as exc:
        raise InputFormatError(f"{path}: bad header field: {exc}") from None
    body = raw[1:]

    if kind == "graph":
        payload = _parse_graph(body, size, path)
    elif kind == "dense":
        payload = _parse_dense(body, size, path)
    elif kind == "sparse":
        payload = _parse_sparse(body, size, path)
    else:
        payload = _parse_seq(body, size, path)
    return Workload(kind, size, density, seed, payload)


def _parse_graph(body, n, path):
    counts = np.zeros(n, dtype=np.int64)
    pairs = []
    for ln in body:
        u_s, v_s = ln.split()
        u, v = int(u_s), int(v_s)
        if not (0 <= u < n and 0 <= v < n):
            raise InputFormatError(f"{path}: edge {u}->{v} out of range")
        counts[u] += 1
        pairs.append((u, v))
    pairs.sort()
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.fromiter((v for _, v in pairs), dtype=np.int32,
                          count=len(pairs))
    return {"indptr": indptr, "indices": indices}

def _parse_dense(body, n, path):
    out = {"a": np.zeros((n, n)), "b": np.zeros((n, n))}
    for ln in body:
        parts = ln.split()
        tag, i = parts[0], int(parts[1])
        vals = np.array([float(v) for v in parts[2:]])
        if tag not in out or i >= n or vals.shape[0] != n:
            raise InputFormatError(f"{path}: bad dense row line {ln[:40]!r}")
        out[tag][i] = vals
    return out

def _parse_sparse(body, n, path):
    x = None
    trips = []
    for ln in body:
        parts = ln.split()
        if parts[0] == "x":
            x = np.array([float(v) for v in parts[1:]])
        elif parts[0] == "e":
            trips.append((int(parts[1]), int(parts[2]), float(parts[3])))
        else:
            raise InputFormatError(f"{path}: bad sparse line {ln[:40]!r}")
    if x is None or x.shape[0] != n:
        raise InputFormatError(f"{path}: sparse workload missing x vector")
    trips.sort(key=lambda t: (t[0], t[1]))
    counts = np.zeros(n, dtype=np.int64)
    for i, _, _ in trips:
        counts[i] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.fromiter((j for _, j, _ in trips), dtype=np.int32,
                          count=len(trips))
    data = np.fromiter((v for _, _, v in trips), dtype=np.float64,
                       count=len(trips))
    return {"data": data, "indices": indices, "indptr": indptr, "x": x}

def _parse_seq(body, n, path):
    out = {}
    lut = {c: i for i, c in enumerate(_BASES)}
    for ln in body:
        tag, letters = ln.split(None, 1)
        if tag not in ("a", "b") or len(letters) != n:
            raise InputFormatError(f"{path}: bad sequence line {ln[:40]!r}")
        out[tag] = np.fromiter((lut[c] for c in letters), dtype=np.int8,
                               count=n)
    if set(out) != {"a", "b"}:
        raise InputFormatError(f"{path}: need both sequences")
    return out


KIND_FOR_KERNEL = {
    "sssp": "graph",
    "gemm": "dense",
    "spmv": "sparse",
    "nw": "seq",
}


def workload_for(config) -> Workload:
    """Materialize the workload a scenario config describes."""
    kind = KIND_FOR_KERNEL[config.kernel]
    if config.input_file:
        wl = read_input(config.input_file)
        if wl.kind != kind:
            raise InputFormatError(
                f"{config.input_file}: workload kind {wl.kind!r} does not "
                f"fit kernel {config.kernel!r}"
            )
        if wl.size != config.size:
            raise InputFormatError(
                f"{config.input_file}: workload size {wl.size} != "
                f"configured size {config.size}"
            )
        return wl
    return generate(kind, config.size, config.density, config.seed)
