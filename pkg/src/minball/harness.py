"""Instance files, reproducible generation, and benchmarking.

Instances are stored as JSON documents:

    {"schema_version": 1,
     "dim": n,
     "balls": [{"center": [...], "radius": r}, ...],
     "metadata": {"seed": ..., "generator": ..., "name": ...}}

Random generation uses an explicit splitmix64 generator seeded by a
64-bit integer, so the same seed reproduces the same instance in any
language: each draw advances the state by the splitmix64 increment and
maps the mixed 64-bit word to a float in [0, 1) via the top 53 bits.
"""

from __future__ import annotations

import json
import time

import numpy as np

from .geometry import Ball, Instance, preprocess_instance

SCHEMA_VERSION = 1

_MASK = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit PRNG (splitmix64), language portable."""

    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def next_float(self):
        """Uniform in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo, hi):
        return lo + (hi - lo) * self.next_float()


def generate_instance(dim, m, seed, radius_max=0.5, name=None, max_redraws=1000):
    """Random instance with centers in [-1, 1]^dim and radii in [0, radius_max].

    Balls are drawn one at a time; a draw that contains (or is contained
    in) an already accepted ball is rejected and redrawn, so the result
    satisfies the no-containment requirement directly.
    """
    rng = SplitMix64(seed)
    balls = []
    redraws = 0
    while len(balls) < m:
        center = np.array([rng.uniform(-1.0, 1.0) for _ in range(dim)])
        radius = rng.uniform(0.0, radius_max) if radius_max > 0 else 0.0
        ok = True
        for b in balls:
            gap = float(np.linalg.norm(b.center - center))
            if b.radius >= gap + radius or radius >= gap + b.radius:
                ok = False
                break
        if ok:
            balls.append(Ball(center, radius))
        else:
            redraws += 1
            if redraws > max_redraws:
                raise RuntimeError("too many containment rejections; lower radius_max")
    inst = Instance(dim, tuple(balls))
    meta = {"seed": int(seed), "generator": "splitmix64-uniform",
            "name": name or f"rand-n{dim}-m{m}-s{seed}"}
    return inst, meta


# ---------------------------------------------------------------------------
# file round trip


def instance_to_dict(instance, metadata=None):
    return {
        "schema_version": SCHEMA_VERSION,
        "dim": instance.dim,
        "balls": [{"center": [float(v) for v in b.center], "radius": float(b.radius)}
                  for b in instance.balls],
        "metadata": metadata or {},
    }


def instance_from_dict(doc):
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version: {doc.get('schema_version')!r}")
    dim = int(doc["dim"])
    balls = tuple(Ball(np.array(b["center"], dtype=float), float(b["radius"]))
                  for b in doc["balls"])
    return Instance(dim, balls), doc.get("metadata", {})


def save_instance(path, instance, metadata=None):
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance, metadata), fh, indent=1)
        fh.write("\n")


def load_instance(path):
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# solving with preprocessing and result records


def solve_instance(instance, algorithm="dual", tol=None, max_iter=None):
    """Preprocess and solve; returns a plain-dict result record.

    Support indices are mapped back to the original ball numbering.
    """
    from .geometry import DEFAULT_TOL
    from .dual import solve_dual
    from .primal import solve_primal

    tol = tol or DEFAULT_TOL
    t0 = time.perf_counter()
    pre, report = preprocess_instance(instance, tol)
    solver = solve_primal if algorithm == "primal" else solve_dual
    res = solver(pre, tol=tol, max_iter=max_iter)
    wall = time.perf_counter() - t0
    support = tuple(report.kept[i] for i in res.support)
    return {
        "schema_version": SCHEMA_VERSION,
        "algorithm": res.algorithm,
        "status": res.status,
        "center": [float(v) for v in res.center],
        "radius": float(res.radius),
        "support": [int(i) for i in support],
        "iterations": int(res.iterations),
        "wall_time_ms": wall * 1000.0,
        "removed_balls": [list(r) for r in report.removed],
    }


def run_bench(suite, algorithms=("primal", "dual")):
    """Run a benchmark suite; yields CSV rows (after a fixed header).

    suite is a list of {"dim": n, "m": m, "seeds": [...]} entries; every
    (entry, seed, algorithm) combination produces one row.
    """
    from .oracle import validate

    yield "n,m,seed,algorithm,z,iterations,wall_time_ms,certified"
    for entry in suite:
        dim, m = int(entry["dim"]), int(entry["m"])
        for seed in entry["seeds"]:
            inst, _ = generate_instance(dim, m, seed,
                                        radius_max=float(entry.get("radius_max", 0.5)))
            for algo in algorithms:
                rec = solve_instance(inst, algorithm=algo)
                cert = validate(inst, np.array(rec["center"]), rec["radius"])
                yield (f"{dim},{m},{seed},{algo},{rec['radius']:.12g},"
                       f"{rec['iterations']},{rec['wall_time_ms']:.3f},"
                       f"{int(cert.ok and rec['status'] == 'optimal')}")
