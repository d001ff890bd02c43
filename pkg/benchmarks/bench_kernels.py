"""Compare the compiled and pure-Python pair kernels on brute-force defect runs.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both backends must return identical certificates; the script exits 1 otherwise.
"""
from __future__ import annotations

import argparse
import statistics
import sys
import time

import numpy as np

from freeqm import kernels
from freeqm.qm_core import SyllableQM
from freeqm.sequences import FiniteTable, Sign
from freeqm.words import Alphabet, enumerate_words

CASES = [
    ("Sign(1)", Sign(1), 2, 3, None),
    ("FiniteTable(1, -1/3)", FiniteTable([1, "-1/3"]), 3, 3, None),
    ("Sign(1) sampled", Sign(1), 3, 4, 200_000),
]


def bench(qm, k, l, sample, backend, repeat):
    ws = list(enumerate_words(qm.alphabet, k, l))
    packed = kernels.PackedWords(ws, qm.alphabet.names)
    left = right = None
    if sample:
        rng = np.random.default_rng(0)
        left = rng.integers(0, len(ws), size=sample, dtype=np.int64)
        right = rng.integers(0, len(ws), size=sample, dtype=np.int64)
    times, result = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        result = kernels.coboundary_extremum(packed, qm.syllable_value, left, right, backend=backend)
        times.append(time.perf_counter() - start)
    pairs = sample or len(ws) ** 2
    return statistics.median(times), pairs, result


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if kernels.BACKEND != "cython":
        print("compiled kernel not built; only the Python backend is available", file=sys.stderr)
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    alphabet = Alphabet(("s", "t"))
    print(f"{'case':<24}{'K':>3}{'L':>3}{'pairs':>10}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    status = 0
    for name, sigma, k, l, sample in CASES:
        qm = SyllableQM.uniform(alphabet, sigma)
        rows = {b: bench(qm, k, l, sample, b, args.repeat) for b in backends}
        results = {r[2] for r in rows.values()}
        if len(results) != 1:
            print(f"MISMATCH on {name}: {results}", file=sys.stderr)
            status = 1
        pairs = rows["python"][1]
        line = f"{name:<24}{k:>3}{l:>3}{pairs:>10}" + "".join(f"{rows[b][0]:>11.4f}s" for b in backends)
        if "cython" in rows:
            line += f"{rows['python'][0] / max(rows['cython'][0], 1e-9):>9.1f}x"
        print(line)
    return status


if __name__ == "__main__":
    sys.exit(main())
