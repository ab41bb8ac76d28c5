"""Time the numba loop kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--batch 20000] [--repeat 5] [--json out.json]

Numba compile time is excluded (one warm-up call per kernel).
"""

import argparse
import json
import time

import numpy as np

from triadg3 import _kernels as K
from triadg3._accel import USE_NUMBA
from triadg3.interferometer import bell_circuit, compose_circuit, perturb_circuit
from triadg3.sources import delay_overlaps, embed_overlaps


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t)
    return min(times)


def make_inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    nominal = bell_circuit(0.8)
    U = np.array([compose_circuit(perturb_circuit(nominal, 0.06, rng=rng)) for _ in range(n)])
    x = rng.uniform(0.1, 1, (n, 3))
    v = rng.uniform(0, 1, (n, 3))
    w = 3 * x * v
    o = delay_overlaps(0.4)
    r2 = np.tile(o.r2, (n, 1))
    tri = np.full(n, o.triad, dtype=complex)
    en = np.ones((n, 3))
    phi = embed_overlaps(o).astype(complex)
    amp = np.sqrt(rng.uniform(0, 2, (n * 10, 3)))
    phase = rng.uniform(0, 2 * np.pi, (n * 10, 3))
    return {
        "g3_classical": ((U, x, v, w, r2, tri), K._g3_classical_loop, K._g3_classical_numpy),
        "quantum_correction": ((U, en, x, x**2 + v, r2), K._quantum_correction_loop, K._quantum_correction_numpy),
        "mc_block_sums": ((U[0], phi, amp, phase), K._mc_block_sums_loop, K._mc_block_sums_numpy),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--batch", type=int, default=20_000)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", default=None)
    args = p.parse_args(argv)
    if not USE_NUMBA:
        print("note: TRIADG3_USE_NUMBA=0, the loop kernels run as plain Python")

    rows = []
    for name, (inputs, loop, vec) in make_inputs(args.batch).items():
        t_loop = best_of(loop, inputs, args.repeat)
        t_vec = best_of(vec, inputs, args.repeat)
        agree = float(np.max(np.abs(np.asarray(loop(*inputs)) - np.asarray(vec(*inputs)))))
        rows.append({"kernel": name, "numba_s": t_loop, "numpy_s": t_vec, "speedup": t_vec / t_loop, "max_abs_diff": agree})

    print(f"{'kernel':<20}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}{'max diff':>12}")
    for r in rows:
        print(f"{r['kernel']:<20}{1e3 * r['numba_s']:>12.2f}{1e3 * r['numpy_s']:>12.2f}{r['speedup']:>10.1f}{r['max_abs_diff']:>12.1e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"batch": args.batch, "numba": USE_NUMBA, "results": rows}, fh, indent=1)


if __name__ == "__main__":
    main()
