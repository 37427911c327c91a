"""Command-line front end.

Exit codes: 0 ok, 2 input error, 3 internal invariant failure.
"""
from __future__ import annotations

import argparse
import csv
import os
import statistics
import sys
import time
from typing import Sequence

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3
DEFAULT_MAX_QUBITS = 26
WORKERS_ENV = "SIMDIAG_WORKERS"

BENCH_FIELDS = ["model", "n_qubits", "m", "n_g", "method", "n_steps", "wall_time_per_step",
                "speedup_vs_baseline", "predicted_speedup", "worker_count"]


class InputError(Exception):
    pass


class InvariantError(Exception):
    pass


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _log(msg: str):
    print(msg, file=sys.stderr)


def _check_size(n: int, cap: int):
    if n > cap:
        raise InputError(f"{n} qubits exceeds the memory cap of {cap} "
                         f"({16 * 2 ** n / 2 ** 30:.1f} GiB state vector); raise --max-qubits to override")


def _load(path):
    from .hamiltonian import load

    try:
        return load(sys.stdin if path == "-" else path)
    except OSError as exc:
        raise InputError(str(exc)) from None


def _diagonalize(h):
    from .diagonalizer import SynthesisError
    from .evolution import diagonalize_hamiltonian
    from .hamiltonian import is_commuting

    try:
        groups = diagonalize_hamiltonian(h)
    except SynthesisError as exc:
        raise InvariantError(str(exc)) from None
    for g in groups:
        if not is_commuting([t.pauli for t in g.source]):
            raise InvariantError(f"group {g.group_index} is not mutually commuting")
    return groups


def _initial_state(kind: str, n: int, seed: int):
    from .statevec import StateVector

    if kind == "zero":
        return StateVector.zero(n)
    if kind == "plus":
        return StateVector.plus(n)
    return StateVector.random(n, seed=seed)


def _worker_count() -> int:
    from . import _kernels

    if not _kernels.PARALLEL:
        return 1
    import numba

    return numba.get_num_threads()


# -- subcommands ------------------------------------------------------------------

def cmd_gen(args) -> int:
    from .models import ModelSpec

    try:
        spec = ModelSpec(args.model, args.qubits, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    h = spec.build()
    out, close = _open_out(args.out)
    try:
        out.write(f"# {args.model} n={args.qubits} seed={args.seed} m={h.m}\n")
        out.write(h.dumps())
    finally:
        if close:
            out.close()
    _log(f"{args.model}: {h.n_qubits} qubits, {h.m} terms")
    return EXIT_OK


def cmd_partition(args) -> int:
    from .hamiltonian import greedy_partition, partition_stats

    h = _load(args.hamiltonian)
    groups = greedy_partition(h)
    st = partition_stats(groups, h.n_qubits)
    print(f"m: {st.m}")
    print(f"n_g: {st.n_groups}")
    print(f"group_sizes: {' '.join(str(len(g)) for g in groups)}")
    print(f"predicted_speedup: {st.predicted_speedup:.6g}")
    if args.out:
        index = {t.pauli: i for i, t in enumerate(h.terms)}
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["term_index", "pauli", "coeff", "group"])
            rows = [(index[t.pauli], str(t.pauli), repr(t.coeff), g.group_index) for g in groups for t in g.terms]
            w.writerows(sorted(rows))
    return EXIT_OK


def cmd_diag(args) -> int:
    from .diagonalizer import dumps_groups

    h = _load(args.hamiltonian)
    groups = _diagonalize(h)
    out, close = _open_out(args.out)
    try:
        out.write(dumps_groups(groups))
        out.write("\n")
    finally:
        if close:
            out.close()
    _log(f"{len(groups)} groups diagonalized")
    return EXIT_OK


def cmd_run(args) -> int:
    from .evolution import (EvolutionPlan, GroupedProgram, RotationProgram, expectation,
                            ordered_terms)
    from .statevec import fidelity

    h = _load(args.hamiltonian)
    _check_size(h.n_qubits, args.max_qubits)
    if args.steps < 0:
        raise InputError("--steps must be >= 0")
    psi = _initial_state(args.init, h.n_qubits, args.seed)
    start = psi.copy()
    if args.steps == 0:
        _log("dt: undefined (0 steps, state unchanged)")
        plan = None
        program = None
    else:
        try:
            plan = EvolutionPlan(args.t, args.steps, args.method, args.term_order)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        _log(f"dt: {plan.dt:.10g}")
        if args.method == "grouped":
            program = GroupedProgram(_diagonalize(h), plan.dt)
        else:
            program = RotationProgram(ordered_terms(h, args.term_order), plan.dt)

    out, close = _open_out(args.out)
    try:
        w = csv.writer(out)
        w.writerow(["step", "time", "energy"])
        w.writerow([0, 0.0, repr(expectation(h, psi))])
        done = 0
        every = max(1, args.every)
        while done < args.steps:
            k = min(every, args.steps - done)
            program.run(psi, k)
            done += k
            w.writerow([done, repr(done * plan.dt), repr(expectation(h, psi))])
    finally:
        if close:
            out.close()

    amps = " ".join(f"{a.real:+.12e}{a.imag:+.12e}j" for a in psi.amplitudes[:4])
    _log(f"norm: {psi.norm():.15f}")
    _log(f"amplitudes[0:4]: {amps}")
    if args.save_state:
        psi.save(args.save_state)
    if args.verify and plan is not None:
        ref = start.copy()
        if args.method == "grouped":
            RotationProgram(ordered_terms(h, "group_major"), plan.dt).run(ref, plan.n_steps)
        else:
            GroupedProgram(_diagonalize(h), plan.dt).run(ref, plan.n_steps)
        deficit = 1.0 - fidelity(psi, ref)
        _log(f"fidelity_deficit_vs_{'baseline' if args.method == 'grouped' else 'grouped'}: {deficit:.3e}")
        if args.term_order == "group_major" or args.method == "grouped":
            if deficit > 1e-10:
                raise InvariantError(f"grouped and group-major baseline disagree (deficit {deficit:.3e})")
    return EXIT_OK


def _step_times(runs: dict, psi, repeats: int, warmup: int = 3) -> dict[str, float]:
    """Median one-step wall time per method.

    Samples are interleaved across methods so slow drifts in machine load
    hit every method alike.
    """
    for run in runs.values():
        for _ in range(warmup):
            run(psi, 1)
    samples: dict[str, list[float]] = {name: [] for name in runs}
    for _ in range(repeats):
        for name, run in runs.items():
            t0 = time.perf_counter()
            run(psi, 1)
            samples[name].append(time.perf_counter() - t0)
    return {name: statistics.median(v) for name, v in samples.items()}


def _qubit_range(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"bad qubit range {text!r} (use 'N', 'A:B' or 'A,B,C')") from None


def cmd_bench(args) -> int:
    from .evolution import DEFAULT_DT, GroupedProgram, RotationProgram, ordered_terms
    from .hamiltonian import greedy_partition, partition_stats
    from .models import ModelSpec
    from .statevec import StateVector

    sizes = _qubit_range(args.qubits)
    for n in sizes:
        _check_size(n, args.max_qubits)
    if args.repeats < 5:
        raise InputError("--repeats must be at least 5")
    workers = _worker_count()
    out, close = _open_out(args.out)
    w = csv.DictWriter(out, BENCH_FIELDS)
    w.writeheader()
    try:
        for n in sizes:
            try:
                h = ModelSpec(args.model, n, args.seed).build()
            except ValueError as exc:
                raise InputError(str(exc)) from None
            st = partition_stats(greedy_partition(h), n)
            groups = _diagonalize(h)
            psi = StateVector.random(n, seed=args.seed)
            runs = {
                "baseline": RotationProgram(ordered_terms(h, "input"), DEFAULT_DT).run,
                "baseline_group_major": RotationProgram(ordered_terms(h, "group_major"), DEFAULT_DT).run,
                "grouped": GroupedProgram(groups, DEFAULT_DT).run,
            }
            times = _step_times(runs, psi, args.repeats)
            for name, t in times.items():
                w.writerow({"model": args.model, "n_qubits": n, "m": st.m, "n_g": st.n_groups,
                            "method": name, "n_steps": 1, "wall_time_per_step": f"{t:.6e}",
                            "speedup_vs_baseline": f"{times['baseline'] / t:.4f}",
                            "predicted_speedup": f"{st.predicted_speedup:.4f}", "worker_count": workers})
            out.flush()
            _log(f"{args.model} n={n}: m={st.m} n_g={st.n_groups} "
                 f"speedup={times['baseline'] / times['grouped']:.2f}x predicted={st.predicted_speedup:.2f}x")
    except KeyboardInterrupt:
        _log("interrupted; partial results written")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    from .evolution import (EXACT_MAX_QUBITS, EvolutionPlan, GroupedProgram, RotationProgram,
                            exact_evolve, ordered_terms)
    from .statevec import StateVector, fidelity

    h = _load(args.hamiltonian)
    _check_size(h.n_qubits, args.max_qubits)
    groups = _diagonalize(h)
    for g in groups:
        if any(p.x_mask for _, p in g.diagonal_terms()):
            raise InvariantError(f"group {g.group_index} has residual X support")
    _log(f"{len(groups)} groups synthesized and checked diagonal")
    plan = EvolutionPlan(args.t, args.steps)
    psi0 = StateVector.random(h.n_qubits, seed=args.seed)
    a, b = psi0.copy(), psi0.copy()
    GroupedProgram(groups, plan.dt).run(a, plan.n_steps)
    RotationProgram(ordered_terms(h, "group_major"), plan.dt).run(b, plan.n_steps)
    deficit = 1.0 - fidelity(a, b)
    print(f"grouped_vs_group_major_deficit: {deficit:.3e}")
    drift = abs(a.norm() - 1.0)
    print(f"norm_drift: {drift:.3e}")
    if h.n_qubits <= min(args.exact_max_qubits, EXACT_MAX_QUBITS):
        exact = exact_evolve(h, psi0, plan.total_time)
        print(f"trotter_deficit_vs_exact: {1.0 - fidelity(a, exact):.3e}")
    else:
        print(f"trotter_deficit_vs_exact: skipped ({h.n_qubits} > {args.exact_max_qubits} qubits)")
    if deficit > 1e-10 or drift > 1e-8:
        raise InvariantError("grouped evolution failed verification")
    print("ok")
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simdiag", description=__doc__.splitlines()[0])
    p.add_argument("--workers", type=int, default=None,
                   help=f"kernel worker threads (default: ${WORKERS_ENV} or 1)")
    p.add_argument("--max-qubits", type=int, default=DEFAULT_MAX_QUBITS,
                   help="refuse state vectors above this many qubits (default %(default)s)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a model Hamiltonian")
    g.add_argument("--model", choices=["tfim", "syk"], required=True)
    g.add_argument("--qubits", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen)

    g = sub.add_parser("partition", help="greedy commuting partition")
    g.add_argument("hamiltonian")
    g.add_argument("--out", help="CSV of term -> group assignment")
    g.set_defaults(func=cmd_partition)

    g = sub.add_parser("diag", help="synthesize diagonalizing circuits (JSON)")
    g.add_argument("hamiltonian")
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_diag)

    g = sub.add_parser("run", help="Trotterized evolution with an energy trace")
    g.add_argument("hamiltonian")
    g.add_argument("--t", type=float, default=1.0, help="total time")
    g.add_argument("--steps", type=int, default=100)
    g.add_argument("--method", choices=["baseline", "grouped"], default="grouped")
    g.add_argument("--term-order", choices=["input", "group_major"], default="input")
    g.add_argument("--init", choices=["zero", "plus", "random"], default="zero")
    g.add_argument("--seed", type=int, default=0, help="seed for --init random")
    g.add_argument("--every", type=int, default=1, help="energy sample interval in steps")
    g.add_argument("--verify", action="store_true", help="compare against the other driver")
    g.add_argument("--save-state", help="raw little-endian complex128 dump of the final state")
    g.add_argument("--out", default="-", help="energy trace CSV")
    g.set_defaults(func=cmd_run)

    g = sub.add_parser("bench", help="time one Trotter step per method")
    g.add_argument("--model", choices=["tfim", "syk"], required=True)
    g.add_argument("--qubits", required=True, help="N, A:B or A,B,C")
    g.add_argument("--repeats", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_bench)

    g = sub.add_parser("verify", help="check synthesis and driver equivalence")
    g.add_argument("hamiltonian")
    g.add_argument("--t", type=float, default=0.1)
    g.add_argument("--steps", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--exact-max-qubits", type=int, default=10,
                   help="largest size for the dense exact cross-check (hard limit 12)")
    g.set_defaults(func=cmd_verify)
    return p


def _reexec_with_workers(workers: int, argv: Sequence[str]):
    """Kernels pick their parallel mode at import, so a new worker count needs a fresh process."""
    env = dict(os.environ, **{WORKERS_ENV: str(workers)})
    env.setdefault("NUMBA_NUM_THREADS", str(workers))
    os.execve(sys.executable, [sys.executable, "-m", "simdiag", *argv], env)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    if args.workers is not None:
        if args.workers < 1:
            _log("error: --workers must be >= 1")
            return EXIT_INPUT
        from . import _kernels

        if _kernels.WORKERS != args.workers:
            _reexec_with_workers(args.workers, argv)
    from .hamiltonian import HamiltonianLoadError
    from .pauli import PauliParseError

    try:
        return args.func(args)
    except (InputError, HamiltonianLoadError, PauliParseError) as exc:
        _log(f"error: {exc}")
        return EXIT_INPUT
    except InvariantError as exc:
        _log(f"invariant failure: {exc}")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
