"""Command-line entry point.

Exit codes: 0 success, 1 a requested check failed, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import secrets
import sys

import numpy as np

from . import __version__, reference
from .errors import QencostError


class CheckFailed(Exception):
    pass


# -- output helpers --------------------------------------------------------


def _manifest(args, outputs) -> dict:
    params = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")
    }
    return {
        "subcommand": args.command,
        "params": params,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "outputs": outputs,
    }


def write_json(path, payload: dict, args) -> None:
    doc = {"manifest": _manifest(args, [path]), **payload}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, default=_json_default)
        fh.write("\n")


def write_csv(path, header, rows, args) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(_manifest(args, [path]), fh, indent=2, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (tuple, set)):
        return list(obj)
    return str(obj)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbelow(2**31)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _check(ok: bool, what: str) -> None:
    print(f"check {'ok' if ok else 'FAILED'}: {what}")
    if not ok:
        raise CheckFailed(what)


def _int_list(text: str) -> list[int]:
    """'3' -> [3]; '1-5' -> [1..5]; '1,4,6' -> [1, 4, 6]."""
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


# -- subcommands -----------------------------------------------------------


def cmd_synth_init(args):
    from .ampinit import (
        cx_count, cx_depth, preparation_fidelity, random_target, rotation_depth,
        ry_count, rz_count, synthesize_init,
    )
    from .sim import StateVector

    if args.amplitudes:
        amps = np.array([complex(x.replace(" ", "")) for x in args.amplitudes.split(",")])
        n = int(math.log2(len(amps)))
        target = StateVector(n, amps / np.linalg.norm(amps) if args.normalize else amps)
    else:
        target = random_target(args.n, np.random.default_rng(_seed(args)))
    rep = synthesize_init(target)
    fid = preparation_fidelity(target, rep)
    info = rep.as_dict()
    info["fidelity"] = fid
    for k, v in info.items():
        print(f"{k}: {v}")
    if args.gates:
        print(rep.circuit.to_text())
    if args.json:
        write_json(args.json, {"report": info, "gates": rep.circuit.to_text().splitlines()}, args)
    if args.paper_check:
        n = rep.n
        want = (ry_count(n), rz_count(n), cx_count(n), rotation_depth(n), cx_depth(n))
        got = (rep.ry_count, rep.rz_count, rep.cx_count, rep.rotation_depth, rep.cx_depth)
        _check(got == want, f"counts and depths {got} == {want}")
        _check(fid >= 1 - 1e-10, f"fidelity {fid:.15f} >= 1-1e-10")


def cmd_runtime(args):
    from .ampinit import GateTimeProfile, coherence_headroom, runtime_estimate

    prof = GateTimeProfile(
        args.t1q * 1e-9, args.tcx * 1e-9,
        args.coherence * 1e-6 if args.coherence else None,
    )
    rows = []
    for n in _int_list(args.n):
        sec = runtime_estimate(n, prof)
        head = coherence_headroom(n, prof)
        rows.append((n, repr(sec), "" if head is None else repr(head)))
        extra = "" if head is None else f"  ({100 * head:.2f}% of coherence budget)"
        print(f"n={n}: {sec * 1e6:.6f} us{extra}")
    if args.csv:
        write_csv(args.csv, ["n", "seconds", "budget_fraction"], rows, args)
    if args.paper_check:
        for (t1, tcx), (want, tol) in reference.RUNTIME_N10.items():
            got = runtime_estimate(10, GateTimeProfile(t1, tcx))
            _check(abs(got - want) <= max(tol, 1e-12 * want), f"n=10 at ({t1}, {tcx}): {got} ~ {want}")


MODE_ALIASES = {
    "one-qubit": "one_qubit_absolute",
    "absolute": "multi_absolute",
    "relative": "multi_relative",
}


def cmd_runs_bound(args):
    from .readout import run_budget

    mode = MODE_ALIASES[args.mode]
    rows = []
    for n in _int_list(args.n):
        b = run_budget(args.eps, args.delta, n, mode)
        rows.append((n, 2**n, b.N, args.eps, args.delta, mode))
        print(b.N)
    if args.csv:
        write_csv(args.csv, ["n", "n_tilde", "N", "epsilon", "delta", "mode"], rows, args)
    if args.paper_check:
        for (eps, delta), table in reference.BUDGET_TABLES.items():
            got = tuple(run_budget(eps, delta, n, "multi_relative").N for n in range(1, 6))
            _check(got == table, f"relative budgets eps={eps} delta={delta}: {got}")


def cmd_readout_study(args):
    from .readout import StudyConfig, outlier_study

    seed = _seed(args)
    rows = []
    for n in _int_list(args.n):
        cfg = StudyConfig(n, args.eps, args.delta, args.F, seed, args.shots)
        r = outlier_study(cfg)
        rows.append((n, 2**n, r.N_used, r.outliers, r.experiments, args.eps, args.delta, seed))
        print(f"n={n} N={r.N_used} outliers={r.outliers}/{r.experiments}")
    print("band edge counts as a violation: |N_i/N - 1/2^n| >= eps/2^n")
    if args.csv:
        header = ["n", "n_tilde", "N", "outliers", "experiments", "epsilon", "delta", "seed"]
        write_csv(args.csv, header, rows, args)
    if args.paper_check:
        for row in rows:
            _check(row[3] <= args.F, f"n={row[0]}: outliers {row[3]} <= F={args.F}")


def cmd_min_shots(args):
    from .readout import min_shots_search

    seed = _seed(args)
    rows = []
    traces = {}
    results = {}
    for n in _int_list(args.n):
        r = min_shots_search(n, args.eps, args.delta, args.F, seed, args.cap)
        results[n] = r
        rows.append((n, 2**n, r.N, r.experiments, args.eps, args.delta, seed, int(r.non_monotone)))
        traces[str(n)] = [list(p) for p in r.trace]
        flag = " (non-monotone probes seen)" if r.non_monotone else ""
        print(f"n={n} N={r.N}{flag}")
        if args.trace:
            for N, o in r.trace:
                print(f"  probe N={N}: outliers={o} {'pass' if o <= args.F else 'fail'}")
    if args.csv:
        header = ["n", "n_tilde", "N", "experiments", "epsilon", "delta", "seed", "non_monotone"]
        write_csv(args.csv, header, rows, args)
    if args.json:
        write_json(args.json, {"results": [dict(zip(
            ["n", "n_tilde", "N", "experiments", "epsilon", "delta", "seed", "non_monotone"], r))
            for r in rows], "traces": traces}, args)
    if args.paper_check:
        for n, r in results.items():
            want = reference.EMPIRICAL_MIN_SHOTS.get(n)
            if want is None:
                continue
            _check(
                abs(r.N - want) <= reference.MIN_SHOTS_BAND * want,
                f"n={n}: N={r.N} within 25% of {want}",
            )


def cmd_fit_scaling(args):
    from .readout import FIT_MODELS, empirical_points, fit_scaling

    if args.data:
        with open(args.data, encoding="utf-8") as fh:
            rd = csv.DictReader(fh)
            pts = [(2 ** int(r["n"]), float(r["N"])) for r in rd]
    else:
        pts = empirical_points()
    models = FIT_MODELS if args.model == "all" else (args.model,)
    out = {}
    for m in models:
        f = fit_scaling(pts, m)
        out[m] = {"params": list(f.params), "residual_norm": f.residual_norm}
        print(f"{m}: params={', '.join(f'{p:.6g}' for p in f.params)} residual={f.residual_norm:.6g}")
    if args.json:
        write_json(args.json, {"points": pts, "fits": out}, args)
    if args.paper_check:
        for m, (want, tol) in reference.FITS.items():
            got = fit_scaling(empirical_points(), m).params[0]
            _check(abs(got - want) <= tol, f"{m}: a={got:.4f} ~ {want} +/- {tol}")


def cmd_delta_exact(args):
    from .exactdelta import delta_exact, enumerate_configs

    r = delta_exact(args.ntilde, args.z, args.eps)
    payload = r.as_dict()
    payload["configs"] = [
        {str(s): v for s, v in sorted(c.v.items())}
        for c in enumerate_configs(args.ntilde, args.z, args.eps)
    ]
    print(json.dumps(payload, indent=2))
    if args.json:
        write_json(args.json, payload, args)
    if args.paper_check:
        from fractions import Fraction

        anchor = delta_exact(2, 1, 0.1).value
        _check(anchor == Fraction(1, 2), f"n_tilde=2, N=2 gives {anchor}")


def cmd_delta_brute(args):
    from .exactdelta import delta_bruteforce

    v = delta_bruteforce(args.ntilde, args.N, args.eps, args.cap)
    payload = {
        "n_tilde": args.ntilde, "N": args.N, "epsilon": args.eps,
        "value_rational": f"{v.numerator}/{v.denominator}", "value_float": float(v),
    }
    print(json.dumps(payload, indent=2))
    if args.json:
        write_json(args.json, payload, args)


def cmd_func_synth(args):
    from .funcsynth import FUNCTIONS, Discretization, discretize, synthesize, verify

    table = discretize(FUNCTIONS[args.fn], Discretization(args.phi, args.bits))
    fc = synthesize(table, args.mode, reset=not args.no_reset)
    ok = verify(fc, table)
    print("input -> output")
    for i, o in table.rows():
        print(f"{i} -> {o}")
    print(f"mode: {fc.mode}, ancillas: {fc.num_ancillas}, gates: {len(fc.circuit)}")
    for note in fc.notes:
        print(f"note: {note}")
    print(fc.circuit.to_text())
    print(f"exhaustive verification: {'ok' if ok else 'FAILED'}")
    if args.json:
        write_json(args.json, {
            "table": [{"input": i, "output": o} for i, o in table.rows()],
            "mode": fc.mode, "ancillas": fc.num_ancillas,
            "gates": fc.circuit.to_text().splitlines(), "verified": ok,
        }, args)
    if not ok:
        raise CheckFailed("circuit does not reproduce the table")
    if args.paper_check:
        from .funcsynth import synth_optimized

        x2 = discretize(FUNCTIONS["x2"], Discretization(2, 3))
        _check(tuple(o for _, o in x2.rows()) == reference.X2_TABLE, "x^2 table on [0, 2] with 3 bits")
        anc = synth_optimized(x2).num_ancillas
        _check(anc == reference.X2_OPT_ANCILLAS, f"optimized x^2 uses {anc} ancillas")


def _parse_field(text: str, q: int) -> list[list[int]]:
    return [[int(v) for v in point.split(",")] for point in text.split(";")]


def cmd_lbm_run(args):
    from . import lbm
    from .sim import max_dense_qubits, run_circuit

    q = 2 if args.stencil == "d1q2" else 3
    Q_f = tuple(_int_list(args.bits)) if "," in args.bits else (int(args.bits),) * q
    cfg = lbm.LbmConfig(args.nx, q, Q_f, args.steps, ancilla_mode=args.mode)
    table = lbm.bgk_table(q, Q_f, args.tau, args.u)
    if args.field:
        field = np.array(_parse_field(args.field, q))
    else:
        rng = np.random.default_rng(_seed(args))
        field = np.stack([rng.integers(0, 1 << w, args.nx) for w in Q_f], axis=1)
    states = lbm.run(cfg, field, table)
    ref = lbm.classical_reference(cfg, field, table)
    cmp = lbm.compare_with_reference(cfg, field, table, states[-1])
    budget = lbm.qubit_budget(cfg, table)
    report = {
        "qubits": budget,
        "ancilla_ratio": lbm.ancilla_ratio(cfg, table),
        "mass_conserving_table": lbm.is_mass_conserving(table, Q_f),
        "table_max_error": lbm.bgk_table_error(table, q, Q_f, args.tau, args.u),
        "matches_reference": cmp.matches,
        "mismatches": [m for _, m in cmp.mismatches],
        "initial_mass": int(ref[0].sum()),
        "final_mass": int(ref[-1].sum()),
    }
    if budget <= max_dense_qubits() and args.dense_check:
        ok = True
        cur = states[0]
        for s in range(cfg.t):
            circ = lbm.step_circuit(cfg, table, s)
            dense = run_circuit(circ, cur.to_dense())
            cur = states[s + 1]
            ok &= bool(np.array_equal(dense.amplitudes, cur.to_dense().amplitudes))
        report["dense_equals_branch"] = ok
    for k, v in report.items():
        print(f"{k}: {v}")
    rows = []
    for s, st in enumerate(states):
        for i in range(cfg.Nx):
            dec = lbm.decode_branch(cfg, st.bits[i], table)
            rows.append((i, s, *dec[0]["f"], *ref[s][i]))
    if args.csv:
        header = ["branch", "step"] + [f"f{j}" for j in range(q)] + [f"ref_f{j}" for j in range(q)]
        write_csv(args.csv, header, rows, args)
    if args.json:
        write_json(args.json, {"report": report}, args)
    if not cmp.matches or not report.get("dense_equals_branch", True):
        raise CheckFailed("branch simulation disagrees with its reference")


def cmd_bv_advect(args):
    from .bvadvect import AdvectionProblem, advect_readout, trajectory

    direction = 1 if args.dir == "+" else -1
    prob = AdvectionProblem(args.field, args.bits_per_value, args.steps, direction, args.bc)
    general = args.network == "general"
    r = advect_readout(prob, general)
    print(r.bits)
    print(f"probability of that readout: {r.probability:.15f}", file=sys.stderr)
    if args.csv:
        rows = list(enumerate(trajectory(prob, general)))
        write_csv(args.csv, ["step", "field"], rows, args)
    if args.paper_check:
        for (fieldbits, k, bc), want in reference.BV_EXAMPLES.items():
            got = advect_readout(AdvectionProblem(fieldbits, 1, k, 1, bc), general).bits
            _check(got == want, f"{fieldbits} k={k} {bc} -> {got}")


def cmd_nonlin_witness(args):
    from .witness import streaming_nonlinearity_witness

    r = streaming_nonlinearity_witness()
    for line in r.lines():
        print(line)
    if args.json:
        write_json(args.json, {
            "rank": r.rank,
            "probe_coords": [str(x) for x in r.probe_coords],
            "probe_image": [str(x) for x in r.probe_image_coords],
            "demanded": [str(x) for x in r.demanded_coords],
            "contradiction": r.contradiction,
        }, args)
    if not r.contradiction:
        raise CheckFailed("no contradiction found")
    if args.paper_check:
        _check(r.rank == reference.WITNESS_RANK, f"rank {r.rank}")
        _check(tuple(r.probe_coords) == reference.WITNESS_COORDS, "coordinates of input 3")
        _check(tuple(r.probe_image_coords) == reference.WITNESS_IMAGE, "image of input 3")


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qencost", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        return sp

    def check_flag(sp):
        sp.add_argument("--paper-check", action="store_true",
                        help="compare with embedded reference values; exit 1 on mismatch")

    s = add("synth-init", cmd_synth_init, "synthesize an amplitude-encoding circuit")
    s.add_argument("--n", type=int, default=3, help="qubits for a random target")
    s.add_argument("--amplitudes", help="comma-separated complex amplitudes, e.g. 1,1j,0,0")
    s.add_argument("--normalize", action="store_true")
    s.add_argument("--seed", type=int)
    s.add_argument("--gates", action="store_true", help="print the gate list")
    s.add_argument("--json")
    check_flag(s)

    s = add("runtime-estimate", cmd_runtime, "layer-wise runtime of the preparation circuit")
    s.add_argument("--n", default="1-10")
    s.add_argument("--t1q", type=float, default=50.0, help="ns per 1-qubit rotation")
    s.add_argument("--tcx", type=float, default=200.0, help="ns per CX")
    s.add_argument("--coherence", type=float, help="coherence budget in us")
    s.add_argument("--csv")
    check_flag(s)

    s = add("runs-bound", cmd_runs_bound, "shots needed for a given error and confidence")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--n", default="1")
    s.add_argument("--mode", choices=sorted(MODE_ALIASES), default="relative")
    s.add_argument("--csv")
    check_flag(s)

    s = add("readout-study", cmd_readout_study, "count outlier experiments")
    s.add_argument("--n", default="1-4")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--delta", type=float, default=0.5)
    s.add_argument("--F", type=int, default=100)
    s.add_argument("--shots", type=int, help="override the shot count")
    s.add_argument("--seed", type=int)
    s.add_argument("--csv")
    check_flag(s)

    s = add("min-shots", cmd_min_shots, "search the smallest passing shot count")
    s.add_argument("--n", default="1-4")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--delta", type=float, default=0.5)
    s.add_argument("--F", type=int, default=100)
    s.add_argument("--cap", type=int, default=1 << 26)
    s.add_argument("--seed", type=int)
    s.add_argument("--trace", action="store_true", help="print every probe")
    s.add_argument("--csv")
    s.add_argument("--json")
    check_flag(s)

    s = add("fit-scaling", cmd_fit_scaling, "fit shot counts against 2^n")
    s.add_argument("--model", choices=["all", "linear", "n_log_n", "power"], default="all")
    s.add_argument("--data", help="CSV with columns n,N (default: built-in table)")
    s.add_argument("--json")
    check_flag(s)

    s = add("delta-exact", cmd_delta_exact, "exact success probability, N = z*ntilde")
    s.add_argument("--ntilde", type=int, required=True)
    s.add_argument("--z", type=int, required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--json")
    check_flag(s)

    s = add("delta-brute", cmd_delta_brute, "success probability by enumeration")
    s.add_argument("--ntilde", type=int, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--cap", type=int, default=10**7)
    s.add_argument("--json")

    s = add("func-synth", cmd_func_synth, "circuit for a discretized function")
    s.add_argument("--fn", choices=["x2", "identity", "sqrt", "sin"], default="x2")
    s.add_argument("--phi", type=float, default=2.0)
    s.add_argument("--bits", type=int, default=3)
    s.add_argument("--mode", choices=["naive", "opt"], default="naive")
    s.add_argument("--no-reset", action="store_true")
    s.add_argument("--json")
    check_flag(s)

    s = add("lbm-run", cmd_lbm_run, "hybrid-encoded lattice Boltzmann run")
    s.add_argument("--stencil", choices=["d1q2", "d1q3"], default="d1q2")
    s.add_argument("--nx", type=int, default=4)
    s.add_argument("--steps", type=int, default=1)
    s.add_argument("--bits", default="1", help="bits per f, or a comma list per f")
    s.add_argument("--mode", choices=["full", "optimized"], default="full")
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--u", type=float, default=0.0)
    s.add_argument("--field", help="per point comma lists separated by ';'")
    s.add_argument("--seed", type=int)
    s.add_argument("--dense-check", action="store_true",
                   help="also run the dense simulator when the register fits")
    s.add_argument("--csv")
    s.add_argument("--json")

    s = add("bv-advect", cmd_bv_advect, "advection through a Bernstein-Vazirani circuit")
    s.add_argument("--field", required=True)
    s.add_argument("--bits-per-value", type=int, default=1)
    s.add_argument("--steps", type=int, default=1)
    s.add_argument("--bc", choices=["periodic", "outlet"], default="periodic")
    s.add_argument("--dir", choices=["+", "-"], default="+")
    s.add_argument("--network", choices=["general", "fixed"], default="general")
    s.add_argument("--csv")
    check_flag(s)

    s = add("nonlin-witness", cmd_nonlin_witness, "show the register exchange is not linear")
    s.add_argument("--json")
    check_flag(s)
    return p


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (QencostError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
