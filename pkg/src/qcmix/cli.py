"""Command-line front end: ``qcmix <subcommand> [flags]``.

Every run writes ``<out>.csv`` (data), ``<out>.json`` (fully resolved config) and
``<out>.summary.txt``. Flags override values from ``--config FILE.json``. Exit codes:
0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import tls
from .engine import MixConfig
from .experiments import (Schedule, best_alpha, level_probabilities, max_deviation, qs_ratio_run,
                          run_annealing, sk_benchmark)
from .io import write_csv, write_json, write_summary
from .ising import (MAX_SPINS, IsingInstance, classical_energies, husimi_temperley,
                    quantum_signature, single_spin, sk_random)

OUT_DIR_ENV = "QCMIX_OUT_DIR"
SUBCOMMANDS = ("tls-evolve", "tls-stationary", "tls-sweep", "anneal", "quench", "qs-ratio",
               "sk-bench", "instance-dump")


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_model(p):
    p.add_argument("--model", choices=("ht", "qs", "sk", "single"), help="built-in instance")
    p.add_argument("--instance", help="instance JSON file (overrides --model)")
    p.add_argument("--n", type=int, help="spin count for ht/sk")
    p.add_argument("--seed", type=int, help="SK instance seed")
    p.add_argument("--field", type=float, help="longitudinal field for --model single")
    p.add_argument("--dump-instance", help="also write the instance JSON here")


def _add_mix(p, tau=True):
    p.add_argument("--alpha", type=float, help="mixing parameter in [0, 1] (required)")
    p.add_argument("--temperature", type=float, default=0.0, help="bath temperature, 0 = T=0 (default 0)")
    p.add_argument("--dt", type=float, default=1e-3, help="step size (default 1e-3)")
    p.add_argument("--sample-every", type=int, default=100, help="observer stride in steps")
    if tau:
        p.add_argument("--tau", type=float, help="total annealing time (required)")


def _add_tls(p):
    p.add_argument("--h", type=float, default=1.0, help="longitudinal field h")
    p.add_argument("--gamma-x", type=float, default=1.0, help="transverse field Gamma")
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--space", choices=("manifold", "full"), default="manifold",
                   help="root-finding space for stationary points")


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="qcmix", description=__doc__.splitlines()[0])
    root.add_argument("--config", help="JSON file of flag values (keys use underscores)")
    sub = root.add_subparsers(dest="subcommand", parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON file of flag values (keys use underscores)")
        p.add_argument("--out", help=f"output path prefix (default: ${OUT_DIR_ENV}/<subcommand>)")

    p = sub.add_parser("tls-evolve", help="integrate the two-level ODEs")
    common(p)
    _add_tls(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--t-end", type=float, help="final time (required)")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--z0", type=float, default=0.5)
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--sample-every", type=int, default=10)

    p = sub.add_parser("tls-stationary", help="stationary points of the two-level system")
    common(p)
    _add_tls(p)
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("tls-sweep", help="stationary branches over alpha or temperature")
    common(p)
    _add_tls(p)
    p.add_argument("--vary", choices=("alpha", "temperature"))
    p.add_argument("--alpha", type=float, help="fixed alpha when varying temperature")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--num", type=int, default=101)

    p = sub.add_parser("anneal", help="annealing run with s(t) = scale (t/tau)^gamma")
    common(p)
    _add_model(p)
    _add_mix(p)
    p.add_argument("--gamma", type=float, default=1.0, help="scheduling index")
    p.add_argument("--scale", type=float, default=1.0, help="final value of s")

    p = sub.add_parser("quench", help="constant-s relaxation run")
    common(p)
    _add_model(p)
    _add_mix(p)
    p.add_argument("--s", type=float, help="constant annealing parameter (required)")

    p = sub.add_parser("qs-ratio", help="P_I/P_C of the quantum-signature model")
    common(p)
    p.add_argument("--alphas", type=_floats)
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--tau", type=float)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--sample-every", type=int, default=1000)

    p = sub.add_parser("sk-bench", help="SK ground-probability benchmark grid")
    common(p)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--alphas", type=_floats)
    p.add_argument("--taus", type=_floats)
    p.add_argument("--gammas", type=_floats)
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("instance-dump", help="write a model instance as JSON")
    common(p)
    _add_model(p)
    return root


def parse_config(argv=None) -> argparse.Namespace:
    """Parse ``argv``; values from ``--config`` act as defaults that flags override."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        raise ConfigError(f"missing subcommand; choose one of {', '.join(SUBCOMMANDS)}")
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}")
        sub = parser._subparsers._group_actions[0].choices[args.subcommand]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s) for {args.subcommand}: {', '.join(unknown)}")
        for key in ("alphas", "taus", "gammas"):
            if isinstance(data.get(key), list):
                data[key] = ",".join(str(v) for v in data[key])
        sub.set_defaults(**{k: v for k, v in data.items() if k not in ("config", "subcommand")})
        args = parser.parse_args(argv)
    _validate(args)
    return args


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise ConfigError(f"missing required parameter --{name.replace('_', '-')} for {args.subcommand}")


def _check_range(name, value, lo, hi, lo_open=False):
    if value is None:
        return
    bad = value < lo or value > hi or (lo_open and value == lo) or not math.isfinite(value)
    if bad:
        brack = "(" if lo_open else "["
        raise ConfigError(f"--{name} must lie in {brack}{lo:g}, {hi:g}], got {value:g}")


def _validate(args):
    cmd = args.subcommand
    if cmd in ("anneal", "quench", "instance-dump"):
        if args.instance is None and args.model is None:
            raise ConfigError("missing required parameter --model (or --instance)")
        if args.n is not None and not 1 <= args.n <= MAX_SPINS:
            raise ConfigError(f"--n must lie in [1, {MAX_SPINS}], got {args.n}")
    if cmd in ("anneal", "quench"):
        _require(args, "alpha", "tau")
        if cmd == "quench":
            _require(args, "s")
            _check_range("s", args.s, 0.0, 1.0)
    if cmd == "anneal":
        _check_range("scale", args.scale, 0.0, 1.0, lo_open=True)
        if not args.gamma > 0:
            raise ConfigError(f"--gamma must be > 0, got {args.gamma:g}")
    if cmd in ("tls-evolve", "tls-stationary"):
        _require(args, "alpha")
    if cmd == "tls-evolve":
        _require(args, "t_end")
        _check_range("z0", args.z0, 0.0, 1.0, lo_open=True)
    if cmd == "tls-sweep":
        _require(args, "vary", "start", "stop")
        if args.vary == "temperature":
            _require(args, "alpha")
        if args.num < 2:
            raise ConfigError(f"--num must be >= 2, got {args.num}")
        if args.vary == "alpha":
            _check_range("start", args.start, 0.0, 1.0)
            _check_range("stop", args.stop, 0.0, 1.0)
        elif min(args.start, args.stop) < 0:
            raise ConfigError("temperature sweep bounds must be >= 0")
    if cmd == "qs-ratio":
        _require(args, "alphas", "tau")
    if cmd == "sk-bench":
        _require(args, "alphas", "taus", "gammas")
        for a in args.alphas:
            _check_range("alphas", a, 0.0, 1.0)
        if args.instances < 1:
            raise ConfigError(f"--instances must be >= 1, got {args.instances}")
    for name in ("alpha",):
        _check_range(name, getattr(args, name, None), 0.0, 1.0)
    for name in ("alphas",):
        for a in getattr(args, name, None) or []:
            _check_range(name, a, 0.0, 1.0)
    if getattr(args, "temperature", None) is not None and args.temperature < 0:
        raise ConfigError(f"--temperature must be >= 0, got {args.temperature:g}")
    if getattr(args, "dt", None) is not None and not args.dt > 0:
        raise ConfigError(f"--dt must be > 0, got {args.dt:g}")
    if getattr(args, "tau", None) is not None and not args.tau > 0:
        raise ConfigError(f"--tau must be > 0, got {args.tau:g}")
    if getattr(args, "sample_every", None) is not None and args.sample_every < 1:
        raise ConfigError(f"--sample-every must be >= 1, got {args.sample_every}")
    for name in ("h", "gamma_x"):
        if getattr(args, name, None) is not None and not getattr(args, name) > 0:
            raise ConfigError(f"--{name.replace('_', '-')} must be > 0")


def _out_prefix(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUT_DIR_ENV, ".")) / args.subcommand


def _instance(args) -> IsingInstance:
    if args.instance:
        return IsingInstance.load(args.instance)
    if args.model == "ht":
        return husimi_temperley(args.n or 4)
    if args.model == "qs":
        return quantum_signature()
    if args.model == "sk":
        if args.seed is None:
            raise ConfigError("--model sk needs --seed")
        return sk_random(args.n or 6, args.seed)
    return single_spin(1.0 if args.field is None else args.field)


def _resolved(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "config"}


# --- subcommand runners --------------------------------------------------------

def _trajectory_outputs(args, inst, traj, spectrum):
    levels = traj.observables["level_probabilities"]
    header = ["t", "s", "p_ground"] + [f"p_level_{k}" for k in range(levels.shape[1])]
    cols = [traj.times, traj.s, traj.observables["qubo_ground_probability"]] + list(levels.T)
    if "pi_pc_ratio" in traj.observables:
        header.append("pi_pc")
        cols.append(traj.observables["pi_pc_ratio"])
    if "purity_defect" in traj.observables:
        header.append("purity_defect")
        cols.append(traj.observables["purity_defect"])
    rows = zip(*cols)
    prefix = _out_prefix(args)
    write_csv(prefix.with_suffix(".csv"), header, rows)
    lines = [f"{args.subcommand}: {inst.label}",
             f"alpha={args.alpha} temperature={args.temperature} dt={args.dt} tau={args.tau}",
             f"final p_ground={float(traj.observables['qubo_ground_probability'][-1]):.10g}",
             "final level probabilities=" + " ".join(f"{v:.10g}" for v in levels[-1]),
             f"max renormalisation defect={traj.max_renorm_defect:.3e}"]
    if "purity_defect" in traj.observables:
        lines.append(f"max purity defect={float(np.max(traj.observables['purity_defect'])):.3e}")
    if "pi_pc_ratio" in traj.observables:
        lines.append(f"final P_I/P_C={float(traj.observables['pi_pc_ratio'][-1]):.10g}")
    return lines


def _observables_for(inst):
    obs = ["level_probabilities", "qubo_ground_probability"]
    if inst.n <= 8:
        obs.append("purity_defect")
    if inst.label == "quantum_signature":
        obs.append("pi_pc_ratio")
    return obs


def run_anneal(args):
    inst = _instance(args)
    if args.dump_instance:
        inst.save(args.dump_instance)
    if args.subcommand == "quench":
        schedule = Schedule.constant(args.s, args.tau)
    else:
        schedule = Schedule(args.tau, args.gamma, args.scale)
    config = MixConfig(args.alpha, args.temperature, args.dt, sample_every=args.sample_every)
    spectrum = classical_energies(inst)
    traj = run_annealing(inst, schedule, config, _observables_for(inst), spectrum)
    return _trajectory_outputs(args, inst, traj, spectrum)


def run_instance_dump(args):
    inst = _instance(args)
    target = args.dump_instance or _out_prefix(args).with_suffix(".instance.json")
    inst.save(target)
    spectrum = classical_energies(inst)
    return [f"instance {inst.label} written to {target}",
            f"ground energy={spectrum.ground_energy:.10g} degeneracy={spectrum.ground_indices.size}"]


def run_tls_evolve(args):
    p = tls.TlsParams(args.h, args.gamma_x, args.alpha, args.temperature)
    t, xyz = tls.integrate(p, args.z0, args.theta0, args.t_end, args.dt, args.sample_every)
    write_csv(_out_prefix(args).with_suffix(".csv"), ["t", "z", "x", "y"],
              ((ti, v[2], v[0], v[1]) for ti, v in zip(t, xyz)))
    return [f"tls-evolve h={p.h} gamma_x={p.gamma_x} alpha={p.alpha} T={p.temperature}",
            f"final z={xyz[-1, 2]:.10g}"]


def run_tls_stationary(args):
    p = tls.TlsParams(args.h, args.gamma_x, args.alpha, args.temperature)
    points = tls.tls_stationary(p, space=args.space)
    rows = [(p.alpha, k, sp.z, sp.xyz[0], sp.xyz[1], sp.stability) for k, sp in enumerate(points)]
    write_csv(_out_prefix(args).with_suffix(".csv"), ["alpha", "branch", "z", "x", "y", "stability"], rows)
    return [f"tls-stationary h={p.h} gamma_x={p.gamma_x} alpha={p.alpha} T={p.temperature} space={args.space}"] + [
        f"root {k}: z={sp.z:.10g} {sp.stability}" for k, sp in enumerate(points)]


def run_tls_sweep(args):
    values = np.linspace(args.start, args.stop, args.num)
    base = tls.TlsParams(args.h, args.gamma_x, args.alpha if args.alpha is not None else 0.0,
                         args.temperature)
    rows = tls.sweep_stationary(base, args.vary, values, args.space)
    write_csv(_out_prefix(args).with_suffix(".csv"),
              [args.vary, "branch", "z", "x", "y", "stability"],
              ((r.value, r.branch, r.z, r.x, r.y, r.stability) for r in rows))
    v, z = tls.stable_curve(rows)
    lines = [f"tls-sweep vary={args.vary} h={args.h} gamma_x={args.gamma_x} space={args.space}",
             f"stable branch: z({v[0]:g})={z[0]:.10g} z({v[-1]:g})={z[-1]:.10g}",
             f"branches={len({r.branch for r in rows})}"]
    if len(v) >= 3:
        lines.append(f"max-curvature point (kink candidate) at {args.vary}={tls.locate_kink(v, z):g}")
    return lines


def run_qs_ratio(args):
    runs = qs_ratio_run(args.alphas, args.tau, args.gamma, args.temperature, args.dt, args.sample_every)
    first = runs[args.alphas[0]]
    header = ["t", "s"] + [f"pi_pc_alpha_{a:g}" for a in args.alphas]
    cols = [first.times, first.s] + [runs[a].observables["pi_pc_ratio"] for a in args.alphas]
    write_csv(_out_prefix(args).with_suffix(".csv"), header, zip(*cols))
    return [f"qs-ratio tau={args.tau} gamma={args.gamma} T={args.temperature} dt={args.dt}"] + [
        f"alpha={a:g} final P_I/P_C={float(runs[a].observables['pi_pc_ratio'][-1]):.10g}" for a in args.alphas]


def run_sk_bench(args):
    prefix = _out_prefix(args)
    seeds = range(args.seed_base, args.seed_base + args.instances)
    partial = prefix.with_suffix(".partial.csv")
    partial.parent.mkdir(parents=True, exist_ok=True)
    res = sk_benchmark(args.n, seeds, args.alphas, args.taus, args.gammas, args.temperature,
                       args.dt, args.workers, partial)
    write_csv(prefix.with_suffix(".csv"), ["seed", "alpha", "tau", "gamma", "p_ground"], res.rows)
    write_csv(prefix.with_suffix(".aggregate.csv"), ["alpha", "tau", "gamma", "mean", "sem", "count"],
              res.aggregates)
    partial.unlink(missing_ok=True)
    lines = [f"sk-bench n={args.n} instances={args.instances} seed_base={args.seed_base} "
             f"T={args.temperature} dt={args.dt}"]
    for g in args.gammas:
        for tau in args.taus:
            a, m, se = best_alpha(res, float(g), float(tau))
            lines.append(f"gamma={g:g} tau={tau:g}: best alpha={a:g} mean={m:.6f} sem={se:.6f}")
    return lines


RUNNERS = {
    "tls-evolve": run_tls_evolve,
    "tls-stationary": run_tls_stationary,
    "tls-sweep": run_tls_sweep,
    "anneal": run_anneal,
    "quench": run_anneal,
    "qs-ratio": run_qs_ratio,
    "sk-bench": run_sk_bench,
    "instance-dump": run_instance_dump,
}


def main(argv=None) -> int:
    try:
        args = parse_config(argv)
    except (ConfigError, ValueError) as exc:
        print(f"qcmix: error: {exc}", file=sys.stderr)
        return 1
    try:
        lines = RUNNERS[args.subcommand](args)
        prefix = _out_prefix(args)
        write_json(prefix.with_suffix(".json"), _resolved(args))
        write_summary(prefix.with_suffix(".summary.txt"), lines)
    except ConfigError as exc:
        print(f"qcmix: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - surface any runtime failure as exit 2
        print(f"qcmix: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print("\n".join(lines))
    return 0


if __name__ == "__main__":
    sys.exit(main())
