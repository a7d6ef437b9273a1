"""Command-line surface: file-based states, one subcommand per analysis.

State files are JSON with explicit shape fields::

    {"n": 2, "gamma": [[...], ...], "d": [...], "partition": "AB"}

``gamma`` is row-major 2n x 2n, ``d`` (optional) defaults to zeros,
``partition`` (optional) labels each mode A or B and defaults to first
half / second half.  Floats are serialized at full round-trip precision.

Exit codes: 0 success, 1 malformed input or file, 2 physical-invariant
violation, 3 infeasible request.  Tables go to stdout, diagnostics to
stderr.  The environment variable CVGAUSS_SEED supplies the default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import channels, entanglement, fock, protocols, states
from .errors import InfeasibleError, PhysicalityError

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_UNPHYSICAL = 2
EXIT_INFEASIBLE = 3


def _default_seed() -> int:
    try:
        return int(os.environ.get("CVGAUSS_SEED", "0"))
    except ValueError:
        return 0


def load_state(path: str) -> "tuple[states.GaussianState, states.ModePartition]":
    """Read and validate a state file; returns the state and its partition."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    n = int(data["n"])
    gamma = np.array(data["gamma"], dtype=float)
    if gamma.shape != (2 * n, 2 * n):
        raise ValueError(f"gamma must be {2 * n}x{2 * n} for n={n}")
    disp = np.array(data.get("d", np.zeros(2 * n)), dtype=float)
    part_raw = data.get("partition")
    if part_raw is None:
        partition = states.ModePartition.from_counts(n - n // 2, n // 2) if n > 1 else None
    else:
        labels = tuple(part_raw) if isinstance(part_raw, (list, tuple)) else tuple(str(part_raw))
        partition = states.ModePartition(labels)
        if partition.n != n:
            raise ValueError("partition length does not match the mode count")
    state = states.GaussianState(gamma, disp)
    states.require_valid(state.cov)
    return state, partition


def save_state(path: str, state: states.GaussianState, partition=None) -> None:
    data = {"n": state.n, "gamma": state.cov.tolist(), "d": state.disp.tolist()}
    if partition is not None:
        data["partition"] = "".join(partition.labels)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


def load_matrix(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return np.array(data["gamma"] if isinstance(data, dict) else data, dtype=float)


def load_vector(path: str) -> np.ndarray:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            values.extend(float(tok) for tok in line.replace(",", " ").split())
    if not values:
        raise ValueError(f"no numbers found in {path}")
    return np.asarray(values)


def _partition_for(args, state, file_partition) -> states.ModePartition:
    if getattr(args, "partition", None):
        part = states.ModePartition.from_string(args.partition)
        if part.n != state.n:
            raise ValueError("partition length does not match the state")
        return part
    if file_partition is not None:
        return file_partition
    raise ValueError("a bipartition is required (single-mode state file without --partition)")


def cmd_validate(args) -> int:
    with open(args.state, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    gamma = np.array(data["gamma"], dtype=float)
    n = int(data["n"])
    if gamma.shape != (2 * n, 2 * n):
        raise ValueError(f"gamma must be {2 * n}x{2 * n} for n={n}")
    report = states.validate_covariance(gamma)
    print(f"valid\t{'yes' if report.valid else 'no'}")
    print(f"min_uncertainty_eigenvalue\t{report.min_uncertainty_eigenvalue:.6f}")
    print("symplectic_eigenvalues\t" + "\t".join(f"{v:.6f}" for v in report.symplectic_eigenvalues))
    return EXIT_OK if report.valid else EXIT_UNPHYSICAL


def cmd_negativity(args) -> int:
    state, file_part = load_state(args.state)
    part = _partition_for(args, state, file_part)
    value = entanglement.log_negativity_gaussian(state.cov, part)
    print(f"{value:.6f}")
    return EXIT_OK


def cmd_separability(args) -> int:
    state, file_part = load_state(args.state)
    part = _partition_for(args, state, file_part)
    report = entanglement.ppt_verdict(state.cov, part)
    print(f"verdict\t{report.verdict}")
    print(f"min_eigenvalue\t{report.min_eigenvalue:.6f}")
    print(f"conclusive\t{'yes' if report.conclusive else 'no'}")
    print(f"note\t{report.note}")
    if args.witness:
        ga = load_matrix(args.witness[0])
        gb = load_matrix(args.witness[1])
        ok = entanglement.separability_witness_verify(state.cov, ga, gb, part)
        print(f"witness_verified\t{'yes' if ok else 'no'}")
    return EXIT_OK


def cmd_schmidt(args) -> int:
    state, file_part = load_state(args.state)
    part = _partition_for(args, state, file_part)
    form = entanglement.schmidt_normal_form(state.cov, part)
    print("r\t" + "\t".join(f"{v:.6f}" for v in form.r))
    return EXIT_OK


def cmd_convert(args) -> int:
    if args.glocc:
        r, rp = load_vector(args.glocc[0]), load_vector(args.glocc[1])
        ok = entanglement.glocc_convertible(r, rp)
        print(f"glocc_convertible\t{'yes' if ok else 'no'}")
    else:
        a, ap = load_vector(args.locc[0]), load_vector(args.locc[1])
        ok = entanglement.locc_convertible_pure(a, ap)
        print(f"locc_convertible\t{'yes' if ok else 'no'}")
    return EXIT_OK


def cmd_channel_apply(args) -> int:
    state, file_part = load_state(args.state)
    if args.attenuation is not None:
        ch = channels.attenuation_channel(args.attenuation, state.n)
    else:
        with open(args.file, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        ch = channels.GaussianChannel(
            np.array(data["A"], dtype=float),
            np.array(data["G"], dtype=float),
            np.array(data["shift"], dtype=float) if "shift" in data else None,
        )
    out = channels.apply_channel(state, ch)
    save_state(args.out, out, file_part if out.n == state.n else None)
    print(f"wrote\t{args.out}")
    return EXIT_OK


def cmd_measure(args) -> int:
    state, _ = load_state(args.state)
    if args.vacuum:
        out, prob = channels.vacuum_project(state, args.mode)
        save_state(args.out, out)
        print(f"success_probability\t{prob:.6f}")
    else:
        out = channels.homodyne_condition(state, args.mode, args.homodyne)
        save_state(args.out, out)
    print(f"wrote\t{args.out}")
    return EXIT_OK


def cmd_distill_nogo(args) -> int:
    state, _ = load_state(args.state)
    if state.n != 2:
        raise ValueError("the protocol template acts on two-mode states")
    res = protocols.no_go_monte_carlo(state.cov, args.trials, args.seed)
    print(f"trials\t{res.trials}")
    print(f"baseline_negativity\t{res.baseline:.6f}")
    print(f"max_gain\t{res.max_gain:.6e}")
    print(f"median_gain\t{res.median_gain:.6e}")
    return EXIT_OK


def cmd_distill_pipeline(args) -> int:
    records = protocols.distill_pipeline(args.r, args.V, args.iters, args.cutoff)
    print("iteration\tlog_negativity\tp_success\tp_cumulative\tgaussianity_distance\ttail_mass")
    for rec in records:
        print(
            f"{rec.step}\t{rec.log_negativity:.6f}\t{rec.success_probability:.6f}"
            f"\t{rec.cumulative_probability:.6f}\t{rec.gaussianity_distance:.6f}\t{rec.tail_mass:.6e}"
        )
    if args.plot:
        from .plotting import plot_distillation

        plot_distillation(records, args.plot)
        print(f"figure\t{args.plot}", file=sys.stderr)
    return EXIT_OK


def cmd_passive_max(args) -> int:
    state, _ = load_state(args.state)
    print(f"{protocols.passive_max_entanglement(state.cov):.6f}")
    return EXIT_OK


def cmd_passive_optimize(args) -> int:
    state, _ = load_state(args.state)
    bound = protocols.passive_max_entanglement(state.cov)
    res = protocols.passive_optimizer(state.cov, restarts=args.restarts, seed=args.seed)
    print(f"bound\t{bound:.6f}")
    print(f"achieved\t{res.achieved:.6f}")
    print(f"mode_pair\t{res.mode_pair[0]},{res.mode_pair[1]}")
    return EXIT_OK


def cmd_demo_continuity(args) -> int:
    ks = []
    k = 10
    while k <= args.kmax:
        ks.append(k)
        k *= 10
    if not ks:
        raise ValueError("kmax must be at least 10")
    points = [fock.continuity_demo(k) for k in ks]
    print("k\ttrace_distance\tentanglement\tmean_energy")
    for pt in points:
        print(f"{pt.k}\t{pt.trace_distance:.6f}\t{pt.entanglement:.6f}\t{pt.mean_energy:.6f}")
    if args.plot:
        from .plotting import plot_continuity

        plot_continuity(points, args.plot)
        print(f"figure\t{args.plot}", file=sys.stderr)
    return EXIT_OK


def cmd_make(args) -> int:
    if args.kind == "vacuum":
        state = states.vacuum_state(args.modes)
    elif args.kind == "tms":
        state = states.two_mode_squeezed_state(args.r)
    elif args.kind == "thermal":
        state = states.thermal_state([args.nu] * args.modes)
    elif args.kind == "squeezed":
        state = states.squeezed_vacuum_state(args.r)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown kind {args.kind}")
    partition = None
    if args.partition:
        partition = states.ModePartition.from_string(args.partition)
        if partition.n != state.n:
            raise ValueError("partition length does not match the produced state")
    elif state.n == 2:
        partition = states.ModePartition.from_string("AB")
    save_state(args.out, state, partition)
    print(f"wrote\t{args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvgauss",
        description="Phase-space toolkit for Gaussian states: validation, entanglement, channels, measurements, distillation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a state file against the uncertainty relation")
    p.add_argument("state")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("negativity", help="logarithmic negativity across the bipartition")
    p.add_argument("state")
    p.add_argument("--partition", help="per-mode labels, e.g. AB or AABB")
    p.set_defaults(func=cmd_negativity)

    p = sub.add_parser("separability", help="momentum-reversal verdict, optional witness check")
    p.add_argument("state")
    p.add_argument("--partition")
    p.add_argument("--witness", nargs=2, metavar=("A_FILE", "B_FILE"))
    p.set_defaults(func=cmd_separability)

    p = sub.add_parser("schmidt", help="squeezing vector of a pure state")
    p.add_argument("state")
    p.add_argument("--partition")
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("convert", help="convertibility verdicts for squeezing / Schmidt vectors")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--glocc", nargs=2, metavar=("R_FILE", "RP_FILE"))
    group.add_argument("--locc", nargs=2, metavar=("A_FILE", "AP_FILE"))
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("channel", help="channel operations")
    chsub = p.add_subparsers(dest="channel_command", required=True)
    pc = chsub.add_parser("apply", help="apply a channel and write the output state")
    pc.add_argument("state")
    group = pc.add_mutually_exclusive_group(required=True)
    group.add_argument("--attenuation", type=float, metavar="ETA")
    group.add_argument("--file", metavar="CHANNEL_JSON")
    pc.add_argument("--out", required=True)
    pc.set_defaults(func=cmd_channel_apply)

    p = sub.add_parser("measure", help="condition on a single-mode measurement")
    p.add_argument("state")
    p.add_argument("--mode", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--homodyne", choices=["X", "P"])
    group.add_argument("--vacuum", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("distill", help="distillation protocols")
    dsub = p.add_subparsers(dest="distill_command", required=True)
    pn = dsub.add_parser("nogo", help="Monte Carlo search for a Gaussian-protocol gain")
    pn.add_argument("state")
    pn.add_argument("--trials", type=int, default=1000)
    pn.add_argument("--seed", type=int, default=_default_seed())
    pn.set_defaults(func=cmd_distill_nogo)
    pp = dsub.add_parser("pipeline", help="click heralding plus mixing rounds")
    pp.add_argument("--r", type=float, required=True)
    pp.add_argument("--V", type=float, required=True)
    pp.add_argument("--iters", type=int, default=2)
    pp.add_argument("--cutoff", type=int, default=12)
    pp.add_argument("--plot", metavar="FIG_FILE", help="also render the trace to this image file")
    pp.set_defaults(func=cmd_distill_pipeline)

    p = sub.add_parser("passive", help="entanglement generation with passive optics")
    psub = p.add_subparsers(dest="passive_command", required=True)
    pm = psub.add_parser("max", help="two-smallest-eigenvalues bound")
    pm.add_argument("state")
    pm.set_defaults(func=cmd_passive_max)
    po = psub.add_parser("optimize", help="search the passive group for the bound")
    po.add_argument("state")
    po.add_argument("--restarts", type=int, default=6)
    po.add_argument("--seed", type=int, default=_default_seed())
    po.set_defaults(func=cmd_passive_optimize)

    p = sub.add_parser("demo", help="worked demonstrations")
    dsub = p.add_subparsers(dest="demo_command", required=True)
    pc = dsub.add_parser("continuity", help="entropy discontinuity sequence, exact values")
    pc.add_argument("--kmax", type=int, default=10 ** 6)
    pc.add_argument("--plot", metavar="FIG_FILE")
    pc.set_defaults(func=cmd_demo_continuity)

    p = sub.add_parser("make", help="write a canonical state file")
    p.add_argument("kind", choices=["vacuum", "tms", "thermal", "squeezed"])
    p.add_argument("--modes", type=int, default=2)
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--nu", type=float, default=2.0)
    p.add_argument("--partition")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse reserves 2 for usage errors; that slot means
        # physical-invariant violation here, so remap
        return EXIT_OK if exc.code in (0, None) else EXIT_BAD_INPUT
    try:
        return args.func(args)
    except PhysicalityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
