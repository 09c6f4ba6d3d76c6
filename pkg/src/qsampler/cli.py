"""``qsampler`` command line: spectrum, truncate, simulate, compare, verify.

Every command is deterministic given its flags; output goes to ``--out`` or
stdout.  Exit status is 0 on success, 1 on a failed verification or a guard
violation, 2 on a usage error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import baseline, protocol, reports, spectral, truncation, verify
from .combinatorics import ProblemInstance

DEFAULT_EPSILON = "0.1"
DEFAULT_SAMPLES = 100_000

SPECTRUM_COLUMNS = ("i", "dim", "lambda_B", "lambda_chi", "q_i", "chi_mass_i")
PLAN_COLUMNS = ("n", "k", "epsilon", "g", "t", "tail_q", "tail_chi", "fidelity",
                "qubits_per_party", "paper_g_bound")


def _epsilon(text: str) -> Fraction:
    try:
        eps = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 < eps < 1:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1), got {text}")
    return eps


def _seed(text: str) -> int:
    seed = int(text, 0)
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return seed


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _instance_pair(text: str) -> tuple[int, int]:
    try:
        n, k = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"instance must look like N,K, got {text!r}")
    if n < 1 or k < 1:
        raise argparse.ArgumentTypeError(f"need n >= 1 and k >= 1, got {text}")
    return n, k


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsampler", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True, fmt="json"):
        if instance:
            p.add_argument("--n", type=_positive, required=True, help="ground set size")
            p.add_argument("--k", type=_positive, required=True, help="subset size")
        p.add_argument("--format", choices=("json", "csv"), default=fmt)
        p.add_argument("--out", type=Path, help="output file (default: stdout)")

    p = sub.add_parser("spectrum", help="eigenspace table with numeric cross-check")
    common(p)
    p.add_argument("--matrix-out", type=Path, help="also dump the 0/1 matrix as CSV")

    p = sub.add_parser("truncate", help="truncation plan for a target error")
    common(p)
    p.add_argument("--epsilon", type=_epsilon, default=_epsilon(DEFAULT_EPSILON))

    p = sub.add_parser("simulate", help="sample the truncated state's measurement")
    common(p)
    p.add_argument("--epsilon", type=_epsilon, default=_epsilon(DEFAULT_EPSILON))
    p.add_argument("--g", type=_nonneg, help="force the eigenspace cutoff instead of planning from epsilon")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--samples", type=_nonneg, default=DEFAULT_SAMPLES)
    p.add_argument("--summary-out", type=Path,
                   help="summary JSON path (default: <out>.summary.json, or stdout without --out)")

    p = sub.add_parser("compare", help="quantum vs naive classical resource table")
    common(p, instance=False, fmt="csv")
    p.add_argument("--instance", type=_instance_pair, action="append", default=[],
                   metavar="N,K", help="repeatable; rows keep input order")
    p.add_argument("--epsilon", type=_epsilon, default=_epsilon(DEFAULT_EPSILON))
    p.add_argument("--jobs", type=_positive, default=1)

    p = sub.add_parser("verify", help="run the desk-scale self-checks")
    common(p, instance=False)
    p.add_argument("--max-n", type=_positive, default=10)
    p.add_argument("--max-k", type=_positive, default=3)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--samples", type=_positive, default=DEFAULT_SAMPLES)
    p.add_argument("--inject-sign-flip", action="store_true",
                   help="negate the E_1 eigenvalues before checking (mutation test)")
    return parser


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def cmd_spectrum(args) -> int:
    inst = ProblemInstance(args.n, args.k)
    system = spectral.closed_form_spectrum(inst)
    if system.degenerate:
        report = {"n": inst.n, "k": inst.k, "degenerate": True,
                  "notice": f"2k > n: no disjoint pairs, the state matrix is zero ({inst.N}x{inst.N})",
                  "spaces": []}
        _emit(reports.dumps(report) if args.format == "json" else
              reports.rows_to_csv(SPECTRUM_COLUMNS, []), args.out)
        return 0
    masses = truncation.projection_masses(inst)
    rows = []
    for row, s, m in zip(spectral.eigensystem_report(system), system.spaces, masses):
        rows.append({**row, "lambda_B": s.lambda_b, "q_i": m.q, "chi_mass_i": m.chi_mass})
    report = {"n": inst.n, "k": inst.k, "N": inst.N, "D": inst.D, "degenerate": False, "spaces": rows}
    if inst.N <= 1024:
        method = "jacobi" if inst.N <= 256 else "lapack"
        check = verify.check_spectrum_oracle(inst, system, method=method)
        report["oracle"] = {"method": method, "max_eigenvalue_diff": check.residual,
                            "passed": check.passed, "detail": check.detail}
    if args.matrix_out is not None:
        args.matrix_out.write_text(reports.matrix_to_csv(spectral.build_chi_matrix(inst)))
    if args.format == "json":
        _emit(reports.dumps(report), args.out)
    else:
        _emit(reports.rows_to_csv(SPECTRUM_COLUMNS, rows), args.out)
    return 0 if report.get("oracle", {}).get("passed", True) else 1


def _plan_report(plan: truncation.TruncationPlan) -> dict:
    report = plan.as_dict()
    inst = plan.inst
    if inst.N <= min(spectral.guard_n(), 1024):
        system = spectral.orthonormal_eigenbasis(inst)
        chi = spectral.build_chi_matrix(inst, normalized=True)
        psi = truncation.truncate_state(chi, plan, system, renormalize=True)
        check = truncation.verify_fidelity_identity(psi, chi)
        report.update(measured_fidelity=check.fidelity, dist_sq=check.dist_sq,
                      identity_residual=check.identity_residual)
    return report


def cmd_truncate(args) -> int:
    inst = ProblemInstance(args.n, args.k)
    plan = truncation.plan_truncation(inst, args.epsilon)
    report = _plan_report(plan)
    if args.format == "json":
        _emit(reports.dumps(report), args.out)
    else:
        _emit(reports.rows_to_csv(PLAN_COLUMNS, [report]), args.out)
    return 0


def cmd_simulate(args) -> int:
    inst = ProblemInstance(args.n, args.k)
    if inst.degenerate:
        raise ValueError(f"2k > n: no disjoint pairs for n={inst.n}, k={inst.k}")
    if args.g is None:
        plan = truncation.plan_truncation(inst, args.epsilon)
    else:
        plan = truncation.plan_for_cutoff(inst, args.g, args.epsilon)
    system = spectral.orthonormal_eigenbasis(inst)
    chi = spectral.build_chi_matrix(inst, normalized=True)
    psi = truncation.truncate_state(chi, plan, system, renormalize=True)
    exact = protocol.induced_distribution(chi)
    trunc = protocol.induced_distribution(psi)
    draws = protocol.sample(trunc, args.seed, args.samples)
    summary = {
        "n": inst.n,
        "k": inst.k,
        "epsilon": plan.epsilon,
        "g": plan.g,
        "t": plan.t,
        "seed": args.seed,
        "samples": args.samples,
        "fidelity": plan.predicted_fidelity,
        "analytic_tvd": protocol.tvd(exact, trunc),
        "analytic_violation_mass": protocol.disjointness_violation_mass(trunc),
        "entangled_qubits": protocol.resource_report(plan).entangled_qubits,
    }
    if inst.N <= 256:
        exact_trunc = protocol.exact_truncated_distribution(inst, plan.g)
        summary["analytic_tvd_exact"] = protocol.tvd(protocol.exact_chi_distribution(inst), exact_trunc)
        summary["analytic_violation_mass_exact"] = protocol.disjointness_violation_mass(exact_trunc)
    if args.samples:
        emp = protocol.empirical_distribution(inst, draws)
        summary["empirical_tvd_to_truncated"] = protocol.tvd(trunc, emp)
        summary["empirical_tvd_to_exact"] = protocol.tvd(exact, emp)
        summary["empirical_violation_mass"] = protocol.disjointness_violation_mass(emp)
    text = reports.dumps(summary)
    if args.out is not None:
        args.out.write_text(reports.samples_to_csv(inst, draws))
        summary_path = args.summary_out or args.out.with_name(args.out.name + ".summary.json")
        summary_path.write_text(text)
    elif args.summary_out is not None:
        args.summary_out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _gap_row(job):
    n, k, eps = job
    return baseline.gap_report(ProblemInstance(n, k), eps)


def cmd_compare(args) -> int:
    jobs = [(n, k, args.epsilon) for n, k in args.instance]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_gap_row, jobs))
    else:
        rows = [_gap_row(job) for job in jobs]
    if args.format == "csv":
        _emit(reports.rows_to_csv(baseline.GAP_COLUMNS, rows), args.out)
    else:
        _emit(reports.dumps({"note": "classical columns are a naive upper-bound protocol",
                             "rows": rows}), args.out)
    return 0


def cmd_verify(args) -> int:
    results = verify.run_all(max_n=args.max_n, max_k=args.max_k, seed=args.seed,
                             samples=args.samples, inject_sign_flip=args.inject_sign_flip)
    rows = [r.as_dict() for r in results]
    if args.format == "json":
        _emit(reports.dumps(rows), args.out)
    else:
        _emit(reports.rows_to_csv(("name", "passed", "residual", "detail"), rows), args.out)
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "spectrum": cmd_spectrum,
    "truncate": cmd_truncate,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, MemoryError) as exc:
        print(f"qsampler {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
