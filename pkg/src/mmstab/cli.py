"""Command-line front end.

Subcommands parse a problem file, run the requested analysis, and emit
a structured text report (or JSON with --json). Reports embed the
tolerance configuration in effect so runs are auditable, and the output
is deterministic byte-for-byte given the input file, flags, and seed.

Exit status contract:
    0  analysis completed
    2  parse, domain, or numerical failure
    3  a hypothesis required by the requested analysis does not hold
    4  a theorem check failed numerically (internal error)

D-stability wording: a fired clause or a Lyapunov certificate is a
proof; probe output is sampling evidence and is labeled as such.
"""

import argparse
import csv
import json
import sys

import numpy as np

from . import flow as flowlib
from . import homotopy as homolib
from .errors import (
    DomainError,
    HypothesisNotMet,
    MMStabError,
    TheoryViolationError,
)
from .flow import FlowState
from .linalg import DEFAULT_EIG_TOL, format_complex, spectrum
from .mmatrix import DEFAULT_RANK_TOL, build
from .perturbation import assemble
from .pmatrix import MAX_MINOR_DIM, principal_minors
from .problemfile import counterexample_problem, parse
from .stability import (
    MARGIN_RTOL,
    Verdict,
    check_criteria,
    classify,
    corollary_clauses,
    d_stability_probe,
    lyapunov_diagonal_search,
)

#: expected spectrum of the built-in instance, four-decimal precision
COUNTEREXAMPLE_SPECTRUM = (
    -0.0093 + 0.9949j,
    -0.0093 - 0.9949j,
    1.1377 + 0.0j,
    1.1649 + 0.2223j,
    1.1649 - 0.2223j,
    1.3460 + 0.0j,
)
#: absolute tolerance for the built-in regression comparison
COUNTEREXAMPLE_TOL = 1e-3
#: individual minors are listed in text output only up to this size
MINOR_LISTING_DIM = 8
#: and included in JSON output up to this size
MINOR_JSON_DIM = 12


def _g(x):
    return f"{float(x):.12g}"


def _vec(v):
    return "[" + ", ".join(_g(x) for x in v) + "]"


def _jc(z):
    return {"re": float(z.real), "im": float(z.imag)}


def _eig_tol(args):
    return DEFAULT_EIG_TOL if args.eig_tol is None else args.eig_tol


def _rank_tol(args):
    return DEFAULT_RANK_TOL if args.rank_tol is None else args.rank_tol


def _tolerance_section(args):
    if args.margin is None:
        margin_line = f"margin = relative ({MARGIN_RTOL:g} * |M|_F)"
        margin_doc = {"policy": "relative", "rtol": MARGIN_RTOL}
    else:
        margin_line = f"margin = {_g(args.margin)} (absolute)"
        margin_doc = {"policy": "absolute", "value": float(args.margin)}
    lines = [
        f"eig_tol = {_g(_eig_tol(args))}",
        f"rank_tol = {_g(_rank_tol(args))}",
        margin_line,
    ]
    doc = {
        "eig_tol": float(_eig_tol(args)),
        "rank_tol": float(_rank_tol(args)),
        "margin": margin_doc,
    }
    return ("tolerances", lines), doc


def _problem_section(pf, source):
    blocks = [k for k in ("v", "w", "C", "K") if getattr(pf, k) is not None]
    lines = [f"source = {source}", f"n = {pf.n}"]
    if pf.name:
        lines.append(f"name = {pf.name}")
    lines.append("blocks = " + (", ".join(blocks) if blocks else "none"))
    doc = {"source": str(source), "n": pf.n, "name": pf.name, "blocks": blocks}
    return ("problem", lines), doc


def _base_section(base):
    lines = [
        f"rho(H) = {_g(base.rho)}",
        f"irreducible = {base.irreducible}",
        f"geometric multiplicity of 0 = {base.geo_mult_zero}",
        f"algebraic multiplicity of 0 = {base.alg_mult_zero}",
    ]
    doc = {
        "rho": float(base.rho),
        "irreducible": base.irreducible,
        "geo_mult_zero": base.geo_mult_zero,
        "alg_mult_zero": base.alg_mult_zero,
        "z_left": None,
        "z_right": None,
    }
    if base.z_left is not None:
        lines.append(f"z_left = {_vec(base.z_left)}")
        lines.append(f"z_right = {_vec(base.z_right)}")
        doc["z_left"] = [float(x) for x in base.z_left]
        doc["z_right"] = [float(x) for x in base.z_right]
    return ("base", lines), doc


def _system_section(system):
    if system.nzp is None:
        nzp_line = "nonzero projections = undefined (kernel is not one-dimensional)"
    else:
        nzp_line = f"nonzero projections = {system.nzp}"
    wv = float(system.w @ system.v)
    lines = [
        nzp_line,
        f"w.v = {_g(wv)}",
        f"symmetric base = {system.symmetric_base}",
    ]
    doc = {
        "nzp": system.nzp,
        "w_dot_v": wv,
        "symmetric_base": system.symmetric_base,
        "alpha": None if system.alpha is None else float(system.alpha),
        "tau": None if system.tau is None else float(system.tau),
    }
    if system.alpha is not None:
        lines.append(f"alignment alpha = {_g(system.alpha)}")
    if system.tau is not None:
        lines.append(f"spectral gap tau = {_g(system.tau)}")
    return ("system", lines), doc


def _classification_section(report, title="classification"):
    lines = [
        f"verdict = {report.verdict.value}",
        f"min Re = {_g(report.min_real_part)} (witness {format_complex(report.witness)})",
        f"margin = {_g(report.margin)}",
        "eigenvalues:",
    ]
    lines += ["  " + format_complex(z) for z in report.eigenvalues]
    doc = {
        "verdict": report.verdict.value,
        "min_real_part": float(report.min_real_part),
        "witness": _jc(report.witness),
        "margin": float(report.margin),
        "eigenvalues": [_jc(z) for z in report.eigenvalues],
    }
    return (title, lines), doc


def _clauses_block(report, proves):
    if report.clauses_fired:
        lines = [f"fired: {cl}" for cl in report.clauses_fired]
        lines.append(f"a fired clause proves {proves} when the projections are nonzero")
    else:
        lines = ["fired: none"]
    doc = {
        "fired": [
            {"clause": cl.clause, "evidence": {k: v for k, v in cl.evidence.items()}}
            for cl in report.clauses_fired
        ]
    }
    return lines, doc


def _minor_section(subject, label, guard=False):
    # analyze treats an oversized matrix as a skipped section; the
    # dedicated pminors subcommand lets the size error propagate.
    n = subject.shape[0]
    if guard and n > MAX_MINOR_DIM:
        lines = [f"skipped: n = {n} exceeds the enumeration guard ({MAX_MINOR_DIM})"]
        return ("minors", lines), {"skipped": f"n > {MAX_MINOR_DIM}"}
    mr = principal_minors(subject)
    worst = mr.worst_subset()
    lines = [
        f"matrix = {label}",
        f"classification = {mr.classification.value}",
        f"minors computed = {len(mr.minors)}",
        f"min minor = {_g(mr.min_minor)} at subset {worst}",
        f"tolerance = {_g(mr.tol)}",
    ]
    doc = {
        "matrix": label,
        "classification": mr.classification.value,
        "count": len(mr.minors),
        "min_minor": float(mr.min_minor),
        "worst_subset": list(worst),
        "tol": float(mr.tol),
    }
    if n <= MINOR_LISTING_DIM:
        lines.append("minors:")
        lines += [
            f"  {subset}: {_g(val)}" for subset, val in mr.minors.items()
        ]
    if n <= MINOR_JSON_DIM:
        doc["minors"] = {
            ",".join(map(str, subset)): float(val) for subset, val in mr.minors.items()
        }
    return ("minors", lines), doc


def _require_vectors(pf, what):
    if pf.v is None or pf.w is None:
        raise DomainError(f"{what} needs both v and w blocks in the problem file")


def _load_system(pf, args):
    base = build(pf.H, rank_tol=_rank_tol(args))
    return base, assemble(base, pf.v, pf.w)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _analyze_report(pf, args, source):
    _require_vectors(pf, "analyze")
    base, system = _load_system(pf, args)
    sections = []
    doc = {}

    sec, d = _problem_section(pf, source)
    sections.append(sec)
    doc["problem"] = d
    sec, d = _base_section(base)
    sections.append(sec)
    doc["base"] = d
    sec, d = _system_section(system)
    sections.append(sec)
    doc["system"] = d

    class_report = classify(system.B, margin=args.margin)
    sec, d = _classification_section(class_report)
    sections.append(sec)
    doc["classification"] = d

    # A kernel of dimension > 1 leaves the projection condition undefined
    # and every criterion inapplicable; the run is a hypothesis-unmet
    # skip (exit 3), not a partial report.
    crit = check_criteria(system, k_matrix=pf.K, margin=args.margin)
    lines, d = _clauses_block(crit, "strict positive stability")
    if system.nzp is False:
        lines.append("projection condition fails: fired clauses are not conclusive")
    sections.append(("criteria", lines))
    doc["criteria"] = d

    coro = corollary_clauses(system, margin=args.margin)
    lines, d = _clauses_block(coro, "D-stability")
    if system.nzp is False:
        lines.append("projection condition fails: fired clauses are not conclusive")
    sections.append(("corollary (D-stability proofs)", lines))
    doc["corollary"] = d

    cert = lyapunov_diagonal_search(system.B)
    lines = []
    d = {"certificate": None}
    if cert is None:
        lines.append("certificate (proof): none found (proves nothing)")
    else:
        lines.append(
            f"certificate (proof): diagonal D = {_vec(cert)} makes B^T D + D B positive definite"
        )
        d["certificate"] = [float(x) for x in cert]
    probe = d_stability_probe(
        system.B, n_samples=args.samples, seed=args.seed, margin=args.margin
    )
    lines += [
        "probe (sampling evidence, not a proof):",
        f"  samples = {probe['samples_tested']}, seed = {args.seed}, "
        f"evaluations = {probe['evaluations']}",
        f"  worst min Re over sampled D = {_g(probe['worst_min_real_part'])}",
        f"  worst diagonal = {_vec(probe['worst_diagonal'])}",
        f"  destabilizing diagonal found = {probe['counterexample_found']}",
    ]
    d["probe"] = {
        "samples": probe["samples_tested"],
        "seed": args.seed,
        "evaluations": probe["evaluations"],
        "worst_min_real_part": probe["worst_min_real_part"],
        "worst_diagonal": [float(x) for x in probe["worst_diagonal"]],
        "counterexample_found": probe["counterexample_found"],
    }
    if cert is not None and probe["counterexample_found"]:
        raise TheoryViolationError(
            "a Lyapunov certificate and a destabilizing diagonal cannot coexist",
            diagnostics={
                "certificate": [float(x) for x in cert],
                "worst_diagonal": [float(x) for x in probe["worst_diagonal"]],
                "worst_min_real_part": probe["worst_min_real_part"],
            },
        )
    sections.append(("d-stability evidence", lines))
    doc["d_stability"] = d

    sec, d = _minor_section(system.B, "B = A + v w^T", guard=True)
    sections.append(sec)
    doc["minors"] = d

    sec, d = _tolerance_section(args)
    sections.append(sec)
    doc["tolerances"] = d
    return sections, doc, base, system, class_report


def _cmd_analyze(args):
    pf = parse(args.file)
    sections, doc, _, _, _ = _analyze_report(pf, args, source=args.file)
    return sections, doc


def _cmd_counterexample(args):
    pf = counterexample_problem()
    sections, doc, base, system, report = _analyze_report(pf, args, source="builtin")

    spec = spectrum(system.B, tol=_eig_tol(args))
    ok_spectrum = spec.multiset_match(COUNTEREXAMPLE_SPECTRUM, COUNTEREXAMPLE_TOL)
    ok_rho = abs(base.rho - 1.0) <= COUNTEREXAMPLE_TOL
    ok_verdict = report.verdict is Verdict.UNSTABLE
    if not (ok_spectrum and ok_rho and ok_verdict):
        raise TheoryViolationError(
            "built-in instance no longer reproduces its reference spectrum",
            diagnostics={
                "expected": [format_complex(z) for z in COUNTEREXAMPLE_SPECTRUM],
                "computed": [format_complex(z) for z in spec],
                "rho": float(base.rho),
                "verdict": report.verdict.value,
                "tol": COUNTEREXAMPLE_TOL,
            },
        )
    lines = [
        f"spectrum matches the expected six eigenvalues within {COUNTEREXAMPLE_TOL:g}",
        f"rho(H) = 1 within {COUNTEREXAMPLE_TOL:g}",
        "verdict = Unstable, as expected",
    ]
    sections.append(("regression", lines))
    doc["regression"] = {
        "expected": [_jc(z) for z in COUNTEREXAMPLE_SPECTRUM],
        "tol": COUNTEREXAMPLE_TOL,
        "passed": True,
    }
    return sections, doc


def _cmd_spectrum(args):
    pf = parse(args.file)
    target = args.of
    if target is None:
        target = "B" if (pf.v is not None and pf.w is not None) else "H"
    if target == "H":
        m, label = pf.H, "H"
    elif target == "A":
        m, label = build(pf.H, rank_tol=_rank_tol(args)).A, "A = rho(H) I - H"
    else:
        _require_vectors(pf, "spectrum of B")
        _, system = _load_system(pf, args)
        m, label = system.B, "B = A + v w^T"
    s = spectrum(m, tol=_eig_tol(args))
    report = classify(m, margin=args.margin)

    sections = []
    doc = {}
    sec, d = _problem_section(pf, args.file)
    sections.append(sec)
    doc["problem"] = d
    lines = [f"matrix = {label}", "eigenvalues:"]
    lines += ["  " + format_complex(z) for z in s]
    lines += [
        f"min Re = {_g(s.min_real_part)}",
        f"max Re = {_g(s.max_real_part)}",
        f"spectral radius = {_g(s.spectral_radius)}",
        f"verdict = {report.verdict.value}",
    ]
    sections.append(("spectrum", lines))
    doc["spectrum"] = {
        "matrix": label,
        "eigenvalues": [_jc(z) for z in s],
        "min_real_part": float(s.min_real_part),
        "max_real_part": float(s.max_real_part),
        "spectral_radius": float(s.spectral_radius),
        "verdict": report.verdict.value,
    }
    sec, d = _tolerance_section(args)
    sections.append(sec)
    doc["tolerances"] = d
    return sections, doc


def _cmd_pminors(args):
    pf = parse(args.file)
    if pf.v is not None and pf.w is not None:
        _, system = _load_system(pf, args)
        subject, label = system.B, "B = A + v w^T"
    else:
        subject, label = pf.H, "H"

    sections = []
    doc = {}
    sec, d = _problem_section(pf, args.file)
    sections.append(sec)
    doc["problem"] = d
    sec, d = _minor_section(subject, label)
    sections.append(sec)
    doc["minors"] = d
    sec, d = _tolerance_section(args)
    sections.append(sec)
    doc["tolerances"] = d
    return sections, doc


def _cmd_dstab(args):
    pf = parse(args.file)
    _require_vectors(pf, "dstab")
    _, system = _load_system(pf, args)
    b = system.B

    cert = lyapunov_diagonal_search(b)
    probe = d_stability_probe(
        b, n_samples=args.samples, seed=args.seed, margin=args.margin
    )
    if cert is not None and probe["counterexample_found"]:
        raise TheoryViolationError(
            "a Lyapunov certificate and a destabilizing diagonal cannot coexist",
            diagnostics={
                "certificate": [float(x) for x in cert],
                "worst_diagonal": [float(x) for x in probe["worst_diagonal"]],
                "worst_min_real_part": probe["worst_min_real_part"],
            },
        )

    sections = []
    doc = {}
    sec, d = _problem_section(pf, args.file)
    sections.append(sec)
    doc["problem"] = d

    lines = []
    if cert is None:
        lines.append("certificate (proof): none found (proves nothing)")
        cert_doc = None
    else:
        lines.append(
            f"certificate (proof): diagonal D = {_vec(cert)} makes "
            "B^T D + D B positive definite; B is D-stable"
        )
        cert_doc = [float(x) for x in cert]
    sections.append(("lyapunov", lines))
    doc["lyapunov"] = {"certificate": cert_doc}

    lines = [
        f"samples = {probe['samples_tested']}, seed = {args.seed}, "
        f"evaluations = {probe['evaluations']}",
        f"worst min Re over sampled D = {_g(probe['worst_min_real_part'])}",
        f"worst diagonal = {_vec(probe['worst_diagonal'])}",
        f"destabilizing diagonal found = {probe['counterexample_found']}",
        "probe output is sampling evidence, not a proof",
    ]
    sections.append(("probe", lines))
    doc["probe"] = {
        "samples": probe["samples_tested"],
        "seed": args.seed,
        "evaluations": probe["evaluations"],
        "worst_min_real_part": probe["worst_min_real_part"],
        "worst_diagonal": [float(x) for x in probe["worst_diagonal"]],
        "counterexample_found": probe["counterexample_found"],
        "margin": probe["margin"],
    }
    sec, d = _tolerance_section(args)
    sections.append(sec)
    doc["tolerances"] = d
    return sections, doc


def _cmd_homotopy(args):
    pf = parse(args.file)
    _require_vectors(pf, "homotopy")
    _, system = _load_system(pf, args)
    tr = homolib.trace(system, args.tmax, steps=args.steps)

    sections = []
    doc = {}
    sec, d = _problem_section(pf, args.file)
    sections.append(sec)
    doc["problem"] = d

    lines = [
        f"t in [0, {_g(args.tmax)}], {args.steps} intervals",
        f"min Re at t = 0: {_g(tr.min_real_parts[0])}",
        f"min Re at t = {_g(args.tmax)}: {_g(tr.min_real_parts[-1])}",
    ]
    if tr.crossings:
        lines.append("imaginary-axis crossings (complex witness):")
        lines += [
            f"  t = {_g(c.t)}, eigenvalue = +-{_g(c.b)}i" for c in tr.crossings
        ]
    else:
        lines.append("imaginary-axis crossings (complex witness): none")
    sections.append(("trace", lines))
    doc["trace"] = {
        "t_max": float(args.tmax),
        "steps": args.steps,
        "min_real_start": float(tr.min_real_parts[0]),
        "min_real_end": float(tr.min_real_parts[-1]),
        "crossings": [{"t": float(c.t), "b": float(c.b)} for c in tr.crossings],
    }

    lines = []
    d = {}
    try:
        t0 = homolib.small_t_stability(system, steps=args.steps)
        lines.append(f"stability persists for 0 < t < {_g(t0)}")
        d["stable_until"] = float(t0)
    except HypothesisNotMet as exc:
        lines.append(f"small-t window skipped: {exc}")
        d["skipped"] = str(exc)
    try:
        lower, upper = homolib.crossing_bounds(system)
        lines.append(
            f"crossing frequency window at t = 1: [{_g(lower)}, {_g(upper)}] "
            "(upper scales with t, lower does not)"
        )
        d["bounds"] = {"lower": float(lower), "upper": float(upper)}
    except HypothesisNotMet as exc:
        lines.append(f"frequency window skipped: {exc}")
        d.setdefault("skipped_bounds", str(exc))
    t1 = homolib.large_t_probe(system, args.tmax, steps=args.steps)
    if t1 is None:
        lines.append(f"unstable at t = {_g(args.tmax)}")
        d["stable_beyond"] = None
    else:
        lines.append(f"stable from t = {_g(t1)} through t = {_g(args.tmax)}")
        d["stable_beyond"] = float(t1)
    sections.append(("stability windows", lines))
    doc["windows"] = d

    if args.csv:
        _write_csv(
            args.csv,
            ["t", "index", "re", "im", "min_real_part"],
            tr.csv_rows(),
        )
        sections.append(("csv", [f"path data written to {args.csv}"]))
        doc["csv"] = str(args.csv)

    sec, d = _tolerance_section(args)
    sections.append(sec)
    doc["tolerances"] = d
    return sections, doc


def _cmd_flow(args):
    pf = parse(args.file)
    n = pf.n
    if pf.C is not None:
        c, c_source = pf.C, "C block"
    elif args.c_file:
        c, c_source = parse(args.c_file).H, args.c_file
    else:
        c, c_source = np.eye(n), "identity"
    z0 = np.ones(n) / np.sqrt(n)
    traj = flowlib.integrate(
        FlowState(z=z0, lam=0.0), pf.H, c, dt=args.dt, max_steps=args.steps
    )
    final = traj.final_state

    sections = []
    doc = {}
    sec, d = _problem_section(pf, args.file)
    sections.append(sec)
    doc["problem"] = d

    lines = [
        f"C = {c_source}",
        f"dt = {_g(args.dt)}, step budget = {args.steps}",
        f"start: z = {_vec(z0)}, lambda = 0",
        f"steps taken = {len(traj) - 1}",
        f"converged = {traj.converged}",
        f"final lambda = {_g(final.lam)}",
        f"final z = {_vec(final.z)}",
        f"eigenpair residual |H z - lambda z| = {_g(traj.residual)}",
        f"max norm drift before renormalization = {_g(traj.max_drift)}",
    ]
    sections.append(("flow", lines))
    doc["flow"] = {
        "c_source": c_source,
        "dt": float(args.dt),
        "step_budget": args.steps,
        "steps_taken": len(traj) - 1,
        "converged": traj.converged,
        "final_lambda": float(final.lam),
        "final_z": [float(x) for x in final.z],
        "residual": float(traj.residual),
        "max_drift": float(traj.max_drift),
    }

    lines = []
    d = {}
    if traj.converged:
        reduced = flowlib.reduced_stability_matrix(final.z, final.lam, pf.H, c)
        s = spectrum(reduced, tol=_eig_tol(args))
        if not flowlib.equilibrium_stability_equivalence(final.z, final.lam, pf.H, c):
            raise TheoryViolationError(
                "reduced-matrix spectrum disagrees with the tangent linearization",
                diagnostics={
                    "lambda": float(final.lam),
                    "reduced_min_real": float(s.min_real_part),
                },
            )
        stable = s.min_real_part > 0.0
        lines += [
            f"reached the eigenpair lambda = {_g(final.lam)}",
            f"reduced matrix C (lambda I - H + z z^T) min Re = {_g(s.min_real_part)}",
            "equilibrium is locally asymptotically stable"
            if stable
            else "equilibrium is not asymptotically stable",
            "tangent linearization cross-check passed",
        ]
        d = {
            "lambda": float(final.lam),
            "reduced_min_real_part": float(s.min_real_part),
            "asymptotically_stable": bool(stable),
        }
    else:
        lines.append("not at an equilibrium (no classification)")
        d = {"skipped": "trajectory did not converge"}
    sections.append(("equilibrium", lines))
    doc["equilibrium"] = d

    if args.csv:
        header = ["t"] + [f"z{i}" for i in range(n)] + ["lambda", "residual"]
        _write_csv(args.csv, header, traj.csv_rows())
        sections.append(("csv", [f"trajectory written to {args.csv}"]))
        doc["csv"] = str(args.csv)

    sec, d = _tolerance_section(args)
    sections.append(sec)
    doc["tolerances"] = d
    return sections, doc


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mmstab",
        description="Stability analysis of rank-one updates of singular M-matrices.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json", action="store_true", help="emit a JSON report instead of text"
    )
    common.add_argument(
        "--eig-tol",
        type=float,
        default=None,
        help="eigenvalue convergence tolerance (default: module setting)",
    )
    common.add_argument(
        "--margin",
        type=float,
        default=None,
        help="absolute stability margin (default: relative to |M|_F)",
    )
    common.add_argument(
        "--rank-tol",
        type=float,
        default=None,
        help="relative rank tolerance for the kernel (default: module setting)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "analyze",
        parents=[common],
        help="full pipeline: build, projections, classify, criteria, minors",
    )
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=100, help="probe sample count")
    p.add_argument("--seed", type=int, default=0, help="probe RNG seed")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser(
        "spectrum", parents=[common], help="eigenvalues of H, A, or B"
    )
    p.add_argument("file")
    p.add_argument(
        "--of",
        choices=["H", "A", "B"],
        default=None,
        help="which matrix (default: B when v and w are present, else H)",
    )
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser(
        "pminors",
        parents=[common],
        help="principal minors of B (or of H when no update is given)",
    )
    p.add_argument("file")
    p.set_defaults(handler=_cmd_pminors)

    p = sub.add_parser(
        "dstab", parents=[common], help="Lyapunov certificate search plus random probe"
    )
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=1000, help="probe sample count")
    p.add_argument("--seed", type=int, default=0, help="probe RNG seed")
    p.set_defaults(handler=_cmd_dstab)

    p = sub.add_parser(
        "homotopy",
        parents=[common],
        help="eigenvalue paths of A + t v w^T with crossing detection",
    )
    p.add_argument("file")
    p.add_argument("--tmax", type=float, default=1.0, help="right end of the t range")
    p.add_argument("--steps", type=int, default=400, help="grid intervals")
    p.add_argument("--csv", default=None, help="write the sampled paths to a CSV file")
    p.set_defaults(handler=_cmd_homotopy)

    p = sub.add_parser(
        "flow",
        parents=[common],
        help="integrate the eigenvector flow and classify the equilibrium",
    )
    p.add_argument("file")
    p.add_argument(
        "--C-file",
        dest="c_file",
        default=None,
        help="problem file whose H block is used as the conditioner C",
    )
    p.add_argument("--dt", type=float, default=0.01, help="RK4 step size")
    p.add_argument("--steps", type=int, default=100_000, help="step budget")
    p.add_argument("--csv", default=None, help="write the trajectory to a CSV file")
    p.set_defaults(handler=_cmd_flow)

    p = sub.add_parser(
        "counterexample",
        parents=[common],
        help="analyze the built-in unstable instance and assert its spectrum",
    )
    p.add_argument("--samples", type=int, default=100, help="probe sample count")
    p.add_argument("--seed", type=int, default=0, help="probe RNG seed")
    p.set_defaults(handler=_cmd_counterexample)

    return parser


def _render(sections):
    out = []
    for title, lines in sections:
        out.append(f"[{title}]")
        out.extend("  " + ln for ln in lines)
        out.append("")
    return "\n".join(out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        sections, doc = args.handler(args)
    except TheoryViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except HypothesisNotMet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except MMStabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(_render(sections), end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
