"""Configuration-driven command line front end.

Subcommands: validate, solve, analyze, limit, wavecurve, compare, boundary,
relaxation.  All read one YAML config, write CSV results plus a JSON
manifest into the output directory, and exit 0 on success, 2 on
configuration or validation failures, 3 on solver failures, 4 on analysis
assertions.  Given the same config, CSV bodies are byte-identical across
runs.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analysis as an
from .bvp import (
    solve_boundary_diffusive,
    solve_riemann_diffusive,
    solve_riemann_relaxation,
)
from .config import RunConfig, load_config
from .errors import ConfigError, MissingFlux, SolverError, WavefanError
from .output import solution_header, solution_rows, write_csv, write_manifest
from .systems import validate_system
from .wavecurves import cone_check, lipschitz_probe, trace_wave_curve

log = logging.getLogger("wavefan")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_ASSERTION = 4


def _map_ordered(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _base_manifest(config: RunConfig, command: str) -> dict:
    return {
        "command": command,
        "config_hash": config.config_hash(),
        "config": config.raw,
        "outputs": [],
    }


def _solution_entry(sol):
    entry = {
        "epsilon": sol.epsilon,
        "nodes": sol.mesh.n_nodes,
        "newton_iterations": sol.newton.iterations,
        "residual_norm": sol.newton.residual_norm,
        "ball_excess": sol.ball_excess,
        "tv": an.total_variation(sol),
    }
    entry.update(sol.diagnostics)
    return entry


def _write_solutions(config, model, sols, out_dir, manifest, prefix="solution"):
    def render(args):
        idx, sol = args
        deco = an.decompose(model.system, model.diffusion, sol)
        return solution_rows(sol, deco.components)

    rendered = _map_ordered(render, list(enumerate(sols)), config.workers)
    for idx, (sol, rows) in enumerate(zip(sols, rendered)):
        fname = f"{prefix}_{idx:03d}.csv"
        header = solution_header(
            model.system.dimension, with_aux=sol.aux_states is not None
        )
        write_csv(os.path.join(out_dir, fname), header, rows)
        manifest["outputs"].append(fname)


def cmd_validate(config: RunConfig, out_dir: str) -> int:
    model = config.build_model()
    report = validate_system(
        model.system,
        model.diffusion,
        model.entropy_pairs,
        sample_count=5,
        seed=config.seed,
    )
    payload = _base_manifest(config, "validate")
    payload["checks"] = [
        {"name": c.name, "passed": c.passed, "margin": c.margin, "detail": c.detail}
        for c in report.checks
    ]
    payload["diagnostics"] = report.diagnostics
    payload["passed"] = report.passed
    write_manifest(os.path.join(out_dir, "validation.json"), payload)
    if not report.passed:
        failed = [c.name for c in report.checks if not c.passed]
        _emit_error(ConfigError(f"validation failed: {failed}"), EXIT_CONFIG)
        return EXIT_CONFIG
    return EXIT_OK


def _solve_sweep(config: RunConfig, model):
    return solve_riemann_diffusive(
        model.system,
        model.diffusion,
        config.data_left,
        config.data_right,
        config.schedule,
        config.mesh,
        newton_tol=config.newton_tol,
    )


def cmd_solve(config: RunConfig, out_dir: str) -> int:
    model = config.build_model()
    sols = _solve_sweep(config, model)
    manifest = _base_manifest(config, "solve")
    _write_solutions(config, model, sols, out_dir, manifest)
    manifest["per_epsilon"] = [_solution_entry(s) for s in sols]
    try:
        limit = an.extract_limit(model.system, model.diffusion, sols, model.entropy_pairs)
        manifest["jumps"] = limit.n_jumps
        manifest["plateaus"] = limit.plateaus
    except WavefanError as exc:
        manifest["limit_note"] = str(exc)
    write_manifest(os.path.join(out_dir, "manifest.json"), manifest)
    return EXIT_OK


def cmd_analyze(config: RunConfig, out_dir: str) -> int:
    model = config.build_model()
    system, diffusion = model.system, model.diffusion
    sols = _solve_sweep(config, model)
    manifest = _base_manifest(config, "analyze")
    manifest["per_epsilon"] = []
    toggles = config.analysis

    def analyze_one(args):
        idx, sol = args
        frames = an.profile_frames(system, diffusion, sol)
        result = {"frames": frames}
        if toggles.measures or toggles.interactions:
            measures = an.uncoupled_measures(system, diffusion, sol, frames)
            if toggles.measures:
                coeffs = an.component_coefficients(system, diffusion, sol, frames)
                measures = an.linearized_measures(
                    system, diffusion, sol, measures, frames, coeffs
                )
            result["measures"] = measures
        if toggles.interactions:
            result["interactions"] = an.interaction_coefficients(
                system, sol, result["measures"]
            )
        return result

    analyzed = _map_ordered(analyze_one, list(enumerate(sols)), config.workers)
    for idx, (sol, result) in enumerate(zip(sols, analyzed)):
        entry = _solution_entry(sol) if toggles.tv else {"epsilon": sol.epsilon}
        measures = result.get("measures")
        if toggles.measures and measures is not None:
            n = system.dimension
            header = ["y"]
            cols = [sol.mesh.nodes[:, None]]
            for i in range(n):
                header += [f"g_{i + 1}", f"phi_star_{i + 1}", f"phi_{i + 1}"]
                cols += [
                    measures.g[:, i : i + 1],
                    measures.phi_star[:, i : i + 1],
                    measures.phi[:, i : i + 1],
                ]
            fname = f"measures_{idx:03d}.csv"
            write_csv(os.path.join(out_dir, fname), header, np.concatenate(cols, axis=1))
            manifest["outputs"].append(fname)
            entry["sandwich_constant"] = measures.sandwich_constant
            entry["sup_deviation"] = measures.sup_deviation
            entry["rho"] = measures.rho
            entry["rho_clamped"] = measures.rho_clamped
        if toggles.interactions:
            inter = result["interactions"]
            n = system.dimension
            rows = []
            y = sol.mesh.nodes
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        for node, yval in enumerate(y):
                            rows.append(
                                (yval, i + 1, j + 1, k + 1, inter.values[i, j, k, node])
                            )
            fname = f"interactions_{idx:03d}.csv"
            write_csv(os.path.join(out_dir, fname), ["y", "i", "j", "k", "F"], rows)
            manifest["outputs"].append(fname)
            entry["interaction_sup"] = inter.sup_norms
        if toggles.entropy and system.flux is not None:
            entry["entropy_residuals"] = {
                (pair.name or f"pair{p}"): an.entropy_residual(
                    system, diffusion, pair, sol
                )[0]
                for p, pair in enumerate(model.entropy_pairs)
            }
        manifest["per_epsilon"].append(entry)
    if toggles.limit:
        try:
            limit = an.extract_limit(system, diffusion, sols, model.entropy_pairs)
            manifest["limit"] = _limit_payload(limit)
        except WavefanError as exc:
            manifest["limit_note"] = str(exc)
    write_manifest(os.path.join(out_dir, "manifest.json"), manifest)
    return EXIT_OK


def _limit_payload(limit):
    return {
        "gaps": limit.gaps,
        "plateaus": limit.plateaus,
        "flatness": limit.flatness,
        "jumps": limit.jumps,
        "speeds": limit.speeds,
        "rarefaction_flags": limit.rarefaction_flags,
        "rh_residuals": limit.rh_residuals,
        "tv": limit.tv,
        "tv_ratio": limit.tv_ratio,
        "cauchy_l1": limit.cauchy_l1,
        "alpha_hat_min": limit.alpha_hat_min,
        "alpha_orientation": limit.alpha_orientation,
        "entropy_residuals": limit.entropy_residuals,
        "n_jumps": limit.n_jumps,
    }


def cmd_limit(config: RunConfig, out_dir: str) -> int:
    model = config.build_model()
    sols = _solve_sweep(config, model)
    limit = an.extract_limit(model.system, model.diffusion, sols, model.entropy_pairs)
    manifest = _base_manifest(config, "limit")
    manifest["per_epsilon"] = [_solution_entry(s) for s in sols]
    manifest["limit"] = _limit_payload(limit)
    write_manifest(os.path.join(out_dir, "limit_report.json"), manifest)
    return EXIT_OK


def cmd_wavecurve(config: RunConfig, out_dir: str) -> int:
    model = config.build_model()
    wc = config.wavecurve
    base = config.data_left
    if base is None:
        base = model.system.reference_state
    curve = trace_wave_curve(
        model.system,
        model.diffusion,
        base,
        wc.family,
        wc.m_values,
        wc.epsilon,
        config.mesh,
        newton_tol=config.newton_tol,
        store_profiles=False,
    )
    n = model.system.dimension
    header = (
        ["m"]
        + [f"psi_{i + 1}" for i in range(n)]
        + [f"tangent_{i + 1}" for i in range(n)]
        + ["cone_margin", "epsilon", "newton_iterations"]
    )
    rows = []
    for i, m in enumerate(curve.m_values):
        rows.append(
            [m, *curve.states[i], *curve.tangents[i], curve.cone_margins[i],
             curve.epsilon, curve.newton_iterations[i]]
        )
    write_csv(os.path.join(out_dir, "wavecurve.csv"), header, rows)
    cone = cone_check(curve, wc.cone_c)
    manifest = _base_manifest(config, "wavecurve")
    manifest["outputs"].append("wavecurve.csv")
    manifest["cone"] = {
        "threshold": cone.threshold,
        "min_margin": cone.min_margin,
        "passed": cone.passed,
    }
    manifest["m_range"] = curve.m_range
    manifest["requested_range"] = curve.requested_range
    if wc.lipschitz:
        probe = lipschitz_probe(
            model.system,
            model.diffusion,
            wc.family,
            [base],
            wc.m_values,
            wc.epsilon,
            config.mesh,
            newton_tol=config.newton_tol,
        )
        manifest["lipschitz_constant"] = probe.constant
    write_manifest(os.path.join(out_dir, "wavecurve_report.json"), manifest)
    if not cone.passed:
        _emit_error(
            WavefanError(
                f"cone margin {cone.min_margin:.4f} below threshold {cone.threshold}"
            ),
            EXIT_ASSERTION,
        )
        return EXIT_ASSERTION
    return EXIT_OK


def cmd_compare(config: RunConfig, out_dir: str) -> int:
    model = config.build_model()
    if model.exact_riemann is None:
        raise ConfigError(f"model {model.name} ships no exact Riemann oracle")
    sols = _solve_sweep(config, model)
    fan = model.exact_riemann(config.data_left, config.data_right)
    rows = []
    for sol in sols:
        rows.append(
            (sol.epsilon, an.l1_to_oracle(sol, fan), an.linf_to_oracle(sol, fan))
        )
    write_csv(
        os.path.join(out_dir, "comparison.csv"),
        ["epsilon", "l1_error", "linf_error"],
        rows,
    )
    l1 = [r[1] for r in rows]
    manifest = _base_manifest(config, "compare")
    manifest["outputs"].append("comparison.csv")
    manifest["strictly_decreasing_l1"] = all(b < a for a, b in zip(l1, l1[1:]))
    manifest["per_epsilon"] = [_solution_entry(s) for s in sols]
    write_manifest(os.path.join(out_dir, "manifest.json"), manifest)
    return EXIT_OK


def cmd_boundary(config: RunConfig, out_dir: str) -> int:
    model = config.build_model()
    sols = solve_boundary_diffusive(
        model.system,
        model.diffusion,
        config.data_left,
        config.data_right,
        config.schedule,
        config.mesh,
        newton_tol=config.newton_tol,
    )
    manifest = _base_manifest(config, "boundary")
    _write_solutions(config, model, sols, out_dir, manifest)
    manifest["per_epsilon"] = [_solution_entry(s) for s in sols]
    manifest["boundary_index"] = sols[-1].boundary_index
    manifest["characteristic"] = sols[-1].characteristic
    write_manifest(os.path.join(out_dir, "manifest.json"), manifest)
    return EXIT_OK


def cmd_relaxation(config: RunConfig, out_dir: str) -> int:
    model = config.build_model()
    if model.system.flux is None:
        raise MissingFlux("relaxation needs a conservative model")
    sols = solve_riemann_relaxation(
        model.system,
        model.diffusion,
        config.relaxation_a,
        config.data_left,
        config.data_right,
        config.schedule,
        config.mesh,
        newton_tol=config.newton_tol,
    )
    manifest = _base_manifest(config, "relaxation")
    _write_solutions(config, model, sols, out_dir, manifest)
    manifest["per_epsilon"] = [_solution_entry(s) for s in sols]
    write_manifest(os.path.join(out_dir, "manifest.json"), manifest)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "analyze": cmd_analyze,
    "limit": cmd_limit,
    "wavecurve": cmd_wavecurve,
    "compare": cmd_compare,
    "boundary": cmd_boundary,
    "relaxation": cmd_relaxation,
}


def _emit_error(exc: Exception, code: int):
    payload = {
        "error": type(exc).__name__,
        "message": str(exc),
        "exit_code": code,
    }
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavefan",
        description="Self-similar regularizations of Riemann problems: "
        "solves, sweeps, wave measures, wave curves, oracle comparisons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument(
            "--log-level",
            default="WARNING",
            choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args.config)
        if args.workers is not None:
            config.workers = max(1, args.workers)
        out_dir = args.out or config.output
        os.makedirs(out_dir, exist_ok=True)
        return COMMANDS[args.command](config, out_dir)
    except ConfigError as exc:
        _emit_error(exc, EXIT_CONFIG)
        return EXIT_CONFIG
    except SolverError as exc:
        _emit_error(exc, EXIT_SOLVER)
        return EXIT_SOLVER
    except WavefanError as exc:
        _emit_error(exc, EXIT_ASSERTION)
        return EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
