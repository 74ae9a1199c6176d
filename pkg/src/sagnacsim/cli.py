"""Command-line front end: one subcommand per reproducible artifact.

Every run is deterministic for a fixed configuration (identical bytes out),
floats are printed with 6 significant digits, and ``--plot`` renders a PNG
next to the delimited output. Exit codes: 0 success, 1 numerical failure
(diagnostic JSON on stderr), 2 usage error.
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import cphase, plotting, states, tomo, witness
from .hilbert import CPHASE_REGISTER, single_qubit_state

DEFAULT_SHOTS = 10_000
DEFAULT_SEED = 42
SEED_ENV_VAR = "SAGNACSIM_SEED"

_SQRT2 = math.sqrt(2)
TARGET_STATES = {
    "zero": (1.0, 0.0),
    "one": (0.0, 1.0),
    "plus": (1 / _SQRT2, 1 / _SQRT2),
    "minus": (1 / _SQRT2, -1 / _SQRT2),
    "plus-i": (1 / _SQRT2, 1j / _SQRT2),
    "minus-i": (1 / _SQRT2, -1j / _SQRT2),
}


def target_state(name: str):
    alpha, beta = TARGET_STATES[name]
    return single_qubit_state(CPHASE_REGISTER[1], alpha, beta)


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, DEFAULT_SEED))


def _round6(obj):
    """Clamp every float to 6 significant digits, recursively."""
    if isinstance(obj, float):
        return float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {key: _round6(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round6(value) for value in obj]
    return obj


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _figure_path(args) -> str:
    if not args.out:
        raise UsageError("--plot needs --out to anchor the figure path")
    return str(Path(args.out).with_suffix(".png"))


class UsageError(ValueError):
    pass


def _witness_json(report) -> str:
    return json.dumps(_round6(json.loads(report.to_json()))) + "\n"


def _require_json(args, name):
    if args.format != "json":
        raise UsageError(f"{name} emits a nested report; only --format json is supported")


def cmd_dicke_witness(args):
    if args.benchmark:
        rows = witness.rows_from_benchmark()
    else:
        state = states.dicke_states().phased
        rows = witness.correlation_table(
            state, noise_p=args.noise, shots=args.shots, seed=args.seed
        )
    report = witness.structural_witness_dicke(rows)
    _require_json(args, "dicke-witness")
    _emit(_witness_json(report), args.out)
    if args.plot:
        plotting.plot_witness_vs_noise(report, args.noise, _figure_path(args))
    return 0


def cmd_dicke_table(args):
    state = states.dicke_states().phased
    rows = witness.correlation_table(
        state, noise_p=args.noise, shots=args.shots, seed=args.seed
    )
    if args.format == "csv":
        rounded = [
            witness.CorrelationRow(
                r.operator, r.qubits, r.settings,
                float(f"{r.value:.6g}"), float(f"{r.sigma:.6g}")
            )
            for r in rows
        ]
        _emit(witness.table_to_csv(rounded), args.out)
    else:
        payload = [
            {
                "operator": r.operator,
                "qubits": r.qubits,
                "settings": r.settings,
                "value": r.value,
                "sigma": r.sigma,
            }
            for r in rows
        ]
        _emit(json.dumps(_round6(payload)) + "\n", args.out)
    if args.plot:
        plotting.plot_correlation_table(rows, _figure_path(args))
    return 0


_WMULT_CAVEAT = (
    "the collective and expanded forms disagree by construction "
    "(-1 vs -3.375 on the ideal state); see README for the analysis"
)


def cmd_wmult(args):
    _require_json(args, "wmult")
    if args.benchmark:
        expanded = witness.wmult(
            pair_rows=witness.rows_from_benchmark(),
            four_body=witness.BENCHMARK_FOUR_BODY,
            form="expanded",
            normalized=args.normalized,
        )
        payload = {
            "expanded": json.loads(expanded.to_json()),
            "collective": None,
            "note": "collective form needs squared pair sums, unavailable from tables",
            "caveat": _WMULT_CAVEAT,
        }
        reports = [expanded]
    else:
        state = states.dicke_states().phased
        source = states.add_white_noise(state, args.noise) if args.noise else state
        collective = witness.wmult(state=source, form="collective")
        expanded = witness.wmult(state=source, form="expanded", normalized=args.normalized)
        payload = {
            "collective": json.loads(collective.to_json()),
            "expanded": json.loads(expanded.to_json()),
            "caveat": _WMULT_CAVEAT,
        }
        reports = [collective, expanded]
    _emit(json.dumps(_round6(payload)) + "\n", args.out)
    if args.plot:
        plotting.plot_wmult(reports, _figure_path(args))
    return 0


def cmd_cphase_truth(args):
    rows = cphase.truth_table(args.phi_r, args.phi_l)
    if args.format == "csv":
        lines = ["control,plate_phase,amp0_re,amp0_im,amp1_re,amp1_im,probability"]
        for row in rows:
            a0, a1 = row.target.amplitudes
            lines.append(
                f"{row.control},{row.plate_phase:.6g},"
                f"{a0.real:.6g},{a0.imag:.6g},{a1.real:.6g},{a1.imag:.6g},"
                f"{row.probability:.6g}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        payload = [
            {
                "control": row.control,
                "plate_phase": row.plate_phase,
                "target_amplitudes": [
                    [amp.real, amp.imag] for amp in row.target.amplitudes
                ],
                "probability": row.probability,
            }
            for row in rows
        ]
        _emit(json.dumps(_round6(payload)) + "\n", args.out)
    if args.plot:
        plotting.plot_truth_table(rows, _figure_path(args))
    return 0


def cmd_cphase_fringe(args):
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    phis = np.linspace(args.phi_start, args.phi_end, args.steps)
    points = cphase.fringe_scan(
        args.project, phis, args.shots, args.seed, noise_p=args.noise
    )
    if args.format == "csv":
        lines = ["phi,probability,counts,sigma"]
        for p in points:
            lines.append(f"{p.phi:.6g},{p.probability:.6g},{p.counts},{p.sigma:.6g}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        payload = [
            {"phi": p.phi, "probability": p.probability, "counts": p.counts,
             "sigma": p.sigma}
            for p in points
        ]
        _emit(json.dumps(_round6(payload)) + "\n", args.out)
    if args.plot:
        plotting.plot_fringe(points, _figure_path(args), args.shots)
    return 0


def cmd_tomo(args):
    _require_json(args, "tomo")
    if args.input:
        data = tomo.TomographyInput.from_json(Path(args.input).read_text())
    else:
        cfg = cphase.SagnacConfig(phi_r=args.phi_r, phi_l=args.phi_l)
        conditional, _ = cphase.project_control(cphase.sagnac_evolve(cfg), args.project)
        data = tomo.simulate_tomography(conditional, args.shots, args.seed)
        if args.save_counts:
            Path(args.save_counts).write_text(data.to_json(), encoding="utf-8")
    if args.method == "ml":
        result = tomo.ml_reconstruct(data)
    else:
        result = tomo.linear_reconstruct(data)
    if args.target:
        tomo.fidelity_report(result, target_state(args.target))
    _emit(json.dumps(_round6(json.loads(result.to_json()))) + "\n", args.out)
    if args.plot:
        plotting.plot_density_matrix(result, _figure_path(args))
    return 0


def cmd_circuit(args):
    """Apply a JSON-described element sequence to a named input state."""
    from . import elements
    from .hilbert import DICKE_REGISTER, basis_state
    from .states import PhaseParams, he_state, state_by_name

    config = json.loads(Path(args.config).read_text())
    source = config.get("input", "he")
    if isinstance(source, dict):
        register = CPHASE_REGISTER if source.get("register") == "cphase" else DICKE_REGISTER
        state = basis_state(register, source["basis"])
    elif source == "he" and ("gamma" in config or "delta" in config):
        state = he_state(PhaseParams(config.get("gamma", 0.0), config.get("delta", 0.0)))
    else:
        state = state_by_name(source)
    sequence = [
        elements.element_from_json(obj, state.register)
        for obj in config.get("elements", [])
    ]
    state, probability = elements.run_sequence(state, sequence)
    if args.format == "csv":
        lines = ["basis,amp_re,amp_im"]
        width = state.num_qubits
        for index, amp in enumerate(state.amplitudes):
            lines.append(f"{index:0{width}b},{amp.real:.6g},{amp.imag:.6g}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        interleaved = []
        for amp in state.amplitudes:
            interleaved.extend([amp.real, amp.imag])
        payload = {
            "register": [str(addr) for addr in state.register],
            "amplitudes": interleaved,
            "survival_probability": probability,
        }
        _emit(json.dumps(_round6(payload)) + "\n", args.out)
    return 0


_CONFIG_ALIASES = {"noise_p": "noise", "output": "out"}


def cmd_run(args):
    config = json.loads(Path(args.config).read_text())
    try:
        experiment = config.pop("experiment")
    except KeyError:
        raise UsageError("config file must name an 'experiment'") from None
    argv = [experiment]
    for key, value in config.items():
        key = _CONFIG_ALIASES.get(key, key)
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    return main(argv)


def _add_common(sub, shots_default=None):
    sub.add_argument("--seed", type=int, default=_default_seed(),
                     help=f"RNG seed (env {SEED_ENV_VAR} overrides the default)")
    sub.add_argument("--shots", type=int, default=shots_default,
                     help="samples per setting; omit for exact values"
                     if shots_default is None else "samples per setting")
    sub.add_argument("--out", help="output file (stdout if omitted)")
    sub.add_argument("--format", choices=("csv", "json"), default="json")
    sub.add_argument("--plot", action="store_true",
                     help="also render a PNG figure next to --out")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sagnacsim",
        description="Phased-Dicke-state witnessing and displaced-Sagnac "
                    "C-Phase gate simulation",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("dicke-witness", help="structural witness report")
    sub.add_argument("--noise", type=float, default=0.0, help="white-noise fraction p")
    sub.add_argument("--benchmark", action="store_true",
                     help="assemble from the stored benchtop dataset")
    _add_common(sub)
    sub.set_defaults(handler=cmd_dicke_witness)

    sub = subs.add_parser("dicke-table", help="18-row pair-correlation table")
    sub.add_argument("--noise", type=float, default=0.0)
    _add_common(sub)
    sub.set_defaults(handler=cmd_dicke_table, format="csv")

    sub = subs.add_parser("wmult", help="multipartite witness, both forms")
    sub.add_argument("--noise", type=float, default=0.0)
    sub.add_argument("--benchmark", action="store_true")
    sub.add_argument("--normalized", action="store_true",
                     help="divide pair sums by the number of pairs")
    _add_common(sub)
    sub.set_defaults(handler=cmd_wmult)

    sub = subs.add_parser("cphase-truth", help="gate truth table at given phases")
    sub.add_argument("--phi-r", type=float, required=True)
    sub.add_argument("--phi-l", type=float, required=True)
    _add_common(sub)
    sub.set_defaults(handler=cmd_cphase_truth, format="csv")

    sub = subs.add_parser("cphase-fringe", help="bright-port fringe scan")
    sub.add_argument("--project", type=int, choices=(0, 1), required=True)
    sub.add_argument("--phi-start", type=float, default=0.0)
    sub.add_argument("--phi-end", type=float, default=2 * math.pi)
    sub.add_argument("--steps", type=int, default=32)
    sub.add_argument("--noise", type=float, default=0.0)
    _add_common(sub, shots_default=DEFAULT_SHOTS)
    sub.set_defaults(handler=cmd_cphase_fringe, format="csv")

    sub = subs.add_parser("tomo", help="tomographic reconstruction of a "
                                       "conditional loop state")
    sub.add_argument("--input", help="counts JSON produced earlier (skips simulation)")
    sub.add_argument("--phi-r", type=float, default=math.pi)
    sub.add_argument("--phi-l", type=float, default=0.0)
    sub.add_argument("--project", type=int, choices=(0, 1), default=0)
    sub.add_argument("--target", choices=sorted(TARGET_STATES), default=None)
    sub.add_argument("--method", choices=("linear", "ml"), default="ml")
    sub.add_argument("--save-counts", help="also write the simulated counts JSON here")
    _add_common(sub, shots_default=DEFAULT_SHOTS)
    sub.set_defaults(handler=cmd_tomo)

    sub = subs.add_parser("circuit", help="apply a JSON element sequence to a "
                                          "named input state")
    sub.add_argument("--config", required=True,
                     help='JSON: {"input": "he", "elements": [{"kind": "HWP", '
                          '"angle_deg": 45, "on": "A.pol", '
                          '"when": {"qubit": "A.path", "is": 1}}, ...]}')
    sub.add_argument("--out")
    sub.add_argument("--format", choices=("csv", "json"), default="json")
    sub.set_defaults(handler=cmd_circuit)

    sub = subs.add_parser("run", help="run an experiment from a JSON config file")
    sub.add_argument("--config", required=True)
    sub.set_defaults(handler=cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        parser.exit(2, f"usage error: {exc}\n")
    except Exception as exc:  # numerical / IO failure: diagnostic JSON, exit 1
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
