"""Command-line front end.

Subcommands: ``outcomes``, ``full``, ``map``, ``stirap``, ``networks``.
Exit codes: 0 success, 2 invalid configuration, 3 empty acceptance,
4 file I/O problems.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .errors import EmptyAcceptanceError, MultiphotonError, NonUnitaryError, StepTooCoarseError
from .hilbert import StateVector, fidelity
from .optics import NETWORKS, ScatteringMatrix
from .protocol import (
    ProtocolConfig,
    enumerate_outcomes,
    monte_carlo_repeat,
    outcome_report,
    photonic_singlet,
    run_full_protocol,
    run_mapping,
    singlet_reference,
    w_state_reference,
)
from .stirap import LAMBDA_BASIS, LambdaParams, NonAdiabaticWarning, stirap_single_photon

EXIT_OK, EXIT_INVALID, EXIT_EMPTY_ACCEPT, EXIT_IO = 0, 2, 3, 4


class ConfigError(Exception):
    pass


def _dump(obj) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise IOError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _merge_config(args: argparse.Namespace, defaults: dict) -> dict:
    """Defaults < config file < explicit flags."""
    merged = dict(defaults)
    if getattr(args, "config", None):
        data = _read_json(args.config)
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(data) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _network(spec: str, n: int) -> ScatteringMatrix | str:
    if spec in NETWORKS:
        return spec
    data = _read_json(spec)
    if isinstance(data, dict):
        data = data.get("matrix", data)
    return ScatteringMatrix.from_config(data, name=Path(spec).name)


def _protocol_config(opts: dict) -> ProtocolConfig:
    return ProtocolConfig(
        n_sites=int(opts["n"]),
        network=_network(str(opts["network"]), int(opts["n"])),
        accept=opts["accept"],
        seed=int(opts["seed"]),
        max_attempts=int(opts["max_attempts"]),
        trials=int(opts["trials"]),
    )


PROTOCOL_DEFAULTS = {"n": 2, "network": "bs5050", "accept": "all", "seed": 0,
                     "max_attempts": 10_000, "trials": 1, "out": None}


def cmd_outcomes(args) -> int:
    opts = _merge_config(args, PROTOCOL_DEFAULTS)
    cfg = _protocol_config(opts)
    table = enumerate_outcomes(cfg)
    mc = None
    if cfg.trials > 1:
        mc = monte_carlo_repeat(cfg, table=table)
    print(f"{'pattern':<10}{'probability':>22}  accepted")
    for o in table.outcomes:
        print(f"{str(o.pattern):<10}{o.probability:>22.17g}  {'yes' if cfg.accepts(o.pattern) else 'no'}")
    print(f"{'failure':<10}{table.failure_probability:>22.17g}")
    if mc is not None:
        print(f"monte carlo: {mc.trials} trials, mean attempts {mc.mean_attempts:.6g} "
              f"(exact 1/p = {1 / mc.acceptance_probability:.6g})")
    _write(opts["out"], _dump(outcome_report(cfg, table, mc)))
    return EXIT_OK


def cmd_full(args) -> int:
    opts = _merge_config(args, {**PROTOCOL_DEFAULTS, "seed": None})
    if opts["seed"] is None:
        raise ConfigError("--seed is required for `full`")
    cfg = _protocol_config(opts)
    final, log = run_full_protocol(cfg)
    report = {
        "config": cfg.describe(),
        "attempts": log.attempts,
        "accepted_pattern": log.accepted_pattern,
        "per_attempt_patterns": log.per_attempt_patterns,
        "state": final.to_dict(),
    }
    if cfg.n_sites == 2:
        report["photonic_singlet_fidelity"] = fidelity(final, photonic_singlet())
    print(f"accepted pattern {log.accepted_pattern} after {log.attempts} attempt(s)")
    if "photonic_singlet_fidelity" in report:
        print(f"fidelity to photonic singlet: {report['photonic_singlet_fidelity']:.17g}")
    _write(opts["out"], _dump(report))
    _write(getattr(args, "state_out", None), _dump(final.to_dict()))
    return EXIT_OK


def cmd_map(args) -> int:
    opts = _merge_config(args, {"state": None, "preset": None, "out": None})
    if (opts["state"] is None) == (opts["preset"] is None):
        raise ConfigError("give exactly one of --state or --preset")
    if opts["state"] is not None:
        atomic = StateVector.from_dict(_read_json(opts["state"]))
    elif opts["preset"] == "singlet":
        atomic = singlet_reference()
    elif opts["preset"].startswith("w"):
        atomic = w_state_reference(int(opts["preset"][1:] or 3))
    else:
        raise ConfigError(f"unknown preset {opts['preset']!r}; use singlet or w<n>")
    mapped = run_mapping(atomic)
    for label in mapped.labels():
        a = mapped.amplitude(label)
        print(f"{a.real:+.17g}{a.imag:+.17g}j  {label}")
    _write(opts["out"], _dump(mapped.to_dict()))
    return EXIT_OK


STIRAP_DEFAULTS = {"omega_max": 10.0, "g": 1.0, "t": 200.0, "samples": None, "shape": "sin2",
                   "kappa": 0.0, "gamma": 0.0, "out": None}


def cmd_stirap(args) -> int:
    opts = _merge_config(args, STIRAP_DEFAULTS)
    g = float(opts["g"])
    decay = None
    if opts["kappa"] or opts["gamma"]:
        decay = LambdaParams(g, float(opts["kappa"]), float(opts["gamma"]))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonAdiabaticWarning)
        traj = stirap_single_photon(float(opts["omega_max"]), g, float(opts["t"]),
                                    opts["samples"], decay, opts["shape"])
    for w in caught:
        print(f"warning: {w.message}; fidelity reported as-is", file=sys.stderr)
    fid = traj.final_population(LAMBDA_BASIS[2])
    print(f"final fidelity to |u,1>: {fid:.17g}")
    print(f"max |f> population:      {traj.max_f_population:.17g}")
    print(f"final norm:              {traj.norms[-1]:.17g}")
    if opts["out"]:
        try:
            traj.to_csv(opts["out"])
        except OSError as exc:
            raise IOError(f"cannot write {opts['out']}: {exc}") from exc
    return EXIT_OK


def cmd_networks(args) -> int:
    for name, (_, text) in NETWORKS.items():
        print(f"{name:<10}{text}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multiphoton",
                                     description="Entangled multiphoton generation from atom-cavity systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def protocol_flags(p):
        p.add_argument("--n", type=int, help="number of atom-cavity sites")
        p.add_argument("--network", help="built-in network name or path to a matrix JSON file")
        p.add_argument("--accept", help="all, singlet, one-plus, or comma-separated patterns like +-,-+")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--max-attempts", dest="max_attempts", type=int)

    p = sub.add_parser("outcomes", help="enumerate initialisation outcomes")
    protocol_flags(p)
    p.set_defaults(func=cmd_outcomes)

    p = sub.add_parser("full", help="initialise by repeat-until-success, then map to photons")
    protocol_flags(p)
    p.add_argument("--state-out", dest="state_out", help="also write the final state here")
    p.set_defaults(func=cmd_full)

    p = sub.add_parser("map", help="map an atomic state onto photons")
    p.add_argument("--state", help="serialized atomic StateVector (JSON)")
    p.add_argument("--preset", help="singlet or w<n>")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("stirap", help="pulse-level three-level STIRAP run")
    p.add_argument("--omega-max", dest="omega_max", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--t", type=float, help="pulse duration t_total")
    p.add_argument("--samples", type=int)
    p.add_argument("--shape")
    p.add_argument("--kappa", type=float)
    p.add_argument("--gamma", type=float)
    p.set_defaults(func=cmd_stirap)

    p = sub.add_parser("networks", help="list built-in networks")
    p.set_defaults(func=cmd_networks)

    for name, sp in sub.choices.items():
        if name != "networks":
            sp.add_argument("--out", help="output path")
            sp.add_argument("--config", help="JSON config file; flags take precedence")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyAcceptanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY_ACCEPT
    except NonUnitaryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, StepTooCoarseError, MultiphotonError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
