"""Command-line entry point: presets, config-driven runs, CSV/JSON artifacts.

Every run writes the requested data files plus a manifest.json recording all
resolved parameters (including derived couplings, rho and the time-rescale
factor), so each artifact can be re-created without external context.
Re-running the same preset or config produces byte-identical outputs.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .evolution import (
    compare,
    complete_basis_finals,
    one_spin_finals,
    simulator_trace,
    symmetric_state_two_spin,
    trace,
    two_spin_finals,
)
from .matching import (
    MatchingError,
    NewtonProblem,
    SingularDenominatorError,
    approx_three_atom_match,
    match_four_atom,
    match_six_atom,
    match_two_atom,
    solve_three_atom_newton,
)
from .numerics import StateVector, eig_hermitian
from .rydberg_models import (
    SimulatorSystem,
    four_atom_system,
    six_atom_system,
    system_from_json_obj,
    system_to_json_obj,
    three_atom_system,
    two_atom_system,
)
from .target_models import (
    SpinTruncation,
    TargetCouplings,
    analytic_one_spin,
    build_chain_h,
    build_h1t,
    build_h2t,
    perturbative_one_spin,
)
from .trotter import apply_circuit, sample_shots, trotter_step_h2r

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

MODES = ("spectrum", "match", "evolve", "compare", "trotter")

CSV_DIGITS = 12


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending field."""


@dataclass
class ExperimentConfig:
    mode: str
    payload: dict
    out_dir: Path
    seed: int | None = None
    preset: str | None = None


_PRESETS: dict[str, dict] = {
    "fig3-top": {
        "mode": "compare",
        "description": "one spin, U=1 X=0.5 target vs two-atom array "
        "(Omega=-0.5, Delta=-0.5, V0=64|Omega|=32)",
        "payload": {
            "target": {"kind": "one-spin", "U": 1.0, "X": 0.5},
            "simulator": {"kind": "two-atom", "omega": -0.5, "delta": -0.5, "v0": 32.0},
            "initial": "m=1",
            "times": {"start": 0.0, "stop": 10.0, "num": 1001},
        },
    },
    "fig3-bottom": {
        "mode": "compare",
        "description": "one spin, U=1 X=1.5 target vs two-atom array "
        "(Omega=-1.5, Delta=-0.5, V0=64|Omega|=96)",
        "payload": {
            "target": {"kind": "one-spin", "U": 1.0, "X": 1.5},
            "simulator": {"kind": "two-atom", "omega": -1.5, "delta": -0.5, "v0": 96.0},
            "initial": "m=1",
            "times": {"start": 0.0, "stop": 10.0, "num": 1001},
        },
    },
    "fig4": {
        "mode": "compare",
        "description": "one spin, U=0.064 X=0.067 target vs three-atom array "
        "(Omega=1, Delta=15, Delta0=0, V0=30)",
        "payload": {
            "target": {"kind": "one-spin", "U": 0.064, "X": 0.067},
            "simulator": {
                "kind": "three-atom",
                "omega": 1.0,
                "delta": 15.0,
                "delta0": 0.0,
                "v0": 30.0,
            },
            "initial": "m=1",
            "times": {"start": 0.0, "stop": 100.0, "num": 1001},
        },
    },
    "fig7-top": {
        "mode": "compare",
        "description": "two spins, U=1 X=1.2 Y=0.2 target vs four-atom ladder "
        "(Omega=-1.2, Delta=-0.6, V0=64, V1=0.2) with ideal V2=-0.2 override",
        "payload": {
            "target": {"kind": "two-spin", "U": 1.0, "X": 1.2, "Y": 0.2},
            "simulator": {
                "kind": "four-atom",
                "omega": -1.2,
                "delta": -0.6,
                "v0": 64.0,
                "v1": 0.2,
                "v2_override": -0.2,
            },
            "initial": "00",
            "times": {"start": 0.0, "stop": 10.0, "num": 1001},
        },
    },
    "fig7-bottom": {
        "mode": "compare",
        "description": "two spins, U=1 X=1.2 Y=0.2 target vs four-atom ladder "
        "(Omega=-1.2, Delta=-0.6, V0=64, V1=0.2) with the geometric V2=0.13",
        "payload": {
            "target": {"kind": "two-spin", "U": 1.0, "X": 1.2, "Y": 0.2},
            "simulator": {
                "kind": "four-atom",
                "omega": -1.2,
                "delta": -0.6,
                "v0": 64.0,
                "v1": 0.2,
            },
            "initial": "00",
            "times": {"start": 0.0, "stop": 10.0, "num": 1001},
        },
    },
    "fig8": {
        "mode": "compare",
        "description": "two spins, U=1 X=1.2 Y=0.2 target vs six-atom ladder "
        "(Omega=1, Delta=15, V0=30, rho=0.326) with time rescale K=0.05464",
        "payload": {
            "target": {"kind": "two-spin", "U": 1.0, "X": 1.2, "Y": 0.2},
            "simulator": {
                "kind": "six-atom",
                "omega": 1.0,
                "delta": 15.0,
                "v0": 30.0,
                "rho": 0.326,
            },
            "initial": "00",
            "times": {"start": 0.0, "stop": 5.464, "num": 1001},
            "sim_times": {"start": 0.0, "stop": 100.0, "num": 1001},
            "rescale_k": 0.05464,
        },
    },
    "fig10": {
        "mode": "trotter",
        "description": "Trotterized two-atom evolution (Omega=-1.5, Delta=-0.5, "
        "V0=10, dt=0.1=1/V0) vs exact, sampled with 1000 shots per time",
        "payload": {
            "omega": -1.5,
            "delta": -0.5,
            "v0": 10.0,
            "dt": 0.1,
            "t_max": 3.0,
            "shots": 1000,
        },
        "seed": 2718,
    },
}


def presets() -> list[str]:
    """Names of the built-in figure-reproduction presets."""
    return list(_PRESETS)


def preset_description(name: str) -> str:
    return _PRESETS[name]["description"]


def preset_config(name: str, out_dir="out", seed: int | None = None) -> ExperimentConfig:
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(_PRESETS)}")
    entry = _PRESETS[name]
    return ExperimentConfig(
        mode=entry["mode"],
        payload=json.loads(json.dumps(entry["payload"])),
        out_dir=Path(out_dir),
        seed=seed if seed is not None else entry.get("seed"),
        preset=name,
    )


def _require(obj: dict, key: str, kinds, ctx: str):
    if key not in obj:
        raise ConfigError(f"missing field {ctx}.{key}")
    value = obj[key]
    if kinds is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"field {ctx}.{key} must be a number, got {value!r}")
        return float(value)
    if kinds is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"field {ctx}.{key} must be an integer, got {value!r}")
        return value
    if not isinstance(value, kinds):
        raise ConfigError(f"field {ctx}.{key} has the wrong type: {value!r}")
    return value


def _time_grid(obj: dict, ctx: str) -> np.ndarray:
    start = _require(obj, "start", float, ctx)
    stop = _require(obj, "stop", float, ctx)
    num = _require(obj, "num", int, ctx)
    if num < 2 or stop <= start:
        raise ConfigError(f"field {ctx} must satisfy stop > start and num >= 2")
    return np.linspace(start, stop, num)


def _build_target(spec: dict, ctx: str = "target"):
    """Return (hamiltonian, initial-state lookup, finals, resolved params)."""
    kind = _require(spec, "kind", str, ctx)
    if kind == "one-spin":
        c = TargetCouplings(u=_require(spec, "U", float, ctx), x=_require(spec, "X", float, ctx))
        h = build_h1t(c)
        initials = {f"m={m}": StateVector.basis(3, i) for i, m in enumerate((1, 0, -1))}
        return h, initials, one_spin_finals(), {"U": c.u, "X": c.x}
    if kind == "two-spin":
        c = TargetCouplings(
            u=_require(spec, "U", float, ctx),
            x=_require(spec, "X", float, ctx),
            y=_require(spec, "Y", float, ctx),
        )
        h = build_h2t(c)
        initials = {"00": StateVector.basis(9, 4), "S": symmetric_state_two_spin()}
        return h, initials, two_spin_finals(), {"U": c.u, "X": c.x, "Y": c.y}
    if kind == "chain":
        c = TargetCouplings(
            u=_require(spec, "U", float, ctx),
            x=_require(spec, "X", float, ctx),
            y=_require(spec, "Y", float, ctx),
            boundary=spec.get("boundary", "open"),
        )
        trunc = SpinTruncation(_require(spec, "m_max", int, ctx))
        n_links = _require(spec, "n_links", int, ctx)
        h = build_chain_h(c, trunc, n_links)
        resolved = {
            "U": c.u,
            "X": c.x,
            "Y": c.y,
            "m_max": trunc.m_max,
            "n_links": n_links,
            "boundary": c.boundary,
        }
        return h, {}, [], resolved
    raise ConfigError(f"field {ctx}.kind has unknown value {kind!r}")


def _build_simulator(spec: dict, ctx: str = "simulator"):
    """Return (SimulatorSystem or (geom, params), resolved params dict)."""
    kind = _require(spec, "kind", str, ctx)
    if kind == "two-atom":
        system = two_atom_system(
            _require(spec, "omega", float, ctx),
            _require(spec, "delta", float, ctx),
            _require(spec, "v0", float, ctx),
        )
    elif kind == "three-atom":
        system = three_atom_system(
            _require(spec, "omega", float, ctx),
            _require(spec, "delta", float, ctx),
            _require(spec, "delta0", float, ctx),
            _require(spec, "v0", float, ctx),
        )
    elif kind == "four-atom":
        v0 = _require(spec, "v0", float, ctx)
        if "rho" in spec:
            rho = _require(spec, "rho", float, ctx)
        else:
            v1 = _require(spec, "v1", float, ctx)
            rho = (v1 / v0) ** (1.0 / 6.0)
        override = spec.get("v2_override")
        system = four_atom_system(
            _require(spec, "omega", float, ctx),
            _require(spec, "delta", float, ctx),
            v0,
            rho,
            v2_override=None if override is None else float(override),
        )
    elif kind == "six-atom":
        system = six_atom_system(
            _require(spec, "omega", float, ctx),
            _require(spec, "delta", float, ctx),
            _require(spec, "v0", float, ctx),
            _require(spec, "rho", float, ctx),
            delta0=float(spec.get("delta0", 0.0)),
            include_middle_pair=bool(spec.get("include_middle_pair", True)),
        )
    elif kind == "custom":
        geom, params = system_from_json_obj(spec)
        system = SimulatorSystem(
            geometry=geom, params=params, spin_map=None, mirror=(), derived={}
        )
    else:
        raise ConfigError(f"field {ctx}.kind has unknown value {kind!r}")
    resolved = {
        k: v for k, v in spec.items() if k not in ("kind",)
    }
    resolved.update({k: float(v) for k, v in system.derived.items()})
    resolved["kind"] = kind
    resolved["omega"] = system.params.omega
    resolved["delta"] = system.params.delta
    resolved["delta0"] = system.params.delta0
    return system, resolved


def _simulator_run_pieces(system: SimulatorSystem, initial: str, ctx: str):
    """Embedded initial state, observables and physical indices for a system."""
    if system.spin_map is None:
        raise ConfigError(f"field {ctx}: custom simulators run in evolve mode only")
    if system.spin_map.is_two_spin:
        initials = {"00": StateVector.basis(9, 4), "S": symmetric_state_two_spin()}
        finals = two_spin_finals()
    else:
        initials = {f"m={m}": StateVector.basis(3, i) for i, m in enumerate((1, 0, -1))}
        finals = one_spin_finals()
    if initial not in initials:
        raise ConfigError(f"field initial: {initial!r} not available for this simulator")
    psi0 = system.embed(initials[initial])
    observables = [(label, system.embed(state)) for label, state in finals]
    return psi0, observables, system.spin_map.physical_indices()


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def _write_manifest(cfg: ExperimentConfig, parameters: dict, outputs: list[str]) -> None:
    manifest = {
        "tool": "cahm",
        "version": __version__,
        "mode": cfg.mode,
        "preset": cfg.preset,
        "seed": cfg.seed,
        "parameters": parameters,
        "outputs": outputs,
    }
    _write_json(cfg.out_dir / "manifest.json", manifest)


def _run_spectrum(cfg: ExperimentConfig) -> int:
    target = _require(cfg.payload, "target", dict, "payload")
    h, _, _, resolved = _build_target(target)
    spec = eig_hermitian(h)
    out = {"eigenvalues": [float(w) for w in spec.eigenvalues]}
    if target.get("kind") == "one-spin":
        c = TargetCouplings(u=resolved["U"], x=resolved["X"])
        s = analytic_one_spin(c)
        out["analytic"] = {"e0": s.e0, "eplus": s.eplus, "eminus": s.eminus, "phi": s.phi}
        if c.u != 0:
            p = perturbative_one_spin(c)
            out["perturbative"] = {"e0": p.e0, "eplus": p.eplus, "eminus": p.eminus, "phi": p.phi}
    _write_json(cfg.out_dir / "spectrum.json", out)
    _write_manifest(cfg, {"target": resolved}, ["spectrum.json"])
    return EXIT_OK


def _run_match(cfg: ExperimentConfig) -> int:
    spec = _require(cfg.payload, "match", dict, "payload")
    kind = _require(spec, "kind", str, "payload.match")
    ctx = "payload.match"
    if kind == "two-atom":
        c = TargetCouplings(u=_require(spec, "U", float, ctx), x=_require(spec, "X", float, ctx))
        report = match_two_atom(c, blockade_ratio=float(spec.get("blockade_ratio", 64.0)))
    elif kind == "three-atom-newton":
        c = TargetCouplings(u=_require(spec, "U", float, ctx), x=_require(spec, "X", float, ctx))
        problem = NewtonProblem(
            targets=c,
            unknowns=tuple(_require(spec, "unknowns", list, ctx)),
            fixed={k: float(v) for k, v in _require(spec, "fixed", dict, ctx).items()},
            initial_guess=(
                {k: float(v) for k, v in spec["guess"].items()} if "guess" in spec else None
            ),
            equations=tuple(spec.get("equations", (1, 2, 3))),
        )
        report = solve_three_atom_newton(problem)
    elif kind == "three-atom-approx":
        report = approx_three_atom_match(
            _require(spec, "omega", float, ctx), _require(spec, "delta", float, ctx)
        )
    elif kind == "four-atom":
        c = TargetCouplings(
            u=_require(spec, "U", float, ctx),
            x=_require(spec, "X", float, ctx),
            y=_require(spec, "Y", float, ctx),
        )
        report = match_four_atom(c, _require(spec, "v0", float, ctx))
    elif kind == "six-atom":
        c = TargetCouplings(
            u=_require(spec, "U", float, ctx),
            x=_require(spec, "X", float, ctx),
            y=_require(spec, "Y", float, ctx),
        )
        report = match_six_atom(
            c,
            _require(spec, "omega", float, ctx),
            _require(spec, "delta", float, ctx),
            _require(spec, "v0", float, ctx),
            rho_hint=spec.get("rho_hint"),
            include_middle_pair=bool(spec.get("include_middle_pair", True)),
        )
    else:
        raise ConfigError(f"field {ctx}.kind has unknown value {kind!r}")
    _write_json(cfg.out_dir / "match_report.json", report.to_json_obj())
    _write_manifest(cfg, {"match": spec}, ["match_report.json"])
    return EXIT_OK if report.converged else EXIT_NUMERICAL


def _run_evolve(cfg: ExperimentConfig) -> int:
    times = _time_grid(_require(cfg.payload, "times", dict, "payload"), "payload.times")
    initial = _require(cfg.payload, "initial", str, "payload")
    resolved: dict = {"initial": initial, "times": cfg.payload["times"]}
    if "target" in cfg.payload:
        h, initials, finals, params = _build_target(cfg.payload["target"])
        if initial not in initials:
            raise ConfigError(f"field initial: {initial!r} not available for this target")
        tr = trace(h, initials[initial], finals, times, system_tag="target")
        resolved["target"] = params
    elif "simulator" in cfg.payload:
        system, params = _build_simulator(cfg.payload["simulator"])
        if system.spin_map is None:
            # Custom layout: the initial state is a |g>/|r> bitstring and the
            # trace covers the complete product basis.
            n = system.geometry.n_atoms
            if len(initial) != n or set(initial) - {"0", "1"}:
                raise ConfigError(
                    f"field initial: custom simulators take a bitstring of {n} atoms"
                )
            psi0 = StateVector.basis(1 << n, int(initial, 2))
            tr = trace(
                system.hamiltonian(),
                psi0,
                complete_basis_finals(1 << n),
                times,
                system_tag="simulator",
            )
        else:
            psi0, observables, physical = _simulator_run_pieces(
                system, initial, "payload.simulator"
            )
            tr = simulator_trace(
                system.hamiltonian(), psi0, observables, physical, times, system_tag="simulator"
            )
        resolved["simulator"] = params
        resolved["geometry"] = system_to_json_obj(system.geometry, system.params)
    else:
        raise ConfigError("missing field payload.target or payload.simulator")
    _write_text(cfg.out_dir / "trace.csv", tr.to_csv_text(CSV_DIGITS))
    _write_manifest(cfg, resolved, ["trace.csv"])
    return EXIT_OK


def _run_compare(cfg: ExperimentConfig) -> int:
    payload = cfg.payload
    times = _time_grid(_require(payload, "times", dict, "payload"), "payload.times")
    sim_times = (
        _time_grid(payload["sim_times"], "payload.sim_times") if "sim_times" in payload else times
    )
    initial = _require(payload, "initial", str, "payload")
    rescale_k = payload.get("rescale_k")

    h_t, initials_t, finals_t, target_params = _build_target(
        _require(payload, "target", dict, "payload")
    )
    if initial not in initials_t:
        raise ConfigError(f"field initial: {initial!r} not available for this target")
    target_trace = trace(h_t, initials_t[initial], finals_t, times, system_tag="target")

    system, sim_params = _build_simulator(_require(payload, "simulator", dict, "payload"))
    psi0, observables, physical = _simulator_run_pieces(system, initial, "payload.simulator")
    sim_trace = simulator_trace(
        system.hamiltonian(), psi0, observables, physical, sim_times, system_tag="simulator"
    )

    comparison = compare(target_trace, sim_trace, rescale_k=rescale_k)
    _write_text(cfg.out_dir / "target.csv", target_trace.to_csv_text(CSV_DIGITS))
    _write_text(cfg.out_dir / "simulator.csv", sim_trace.to_csv_text(CSV_DIGITS))
    _write_json(cfg.out_dir / "comparison.json", comparison.to_json_obj())
    resolved = {
        "target": target_params,
        "simulator": sim_params,
        "initial": initial,
        "times": payload["times"],
        "sim_times": payload.get("sim_times", payload["times"]),
        "rescale_k": rescale_k,
        "geometry": system_to_json_obj(system.geometry, system.params),
    }
    _write_manifest(cfg, resolved, ["target.csv", "simulator.csv", "comparison.json"])
    return EXIT_OK


def _run_trotter(cfg: ExperimentConfig) -> int:
    payload = cfg.payload
    ctx = "payload"
    omega = _require(payload, "omega", float, ctx)
    delta = _require(payload, "delta", float, ctx)
    v0 = _require(payload, "v0", float, ctx)
    # Default step 1/V0: large blockade energies need correspondingly small steps.
    if "dt" in payload:
        dt = _require(payload, "dt", float, ctx)
    elif v0 != 0:
        dt = 1.0 / abs(v0)
    else:
        raise ConfigError("field payload.dt is required when v0 = 0")
    t_max = _require(payload, "t_max", float, ctx)
    shots = _require(payload, "shots", int, ctx)
    if dt <= 0 or t_max < 0:
        raise ConfigError("field payload.dt must be positive and payload.t_max nonnegative")
    seed = cfg.seed if cfg.seed is not None else 0

    system = two_atom_system(omega, delta, v0)
    h = system.hamiltonian()
    psi0 = system.embed(StateVector.basis(3, 0))
    observables = [(label, system.embed(state)) for label, state in one_spin_finals()]
    physical = system.spin_map.physical_indices()

    n_steps = int(round(t_max / dt))
    times = np.array([k * dt for k in range(n_steps + 1)])
    exact = simulator_trace(h, psi0, observables, physical, times, system_tag="exact")

    step = trotter_step_h2r(omega, delta, v0, dt)
    labels = [label for label, _ in observables] + ["leakage"]
    label_bits = {
        f"m={m}": format(system.spin_map.spin_states[m], "02b") for m in (1, 0, -1)
    }
    trot_series = {label: [] for label in labels}
    shot_series = {label: [] for label in labels}
    counts_log = []
    psi = psi0
    for k in range(n_steps + 1):
        if k > 0:
            psi = apply_circuit(step, psi)
        probs = np.abs(psi.amplitudes) ** 2
        spin_total = 0.0
        for label, state in observables:
            p = float(np.abs(state.amplitudes.conj() @ psi.amplitudes) ** 2)
            trot_series[label].append(p)
            spin_total += p
        trot_series["leakage"].append(
            float(sum(probs[b] for b in range(4) if b not in physical))
        )
        result = sample_shots(psi, shots, seed + k)
        counts_log.append({"t": float(times[k]), "seed": seed + k, "counts": result.counts})
        for m in (1, 0, -1):
            shot_series[f"m={m}"].append(result.frequency(label_bits[f"m={m}"]))
        shot_series["leakage"].append(
            sum(
                count / shots
                for bits, count in result.counts.items()
                if int(bits, 2) not in physical
            )
        )

    fmt = f"{{:.{CSV_DIGITS}g}}"
    header = ["t"]
    for label in labels:
        header += [f"{label}:exact", f"{label}:trotter", f"{label}:shots"]
    lines = [",".join(header)]
    for k, t in enumerate(times):
        row = [fmt.format(t)]
        for label in labels:
            row += [
                fmt.format(exact.series[label][k]),
                fmt.format(trot_series[label][k]),
                fmt.format(shot_series[label][k]),
            ]
        lines.append(",".join(row))
    _write_text(cfg.out_dir / "trotter.csv", "\n".join(lines) + "\n")
    _write_json(
        cfg.out_dir / "counts.json",
        {"shots": shots, "base_seed": seed, "per_time": counts_log},
    )
    resolved = {
        "omega": omega,
        "delta": delta,
        "v0": v0,
        "dt": dt,
        "t_max": t_max,
        "shots": shots,
        "base_seed": seed,
        "steps_per_time_unit": 1.0 / dt,
        "circuit_step": step.to_json_obj(),
    }
    _write_manifest(cfg, resolved, ["trotter.csv", "counts.json"])
    return EXIT_OK


_RUNNERS = {
    "spectrum": _run_spectrum,
    "match": _run_match,
    "evolve": _run_evolve,
    "compare": _run_compare,
    "trotter": _run_trotter,
}


def run(cfg: ExperimentConfig) -> int:
    """Execute one experiment; writes artifacts into cfg.out_dir."""
    if cfg.mode not in _RUNNERS:
        raise ConfigError(f"unknown mode {cfg.mode!r}; expected one of {', '.join(MODES)}")
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[cfg.mode](cfg)


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path!r} not found")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise ConfigError("config file must contain a JSON object")
    return obj


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cahm",
        description="Analog-simulator design toolkit for spin-truncated gauge-Higgs chains.",
    )
    sub = parser.add_subparsers(dest="mode")
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run a {mode} experiment")
        p.add_argument("--preset", help="built-in preset name")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, default=None, help="override the sampling seed")
        p.add_argument(
            "--list-presets", action="store_true", help="list available presets and exit"
        )
    args = parser.parse_args(argv)
    if args.mode is None:
        parser.print_help()
        return EXIT_CONFIG

    if getattr(args, "list_presets", False):
        for name in presets():
            print(f"{name}: {preset_description(name)}")
        return EXIT_OK

    try:
        if args.preset:
            cfg = preset_config(args.preset, out_dir=args.out, seed=args.seed)
            if cfg.mode != args.mode:
                raise ConfigError(
                    f"preset {args.preset!r} runs in mode {cfg.mode!r}, not {args.mode!r}"
                )
        elif args.config:
            obj = _load_config_file(args.config)
            mode = obj.get("mode", args.mode)
            if mode != args.mode:
                raise ConfigError(f"config mode {mode!r} does not match subcommand {args.mode!r}")
            payload = {k: v for k, v in obj.items() if k not in ("mode", "seed")}
            seed = args.seed if args.seed is not None else obj.get("seed")
            cfg = ExperimentConfig(
                mode=args.mode, payload=payload, out_dir=Path(args.out), seed=seed
            )
        else:
            raise ConfigError("either --preset or --config is required")
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MatchingError, SingularDenominatorError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # Domain validation (couplings, geometry, solver setup) rejects the
        # configured values.
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
