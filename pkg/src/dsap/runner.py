"""Experiment dispatch: run a config, write CSV/JSON data, optionally figures.

Floats are written with repr (shortest round-trip-exact decimals) in a fixed
column order, so identical configs produce byte-identical data files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import dipole, evolution, spectral
from .config import ConfigError, ExperimentConfig
from .hamiltonian import PulseSchedule, ci_pulse, ci_schedule
from .spin_algebra import product_state

DEFAULT_OUTPUTS = {
    "spectrum": "spectrum.csv",
    "evolve": "populations.csv",
    "qutrit": "qutrit.json",
    "dipole": "trajectory.csv",
    "adiabaticity": "adiabaticity.csv",
    "pulse": "pulse.csv",
}


def _fmt(value: float) -> str:
    return repr(float(value))


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for i in range(rows):
            handle.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def _resolve_schedule(config: ExperimentConfig) -> PulseSchedule:
    if config.schedule == "dipole":
        geom = dipole.equilateral_geometry(b_mag=dipole.DEFAULT_B_MAG * config.b)
        return dipole.magic_schedule(
            geom, config.t_max, n_samples=config.n_samples, zeeman_mode=config.zeeman_mode
        )
    return ci_schedule(t_max=config.t_max, d=config.d, b=config.b)


def _chain_argument(config: ExperimentConfig):
    if config.chain_state == "custom":
        return np.array(config.chain_amplitudes, dtype=complex), None
    if config.chain_state == "entangled":
        return "entangled", config.chain_phi
    return config.chain_state, None


def run_spectrum(config: ExperimentConfig, out: Path) -> list[Path]:
    schedule = _resolve_schedule(config)
    tracked = spectral.track_eigenstates(schedule, config.n_samples)
    energies = tracked.curve_energies()
    labels = tracked.curve_m_labels()
    header = ["t"] + [f"E{k:02d}" for k in range(energies.shape[1])]
    write_csv(out, header, [tracked.times] + [energies[:, k] for k in range(energies.shape[1])])
    companion = out.with_name(out.stem + "_m" + out.suffix)
    header_m = ["t"] + [f"m{k:02d}" for k in range(labels.shape[1])]
    write_csv(companion, header_m, [tracked.times] + [labels[:, k] for k in range(labels.shape[1])])
    return [out, companion]


def run_evolve(config: ExperimentConfig, out: Path) -> list[Path]:
    schedule = _resolve_schedule(config)
    trajectory = evolution.propagate(schedule, product_state(config.initial_state), config.n_steps)
    times, labels, values = evolution.populations_timeseries(trajectory, config.watchlist)
    header = ["t"] + [f"P_{label}" for label in labels]
    write_csv(out, header, [times] + [values[:, k] for k in range(values.shape[1])])
    written = [out]
    if config.dump_trajectory:
        dump = Path(config.dump_trajectory)
        header_t = ["t"] + [f"{part}_{k:02d}" for k in range(27) for part in ("re", "im")]
        cols = [times]
        for k in range(27):
            cols.append(trajectory.states[:, k].real)
            cols.append(trajectory.states[:, k].imag)
        write_csv(dump, header_t, cols)
        written.append(dump)
    return written


def run_qutrit(config: ExperimentConfig, out: Path) -> list[Path]:
    schedule = _resolve_schedule(config)
    chain, phi = _chain_argument(config)
    report = evolution.qutrit_transport(
        *config.qutrit_coeffs, chain, schedule, n_steps=config.n_steps, phi=phi
    )
    payload = {
        "input_coeffs": [[c.real, c.imag] for c in report.input_coeffs],
        "chain_state": report.chain_state_spec,
        "fidelity_raw": report.fidelity_raw,
        "fidelity_phase_corrected": report.fidelity_phase_corrected,
        "per_component_transfer": list(report.per_component_transfer),
    }
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return [out]


def run_dipole(config: ExperimentConfig, out: Path) -> list[Path]:
    geom = dipole.equilateral_geometry(b_mag=dipole.DEFAULT_B_MAG * config.b)
    trajectory = dipole.magic_trajectory(
        geom, config.t_max, n_samples=config.n_samples, zeeman_mode=config.zeeman_mode
    )
    header = ["t", "phi", "Bx", "By", "Bz", "d12", "d23", "d13", "B_coeff"]
    columns = [
        trajectory.times,
        trajectory.phis,
        trajectory.fields[:, 0],
        trajectory.fields[:, 1],
        trajectory.fields[:, 2],
        trajectory.d12s,
        trajectory.d23s,
        trajectory.d13s,
        trajectory.b_coeffs,
    ]
    write_csv(out, header, columns)
    return [out]


def run_adiabaticity(config: ExperimentConfig, out: Path) -> list[Path]:
    schedule = ci_schedule(t_max=config.t_max, d=config.d, b=config.b)
    times = np.linspace(0.0, config.t_max, config.n_samples)
    numeric = np.empty_like(times)
    closed = np.empty_like(times)
    for i, t in enumerate(times):
        state_a, _ = spectral.analytic_D2(t, config.t_max, config.d, 0, b=config.b)
        state_b, _ = spectral.analytic_D2(t, config.t_max, config.d, +1, b=config.b)
        numeric[i] = spectral.adiabaticity_numeric(schedule, float(t), (state_a, state_b))
        closed[i] = spectral.adiabaticity_A2_closed(float(t), config.t_max, config.d)
    write_csv(out, ["t", "A_numeric", "A_closed_form"], [times, numeric, closed])
    return [out]


def run_pulse(config: ExperimentConfig, out: Path) -> list[Path]:
    times = np.linspace(0.0, config.t_max, config.n_samples)
    pairs = np.array([ci_pulse(float(t), config.t_max, config.d) for t in times])
    bs = np.full_like(times, config.b)
    write_csv(out, ["t", "d12", "d23", "B"], [times, pairs[:, 0], pairs[:, 1], bs])
    return [out]


_RUNNERS = {
    "spectrum": run_spectrum,
    "evolve": run_evolve,
    "qutrit": run_qutrit,
    "dipole": run_dipole,
    "adiabaticity": run_adiabaticity,
    "pulse": run_pulse,
}


def run(config: ExperimentConfig, out_override: str | None = None, plot: bool = False) -> list[Path]:
    """Execute one experiment; returns the written file paths."""
    out = Path(out_override or config.output_path or DEFAULT_OUTPUTS[config.mode])
    if out.parent != Path(".") and not out.parent.exists():
        raise ConfigError(f"output directory {out.parent} does not exist", "output_path")
    written = _RUNNERS[config.mode](config, out)
    if plot:
        from . import plotting

        figure_path = out.with_suffix(".png")
        plotting.render(config.mode, written[0], figure_path)
        written.append(figure_path)
    return written
