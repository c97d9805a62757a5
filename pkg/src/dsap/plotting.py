"""Figure rendering for the experiment outputs (headless, file-based)."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def plot_spectrum(path: Path) -> plt.Figure:
    header, data = _read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 5))
    for k in range(1, data.shape[1]):
        ax.plot(data[:, 0], data[:, k], lw=0.9)
    ax.set_xlabel("t (1/B)")
    ax.set_ylabel("energy (B)")
    ax.set_title("Eigenspectrum across the pulse sequence")
    return fig


def plot_populations(path: Path) -> plt.Figure:
    header, data = _read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 5))
    for k, name in enumerate(header[1:], start=1):
        ax.plot(data[:, 0], data[:, k], label=name)
    ax.set_xlabel("t (1/B)")
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    ax.set_title("Populations during the passage")
    return fig


def plot_trajectory(path: Path) -> plt.Figure:
    header, data = _read_csv(path)
    cols = {name: data[:, i] for i, name in enumerate(header)}
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    for name in ("d12", "d23", "d13"):
        ax1.plot(cols["t"], cols[name], label=name)
    ax1.set_ylabel("coupling")
    ax1.legend()
    for name in ("Bx", "By", "Bz"):
        ax2.plot(cols["t"], cols[name], label=name)
    ax2.plot(cols["t"], cols["B_coeff"], "--", label="B_coeff")
    ax2.set_xlabel("t (1/B)")
    ax2.set_ylabel("field")
    ax2.legend()
    ax1.set_title("Magic-angle field sweep")
    return fig


def plot_adiabaticity(path: Path) -> plt.Figure:
    header, data = _read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(data[:, 0], data[:, 1], label="numeric")
    ax.plot(data[:, 0], data[:, 2], "--", label="closed form")
    ax.set_xlabel("t (1/B)")
    ax.set_ylabel("adiabaticity")
    ax.legend()
    ax.set_title("Transport-channel adiabaticity")
    return fig


def plot_pulse(path: Path) -> plt.Figure:
    header, data = _read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(data[:, 0], data[:, 1], label="d12")
    ax.plot(data[:, 0], data[:, 2], label="d23")
    ax.set_xlabel("t (1/B)")
    ax.set_ylabel("coupling (B)")
    ax.legend()
    ax.set_title("Counter-intuitive pulse pair")
    return fig


def plot_qutrit(path: Path) -> plt.Figure:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    fig, ax = plt.subplots(figsize=(6, 4))
    names = ["raw", "phase corrected", "|1>", "|0>", "|1bar>"]
    values = [
        payload["fidelity_raw"],
        payload["fidelity_phase_corrected"],
        *payload["per_component_transfer"],
    ]
    ax.bar(names, values, color=["C0", "C0", "C1", "C1", "C1"])
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("fidelity")
    ax.set_title(f"Qutrit transport, chain = {payload['chain_state']}")
    return fig


_PLOTTERS = {
    "spectrum": plot_spectrum,
    "evolve": plot_populations,
    "dipole": plot_trajectory,
    "adiabaticity": plot_adiabaticity,
    "pulse": plot_pulse,
    "qutrit": plot_qutrit,
}


def render(mode: str, data_path: Path, figure_path: Path) -> Path:
    """Render the figure for a written data file next to it."""
    fig = _PLOTTERS[mode](Path(data_path))
    fig.savefig(figure_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return figure_path
