"""Command-line front end: sweeps, figure-data reproduction, oracle checks.

Configs are single JSON trees; unknown keys are hard errors so a typo can
never silently corrupt a sweep.  Every JSON output embeds the fully
resolved config, and feeding such an output back via --config reproduces
the run bit for bit (no timestamps, index-ordered assembly).

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 oracle check
failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .coherence import g2, g2_zero_sweep
from .errors import (
    ConfigError,
    ConvergenceFailure,
    DegenerateSpectrum,
    DomainError,
    NonFiniteResult,
    VanishingBackground,
)
from .model import SystemParams, dressed_pair, gamma_min
from .oracle.compare import compare_report
from .oracle.lattice import default_config, lattice_evolve
from .oracle.spectral import spectral_t_matrix
from .single import reflection_spectrum
from .sweep import SweepGrid, dump_json, write_table
from .twophoton import TwoPhotonIn, fluorescence_map, sample_channel, two_photon_t_matrix

_PARAM_KEYS = {"omega_c", "omega_tls", "g", "v_tilde"}

_COMMAND_KEYS = {
    "spectrum": {"n_max"},
    "single": {"k_start", "k_stop", "k_num"},
    "wavefunction": {"k1", "k2", "channel", "x_span", "x_num"},
    "fluorescence": {"e_total", "delta_max", "num"},
    "g2": {
        "mode",
        "channels",
        "e_half_start",
        "e_half_stop",
        "e_half_num",
        "curves",
        "tau_max",
        "tau_num",
        "normalization",
        "l_reg",
    },
    "oracle-check": {
        "spectral_grids",
        "tolerance",
        "lattice_one",
    },
}


def _check_keys(section: dict, allowed: set[str], path: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown config key '{path}.{key}'")


def _require(section: dict, key: str, path: str):
    if key not in section:
        raise ConfigError(f"missing config key '{path}.{key}'")
    return section[key]


def _parse_params(config: dict) -> SystemParams:
    section = _require(config, "params", "")
    _check_keys(section, _PARAM_KEYS, "params")
    try:
        return SystemParams(
            omega_c=float(_require(section, "omega_c", "params")),
            omega_tls=float(_require(section, "omega_tls", "params")),
            g=float(_require(section, "g", "params")),
            v_tilde=float(_require(section, "v_tilde", "params")),
        )
    except DomainError as exc:
        raise ConfigError(f"params: {exc}") from exc


def _fig_params(g: float) -> dict:
    return {"omega_c": 10.0, "omega_tls": 10.0, "g": g, "v_tilde": 1.0}


def _bare(params_dict: dict, n: int, branch: str) -> float:
    pair = dressed_pair(SystemParams(**params_dict), n)
    return pair.bare_plus if branch == "+" else pair.bare_minus


def build_presets() -> dict[str, dict]:
    """Named configs reproducing the figure data of the source system."""
    strong = _fig_params(5.0)
    weak = _fig_params(0.5)
    presets: dict[str, dict] = {}
    for tag, par in (("fig2", strong), ("fig3", weak)):
        lam1_lo = _bare(par, 1, "-")
        presets[f"{tag}a"] = {
            "command": "fluorescence",
            "params": par,
            "fluorescence": {
                "e_total": _bare(par, 2, "+"),
                "delta_max": 6.0,
                "num": 201,
            },
        }
        presets[f"{tag}b"] = {
            "command": "g2",
            "params": par,
            "g2": {
                "mode": "zero_sweep",
                "channels": ["LL", "RR"],
                "e_half_start": 2.0,
                "e_half_stop": 28.0,
                "e_half_num": 521,
            },
        }
        presets[f"{tag}c"] = {
            "command": "g2",
            "params": par,
            "g2": {
                "mode": "tau",
                "curves": [
                    {"channel": "LL", "e_half": lam1_lo},
                    {"channel": "RR", "e_half": 10.0},
                ],
                "tau_max": 60.0,
                "tau_num": 601,
                "normalization": "asymptotic",
            },
        }
        presets[f"{tag}d"] = {
            "command": "g2",
            "params": par,
            "g2": {
                "mode": "tau",
                "curves": [
                    {"channel": "LL", "e_half": 10.0},
                    {"channel": "RR", "e_half": lam1_lo},
                ],
                "tau_max": 60.0,
                "tau_num": 601,
                "normalization": "box",
                "l_reg": None,
            },
        }
    presets["quick"] = {
        "command": "oracle-check",
        "params": strong,
        "oracle-check": {
            "spectral_grids": [
                {"params": strong, "k_center": 10.0, "k_span": 10.0, "num": 3},
                {"params": weak, "k_center": 10.0, "k_span": 1.5, "num": 3},
            ],
            "tolerance": 1e-6,
            "lattice_one": {"num_modes": 128, "carrier": 10.0},
        },
    }
    return presets


def _config_comment(config: dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def _emit_grid(grid: SweepGrid, stem: Path, config: dict, formats: set[str]) -> list[Path]:
    written = []
    if "csv" in formats:
        path = stem.with_suffix(".csv")
        grid.to_csv(path, config_comment=_config_comment(config))
        written.append(path)
    if "json" in formats:
        payload = grid.to_payload()
        payload["config"] = config
        path = stem.with_suffix(".json")
        dump_json(payload, path)
        written.append(path)
    return written


def _emit_table(
    names: list[str], cols: list, stem: Path, config: dict, formats: set[str],
    extra: dict | None = None,
) -> list[Path]:
    written = []
    if "csv" in formats:
        path = stem.with_suffix(".csv")
        write_table(path, names, cols, config_comment=_config_comment(config))
        written.append(path)
    if "json" in formats:
        payload = {"columns": {n: np.asarray(c) for n, c in zip(names, cols)},
                   "config": config}
        if extra:
            payload.update(extra)
        path = stem.with_suffix(".json")
        dump_json(payload, path)
        written.append(path)
    return written


def _plot_lines(stem: Path, x, ys: dict, xlabel: str, ylabel: str, logy=False):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, y in ys.items():
        ax.plot(x, y, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if logy:
        ax.set_yscale("log")
    if len(ys) > 1:
        ax.legend()
    fig.tight_layout()
    path = stem.with_suffix(".svg")
    fig.savefig(path)
    plt.close(fig)
    return path


def _plot_map(stem: Path, grid: SweepGrid):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    axes = list(grid.axes.values())
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    mesh = ax.pcolormesh(axes[0], axes[1], grid.values.T, shading="nearest")
    fig.colorbar(mesh, ax=ax, label=grid.value_name)
    names = list(grid.axes.keys())
    ax.set_xlabel(names[0])
    ax.set_ylabel(names[1])
    fig.tight_layout()
    path = stem.with_suffix(".svg")
    fig.savefig(path)
    plt.close(fig)
    return path


def cmd_spectrum(config: dict, outdir: Path, formats: set[str], threads: int):
    params = _parse_params(config)
    section = config.get("spectrum", {})
    _check_keys(section, _COMMAND_KEYS["spectrum"], "spectrum")
    n_max = int(section.get("n_max", 2))
    if n_max < 1:
        raise ConfigError("spectrum.n_max must be >= 1")
    rows = {"n": [], "branch": [], "re": [], "im": [], "bare": [], "linewidth": []}
    for n in range(1, n_max + 1):
        pair = dressed_pair(params, n)
        for branch, lam, bare in (
            ("+", pair.lambda_plus, pair.bare_plus),
            ("-", pair.lambda_minus, pair.bare_minus),
        ):
            rows["n"].append(n)
            rows["branch"].append(1 if branch == "+" else -1)
            rows["re"].append(lam.real)
            rows["im"].append(lam.imag)
            rows["bare"].append(bare)
            rows["linewidth"].append(-2.0 * lam.imag)
    names = list(rows.keys())
    return _emit_table(names, [np.asarray(rows[n]) for n in names],
                       outdir / "spectrum", config, formats)


def cmd_single(config: dict, outdir: Path, formats: set[str], threads: int):
    params = _parse_params(config)
    section = config.get("single", {})
    _check_keys(section, _COMMAND_KEYS["single"], "single")
    k_start = float(section.get("k_start", 2.0))
    k_stop = float(section.get("k_stop", 28.0))
    k_num = int(section.get("k_num", 801))
    if not (0 < k_start < k_stop) or k_num < 2:
        raise ConfigError("single: need 0 < k_start < k_stop and k_num >= 2")
    grid = np.linspace(k_start, k_stop, k_num)
    amps = reflection_spectrum(params, grid)
    cols = {
        "k": grid,
        "delta_k": np.array([a.delta_k for a in amps]),
        "t_even_re": np.array([a.t_even.real for a in amps]),
        "t_even_im": np.array([a.t_even.imag for a in amps]),
        "r_bar_re": np.array([a.r_bar.real for a in amps]),
        "r_bar_im": np.array([a.r_bar.imag for a in amps]),
        "t_bar_re": np.array([a.t_bar.real for a in amps]),
        "t_bar_im": np.array([a.t_bar.imag for a in amps]),
        "reflectance": np.array([a.reflectance for a in amps]),
        "transmittance": np.array([a.transmittance for a in amps]),
    }
    written = _emit_table(list(cols.keys()), list(cols.values()),
                          outdir / "single", config, formats)
    if "plot" in formats:
        written.append(
            _plot_lines(outdir / "single", grid,
                        {"reflectance": cols["reflectance"]}, "k", "|r|^2")
        )
    return written


def cmd_wavefunction(config: dict, outdir: Path, formats: set[str], threads: int):
    params = _parse_params(config)
    section = config.get("wavefunction", {})
    _check_keys(section, _COMMAND_KEYS["wavefunction"], "wavefunction")
    k1 = float(_require(section, "k1", "wavefunction"))
    k2 = float(_require(section, "k2", "wavefunction"))
    channel = str(section.get("channel", "RR"))
    if channel not in ("RR", "LL", "LR"):
        raise ConfigError(f"wavefunction.channel must be RR/LL/LR, got {channel}")
    x_num = int(section.get("x_num", 2048))
    x_span = section.get("x_span")
    grid = None
    if x_span is not None:
        grid = np.linspace(-float(x_span), float(x_span), x_num)
    try:
        incoming = TwoPhotonIn(k1, k2)
    except DomainError as exc:
        raise ConfigError(f"wavefunction: {exc}") from exc
    wf = sample_channel(params, incoming, channel, grid=grid)
    cols = {
        "x": wf.grid,
        "psi_re": wf.values.real,
        "psi_im": wf.values.imag,
        "abs2": np.abs(wf.values) ** 2,
    }
    written = _emit_table(
        list(cols.keys()), list(cols.values()), outdir / "wavefunction", config,
        formats, extra={"channel": channel, "coordinate": wf.metadata["coordinate"]},
    )
    if "plot" in formats:
        written.append(
            _plot_lines(outdir / "wavefunction", wf.grid,
                        {f"|{channel}|^2": cols["abs2"]},
                        wf.metadata["coordinate"], "|psi|^2")
        )
    return written


def cmd_fluorescence(config: dict, outdir: Path, formats: set[str], threads: int):
    params = _parse_params(config)
    section = config.get("fluorescence", {})
    _check_keys(section, _COMMAND_KEYS["fluorescence"], "fluorescence")
    e_total = float(_require(section, "e_total", "fluorescence"))
    delta_max = float(section.get("delta_max", 6.0))
    num = int(section.get("num", 201))
    if num < 3 or num % 2 == 0:
        raise ConfigError("fluorescence.num must be an odd integer >= 3")
    if not (0 < delta_max < e_total):
        raise ConfigError("fluorescence: need 0 < delta_max < e_total")
    deltas = np.linspace(-delta_max, delta_max, num)
    grid = fluorescence_map(params, e_total, deltas, deltas)
    grid.metadata["config"] = config
    written = _emit_grid(grid, outdir / "fluorescence", config, formats)
    if "plot" in formats:
        written.append(_plot_map(outdir / "fluorescence", grid))
    return written


def _g2_zero_chunk(args):
    params, chunk, channel = args
    return g2_zero_sweep(params, chunk, channel)


def cmd_g2(config: dict, outdir: Path, formats: set[str], threads: int):
    params = _parse_params(config)
    section = config.get("g2", {})
    _check_keys(section, _COMMAND_KEYS["g2"], "g2")
    mode = str(section.get("mode", "zero_sweep"))
    written = []
    if mode == "zero_sweep":
        channels = section.get("channels", ["LL"])
        start = float(section.get("e_half_start", 2.0))
        stop = float(section.get("e_half_stop", 28.0))
        num = int(section.get("e_half_num", 521))
        if not (0 < start < stop) or num < 2:
            raise ConfigError("g2: need 0 < e_half_start < e_half_stop, num >= 2")
        e_half = np.linspace(start, stop, num)
        names: list[str] = ["e_half"]
        cols: list[np.ndarray] = [e_half]
        flag_cols = {}
        for channel in channels:
            if channel not in ("LL", "RR"):
                raise ConfigError(f"g2.channels entries must be LL/RR, got {channel}")
            if threads > 1:
                chunks = np.array_split(e_half, threads)
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    parts = list(
                        pool.map(_g2_zero_chunk, [(params, c, channel) for c in chunks])
                    )
                values = np.concatenate([p.values for p in parts])
                flags = np.concatenate([p.flags for p in parts])
            else:
                sweep = g2_zero_sweep(params, e_half, channel)
                values, flags = sweep.values, sweep.flags
            names.append(f"g2_zero_{channel}")
            cols.append(values)
            flag_cols[channel] = flags
        written += _emit_table(
            names, cols, outdir / "g2_zero", config, formats,
            extra={"flags": {ch: fl.astype(str).tolist() for ch, fl in flag_cols.items()}},
        )
        if "plot" in formats:
            written.append(
                _plot_lines(outdir / "g2_zero", e_half,
                            {n: c for n, c in zip(names[1:], cols[1:])},
                            "E/2", "g2(0)", logy=True)
            )
        return written
    if mode != "tau":
        raise ConfigError(f"g2.mode must be 'zero_sweep' or 'tau', got {mode}")
    curves = section.get("curves")
    if not curves:
        raise ConfigError("g2.curves required in tau mode")
    tau_max = float(section.get("tau_max", 60.0))
    tau_num = int(section.get("tau_num", 601))
    normalization = str(section.get("normalization", "asymptotic"))
    l_reg = section.get("l_reg")
    tau = np.linspace(0.0, tau_max, tau_num)
    names = ["tau"]
    cols = [tau]
    meta = {}
    for spec_curve in curves:
        _check_keys(spec_curve, {"channel", "e_half"}, "g2.curves[]")
        channel = str(_require(spec_curve, "channel", "g2.curves[]"))
        e_half = float(_require(spec_curve, "e_half", "g2.curves[]"))
        incoming = TwoPhotonIn(e_half, e_half)
        try:
            curve = g2(params, incoming, channel, tau,
                       normalization=normalization,
                       l_reg=None if l_reg is None else float(l_reg))
        except VanishingBackground:
            curve = g2(params, incoming, channel, tau, normalization="box",
                       l_reg=None if l_reg is None else float(l_reg))
        label = f"g2_{channel}_Ehalf_{e_half:g}"
        names.append(label)
        cols.append(curve.values)
        meta[label] = {"normalization": curve.normalization, **curve.metadata}
    written += _emit_table(names, cols, outdir / "g2_tau", config, formats,
                           extra={"curve_metadata": meta})
    if "plot" in formats:
        written.append(
            _plot_lines(outdir / "g2_tau", tau,
                        {n: c for n, c in zip(names[1:], cols[1:])},
                        "tau", "g2(tau)")
        )
    return written


def cmd_oracle_check(config: dict, outdir: Path, formats: set[str], threads: int):
    section = config.get("oracle-check", {})
    _check_keys(section, _COMMAND_KEYS["oracle-check"], "oracle-check")
    tolerance = float(section.get("tolerance", 1e-6))
    analytic: dict[str, dict] = {}
    oracle: dict[str, dict] = {}
    tols: dict[str, float] = {}
    for i, spec_grid in enumerate(section.get("spectral_grids", [])):
        _check_keys(spec_grid, {"params", "k_center", "k_span", "num"},
                    f"oracle-check.spectral_grids[{i}]")
        par = SystemParams(**_require(spec_grid, "params", "spectral_grids[]"))
        k_c = float(spec_grid.get("k_center", 10.0))
        k_s = float(spec_grid.get("k_span", 10.0))
        num = int(spec_grid.get("num", 5))
        ks = np.linspace(k_c - k_s / 2, k_c + k_s / 2, num)
        closed, spectral, grid_pts = [], [], []
        for k1 in ks:
            for k2 in ks:
                incoming = TwoPhotonIn(float(k1), float(k2))
                for p1 in np.linspace(k_c - 0.6 * k_s, k_c + 0.6 * k_s, num):
                    closed.append(two_photon_t_matrix(par, incoming, float(p1)).value)
                    spectral.append(spectral_t_matrix(par, incoming, float(p1)))
                    grid_pts.append((float(k1), float(k2), float(p1)))
        name = f"t_matrix_grid_{i}"
        analytic[name] = {"grid": np.arange(len(closed)), "values": np.array(closed)}
        oracle[name] = {"grid": np.arange(len(closed)), "values": np.array(spectral)}
        tols[name] = tolerance
    lat = section.get("lattice_one")
    if lat:
        _check_keys(lat, {"num_modes", "carrier"}, "oracle-check.lattice_one")
        params = _parse_params(config)
        carrier = float(lat.get("carrier", params.omega_tls))
        cfg = default_config(params, carrier, carrier,
                             num_modes=int(lat.get("num_modes", 128)))
        record = lattice_evolve(params, cfg, "one")
        support = np.abs(record.packet_spectrum) > 1e-6
        from .single import even_phase

        t_closed = even_phase(params, record.k_grid[support])
        analytic["single_photon_phase"] = {
            "grid": record.k_grid[support], "values": t_closed,
        }
        oracle["single_photon_phase"] = {
            "grid": record.k_grid[support],
            "values": record.t_even_lattice[support],
        }
        tols["single_photon_phase"] = 2e-2
    if not analytic:
        raise ConfigError("oracle-check: no checks configured")
    report = compare_report(analytic, oracle, tols, metadata={"config": config})
    path = outdir / "oracle_check.json"
    report.to_json(path)
    if "csv" in formats:
        names = ["name", "max_rel_err", "mean_rel_err", "tolerance", "passed"]
        write_table(
            outdir / "oracle_check.csv",
            names,
            [
                np.array([e.name for e in report.entries], dtype=object),
                np.array([e.max_rel_err for e in report.entries]),
                np.array([e.mean_rel_err for e in report.entries]),
                np.array([e.tolerance for e in report.entries]),
                np.array([int(e.passed) for e in report.entries]),
            ],
            config_comment=_config_comment(config),
        )
    return [path], report.passed


COMMANDS = {
    "spectrum": cmd_spectrum,
    "single": cmd_single,
    "wavefunction": cmd_wavefunction,
    "fluorescence": cmd_fluorescence,
    "g2": cmd_g2,
    "oracle-check": cmd_oracle_check,
}


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    # outputs of previous runs embed the resolved config; accept them directly
    if "config" in data and ("values" in data or "columns" in data or "axes" in data):
        data = data["config"]
    return data


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="jcscatter",
        description="Photon-pair scattering for a waveguide-coupled cavity-TLS",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON config file (or a previous output)")
    parser.add_argument("--preset", help="named built-in configuration")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--format", default="csv,json",
                        help="comma list from csv,json,plot")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        if args.config and args.preset:
            raise ConfigError("--config and --preset are mutually exclusive")
        if args.preset:
            presets = build_presets()
            if args.preset not in presets:
                raise ConfigError(
                    f"unknown preset '{args.preset}'; have {sorted(presets)}"
                )
            config = presets[args.preset]
        elif args.config:
            config = _load_config(args.config)
        else:
            raise ConfigError("one of --config or --preset is required")
        declared = config.get("command")
        if declared is not None and declared != args.command:
            raise ConfigError(
                f"config declares command '{declared}' but '{args.command}' requested"
            )
        allowed_top = {"command", "params"} | set(COMMANDS)
        _check_keys(config, allowed_top, "")
        formats = {f.strip() for f in args.format.split(",") if f.strip()}
        unknown = formats - {"csv", "json", "plot"}
        if unknown:
            raise ConfigError(f"unknown output formats: {sorted(unknown)}")
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        result = COMMANDS[args.command](config, outdir, formats, args.threads)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateSpectrum, NonFiniteResult, ConvergenceFailure,
            VanishingBackground) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    if args.command == "oracle-check":
        files, passed = result
        for f in files:
            print(f)
        if not passed:
            print("oracle check FAILED", file=sys.stderr)
            return 4
        print("oracle check passed")
        return 0
    for f in result:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
