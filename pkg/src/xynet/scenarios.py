"""Execute parsed scenarios and write their result files."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import Run, ScenarioConfig
from .dissipation import LindbladParams, dissipative_transfer
from .errors import ResolutionError
from .fullmodel import adiabatic_scaling, compare_effective_vs_full
from .network import (
    engineered_rabi_profile,
    topology_to_couplings,
)
from .numerics import herm_eig
from .spectra import cluster_spectrum, engineered_spectrum, weak_link_spectrum
from .transfer import oscillation_metrics, required_steps, transfer_trace

SIG = 12


def fmt(value) -> str:
    return f"{value:.{SIG}g}"


def _clean(obj):
    """Round floats to 12 significant digits for deterministic JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not np.isfinite(v):
            return None
        return float(fmt(v))
    return obj


def provenance(cfg: ScenarioConfig) -> dict:
    return {"library": "xynet", "version": __version__, "config_sha256": cfg.digest}


def run_label(run: Run) -> str:
    return f"N{run.N}" if run.f is None else f"N{run.N}_f{fmt(run.f)}"


def _couplings(cfg: ScenarioConfig, run: Run):
    return topology_to_couplings(cfg.topology_for(run), run.N)


# --- per-run workers (module level so they can be pickled) -------------------

def spectrum_run(cfg: ScenarioConfig, run: Run) -> dict:
    spec = cfg.topology_for(run)
    numeric = herm_eig(topology_to_couplings(spec, run.N).J)
    analytic = None
    if spec.variant == "cluster":
        analytic = cluster_spectrum(run.N, spec.x)
    elif spec.variant == "engineered":
        analytic = engineered_spectrum(run.N, spec.x, spec.f)
    elif spec.variant == "weak_link":
        analytic = weak_link_spectrum(run.N, spec.x, spec.f)
    out = {
        "N": run.N, "f": run.f, "variant": spec.variant,
        "numeric": numeric.eigenvalues, "numeric_residual": numeric.residual,
        "analytic": None if analytic is None else analytic.eigenvalues,
        "max_abs_diff": None if analytic is None
        else float(np.max(np.abs(analytic.eigenvalues - numeric.eigenvalues))),
    }
    return out


def _trace_summary(cfg, trace):
    peak, tau_peak = trace.peak()
    summary = {
        "peak_F01": peak, "tau_peak": tau_peak,
        "Fbar_max": float(np.max(trace.Fbar)),
        "classical_crossings": trace.classical_crossings(),
        "F_m": None, "A": None, "envelope_peak": None,
    }
    try:
        m = oscillation_metrics(trace, cfg.slow_window, cfg.points_per_period)
        summary.update(F_m=m.F_m, A=m.A, envelope_peak=m.envelope_peak)
    except ResolutionError as exc:
        summary["metrics_error"] = str(exc)
    return summary


def transfer_run(cfg: ScenarioConfig, run: Run, refine: bool = False) -> dict:
    J = _couplings(cfg, run)
    decomp = herm_eig(J.J)
    receiver = cfg.receiver or run.N
    steps = cfg.tau_steps
    if refine:
        probe = transfer_trace(decomp, 1, receiver, cfg.tau_grid(2), cfg.fidelity_mode)
        steps = max(steps, required_steps(probe.fast_beat, cfg.tau_max, cfg.points_per_period))
    trace = transfer_trace(decomp, 1, receiver, cfg.tau_grid(steps), cfg.fidelity_mode)
    summary = {"N": run.N, "f": run.f, "receiver": receiver, "tau_steps": steps}
    summary.update(_trace_summary(cfg, trace))
    rows = {
        "tau": trace.tau, "re_a": trace.amplitude.real, "im_a": trace.amplitude.imag,
        "F01": trace.F01, "Fbar_raw": trace.Fbar_raw, "Fbar_phase_opt": trace.Fbar_phase_opt,
    }
    return {"summary": summary, "columns": rows}


def sweep_run(cfg: ScenarioConfig, run: Run) -> dict:
    return transfer_run(cfg, run, refine=True)["summary"]


def _profile(cfg, run):
    spec = cfg.topology_for(run)
    if spec.variant == "cluster":
        return np.ones(run.N)
    return engineered_rabi_profile(run.N, spec.f)


def validate_run(cfg: ScenarioConfig, run: Run) -> dict:
    tau = cfg.tau_grid()
    if cfg.physical is not None:
        rep = compare_effective_vs_full(cfg.physical, tau, cfg.lamb_compensation, cfg.initial)
        summary = rep.summary()
        summary["scaling_exponent"] = None
    else:
        spec = cfg.topology_for(run)
        sc = adiabatic_scaling(_profile(cfg, run), tau, cfg.ratios, spec.x,
                               cfg.lamb_compensation, cfg.initial)
        rep = sc.reports[0]
        summary = rep.summary()
        summary.update(scaling_exponent=sc.exponent, ratios=list(sc.ratios),
                       max_devs=list(sc.max_devs))
    summary.update(N=run.N, f=run.f)
    return {
        "summary": summary,
        "columns": {"tau": rep.tau, "F01_full": rep.F01_full, "F01_eff": rep.F01_eff,
                    "abs_dev": rep.abs_dev},
    }


def dissipative_run(cfg: ScenarioConfig, run: Run) -> dict:
    J = _couplings(cfg, run)
    rates = LindbladParams(**cfg.rates)
    tr = dissipative_transfer(J, rates, cfg.tau_grid(), cfg.step, cfg.receiver)
    k = int(np.argmax(tr.F01))
    summary = {
        "N": run.N, "f": run.f, "peak_F01": float(tr.F01[k]), "tau_peak": float(tr.tau[k]),
        "halving_distance": tr.halving_distance, "step": tr.step,
        "max_trace_error": float(np.max(np.abs(tr.trace - 1.0))),
        "min_eig": float(np.min(tr.min_eig)),
        "rates": rates.__dict__,
    }
    cols = {"tau": tr.tau, "F01": tr.F01, "trace": tr.trace, "purity": tr.purity,
            "min_eig": tr.min_eig}
    return {"summary": summary, "columns": cols}


WORKERS = {
    "spectrum": spectrum_run,
    "transfer": transfer_run,
    "sweep": sweep_run,
    "validate": validate_run,
    "dissipative": dissipative_run,
}


def _call(args):
    cfg, run = args
    return WORKERS[cfg.mode](cfg, run)


def execute(cfg: ScenarioConfig, jobs: int = 1) -> list:
    """Run every scenario point; results keep the configured order."""
    tasks = [(cfg, r) for r in cfg.runs()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_call, tasks))
    return [_call(t) for t in tasks]


# --- output -------------------------------------------------------------------

def write_csv(path: Path, columns: dict, cfg: ScenarioConfig):
    names = list(columns)
    n = len(columns[names[0]])
    with open(path, "w", newline="") as fh:
        fh.write(f"# xynet {__version__} config_sha256={cfg.digest}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for i in range(n):
            w.writerow([_cell(columns[c][i]) for c in names])


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def write_json(path: Path, payload: dict):
    with open(path, "w") as fh:
        json.dump(_clean(payload), fh, indent=1, sort_keys=True)
        fh.write("\n")


SWEEP_COLUMNS = ["N", "f", "F_m", "A", "envelope_peak", "peak_F01", "tau_peak",
                 "Fbar_max", "tau_steps"]


def run_scenario(cfg: ScenarioConfig, out_dir: str | Path, fmt_: str | None = None,
                 jobs: int | None = None) -> dict:
    """Run ``cfg``, write result files under ``out_dir`` and return the summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    form = fmt_ or cfg.format
    results = execute(cfg, jobs or cfg.jobs)
    runs = cfg.runs()
    prov = provenance(cfg)
    files = []

    if cfg.mode == "spectrum":
        if form == "json":
            p = out / "spectrum.json"
            write_json(p, {"provenance": prov, "runs": results})
        else:
            p = out / "spectrum.csv"
            cols = {"N": [], "f": [], "index": [], "numeric": [], "analytic": []}
            for r in results:
                for k, ev in enumerate(r["numeric"]):
                    cols["N"].append(r["N"])
                    cols["f"].append(r["f"])
                    cols["index"].append(k)
                    cols["numeric"].append(float(ev))
                    cols["analytic"].append(None if r["analytic"] is None
                                            else float(r["analytic"][k]))
            write_csv(p, cols, cfg)
        files.append(p.name)
        summaries = [{k: r[k] for k in ("N", "f", "variant", "max_abs_diff")} for r in results]
    elif cfg.mode == "sweep":
        summaries = results
        if form == "json":
            p = out / "sweep.json"
            write_json(p, {"provenance": prov, "rows": results})
        else:
            p = out / "sweep.csv"
            write_csv(p, {c: [r.get(c) for r in results] for c in SWEEP_COLUMNS}, cfg)
        files.append(p.name)
    else:
        summaries = []
        for run, r in zip(runs, results):
            name = f"{cfg.mode}_{run_label(run)}.{form}"
            if form == "json":
                write_json(out / name, {"provenance": prov, "summary": r["summary"],
                                        **r["columns"]})
            else:
                write_csv(out / name, r["columns"], cfg)
            files.append(name)
            summaries.append(r["summary"])

    summary = {"mode": cfg.mode, "provenance": prov, "files": files, "runs": summaries}
    write_json(out / "summary.json", summary)
    return _clean(summary)
