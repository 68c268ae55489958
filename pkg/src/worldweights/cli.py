"""Command-line front end.

Subcommands:

    worldweights ensemble --config FILE [--query TAG]...   toy-ensemble reports
    worldweights scan --m M [--u-min --u-max --points]     density table (CSV)
    worldweights report --m M [--cap planck|none|U]        dominance analysis
    worldweights crossover --m M                            cap sensitivity

Exit codes: 0 success, 2 configuration or parse errors, 3 domain or numeric
errors. Output is deterministic: identical inputs give byte-identical output
(no timestamps; --seed is echoed for future samplers, never consumed).
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import analysis
from . import ensemble as ens
from . import minisuperspace as ms
from .data import bundled_example, bundled_names
from .errors import ConfigError, DomainError, UnconvergedError
from .logweight import LogWeight, render
from .quadrature import QuadratureSpec, classify_tail

_EXIT_CONFIG = 2
_EXIT_DOMAIN = 3


def _fail(kind: str, message: str, code: int) -> None:
    click.echo(f"error: {kind}: {message}", err=True)
    sys.exit(code)


def _guard(body) -> None:
    try:
        body()
    except ConfigError as exc:
        _fail("config", str(exc), _EXIT_CONFIG)
    except UnconvergedError as exc:
        _fail("unconverged", str(exc), _EXIT_DOMAIN)
    except DomainError as exc:
        _fail("domain", str(exc), _EXIT_DOMAIN)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _json_value(x: float):
    # Strict JSON has no Infinity literal; use strings for unbounded values.
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _fmt_log10(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def _magnitude_line(w: LogWeight) -> str:
    return f"{render(w)} (log10 = {_fmt_log10(w.log10)})"


@click.group()
def main() -> None:
    """Contrast single-history and many-worlds predictions for observer-
    weighted world ensembles and capped minisuperspace measures."""


# ---------------------------------------------------------------------------
# ensemble
# ---------------------------------------------------------------------------


def _resolve_config(value: str):
    path = Path(value)
    if path.exists():
        return path
    if value in bundled_names():
        return bundled_example(value)
    raise ConfigError(f"config file not found: {value}")


@main.command("ensemble")
@click.option("--config", "config_path", required=True,
              help="Ensemble definition file (or bundled name: toy1, toy2).")
@click.option("--version", "version", default="both",
              type=click.Choice(["both", ens.SINGLE_HISTORY, ens.MANY_WORLDS]),
              help="Restrict typicality reporting to one theory version.")
@click.option("--query", "queries", multiple=True, metavar="TAG",
              help="Observation tag to evaluate; repeatable.")
@click.option("--condition-on-existence", is_flag=True,
              help="Condition single-history typicality on observers existing.")
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "json", "csv"]))
@click.option("--out", default=None, type=click.Path(), help="Write output here instead of stdout.")
@click.option("--seed", default=None, type=int,
              help="Echoed in machine output for future samplers; not consumed.")
def cmd_ensemble(config_path, version, queries, condition_on_existence, fmt, out, seed):
    """Report distributions, existence probabilities, and query typicality
    for a world ensemble definition file."""

    def body():
        source = _resolve_config(config_path)
        e = ens.load_ensemble(source)

        bare = ens.bare_distribution(e)
        try:
            observational = ens.observational_distribution(e)
        except DomainError:
            observational = None

        existence = {
            v: ens.existence_probability(e, v)
            for v in (ens.SINGLE_HISTORY, ens.MANY_WORLDS)
        }
        versions = (ens.SINGLE_HISTORY, ens.MANY_WORLDS) if version == "both" else (version,)

        query_rows = []
        for q in queries:
            for v in versions:
                conditioned = condition_on_existence and v == ens.SINGLE_HISTORY
                p = ens.typicality(e, v, q, condition_on_existence=conditioned)
                query_rows.append({
                    "version": v,
                    "query": q,
                    "conditioned": conditioned,
                    "probability_log10": p.log10,
                    "probability": p,
                })
        ratio_rows = []
        if version == "both":
            for q in queries:
                r = ens.likelihood_ratio(e, q)
                ratio_rows.append({"query": q, "log10": r.log10, "infinite": r.infinite})

        if fmt == "json":
            record = {
                "input": config_path,
                "seed": seed,
                "bare_distribution": {wid: _json_value(p.log10) for wid, p in bare.entries},
                "observational_distribution": (
                    None if observational is None
                    else {wid: _json_value(p.log10) for wid, p in observational.entries}
                ),
                "existence_probability": {
                    v: _json_value(w.log10) for v, w in existence.items()
                },
                "queries": [
                    {
                        "version": row["version"],
                        "query": row["query"],
                        "conditioned": row["conditioned"],
                        "probability_log10": _json_value(row["probability_log10"]),
                    }
                    for row in query_rows
                ],
                "likelihood_ratios": [
                    {"query": row["query"], "log10": _json_value(row["log10"]),
                     "infinite": row["infinite"]}
                    for row in ratio_rows
                ],
            }
            _emit(json.dumps(record, indent=2, sort_keys=True) + "\n", out)
            return

        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["record", "version", "key", "value_log10"])
            for wid, p in bare.entries:
                writer.writerow(["bare_distribution", "", wid, _fmt_log10(p.log10)])
            if observational is not None:
                for wid, p in observational.entries:
                    writer.writerow(["observational_distribution", "", wid, _fmt_log10(p.log10)])
            for v, w in existence.items():
                writer.writerow(["existence_probability", v, "", _fmt_log10(w.log10)])
            for row in query_rows:
                writer.writerow(["typicality", row["version"], row["query"],
                                 _fmt_log10(row["probability_log10"])])
            for row in ratio_rows:
                writer.writerow(["likelihood_ratio", "", row["query"], _fmt_log10(row["log10"])])
            _emit(buf.getvalue(), out)
            return

        lines = [f"ensemble: {config_path} ({len(e.worlds)} worlds)"]
        if seed is not None:
            lines.append(f"seed: {seed}")
        lines.append("bare distribution:")
        for wid, p in bare.entries:
            lines.append(f"  {wid}: {_magnitude_line(p)}")
        if observational is None:
            lines.append("observational distribution: unavailable (no observations exist in any world)")
        else:
            lines.append("observational distribution:")
            for wid, p in observational.entries:
                lines.append(f"  {wid}: {_magnitude_line(p)}")
        lines.append("existence probability:")
        for v, w in existence.items():
            lines.append(f"  {v}: {_magnitude_line(w)}")
        if query_rows:
            lines.append("typicality:")
            for row in query_rows:
                suffix = " | existence" if row["conditioned"] else ""
                lines.append(
                    f"  P(obs {row['query']}{suffix} | {row['version']}) = "
                    f"{_magnitude_line(row['probability'])}"
                )
        for row in ratio_rows:
            shown = "inf" if row["infinite"] else _fmt_log10(row["log10"])
            lines.append(f"likelihood ratio (many-worlds : single-history) for "
                         f"{row['query']!r}: log10 = {shown}")
        _emit("\n".join(lines) + "\n", out)

    _guard(body)


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------


@main.command("scan")
@click.option("--m", "mass", required=True, type=float, help="Inflaton mass in Planck units.")
@click.option("--u-min", default=None, type=float, help="Lowest u (default: u_cut).")
@click.option("--u-max", default=None, type=float, help="Highest u (default: the Planck cap).")
@click.option("--points", default=200, type=int, help="Number of geometrically spaced samples.")
@click.option("--u-cut", default=1.0, type=float, show_default=True)
@click.option("--kind", default=ms.KIND_NO_BOUNDARY, type=click.Choice(list(ms.KINDS)))
@click.option("--out", default=None, type=click.Path())
@click.option("--seed", default=None, type=int, help="Echoed only; not consumed.")
def cmd_scan(mass, u_min, u_max, points, u_cut, kind, out, seed):
    """Tabulate the log density and log integrands over u as CSV."""

    def body():
        if points < 1:
            raise ConfigError(f"points must be at least 1, got {points}")
        model = ms.NoBoundaryModel(m=mass, u_cut=u_cut, kind=kind)
        lo = model.u_cut if u_min is None else float(u_min)
        hi = ms.cap_u(model) if u_max is None else float(u_max)
        if lo > hi:
            raise ConfigError(f"u range is empty: [{lo:g}, {hi:g}]")
        if lo < model.u_cut:
            raise DomainError(f"u range starts at {lo:g}, below u_cut={model.u_cut:g}")
        us = np.geomspace(lo, hi, points) if points > 1 else np.array([lo])
        dens = ms.log_bare_density(model, us)
        bare = ms.log_integrand(model, us, ms.WEIGHT_BARE)
        obs = ms.log_integrand(model, us, ms.WEIGHT_OBSERVATIONAL)
        dens, bare, obs = np.atleast_1d(dens), np.atleast_1d(bare), np.atleast_1d(obs)

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["u", "log_bare_density", "log_integrand_bare",
                         "log_integrand_observational"])
        for i in range(len(us)):
            writer.writerow([f"{us[i]:.9g}", f"{dens[i]:.9g}", f"{bare[i]:.9g}", f"{obs[i]:.9g}"])
        _emit(buf.getvalue(), out)

    _guard(body)


# ---------------------------------------------------------------------------
# report / crossover
# ---------------------------------------------------------------------------


def _model_from_flags(mass, u_cut, cap, kind) -> ms.NoBoundaryModel:
    return ms.NoBoundaryModel(m=mass, u_cut=u_cut, cap=ms.CapRule.parse(cap), kind=kind)


def _verdict_json(v) -> dict:
    return {"verdict": v.verdict, "asymptotic_slope": _json_value(v.asymptotic_slope)}


def _report_json(report: analysis.RegimeReport, seed) -> dict:
    weightings = {}
    for name, s in report.weightings.items():
        weightings[name] = {
            "peak_region": list(s.peak_region),
            "tail_region": list(s.tail_region),
            "log_mass_peak": _json_value(s.log_mass_peak.log10),
            "log_mass_tail": _json_value(s.log_mass_tail.log10),
            "dominant": s.dominant,
            "log10_dominance_ratio": _json_value(s.log10_dominance_ratio),
        }
    return {
        "model": {
            "m": report.model.m,
            "u_cut": report.model.u_cut,
            "cap": report.model.cap.describe(),
            "kind": report.model.kind,
        },
        "seed": seed,
        "split_u": report.split_u,
        "note": "log masses are up to a model-wide additive constant (log10 units)",
        "weightings": weightings,
        "predicted_tags": dict(report.predicted_tags),
        "divergence": {k: _verdict_json(v) for k, v in report.divergence.items()},
    }


def _report_text(report: analysis.RegimeReport, seed) -> str:
    lines = [f"model: {report.model.describe()}"]
    if seed is not None:
        lines.append(f"seed: {seed}")
    cap = report.weightings[ms.WEIGHT_BARE].tail_region[1]
    lines.append(f"valid range: [{report.model.u_cut:.9g}, {cap:.9g}], split at u = {report.split_u:.9g}")
    lines.append("log masses below are up to a model-wide additive constant (log10 units)")
    header = f"{'weighting':<15} {'mass_peak':>16} {'mass_tail':>16} {'dominant':>9} {'log10 ratio':>13}"
    lines.append(header)
    for name, s in report.weightings.items():
        lines.append(
            f"{name:<15} {_fmt_log10(s.log_mass_peak.log10):>16} "
            f"{_fmt_log10(s.log_mass_tail.log10):>16} {s.dominant:>9} "
            f"{_fmt_log10(s.log10_dominance_ratio):>13}"
        )
    for version, tag in report.predicted_tags.items():
        lines.append(f"predicted observation ({version}): {tag}")
    for name, v in report.divergence.items():
        lines.append(
            f"uncapped {name} integral: {v.verdict} "
            f"(asymptotic slope {v.asymptotic_slope:.6g})"
        )
    return "\n".join(lines) + "\n"


@main.command("report")
@click.option("--m", "mass", required=True, type=float)
@click.option("--u-cut", default=1.0, type=float, show_default=True)
@click.option("--cap", default="planck", metavar="planck|none|U", show_default=True)
@click.option("--kind", default=ms.KIND_NO_BOUNDARY, type=click.Choice(list(ms.KINDS)))
@click.option("--split-u", default="auto", metavar="auto|U", show_default=True)
@click.option("--observerless-peak", is_flag=True,
              help="Model the short-lived peak universes as having no observers.")
@click.option("--rel-tol-log", default=1e-9, type=float, show_default=True)
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "json"]))
@click.option("--out", default=None, type=click.Path())
@click.option("--seed", default=None, type=int, help="Echoed only; not consumed.")
def cmd_report(mass, u_cut, cap, kind, split_u, observerless_peak, rel_tol_log, fmt, out, seed):
    """Peak-versus-tail dominance analysis and per-version predictions."""

    def body():
        model = _model_from_flags(mass, u_cut, cap, kind)
        if model.cap.kind == "none":
            for weighting in ms.WEIGHTINGS:
                v = classify_tail(lambda u, w=weighting: ms.log_integrand(model, u, w),
                                  u_start=model.u_cut)
                click.echo(f"uncapped {weighting} integral: {v.verdict} "
                           f"(asymptotic slope {v.asymptotic_slope:.6g})")
            raise DomainError(
                "unbounded model: total measure diverges, so region masses are undefined; "
                "re-run with a finite --cap"
            )
        split = split_u if split_u == "auto" else float(split_u)
        spec = QuadratureSpec(rel_tol_log=rel_tol_log)
        report = analysis.regime_report(model, spec, split_u=split,
                                        observerless_peak=observerless_peak)
        if fmt == "json":
            _emit(json.dumps(_report_json(report, seed), indent=2, sort_keys=True) + "\n", out)
        else:
            _emit(_report_text(report, seed), out)

    _guard(body)


@main.command("crossover")
@click.option("--m", "mass", required=True, type=float)
@click.option("--u-cut", default=1.0, type=float, show_default=True)
@click.option("--kind", default=ms.KIND_NO_BOUNDARY, type=click.Choice(list(ms.KINDS)))
@click.option("--rel-tol-log", default=1e-7, type=float, show_default=True)
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "json"]))
@click.option("--out", default=None, type=click.Path())
@click.option("--seed", default=None, type=int, help="Echoed only; not consumed.")
def cmd_crossover(mass, u_cut, kind, rel_tol_log, fmt, out, seed):
    """Cap value where observational tail and peak masses balance."""

    def body():
        model = ms.NoBoundaryModel(m=mass, u_cut=u_cut, kind=kind)
        spec = QuadratureSpec(rel_tol_log=rel_tol_log)
        u_cross = analysis.crossover_cap(model, spec)
        if fmt == "json":
            record = {
                "model": {"m": model.m, "u_cut": model.u_cut, "kind": model.kind},
                "seed": seed,
                "crossover_cap_u": None if u_cross is None else u_cross,
            }
            _emit(json.dumps(record, indent=2, sort_keys=True) + "\n", out)
        elif u_cross is None:
            _emit("crossover_cap_u = no-crossover\n", out)
        else:
            _emit(f"crossover_cap_u = {u_cross:.9g}\n", out)

    _guard(body)


if __name__ == "__main__":
    main()
