"""Command-line entry point wiring ingestion, generation, fitting, metrics,
and comparison into reproducible batch runs.

Exit codes: 0 success, 2 usage/invalid argument, 3 parse error, 4 infeasible
fit instance, 5 I/O error, 6 fit did not converge.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__, community_stats, network_stats
from .compare import ALL_LABELS, MetricConfig, compare_suite, dataset_curves, relative_improvement
from .curves import Curve, LinearBins
from .errors import InfeasibleError, ParseError
from .fit import FitProblem, FitResult, fit
from .generator import AgmParams, assign_probs_power_law, generate
from .graph import AffiliationNetwork
from .ingest import (
    Dataset,
    format_summary,
    load_dataset,
    preprocess,
    read_community_file,
    read_dataset,
    read_edge_file,
    summarize,
    write_curve,
    write_dataset,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INFEASIBLE = 4
EXIT_IO = 5
EXIT_NONCONVERGED = 6

_STATS_LABELS = ALL_LABELS + ("AB", "SizeCCDF", "MemCCDF")
_LABEL_LOOKUP = {label.lower(): label for label in _STATS_LABELS}


def _parse_properties(spec: str | None, allowed=_STATS_LABELS) -> tuple[str, ...]:
    if not spec:
        return tuple(allowed)
    labels = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        label = _LABEL_LOOKUP.get(token.lower())
        if label is None or label not in allowed:
            raise ValueError(f"unknown property {token!r}")
        labels.append(label)
    if not labels:
        raise ValueError("empty property selection")
    return tuple(labels)


def _apply_threads(threads: int | None) -> None:
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(threads)


# ---------------------------------------------------------------- ingest


def cmd_ingest(args) -> int:
    ds = load_dataset(args.edges, args.communities, args.community_format)
    write_dataset(ds, args.out)
    sys.stdout.write(format_summary(summarize(ds)))
    return EXIT_OK


# ------------------------------------------------------------------- fit


def _write_fit_report(path: Path, result: FitResult, fit_epsilon: bool) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# fit report\n")
        fh.write("# rows: community id, fitted p (1 when the cap binds), x, capped flag\n")
        fh.write(f"converged = {str(result.converged).lower()}\n")
        fh.write(f"iterations = {result.iterations}\n")
        fh.write(f"log_likelihood = {result.log_likelihood:.10g}\n")
        fh.write(f"grad_norm = {result.grad_norm:.6g}\n")
        fh.write(f"communities = {result.p.size}\n")
        fh.write(f"fit_epsilon = {str(fit_epsilon).lower()}\n")
        fh.write(f"epsilon = {result.epsilon:.10g}\n")
        for c in range(result.p.size):
            p = 1.0 if result.capped[c] else result.p[c]
            fh.write(f"{c}\t{p:.10g}\t{result.x[c]:.10g}\t{int(result.capped[c])}\n")


def read_fit_params(path) -> tuple[np.ndarray, float]:
    """Read per-community probabilities (and background epsilon) from a fit
    report or a bare two-column "id<TAB>p" file."""
    epsilon = 0.0
    table: dict[int, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" in stripped:
                key, _, value = stripped.partition("=")
                if key.strip() == "epsilon":
                    epsilon = float(value.strip())
                continue
            cols = stripped.split()
            if len(cols) < 2:
                raise ParseError("expected 'community p' columns", line_no, str(path))
            table[int(cols[0])] = float(cols[1])
    if not table:
        raise ParseError("no per-community probabilities found", path=str(path))
    ids = sorted(table)
    if ids != list(range(len(ids))):
        raise ParseError("community ids must be dense 0..C-1", path=str(path))
    return np.array([table[i] for i in ids]), epsilon


def cmd_fit(args) -> int:
    ds = read_dataset(args.dataset)
    problem = FitProblem(ds.graph, ds.affiliations, fit_epsilon=args.fit_epsilon)
    result = fit(problem, tol=args.tol, max_iter=args.max_iter)
    out = Path(args.out)
    _write_fit_report(out, result, args.fit_epsilon)
    print(f"converged = {str(result.converged).lower()}")
    print(f"log_likelihood = {result.log_likelihood:.10g}")
    print(f"iterations = {result.iterations}")
    print(f"report = {out}")
    return EXIT_OK if result.converged else EXIT_NONCONVERGED


# -------------------------------------------------------------- generate


def _read_affiliations(path, community_format: str = "auto") -> tuple[AffiliationNetwork, np.ndarray]:
    """Load a community file as an affiliation network over its member labels."""
    communities = read_community_file(path, community_format)
    if communities:
        labels = np.unique(np.concatenate([np.fromiter(c, dtype=np.int64) for c in communities if c]))
    else:
        labels = np.empty(0, dtype=np.int64)
    mapped = [np.searchsorted(labels, np.fromiter(c, dtype=np.int64)) for c in communities]
    return AffiliationNetwork(labels.size, mapped), labels


def cmd_generate(args) -> int:
    net, labels = _read_affiliations(args.affiliations, args.community_format)
    if args.params:
        p, eps_from_file = read_fit_params(args.params)
        if p.size != net.num_communities:
            raise ValueError(
                f"params file has {p.size} communities but the affiliation file has {net.num_communities}"
            )
        epsilon = args.epsilon if args.epsilon is not None else eps_from_file
        params = AgmParams(p=p, epsilon=epsilon)
    elif args.beta is not None:
        params = assign_probs_power_law(net, args.beta, args.scale)
        if args.epsilon:
            params = AgmParams(p=params.p, epsilon=args.epsilon)
    else:
        raise ValueError("either --params or --beta must be given")
    graph = generate(
        net,
        params,
        args.seed,
        epsilon_node_guard=args.epsilon_guard,
        allow_large_epsilon=args.allow_large_epsilon,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "edges.tsv", "w", encoding="utf-8") as fh:
        fh.write("# source\ttarget\n")
        for u, v in graph.edges:
            fh.write(f"{labels[u]}\t{labels[v]}\n")
    with open(out / "communities.tsv", "w", encoding="utf-8") as fh:
        fh.write("# one community per line\n")
        for c in range(net.num_communities):
            fh.write("\t".join(str(labels[u]) for u in net.members(c)) + "\n")
    print(f"N = {graph.num_nodes}")
    print(f"E = {graph.edge_count}")
    print(f"C = {net.num_communities}")
    print(f"out = {out}")
    return EXIT_OK


# ----------------------------------------------------------------- stats


def _metric_config(args) -> MetricConfig:
    return MetricConfig(
        seed=args.seed,
        bin_factor=args.bins,
        k_max=args.k_max,
        pair_sample=args.pair_sample,
    )


def _stats_curves(ds: Dataset, labels, cfg: MetricConfig) -> dict[str, Curve | None]:
    suite = [l for l in labels if l in ALL_LABELS]
    out = dict(dataset_curves(ds, suite, cfg)) if suite else {}
    if "AB" in labels:
        ab = community_stats.overlap_clustering(ds, cfg.pair_sample, cfg.log_bins(), cfg.seed)[2]
        out["AB"] = ab if len(ab) else None
    if "SizeCCDF" in labels:
        sizes = ds.affiliations.sizes()
        out["SizeCCDF"] = community_stats.ccdf(sizes) if sizes.size else None
    if "MemCCDF" in labels:
        memberships = ds.affiliations.membership_counts()
        out["MemCCDF"] = community_stats.ccdf(memberships) if memberships.size else None
    return {l: out.get(l) for l in labels}


def _write_stats(ds: Dataset, labels, cfg: MetricConfig, out_dir: Path, figures: bool) -> Path:
    from . import plotting

    out_dir.mkdir(parents=True, exist_ok=True)
    curves = _stats_curves(ds, labels, cfg)
    index_lines = ["# property\tstatus\tfile_or_reason"]
    _, slope = community_stats.edges_vs_size(ds, cfg.log_bins())
    for label in labels:
        curve = curves.get(label)
        if curve is None or len(curve) == 0:
            index_lines.append(f"{label}\tabsent\tno samples")
            continue
        notes = []
        if label == "PC":
            notes.append("reference: y = x (a random member lands in the overlap at rate |O|/|A|)")
        if label == "Vol" and slope is not None:
            notes.append(f"log-log slope = {slope:.6g}")
        tsv = write_curve(curve, out_dir / f"{label}.tsv", notes)
        index_lines.append(f"{label}\tok\t{tsv.name}")
        if figures:
            plotting.render_curve(curve, out_dir / f"{label}.png", label)
    with open(out_dir / "index.tsv", "w", encoding="utf-8") as fh:
        fh.write("\n".join(index_lines) + "\n")
    return out_dir


def cmd_stats(args) -> int:
    ds = read_dataset(args.dataset)
    labels = _parse_properties(args.properties)
    cfg = _metric_config(args)
    out = _write_stats(ds, labels, cfg, Path(args.out), not args.no_figures)
    print(f"out = {out}")
    return EXIT_OK


# --------------------------------------------------------------- compare


def _write_comparison(real: Dataset, synth: Dataset, labels, cfg: MetricConfig, out_dir: Path,
                      figures: bool, synth_b: Dataset | None = None) -> None:
    from . import plotting

    out_dir.mkdir(parents=True, exist_ok=True)
    report = compare_suite(real, synth, labels, cfg)
    text = report.table_text()
    kv = report.kv_lines()
    if synth_b is not None:
        report_b = compare_suite(real, synth_b, labels, cfg)
        text += report_b.table_text(row_name="baseline")
        kv += "".join(
            f"ks_baseline.{label} = {'absent' if report_b.ks.get(label) is None else f'{report_b.ks[label]:.10g}'}\n"
            for label in labels
        )
        imp_lines = ["[improvement]  # (KS_baseline - KS_synth) / max; positive favors the synthetic model"]
        for label in labels:
            a, b = report.ks.get(label), report_b.ks.get(label)
            if a is None or b is None:
                imp_lines.append(f"{label}: absent")
                kv += f"improvement.{label} = absent\n"
            else:
                value = relative_improvement(a, b)
                suffix = "  (both perfect)" if a == b == 0 else ""
                imp_lines.append(f"{label}: {value:+.4f}{suffix}")
                kv += f"improvement.{label} = {value:.10g}\n"
        text += "\n".join(imp_lines) + "\n"
    (out_dir / "report.txt").write_text(text, encoding="utf-8")
    (out_dir / "report.tsv").write_text(kv, encoding="utf-8")
    if figures:
        curves_real = dataset_curves(real, labels, cfg)
        curves_synth = dataset_curves(synth, labels, cfg)
        for label in labels:
            pair = {"reference": curves_real[label], "synthetic": curves_synth[label]}
            if any(c is not None and len(c) for c in pair.values()):
                plotting.render_overlay(pair, out_dir / f"{label}.png", label)


def cmd_compare(args) -> int:
    real = read_dataset(args.real)
    synth = read_dataset(args.synth)
    synth_b = read_dataset(args.synth_b) if args.synth_b else None
    labels = _parse_properties(args.properties, allowed=ALL_LABELS)
    cfg = _metric_config(args)
    _write_comparison(real, synth, labels, cfg, Path(args.out), not args.no_figures, synth_b)
    print(f"out = {Path(args.out)}")
    return EXIT_OK


# ----------------------------------------------------------------- bench


@dataclass
class RunConfig:
    """Flat key-value configuration for a full pipeline run."""

    edges: str
    communities: str
    out: str = "bench-out"
    seed: int = 0
    threads: int = 0
    tol: float = 1e-6
    max_iter: int = 1000
    fit_epsilon: bool = False
    beta: float | None = None
    scale: float = 1.0
    epsilon: float = 0.0
    bins: float = 2.0
    k_max: int = 8
    pair_sample: int = 1000
    properties: str = ""
    community_format: str = "auto"
    figures: bool = True

    def resolved_lines(self) -> list[str]:
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                value = ""
            if isinstance(value, bool):
                value = str(value).lower()
            out.append(f"{f.name} = {value}")
        return out


_BOOL_VALUES = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def parse_run_config(path) -> RunConfig:
    field_types = {f.name: f for f in fields(RunConfig)}
    values: dict[str, object] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ParseError("expected 'key = value'", line_no, str(path))
            key, _, raw = stripped.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key not in field_types:
                raise ValueError(f"unknown config key {key!r}")
            ftype = field_types[key].type
            if ftype == "bool":
                if raw.lower() not in _BOOL_VALUES:
                    raise ParseError(f"expected a boolean for {key!r}", line_no, str(path))
                values[key] = _BOOL_VALUES[raw.lower()]
            elif ftype == "int":
                values[key] = int(raw)
            elif ftype == "float":
                values[key] = float(raw)
            elif ftype == "float | None":
                values[key] = float(raw) if raw else None
            else:
                values[key] = raw
    for required in ("edges", "communities"):
        if required not in values:
            raise ValueError(f"missing config key {required!r}")
    return RunConfig(**values)


def _run_dir(base: Path) -> Path:
    stamp = datetime.datetime.now().strftime("%Y%m%d-%H%M%S-%f")
    candidate = base / f"run-{stamp}"
    n = 1
    while candidate.exists():
        candidate = base / f"run-{stamp}-{n}"
        n += 1
    candidate.mkdir(parents=True)
    return candidate


def cmd_bench(args) -> int:
    cfg = parse_run_config(args.config)
    overrides = {}
    for key in ("seed", "out", "tol", "max_iter", "fit_epsilon", "threads"):
        value = getattr(args, key, None)
        if value is not None and value is not False:
            overrides[key] = value
    cfg = replace(cfg, **overrides)
    _apply_threads(cfg.threads)
    labels = _parse_properties(cfg.properties or None, allowed=ALL_LABELS)
    metric_cfg = MetricConfig(seed=cfg.seed, bin_factor=cfg.bins, k_max=cfg.k_max, pair_sample=cfg.pair_sample)
    config_blob = "\n".join(cfg.resolved_lines())
    config_hash = hashlib.sha256(config_blob.encode()).hexdigest()

    base = Path(cfg.out)
    base.mkdir(parents=True, exist_ok=True)
    run_dir = _run_dir(base)
    stages_done: list[str] = []
    stage = "ingest"
    try:
        real = load_dataset(cfg.edges, cfg.communities, cfg.community_format)
        write_dataset(real, run_dir / "dataset")
        stages_done.append(stage)

        stage = "fit"
        problem = FitProblem(real.graph, real.affiliations, fit_epsilon=cfg.fit_epsilon)
        result = fit(problem, tol=cfg.tol, max_iter=cfg.max_iter)
        _write_fit_report(run_dir / "fit_report.txt", result, cfg.fit_epsilon)
        stages_done.append(stage)

        stage = "generate"
        if cfg.beta is not None:
            params = assign_probs_power_law(real.affiliations, cfg.beta, cfg.scale)
            if cfg.epsilon:
                params = AgmParams(p=params.p, epsilon=cfg.epsilon)
        else:
            params = AgmParams(p=result.p, epsilon=result.epsilon if cfg.fit_epsilon else cfg.epsilon)
        synth_graph = generate(real.affiliations, params, cfg.seed)
        synth = preprocess(
            synth_graph.edges,
            [real.affiliations.members(c) for c in range(real.affiliations.num_communities)],
        )
        write_dataset(synth, run_dir / "synth")
        stages_done.append(stage)

        stage = "stats"
        _write_stats(real, labels, metric_cfg, run_dir / "stats_real", cfg.figures)
        _write_stats(synth, labels, metric_cfg, run_dir / "stats_synth", cfg.figures)
        stages_done.append(stage)

        stage = "compare"
        _write_comparison(real, synth, labels, metric_cfg, run_dir / "compare", cfg.figures)
        stages_done.append(stage)
    except Exception as exc:
        print(f"bench: stage {stage!r} failed: {exc}", file=sys.stderr)
        _write_manifest(run_dir, cfg, config_hash, stages_done, failed=stage)
        raise
    _write_manifest(run_dir, cfg, config_hash, stages_done, failed=None)
    print(f"run_dir = {run_dir}")
    return EXIT_OK


def _write_manifest(run_dir: Path, cfg: RunConfig, config_hash: str, stages_done: list[str], failed: str | None) -> None:
    lines = [
        "# bench manifest",
        f"version = {__version__}",
        f"seed = {cfg.seed}",
        f"config_sha256 = {config_hash}",
        f"created = {datetime.datetime.now().isoformat()}",
        f"stages = {','.join(stages_done)}",
    ]
    if failed:
        lines.append(f"failed_stage = {failed}")
    lines.append("# resolved config")
    lines.extend(cfg.resolved_lines())
    (run_dir / "manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agmkit",
        description="Generate, fit, and measure networks with overlapping community structure.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and canonicalize an edge list plus community file")
    p.add_argument("--edges", required=True)
    p.add_argument("--communities", required=True)
    p.add_argument("--community-format", choices=("auto", "lines", "pairs"), default="auto")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="fit per-community edge probabilities by maximum likelihood")
    p.add_argument("--dataset", required=True, help="canonical dataset directory from 'ingest'")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--fit-epsilon", action="store_true", help="fit a background probability for uncovered edges")
    p.add_argument("--out", required=True, help="fit report file")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("generate", help="sample a graph from a community file")
    p.add_argument("--affiliations", required=True, help="community file defining memberships")
    p.add_argument("--community-format", choices=("auto", "lines", "pairs"), default="auto")
    p.add_argument("--params", help="fit report or 'id<TAB>p' file with per-community probabilities")
    p.add_argument("--beta", type=float, help="power-law exponent: p = scale * size^(-beta)")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=None, help="background edge probability")
    p.add_argument("--epsilon-guard", type=int, default=100_000)
    p.add_argument("--allow-large-epsilon", action="store_true")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("stats", help="write property curves (TSV + figures) for a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--properties", help="comma-separated labels, e.g. Vol,Deg,EP")
    p.add_argument("--bins", type=float, default=2.0, help="log-bin factor")
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--pair-sample", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("compare", help="KS-compare the property curves of two datasets")
    p.add_argument("--real", required=True)
    p.add_argument("--synth", required=True)
    p.add_argument("--synth-b", help="optional second synthetic dataset for relative improvement")
    p.add_argument("--properties")
    p.add_argument("--bins", type=float, default=2.0)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--pair-sample", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="full pipeline: ingest, fit, generate, stats, compare")
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--fit-epsilon", action="store_true", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None):
        _apply_threads(args.threads)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"agmkit: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleError as exc:
        print(f"agmkit: infeasible instance: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"agmkit: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"agmkit: invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
