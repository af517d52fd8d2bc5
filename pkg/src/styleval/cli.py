"""Command-line interface.

Subcommands: plan (build case pairings), mda-fit (train the register
model), run (execute systems and score), report (tables and plots),
oracle-gen (regenerate the metric reference fixture).

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 chat endpoint failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_run_config, make_chat_client, make_scorer_client
from .errors import ConfigError, ProviderError, StylevalError
from .pipeline import ALL_SYSTEMS, GENERATIVE_SYSTEMS

_USAGE_EXIT = 1
_DATA_EXIT = 2
_PROVIDER_EXIT = 3

TABLE_COLUMNS = {
    "mud": [
        "away_biber", "towards_biber", "away_luar", "towards_luar",
        "away_stylecav", "towards_stylecav", "mis", "sbert_sim", "meteor",
        "cola", "overlap_rouge1", "overlap_rouge2", "overlap_rougeL",
    ],
    "gyafc": [
        "away_biber", "towards_biber", "mis", "sbert_sim", "meteor",
        "cola", "formality_prob", "overlap_rouge1", "overlap_rouge2",
        "overlap_rougeL",
    ],
    "cochrane": [
        "away_biber", "towards_biber", "fkgl", "ari", "rouge1", "rouge2",
        "rougeL", "bleu", "sari", "mis", "cola", "overlap_rouge1",
        "overlap_rouge2", "overlap_rougeL",
    ],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(_USAGE_EXIT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="styleval", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_plan = sub.add_parser("plan", help="build a pairing plan from a corpus file")
    p_plan.add_argument("--task", required=True, choices=("mud", "gyafc", "cochrane"))
    p_plan.add_argument("--corpus", required=True, help="newline-delimited JSON corpus")
    p_plan.add_argument("--out", required=True, help="plan JSON output path")
    p_plan.add_argument("--seed", type=int, default=0)
    p_plan.add_argument("--variant", choices=("random", "single", "diverse"),
                        default="random", help="author pairing variant (mud)")
    p_plan.add_argument("--n-authors", type=int, default=15,
                        help="authors per side (mud)")
    p_plan.add_argument("--source-split", default=None)
    p_plan.add_argument("--target-split", default=None)
    p_plan.add_argument("--domain", default=None, help="domain filter (gyafc)")
    p_plan.add_argument("--direction", choices=("i2f", "f2i"), default="i2f",
                        help="rewrite direction (gyafc)")
    p_plan.add_argument("--k", type=int, default=16,
                        help="exemplar segments per case (gyafc)")

    p_fit = sub.add_parser("mda-fit", help="fit the register-analysis model")
    group = p_fit.add_mutually_exclusive_group(required=True)
    group.add_argument("--texts", help="newline-delimited JSON with a text field")
    group.add_argument("--plan", help="fit on a plan's inputs and exemplars")
    p_fit.add_argument("--out", required=True, help="model JSON output path")
    p_fit.add_argument("--dimensions", type=int, default=6)
    p_fit.add_argument("--variance-threshold", type=float, default=None)
    p_fit.add_argument("--varimax", action="store_true")
    p_fit.add_argument("--catalog", default=None, help="feature catalog JSON path")

    p_run = sub.add_parser("run", help="execute systems over a plan and score")
    p_run.add_argument("--plan", required=True)
    p_run.add_argument("--run-dir", required=True)
    p_run.add_argument("--model", required=True, help="fitted register model path")
    p_run.add_argument("--config", default=None, help="run configuration JSON")
    p_run.add_argument("--base-url", default=None)
    p_run.add_argument("--endpoint-model", default=None)
    p_run.add_argument("--cache-dir", default=None)
    p_run.add_argument("--sidecar-url", default=None)
    p_run.add_argument("--systems", default=None, help="comma-separated system list")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--concurrency", type=int, default=None)
    p_run.add_argument("--max-attempts", type=int, default=None)
    p_run.add_argument("--backoff-base", type=float, default=None)
    p_run.add_argument("--catalog", default=None)
    p_run.add_argument("--skip-scoring", action="store_true")

    p_report = sub.add_parser("report", help="aggregate a run into tables and plots")
    p_report.add_argument("--plan", required=True)
    p_report.add_argument("--run-dir", required=True)
    p_report.add_argument("--out-dir", default=None,
                          help="defaults to RUN_DIR/report")
    p_report.add_argument("--top-k", type=int, default=15,
                          help="descriptor table size")

    p_oracle = sub.add_parser("oracle-gen", help="regenerate the metric fixture")
    p_oracle.add_argument("--out", required=True)
    p_oracle.add_argument("--cases", type=int, default=200)

    return parser


def _read_text_corpus(path: str) -> list[str]:
    from .errors import SchemaViolation

    texts = []
    try:
        with open(path, encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except ValueError as exc:
                    raise SchemaViolation(number, f"invalid JSON: {exc}")
                if not isinstance(record, dict) or not isinstance(record.get("text"), str):
                    raise SchemaViolation(number, "expected an object with a text field")
                if not record["text"].strip():
                    raise SchemaViolation(number, "text field is empty")
                texts.append(record["text"])
    except OSError as exc:
        from .errors import IoFailure

        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return texts


def cmd_plan(args) -> int:
    from . import datasets

    if args.task == "mud":
        authors, dropped = datasets.load_corpus(args.corpus, "mud")
        if dropped:
            print(f"dropped {len(dropped)} authors without exactly "
                  f"{datasets.MUD_POSTS_PER_AUTHOR} posts", file=sys.stderr)
        sources, targets = datasets.select_mud_authors(
            authors, args.variant, args.seed, n_each=args.n_authors,
            source_split=args.source_split, target_split=args.target_split,
        )
        plan = datasets.build_mud_cases(sources, targets, args.variant, args.seed)
    elif args.task == "gyafc":
        records = datasets.load_corpus(args.corpus, "gyafc")
        domains = sorted({r.domain for r in records})
        domain = args.domain
        if domain is None:
            if len(domains) != 1:
                raise ConfigError(
                    f"--domain is required; corpus has domains {domains}"
                )
            domain = domains[0]
        plan = datasets.build_gyafc_cases(
            records, domain, args.direction, k=args.k, seed=args.seed
        )
    else:
        records = datasets.load_corpus(args.corpus, "cochrane")
        plan = datasets.build_cochrane_cases(records, seed=args.seed)
    datasets.save_plan(plan, args.out)
    print(f"wrote {args.out}: task={plan.task} cases={len(plan.cases)} "
          f"digest={plan.digest()}")
    return 0


def cmd_mda_fit(args) -> int:
    from .datasets import load_plan
    from .features import extract_features, load_catalog
    from .mda import MdaFitConfig, fit_mda, save_model
    from .textproc import Document

    if args.texts:
        texts = _read_text_corpus(args.texts)
    else:
        plan = load_plan(args.plan)
        seen = set()
        texts = []
        for case in plan.cases:
            for text in (case.input_text, case.style_exemplar):
                if text not in seen:
                    seen.add(text)
                    texts.append(text)
    catalog = load_catalog(args.catalog)
    corpus = [extract_features(Document.analyze(t), catalog) for t in texts]
    config = MdaFitConfig(
        dimensions=args.dimensions,
        variance_threshold=args.variance_threshold,
        varimax=args.varimax,
    )
    model = fit_mda(corpus, [f.name for f in catalog.features], config)
    save_model(model, args.out)
    fractions = ", ".join(f"{v:.3f}" for v in model.explained_variance)
    print(f"wrote {args.out}: {len(texts)} documents, {model.d} dimensions, "
          f"explained variance [{fractions}]")
    return 0


def _run_overrides(args) -> dict:
    overrides = {
        "endpoint.base_url": args.base_url,
        "endpoint.model": args.endpoint_model,
        "endpoint.cache_dir": args.cache_dir,
        "endpoint.concurrency": args.concurrency,
        "endpoint.max_attempts": args.max_attempts,
        "endpoint.backoff_base": args.backoff_base,
        "sidecar.base_url": args.sidecar_url,
        "seed": args.seed,
    }
    if args.systems is not None:
        overrides["systems"] = [s.strip() for s in args.systems.split(",") if s.strip()]
    return overrides


def cmd_run(args) -> int:
    from .datasets import load_plan
    from .features import load_catalog
    from .mda import load_model
    from .runner import RunStore, execute_plan, score_plan

    config = load_run_config(args.config, _run_overrides(args))
    plan = load_plan(args.plan)
    model = load_model(args.model)
    catalog = load_catalog(args.catalog)
    client = make_chat_client(config)
    if client is None and any(s in GENERATIVE_SYSTEMS for s in config.systems):
        raise ConfigError(
            "endpoint.base_url is required to run generative systems"
        )
    store = RunStore(args.run_dir)
    store.root.mkdir(parents=True, exist_ok=True)
    with open(store.root / "run_config.json", "w", encoding="utf-8") as handle:
        json.dump(
            {
                "plan": str(args.plan),
                "plan_digest": plan.digest(),
                "systems": config.systems,
                "seed": config.seed,
            },
            handle,
            indent=2,
            sort_keys=True,
        )
        handle.write("\n")
    counts = execute_plan(
        plan, config.systems, store, client, seed=config.seed,
        max_new_tokens=config.endpoint.max_new_tokens,
    )
    print(f"records: ran={counts['ran']} skipped={counts['skipped']} "
          f"degraded={counts['degraded']}")
    if not args.skip_scoring:
        scorer = make_scorer_client(config)
        score_counts = score_plan(plan, config.systems, store, model, catalog, scorer)
        print(f"scores: scored={score_counts['scored']} "
              f"skipped={score_counts['skipped']} "
              f"degraded={score_counts['degraded']}")
    return 0


def cmd_report(args) -> int:
    from . import analysis
    from .datasets import load_plan
    from .runner import RunStore, collect_results, frontier_axes

    plan = load_plan(args.plan)
    store = RunStore(args.run_dir)
    systems = [s for s in ALL_SYSTEMS]
    results = collect_results(plan, systems, store)
    results = {s: pairs for s, pairs in results.items() if pairs}
    if not results:
        raise ConfigError(f"no records found under {args.run_dir}")

    out_dir = Path(args.out_dir) if args.out_dir else store.report_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    summaries = analysis.summarize_systems(results)
    columns = TABLE_COLUMNS.get(plan.task, TABLE_COLUMNS["mud"])
    (out_dir / "metrics.csv").write_text(
        analysis.metrics_csv(summaries, columns), encoding="utf-8"
    )
    (out_dir / "metrics.txt").write_text(
        analysis.metrics_text_table(summaries, columns), encoding="utf-8"
    )

    x_metric, y_metric = frontier_axes(plan.task, summaries)
    points = []
    for summary in summaries:
        x = summary.means.get(x_metric)
        y = summary.means.get(y_metric)
        if x is None or y is None:
            continue
        points.append(analysis.SystemPoint(summary.system, x, y, summary.n_scored))
    frontier = analysis.pareto_frontier(points)
    (out_dir / "frontier.csv").write_text(
        analysis.points_csv(points, frontier), encoding="utf-8"
    )
    (out_dir / "frontier.svg").write_text(
        analysis.points_svg(points, frontier, x_label=x_metric, y_label=y_metric),
        encoding="utf-8",
    )
    analysis.render_scatter_png(
        points, frontier, str(out_dir / "frontier.png"),
        x_label=x_metric, y_label=y_metric,
    )

    for system in GENERATIVE_SYSTEMS:
        if system not in results:
            continue
        runs = [run for run, _ in results[system]]
        table = analysis.descriptor_frequency(runs, k=args.top_k)
        if table.entries:
            (out_dir / f"descriptors_{system}.csv").write_text(
                analysis.frequency_csv(table), encoding="utf-8"
            )

    runs_by_system = {
        system: {run.case_id: run for run, _ in pairs}
        for system, pairs in results.items()
    }
    (out_dir / "dump.txt").write_text(
        analysis.output_dump(plan.cases, runs_by_system), encoding="utf-8"
    )

    meta = {
        "task": plan.task,
        "x_metric": x_metric,
        "y_metric": y_metric,
        "systems": sorted(results),
        "cases": len(plan.cases),
    }
    (out_dir / "report.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote report to {out_dir} (x={x_metric}, y={y_metric})")
    return 0


def cmd_oracle_gen(args) -> int:
    from .oracles import generate_metric_fixture

    fixture = generate_metric_fixture(args.cases)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    print(f"wrote {args.out}: {len(fixture['cases'])} cases, "
          f"{len(fixture['pinned'])} pinned")
    return 0


_COMMANDS = {
    "plan": cmd_plan,
    "mda-fit": cmd_mda_fit,
    "run": cmd_run,
    "report": cmd_report,
    "oracle-gen": cmd_oracle_gen,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else _USAGE_EXIT
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"styleval: configuration error: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    except ProviderError as exc:
        print(f"styleval: provider error: {exc}", file=sys.stderr)
        return _PROVIDER_EXIT
    except StylevalError as exc:
        print(f"styleval: {exc}", file=sys.stderr)
        return _DATA_EXIT
    except ValueError as exc:
        print(f"styleval: {exc}", file=sys.stderr)
        return _USAGE_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
