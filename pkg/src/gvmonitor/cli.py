"""Operator command line: batch pipeline steps and the service launcher.

Subcommands: prep, assemble, train-nb, pseudo, eval, serve, impact.
Exit codes: 0 success, 1 usage error, 2 data error. Every batch subcommand
writes only inside its --out directory and emits a run manifest there.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import date, datetime, timezone
from pathlib import Path

from . import __version__
from .classify import load_nb_model, save_nb_model, train_naive_bayes
from .corpus import (
    CorpusLoadResult,
    SplitSpec,
    assemble_training_set,
    build_holdout_interactions,
    build_holdout_reports,
    dataset_manifest,
    load_corpus,
    load_dataset,
    parse_timestamp,
    save_dataset,
    write_manifest,
)
from .errors import GvmonitorError
from .evaluation import (
    confusion,
    error_profile,
    format_metrics,
    mean_char_count,
    metrics,
    roc_auc,
    write_metrics_report,
    write_roc_csv,
)
from .impact import (
    EventRecord,
    build_panel,
    cox_snell,
    describe_overdispersion,
    diagnostics,
    diff_in_means,
    fit_negbin,
    fit_ols,
    load_panel,
    save_panel,
    write_fit_report,
    write_qq_csv,
    write_trend_csv,
)
from .monitor import MonitorPipeline, MonitorStore, create_app, load_config
from .monitor.pipeline import InteractionRecord
from .selftrain import read_audit_corrections, run_self_training, write_audit_review
from .textprep import ExclusionRuleSet, RawPost, normalize, normalize_text, should_exclude


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """argparse that reports usage problems instead of exiting itself."""

    def error(self, message):
        raise _UsageError(message)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_manifest(out: Path, args, inputs: dict) -> None:
    manifest = {
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "inputs": inputs,
        "package_version": __version__,
        "started_at": datetime.now(timezone.utc).isoformat(),
    }
    (out / "run_manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )


def _post_record(raw: RawPost) -> dict:
    return {
        "id": raw.id,
        "text": raw.text,
        "created_at": raw.created_at.isoformat(),
        "author_handle": raw.author_handle,
        "author_location_text": raw.author_location_text,
        "author_bio": raw.author_bio,
        "has_geo_tag": raw.has_geo_tag,
        "language_tag": raw.language_tag,
        "is_reply": raw.is_reply,
    }


# -- subcommands ---------------------------------------------------------------


def _cmd_prep(args) -> int:
    out = _out_dir(args)
    result: CorpusLoadResult = load_corpus(args.input)
    rules = ExclusionRuleSet(
        partner_handles=frozenset(args.partner_handle or []),
        drop_replies=not args.keep_replies,
        drop_duplicates=not args.keep_duplicates,
    )
    seen: set[str] = set()
    kept: list[RawPost] = []
    excluded = 0
    for post in result.posts:
        if should_exclude(post, rules, seen):
            excluded += 1
            continue
        seen.add(normalize_text(post.text))
        kept.append(post)
    with (out / "filtered.jsonl").open("w", encoding="utf-8") as fh:
        for post in kept:
            fh.write(json.dumps(_post_record(post), ensure_ascii=False) + "\n")
    with (out / "normalized.jsonl").open("w", encoding="utf-8") as fh:
        for post in kept:
            msg = normalize(post)
            fh.write(
                json.dumps(
                    {
                        "post_id": msg.post_id,
                        "text": msg.text,
                        "char_count": msg.char_count,
                        "emoji_count": msg.emoji_count,
                        "contained_url": msg.contained_url,
                        "contained_mention": msg.contained_mention,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    summary = {
        "loaded": len(result.posts),
        "skipped_malformed": result.skipped,
        "excluded": excluded,
        "kept": len(kept),
    }
    (out / "prep_manifest.json").write_text(json.dumps(summary, indent=2) + "\n", "utf-8")
    _write_run_manifest(out, args, {"input": str(args.input)})
    print(
        f"prep: loaded {summary['loaded']} "
        f"(skipped {summary['skipped_malformed']} malformed), "
        f"excluded {excluded}, kept {len(kept)}"
    )
    return 0


def _cmd_assemble(args) -> int:
    out = _out_dir(args)
    spec = SplitSpec(
        cutoff=date.fromisoformat(args.cutoff),
        negative_ratio=args.ratio,
        seed=args.seed,
    )
    positives = load_corpus(args.positives).posts
    unlabeled = load_corpus(args.unlabeled).posts
    train = assemble_training_set(positives, unlabeled, spec)
    save_dataset(train, out / "train.jsonl")
    write_manifest(train, out / "train_manifest.json", spec)
    lines = [f"train: {train.label_counts()} (total {len(train)})"]
    inputs = {"positives": str(args.positives), "unlabeled": str(args.unlabeled)}
    if args.geo_pool:
        geo = load_corpus(args.geo_pool).posts
        holdout = build_holdout_interactions(positives, geo, spec)
        save_dataset(holdout, out / "holdout_interactions.jsonl")
        write_manifest(holdout, out / "holdout_interactions_manifest.json", spec)
        lines.append(f"holdout_interactions: {holdout.label_counts()} (total {len(holdout)})")
        inputs["geo_pool"] = str(args.geo_pool)
        if args.report_month:
            year, month = (int(x) for x in args.report_month.split("-"))
            recode = {}
            if args.recode:
                recode = json.loads(Path(args.recode).read_text("utf-8"))
                inputs["recode"] = str(args.recode)
            reports, flipped = build_holdout_reports(holdout, recode, year, month)
            save_dataset(reports, out / "holdout_reports.jsonl")
            manifest = dataset_manifest(reports, spec)
            manifest["flipped"] = flipped
            (out / "holdout_reports_manifest.json").write_text(
                json.dumps(manifest, indent=2) + "\n", "utf-8"
            )
            lines.append(
                f"holdout_reports: {reports.label_counts()} "
                f"(total {len(reports)}, {flipped} labels flipped)"
            )
    _write_run_manifest(out, args, inputs)
    print("\n".join(lines))
    return 0


def _cmd_train_nb(args) -> int:
    out = _out_dir(args)
    train = load_dataset(args.train)
    model = train_naive_bayes(train, alpha=args.alpha, threshold=args.threshold)
    save_nb_model(model, out / "nb_model.json")
    _write_run_manifest(out, args, {"train": str(args.train)})
    print(
        f"train-nb: fitted on {len(train)} examples, "
        f"vocabulary {len(model.vocabulary_)} terms -> {out / 'nb_model.json'}"
    )
    return 0


def _cmd_pseudo(args) -> int:
    out = _out_dir(args)
    base = load_dataset(args.train)
    pool_posts = load_corpus(args.pool).posts
    pool = [normalize(p) for p in pool_posts]
    holdout_ids: set[str] = set()
    for path in args.holdout or []:
        holdout_ids |= set(load_dataset(path).post_ids)
    corrections = read_audit_corrections(args.corrections) if args.corrections else None

    def trainer(ds):
        return train_naive_bayes(ds, alpha=args.alpha, threshold=args.threshold)

    model, pseudo, audit = run_self_training(
        base,
        pool,
        trainer,
        iterations=args.iterations,
        k=args.k,
        seed=args.seed,
        holdout_ids=holdout_ids,
        corrections=corrections,
    )
    with (out / "pseudo_labels.jsonl").open("w", encoding="utf-8") as fh:
        for e in pseudo.entries:
            fh.write(
                json.dumps(
                    {"post_id": e.post_id, "score": e.score, "pseudo_label": e.pseudo_label}
                )
                + "\n"
            )
    write_audit_review(audit, pool, out / "audit_review.tsv")
    save_nb_model(model, out / "nb_model.json")
    summary = {
        "pool": len(pool),
        "pseudo_labels": len(pseudo),
        "by_label": pseudo.label_counts(),
        "audit_entries": audit.total,
        "iterations": args.iterations,
    }
    (out / "pseudo_manifest.json").write_text(json.dumps(summary, indent=2) + "\n", "utf-8")
    _write_run_manifest(out, args, {"train": str(args.train), "pool": str(args.pool)})
    print(
        f"pseudo: labeled {len(pseudo)} pool messages {pseudo.label_counts()}, "
        f"audit sample {audit.total}, retrained -> {out / 'nb_model.json'}"
    )
    return 0


def _cmd_eval(args) -> int:
    out = _out_dir(args)
    model = load_nb_model(args.model)
    data = load_dataset(args.data)
    preds = model.predict_messages([ex.message for ex in data])
    cm = confusion(preds, data)
    report = metrics(cm)
    write_metrics_report(report, cm, out / "metrics.json")
    truth = {ex.message.post_id: ex.label for ex in data}
    curve = roc_auc([(p.score, truth[p.post_id]) for p in preds])
    write_roc_csv(curve, out / "roc.csv")
    lines = [format_metrics(report, cm), f"auc        {curve.auc:.4f}"]
    if args.train:
        train = load_dataset(args.train)
        mean_chars = mean_char_count(train)
        wrong_ids = {p.post_id for p in preds if p.label != truth[p.post_id]}
        wrong = [ex.message for ex in data if ex.message.post_id in wrong_ids]
        profile = error_profile(wrong, mean_chars)
        (out / "error_profile.json").write_text(
            json.dumps(
                {
                    "misclassified": profile.count,
                    "long_text_share": profile.long_text_share,
                    "emoji_share": profile.emoji_share,
                    "train_mean_chars": profile.train_mean_chars,
                },
                indent=2,
            )
            + "\n",
            "utf-8",
        )
        lines.append(
            f"errors     {profile.count} "
            f"(long {profile.long_text_share:.0%}, emoji {profile.emoji_share:.0%})"
        )
    _write_run_manifest(out, args, {"model": str(args.model), "data": str(args.data)})
    print("\n".join(lines))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    cfg = load_config(args.config)
    model = load_nb_model(args.model)
    store = MonitorStore(args.db)
    pipeline = MonitorPipeline(cfg, model, store)
    if args.once:
        n = pipeline.run_cycle()
        counts = store.tab_counts()
        print(f"serve --once: ingested {n} posts; tabs {counts}")
        return 0
    try:
        pipeline.run_cycle()
    except GvmonitorError as exc:
        print(f"initial poll failed (will retry): {exc}", file=sys.stderr)
    pipeline.run_loop()
    try:
        uvicorn.run(create_app(pipeline), host=args.host, port=args.port, log_level="warning")
    finally:
        pipeline.stop()
    return 0


def _read_interactions_csv(path: str) -> list[InteractionRecord]:
    records = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        for i, row in enumerate(csv.DictReader(fh)):
            records.append(
                InteractionRecord(
                    post_id=row.get("post_id") or f"row-{i}",
                    region=row["region"],
                    sent_at=parse_timestamp(row["sent_at"]),
                    template_id=row.get("template_id") or "standard-followup",
                    operator=row.get("operator") or "csv",
                )
            )
    return records


def _read_events_csv(path: str) -> list[EventRecord]:
    events = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            events.append(
                EventRecord(
                    date=date.fromisoformat(row["date"]),
                    region=row["region"],
                    number_cases=int(row["number_cases"]),
                    number_victims=int(row["number_victims"]),
                    avg_population=float(row["avg_population"]),
                )
            )
    return events


def _cmd_impact(args) -> int:
    out = _out_dir(args)
    inputs: dict = {}
    if args.panel:
        panel = load_panel(args.panel)
        inputs["panel"] = str(args.panel)
    else:
        start_s, _, end_s = args.window.partition(":")
        window = (date.fromisoformat(start_s), date.fromisoformat(end_s))
        interactions = _read_interactions_csv(args.interactions)
        events = _read_events_csv(args.events) if args.events else []
        panel = build_panel(
            interactions,
            events,
            window,
            treatment_region=args.treatment,
            control_region=args.control,
            intervention_start=date.fromisoformat(args.intervention_start),
        )
        inputs = {"interactions": str(args.interactions), "events": str(args.events)}
    save_panel(panel, out / "panel.csv")
    did = diff_in_means(panel)
    mean, variance, overdispersed = describe_overdispersion(panel)
    ols = fit_ols(panel)
    nb = fit_negbin(panel)
    nb_null = fit_negbin(panel, covariates=())
    pseudo_r2 = cox_snell(nb, nb_null)
    write_fit_report(ols, out / "ols_report.txt")
    write_fit_report(nb, out / "negbin_report.txt")
    bundle = diagnostics(ols, panel)
    write_trend_csv(bundle.trend_rows, out / "trends.csv")
    write_qq_csv(bundle.qq_points, out / "qq.csv")
    summary = {
        "observations": len(panel),
        "diff_in_means": {
            "treat_before": did.treat_before,
            "treat_after": did.treat_after,
            "ctrl_before": did.ctrl_before,
            "ctrl_after": did.ctrl_after,
            "estimate": did.estimate,
        },
        "replies_mean": mean,
        "replies_variance": variance,
        "overdispersed": overdispersed,
        "ols_interaction": ols.coef("intervention_treatment"),
        "negbin_interaction": nb.coef("intervention_treatment"),
        "negbin_dispersion": nb.dispersion,
        "cox_snell": pseudo_r2,
    }
    (out / "impact_summary.json").write_text(json.dumps(summary, indent=2) + "\n", "utf-8")
    _write_run_manifest(out, args, inputs)
    print(
        f"impact: n={len(panel)}, diff-in-means {did.estimate:.3f}, "
        f"OLS interaction {summary['ols_interaction']:.3f}, "
        f"NB interaction {summary['negbin_interaction']:.3f}, "
        f"Cox-Snell {pseudo_r2:.3f}"
    )
    return 0


# -- parser ---------------------------------------------------------------------


def build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog="gvmonitor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prep", help="normalize and filter a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--partner-handle", action="append", metavar="HANDLE")
    p.add_argument("--keep-replies", action="store_true")
    p.add_argument("--keep-duplicates", action="store_true")
    p.set_defaults(func=_cmd_prep)

    p = sub.add_parser("assemble", help="build training and holdout datasets")
    p.add_argument("--positives", required=True)
    p.add_argument("--unlabeled", required=True)
    p.add_argument("--geo-pool")
    p.add_argument("--cutoff", required=True, metavar="YYYY-MM-DD")
    p.add_argument("--ratio", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-month", metavar="YYYY-MM")
    p.add_argument("--recode", metavar="RECODE_JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_assemble)

    p = sub.add_parser("train-nb", help="fit the Naive Bayes baseline")
    p.add_argument("--train", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_nb)

    p = sub.add_parser("pseudo", help="run the self-training cycle")
    p.add_argument("--train", required=True)
    p.add_argument("--pool", required=True)
    p.add_argument("--holdout", action="append", metavar="DATASET")
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--corrections", metavar="REVIEW_TSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pseudo)

    p = sub.add_parser("eval", help="metrics, ROC CSV, and error profile")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--train", help="training dataset (enables the error profile)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="run the monitor service")
    p.add_argument("--config", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--db", default="monitor.db")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--once", action="store_true", help="run one poll cycle and exit")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("impact", help="panel build, DiD fits, diagnostics")
    p.add_argument("--panel", help="precomputed panel CSV (skips building)")
    p.add_argument("--interactions", help="interactions CSV (region, sent_at)")
    p.add_argument(
        "--events",
        help="events CSV (date, region, number_cases, number_victims, avg_population)",
    )
    p.add_argument("--window", metavar="START:END")
    p.add_argument("--intervention-start", metavar="YYYY-MM-DD")
    p.add_argument("--treatment")
    p.add_argument("--control")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_impact)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "impact" and not args.panel:
            required = ("interactions", "window", "intervention_start", "treatment", "control")
            missing = [r for r in required if not getattr(args, r)]
            if missing:
                raise _UsageError(
                    "impact needs --panel or all of: "
                    + ", ".join("--" + r.replace("_", "-") for r in missing)
                )
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except GvmonitorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
