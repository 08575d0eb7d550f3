import csv
import json
import random
from datetime import datetime, timedelta, timezone

import pytest

from conftest import BASE_TIME, REPORT_TOKENS, synth_text
from gvmonitor.cli import main


def write_corpus(path, rows):
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def corpus_row(i, text, *, minutes=0, prefix="p", **kwargs):
    row = {
        "id": f"{prefix}{i}",
        "text": text,
        "created_at": (BASE_TIME + timedelta(minutes=minutes)).isoformat(),
    }
    row.update(kwargs)
    return row


@pytest.fixture()
def labeled_files(tmp_path):
    """Positives + unlabeled pool, both pre-cutoff (cutoff = day after BASE_TIME)."""
    rng = random.Random(0)
    positives = tmp_path / "positives.jsonl"
    unlabeled = tmp_path / "unlabeled.jsonl"
    write_corpus(
        positives,
        [corpus_row(i, synth_text(rng, True), prefix="pos") for i in range(10)],
    )
    write_corpus(
        unlabeled,
        [corpus_row(i, synth_text(rng, False), prefix="u") for i in range(60)],
    )
    return positives, unlabeled


class TestExitCodes:
    def test_usage_error_is_1(self, capsys):
        assert main(["no-such-command"]) == 1
        assert main([]) == 1
        assert main(["impact", "--out", "x"]) == 1  # missing inputs

    def test_data_error_is_2(self, tmp_path, capsys):
        rc = main(
            ["train-nb", "--train", str(tmp_path / "missing.jsonl"), "--out", str(tmp_path)]
        )
        assert rc == 2
        assert "error:" in capsys.readouterr().err


class TestPrep:
    def test_writes_filtered_and_normalized(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.jsonl"
        rows = [
            corpus_row(1, "tiro na rua https://t.co/abc"),
            corpus_row(2, "tiro  na   rua https://t.co/zzz"),  # dup after normalize
            corpus_row(3, "resposta", is_reply=True),
            corpus_row(4, "RT @parceiro tiroteio", minutes=1),
        ]
        write_corpus(corpus, rows)
        out = tmp_path / "out"
        rc = main(
            [
                "prep",
                "--input",
                str(corpus),
                "--out",
                str(out),
                "--partner-handle",
                "@parceiro",
            ]
        )
        assert rc == 0
        manifest = json.loads((out / "prep_manifest.json").read_text())
        assert manifest == {"loaded": 4, "skipped_malformed": 0, "excluded": 3, "kept": 1}
        normalized = [
            json.loads(line) for line in (out / "normalized.jsonl").read_text().splitlines()
        ]
        assert normalized[0]["text"] == "tiro na rua <URL>"
        assert (out / "run_manifest.json").exists()


class TestAssembleTrainEval:
    def test_full_batch_flow(self, tmp_path, labeled_files, capsys):
        positives, unlabeled = labeled_files
        cutoff = (BASE_TIME + timedelta(days=1)).date().isoformat()
        assemble_out = tmp_path / "assembled"
        rc = main(
            [
                "assemble",
                "--positives",
                str(positives),
                "--unlabeled",
                str(unlabeled),
                "--cutoff",
                cutoff,
                "--ratio",
                "3",
                "--seed",
                "1",
                "--out",
                str(assemble_out),
            ]
        )
        assert rc == 0
        manifest = json.loads((assemble_out / "train_manifest.json").read_text())
        assert manifest["counts"] == {"positive": 10, "negative": 30}

        train_out = tmp_path / "model"
        rc = main(
            [
                "train-nb",
                "--train",
                str(assemble_out / "train.jsonl"),
                "--out",
                str(train_out),
            ]
        )
        assert rc == 0
        model_file = train_out / "nb_model.json"
        assert model_file.exists()

        eval_out = tmp_path / "eval"
        rc = main(
            [
                "eval",
                "--model",
                str(model_file),
                "--data",
                str(assemble_out / "train.jsonl"),
                "--train",
                str(assemble_out / "train.jsonl"),
                "--out",
                str(eval_out),
            ]
        )
        assert rc == 0
        metrics = json.loads((eval_out / "metrics.json").read_text())
        assert metrics["metrics"]["accuracy"] > 0.75  # train-set fit on noisy synthetic data
        assert (eval_out / "roc.csv").exists()
        assert (eval_out / "error_profile.json").exists()
        out_text = capsys.readouterr().out
        assert "accuracy" in out_text

    def test_assemble_with_holdouts(self, tmp_path, labeled_files):
        positives, unlabeled = labeled_files
        rng = random.Random(9)
        # post-cutoff positives + geo pool for the holdout builder
        post_rows = [
            corpus_row(i, synth_text(rng, True), prefix="hp", minutes=60 * 24 * 40 + i)
            for i in range(4)
        ]
        with positives.open("a", encoding="utf-8") as fh:
            for row in post_rows:
                fh.write(json.dumps(row) + "\n")
        geo = tmp_path / "geo.jsonl"
        write_corpus(
            geo,
            [
                corpus_row(
                    i,
                    synth_text(rng, False),
                    prefix="g",
                    minutes=60 * 24 * 40 + i,
                    author_location_text="Rio de Janeiro",
                )
                for i in range(7)
            ],
        )
        recode = tmp_path / "recode.json"
        recode.write_text(json.dumps({"g0": "positive"}))
        out = tmp_path / "out"
        cutoff = (BASE_TIME + timedelta(days=1)).date().isoformat()
        report_month = (BASE_TIME + timedelta(days=40)).strftime("%Y-%m")
        rc = main(
            [
                "assemble",
                "--positives",
                str(positives),
                "--unlabeled",
                str(unlabeled),
                "--geo-pool",
                str(geo),
                "--cutoff",
                cutoff,
                "--report-month",
                report_month,
                "--recode",
                str(recode),
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        holdout = json.loads((out / "holdout_interactions_manifest.json").read_text())
        assert holdout["counts"] == {"positive": 4, "negative": 7}
        reports = json.loads((out / "holdout_reports_manifest.json").read_text())
        assert reports["flipped"] == 1


class TestPseudo:
    def test_pseudo_outputs(self, tmp_path, labeled_files):
        positives, unlabeled = labeled_files
        cutoff = (BASE_TIME + timedelta(days=1)).date().isoformat()
        assembled = tmp_path / "assembled"
        main(
            [
                "assemble",
                "--positives",
                str(positives),
                "--unlabeled",
                str(unlabeled),
                "--cutoff",
                cutoff,
                "--out",
                str(assembled),
            ]
        )
        rng = random.Random(4)
        pool = tmp_path / "pool.jsonl"
        write_corpus(
            pool,
            [
                corpus_row(i, synth_text(rng, rng.random() < 0.5), prefix="pl")
                for i in range(50)
            ],
        )
        out = tmp_path / "pseudo_out"
        rc = main(
            [
                "pseudo",
                "--train",
                str(assembled / "train.jsonl"),
                "--pool",
                str(pool),
                "--k",
                "3",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        entries = [
            json.loads(line) for line in (out / "pseudo_labels.jsonl").read_text().splitlines()
        ]
        assert len(entries) == 50
        review = (out / "audit_review.tsv").read_text().splitlines()
        assert review[0].split("\t") == ["post_id", "text", "score", "pseudo_label", "human_label"]
        assert (out / "nb_model.json").exists()


class TestServeOnce:
    def test_single_cycle(self, tmp_path, capsys):
        rng = random.Random(2)
        feed = tmp_path / "feed.jsonl"
        write_corpus(
            feed,
            [corpus_row(i, f"tiro {synth_text(rng, True, 4)}", prefix="f") for i in range(5)],
        )
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(
            json.dumps(
                {
                    "region": "rio_de_janeiro",
                    "aliases": [["rio de janeiro", "rio_de_janeiro"]],
                    "source": {"kind": "replay", "path": str(feed)},
                }
            )
        )
        # train a model via the CLI for realism
        from gvmonitor.corpus import LabeledDataset, LabeledExample, save_dataset
        from gvmonitor.textprep import RawPost, normalize

        train = tmp_path / "train.jsonl"
        examples = [
            LabeledExample(
                message=normalize(
                    RawPost(id=f"t{i}", text=synth_text(rng, i % 2 == 0), created_at=BASE_TIME)
                ),
                label="positive" if i % 2 == 0 else "negative",
                label_source="human_coded" if i % 2 == 0 else "sampled_negative",
            )
            for i in range(12)
        ]
        save_dataset(LabeledDataset(name="train", examples=tuple(examples)), train)
        model_out = tmp_path / "model"
        assert main(["train-nb", "--train", str(train), "--out", str(model_out)]) == 0
        rc = main(
            [
                "serve",
                "--config",
                str(cfg_path),
                "--model",
                str(model_out / "nb_model.json"),
                "--db",
                str(tmp_path / "mon.db"),
                "--once",
            ]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "ingested 5 posts" in out


class TestImpactCommand:
    def test_from_csvs(self, tmp_path, capsys):
        rng = random.Random(3)
        start = BASE_TIME.date()
        inter = tmp_path / "inter.csv"
        with inter.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["post_id", "region", "sent_at"])
            for d in range(20):
                day = start + timedelta(days=d)
                for region, lam in (("t", 8 if d >= 10 else 4), ("c", 3)):
                    for i in range(max(1, int(rng.gauss(lam, 1)))):
                        stamp = datetime(
                            day.year, day.month, day.day, 12, tzinfo=timezone.utc
                        )
                        w.writerow([f"{region}{d}x{i}", region, stamp.isoformat()])
        events = tmp_path / "events.csv"
        with events.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["date", "region", "number_cases", "number_victims", "avg_population"])
            for d in range(20):
                day = start + timedelta(days=d)
                for region, base_pop in (("t", 100.0), ("c", 90.0)):
                    w.writerow(
                        [day.isoformat(), region, rng.randint(0, 3), rng.randint(0, 4),
                         base_pop + d + rng.random()]
                    )
        out = tmp_path / "impact"
        rc = main(
            [
                "impact",
                "--interactions",
                str(inter),
                "--events",
                str(events),
                "--window",
                f"{start.isoformat()}:{(start + timedelta(days=19)).isoformat()}",
                "--intervention-start",
                (start + timedelta(days=10)).isoformat(),
                "--treatment",
                "t",
                "--control",
                "c",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        summary = json.loads((out / "impact_summary.json").read_text())
        assert summary["observations"] == 40
        # the report model adjusts for population, so the interaction is close to
        # (not identical with) the raw cell-mean contrast
        assert summary["diff_in_means"]["estimate"] == pytest.approx(
            summary["ols_interaction"], abs=1.0
        )
        for name in ("panel.csv", "ols_report.txt", "negbin_report.txt", "trends.csv", "qq.csv"):
            assert (out / name).exists()

    def test_from_prebuilt_panel(self, tmp_path):
        # build once via CSVs, then rerun from the saved panel
        self.test_from_csvs(tmp_path, None)
        out2 = tmp_path / "impact2"
        rc = main(
            ["impact", "--panel", str(tmp_path / "impact" / "panel.csv"), "--out", str(out2)]
        )
        assert rc == 0
        a = json.loads((tmp_path / "impact" / "impact_summary.json").read_text())
        b = json.loads((out2 / "impact_summary.json").read_text())
        assert a["diff_in_means"] == b["diff_in_means"]
