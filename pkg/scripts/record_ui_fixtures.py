"""Record webui contract fixtures from a live service instance.

Boots the monitor pipeline on a small replay feed, drives the HTTP API with
the FastAPI test client, and freezes every response the frontend consumes
into frontend/test/fixtures/api_fixtures.json. Re-run after any API change:

    python3 scripts/record_ui_fixtures.py
"""

import json
import random
import tempfile
from datetime import datetime, timedelta, timezone
from pathlib import Path

from fastapi.testclient import TestClient

from gvmonitor.classify.models import train_naive_bayes
from gvmonitor.corpus import LabeledDataset, LabeledExample
from gvmonitor.monitor.config import MonitorConfig, SourceDescriptor
from gvmonitor.monitor.pipeline import MonitorPipeline
from gvmonitor.monitor.service import create_app
from gvmonitor.monitor.store import MonitorStore
from gvmonitor.textprep import NormalizedMessage

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "frontend" / "test" / "fixtures" / "api_fixtures.json"

T0 = datetime(2023, 5, 2, 9, 0, tzinfo=timezone.utc)
POS_WORDS = ["confronto", "vitima", "feridos", "disparos", "comunidade"]
NEG_WORDS = ["novela", "futebol", "praia", "resenha", "musica"]

FEED = [
    # report_in_region: location resolves to the monitored region
    ("1001", "ana", "Rio de Janeiro", "analista de dados", "tiroteio agora confronto vitima feridos"),
    ("abc-2", "", "rio", "moradora da zona norte", "baleado disparos confronto comunidade"),
    ("1003", "bruno", "RIO", None, "tiroteio confronto disparos vitima"),
    # negative: query keyword present but chatter content
    ("2001", "carla", "Rio de Janeiro", "fa de novela", "tiro na novela futebol praia resenha"),
    ("2002", "davi", None, "resenhista", "tiro de meta futebol musica praia novela"),
    # report_no_geo: report-like but foreign or missing location
    ("3001", "eva", "Sao Paulo", "jornalista", "tiroteio confronto feridos disparos"),
    ("3002", "fabio", None, "vizinho", "baleado vitima confronto comunidade"),
]


def build_model():
    rng = random.Random(7)
    examples = []
    for i in range(60):
        pos = i % 2 == 0
        words = POS_WORDS if pos else NEG_WORDS
        lead = "tiroteio baleado" if pos else "bom dia"
        text = lead + " " + " ".join(rng.choice(words) for _ in range(6))
        msg = NormalizedMessage(
            post_id=f"train{i}",
            text=text,
            char_count=len(text),
            emoji_count=0,
            contained_url=False,
            contained_mention=False,
        )
        examples.append(
            LabeledExample(
                message=msg,
                label="positive" if pos else "negative",
                label_source="human_coded" if pos else "sampled_negative",
            )
        )
    return train_naive_bayes(LabeledDataset(name="fixture_train", examples=tuple(examples)))


def main() -> None:
    tmp = Path(tempfile.mkdtemp(prefix="gvmonitor-fixtures-"))
    feed_path = tmp / "feed.jsonl"
    with feed_path.open("w", encoding="utf-8") as fh:
        for i, (pid, handle, location, bio, text) in enumerate(FEED):
            fh.write(
                json.dumps(
                    {
                        "id": pid,
                        "text": text,
                        "created_at": (T0 + timedelta(minutes=i)).isoformat(),
                        "author_handle": handle,
                        "author_location_text": location,
                        "author_bio": bio,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )

    cfg = MonitorConfig(
        region="rio_de_janeiro",
        alias_table=(
            ("rio de janeiro", "rio_de_janeiro"),
            ("rio", "rio_de_janeiro"),
            ("sao paulo", "sao_paulo"),
        ),
        source=SourceDescriptor(kind="replay", path=str(feed_path)),
    )
    pipeline = MonitorPipeline(cfg, build_model(), MonitorStore(str(tmp / "mon.db")))
    pipeline.run_cycle()
    client = TestClient(create_app(pipeline))

    fixtures: dict[str, dict] = {}

    def record(name: str, response) -> None:
        fixtures[name] = {"status_code": response.status_code, "body": response.json()}

    # one row already interacted, so tab fixtures carry both button states
    record("interaction_created", client.post(
        "/interactions", json={"post_id": "1003", "operator": "op1"}
    ))
    record("interaction_conflict", client.post(
        "/interactions", json={"post_id": "1003", "operator": "op1"}
    ))

    record("status", client.get("/status"))
    for tab in ("report_in_region", "negative", "report_no_geo"):
        record(f"tab_{tab}", client.get(f"/tabs/{tab}"))
    record("tab_unknown", client.get("/tabs/nonsense"))
    record("keywords_ok", client.put(
        "/config/keywords", json={"query": "(bala voando) OR tiro OR tiroteio OR baleado"}
    ))
    record("keywords_rejected", client.put("/config/keywords", json={"query": "(("}))

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixtures, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    counts = {k: len(v["body"].get("rows", [])) for k, v in fixtures.items() if k.startswith("tab_")}
    print(f"wrote {OUT} ({len(fixtures)} fixtures, tab row counts: {counts})")


if __name__ == "__main__":
    main()
