"""Shared builders for the test suite."""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

import pytest

from gvmonitor.corpus import NEGATIVE, POSITIVE, LabeledDataset, LabeledExample
from gvmonitor.textprep import NormalizedMessage, RawPost

BASE_TIME = datetime(2018, 3, 1, 12, 0, tzinfo=timezone.utc)

# Two disjoint token pools: gun-report vocabulary vs small talk. Mixing
# ratios control how separable a synthetic corpus is.
REPORT_TOKENS = ["tiro", "tiroteio", "bala", "baleado", "disparo", "rajada"]
CHATTER_TOKENS = ["bom", "dia", "novela", "futebol", "praia", "almoco"]


def make_msg(post_id: str, text: str, *, emoji_count: int = 0) -> NormalizedMessage:
    return NormalizedMessage(
        post_id=post_id,
        text=text,
        char_count=len(text),
        emoji_count=emoji_count,
        contained_url=False,
        contained_mention=False,
    )


def make_post(post_id: str, text: str, *, minutes: int = 0, **kwargs) -> RawPost:
    return RawPost(
        id=post_id,
        text=text,
        created_at=BASE_TIME + timedelta(minutes=minutes),
        **kwargs,
    )


def synth_text(rng: random.Random, positive: bool, n_tokens: int = 8, purity: float = 0.8) -> str:
    """Synthetic message text; purity is the own-class token share (1.0 = separable)."""
    main, other = (REPORT_TOKENS, CHATTER_TOKENS) if positive else (CHATTER_TOKENS, REPORT_TOKENS)
    words = [
        rng.choice(main) if rng.random() < purity else rng.choice(other)
        for _ in range(n_tokens)
    ]
    return " ".join(words)


def synth_dataset(
    name: str,
    n_pos: int,
    n_neg: int,
    seed: int = 0,
    id_prefix: str = "",
    purity: float = 0.8,
) -> LabeledDataset:
    rng = random.Random(seed)
    examples = []
    for i in range(n_pos):
        msg = make_msg(f"{id_prefix}pos{i}", synth_text(rng, True, rng.randint(4, 12), purity))
        examples.append(LabeledExample(msg, POSITIVE, "human_coded"))
    for i in range(n_neg):
        msg = make_msg(f"{id_prefix}neg{i}", synth_text(rng, False, rng.randint(4, 12), purity))
        examples.append(LabeledExample(msg, NEGATIVE, "sampled_negative"))
    return LabeledDataset(name, examples)


@pytest.fixture()
def toy_train() -> LabeledDataset:
    return synth_dataset("toy_train", 30, 30, seed=1)
