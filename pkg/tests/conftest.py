"""Shared fixtures: one synthetic corpus and one pipeline run, built once.

The corpus plants four large negative spikes (two per firm, distinct
subcategories, all after day 250 so every event has a complete trailing
window) on top of positive background chatter, and injects a -2% abnormal
return on the planted days so study-stage signs are unambiguous.
"""

from pathlib import Path

import pytest

from esgrisk.pipeline import run_config_from_dict, run_pipeline
from esgrisk.synth import PlantedEvent, SynthConfig, generate
from esgrisk.taxonomy import Node

STD_SEED = 42


def std_synth_config(seed: int = STD_SEED) -> SynthConfig:
    return SynthConfig(
        seed=seed,
        n_firms=2,
        n_days=300,
        base_rate=5.0,
        filler_rate=6.0,
        planted=(
            PlantedEvent(0, Node.CLIMATE_CHANGE, 262, 12.0),
            PlantedEvent(0, Node.HUMAN_CAPITAL, 275, 12.0),
            PlantedEvent(1, Node.CORPORATE_GOVERNANCE, 265, 12.0),
            PlantedEvent(1, Node.PRODUCT_LIABILITY, 282, 12.0),
        ),
        injected_ar=-0.02,
        background_sentiment="positive",
    )


def corpus_paths(corpus_dir: Path, outdir: Path) -> dict:
    return {
        "messages": str(corpus_dir / "messages.csv"),
        "prices": str(corpus_dir / "prices.csv"),
        "market_index": str(corpus_dir / "market_index.csv"),
        "earnings": str(corpus_dir / "earnings.csv"),
        "controversy": str(corpus_dir / "controversy.csv"),
        "esg_lexicon": str(corpus_dir / "esg_lexicon.csv"),
        "sentiment_lexicon": str(corpus_dir / "sentiment_lexicon.csv"),
        "outdir": str(outdir),
    }


def make_run_config(corpus_dir: Path, outdir: Path, **extra) -> "RunConfig":
    raw = {"paths": corpus_paths(corpus_dir, outdir)}
    raw.update(extra)
    return run_config_from_dict(raw)


@pytest.fixture(scope="session")
def std_corpus(tmp_path_factory):
    """Synthetic corpus directory plus its ground truth."""
    corpus_dir = tmp_path_factory.mktemp("std_corpus")
    truth = generate(std_synth_config(), corpus_dir)
    return corpus_dir, truth


@pytest.fixture(scope="session")
def std_run(std_corpus, tmp_path_factory):
    """One full pipeline run over the standard corpus, with the 90-day
    robustness study enabled."""
    corpus_dir, truth = std_corpus
    outdir = tmp_path_factory.mktemp("std_run")
    cfg = make_run_config(corpus_dir, outdir, robustness_est_len=90)
    classify_out, detect_out, study_out = run_pipeline(cfg)
    return {
        "corpus_dir": corpus_dir,
        "truth": truth,
        "cfg": cfg,
        "outdir": outdir,
        "classify": classify_out,
        "detect": detect_out,
        "study": study_out,
    }
