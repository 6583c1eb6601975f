"""Paths to the demonstration lexicons bundled with the package.

These lists exist so tests, demos and the synthetic generator have
something concrete to match against. They are short, hand-written word
lists, not an authoritative ESG vocabulary; real studies should supply
their own term files.
"""

from importlib import resources
from pathlib import Path


def _data_file(name: str) -> Path:
    return Path(str(resources.files("esgrisk").joinpath("data", name)))


def demo_esg_lexicon_path() -> Path:
    return _data_file("esg_lexicon_demo.csv")


def demo_sentiment_lexicon_path() -> Path:
    return _data_file("sentiment_lexicon_demo.csv")
