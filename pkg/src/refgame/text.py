"""Tokenisation and stopwords for corpus statistics.

The tokenizer lowercases and splits on runs of non-alphanumeric characters,
except that contraction tails like "n't" survive as their own token
("don't" -> ["do", "n't"]), since negation tails matter for the word-class
analysis. The stopword list is a pinned snapshot of a standard English list,
shipped as a data file so every ratio in the analytics output is reproducible.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_TOKEN_RE = re.compile(r"[^\W_]+(?=n't)|n't|[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower().replace("’", "'"))


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    data = resources.files("refgame").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(line.strip() for line in data.splitlines() if line.strip())


def load_stopwords(path: str) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())


def content_tokens(tokens: list[str], stopwords: frozenset[str]) -> list[str]:
    return [t for t in tokens if t not in stopwords]
