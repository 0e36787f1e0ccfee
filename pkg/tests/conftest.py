import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from segaug.corpus import Corpus, ParallelPair, Sentence  # noqa: E402
from segaug.tokenizer import DEFAULT_DELIMITERS  # noqa: E402
from segaug.toy import bundled_path  # noqa: E402


def make_corpus(rows, langs=("ja", "zh")):
    """rows: list of (source tokens, target tokens) as lists of str."""
    pairs = tuple(
        ParallelPair(i, Sentence.from_texts(s, langs[0], DEFAULT_DELIMITERS),
                     Sentence.from_texts(t, langs[1], DEFAULT_DELIMITERS))
        for i, (s, t) in enumerate(rows)
    )
    return Corpus(pairs, *langs)


@pytest.fixture
def toy_paths():
    return {
        "src": bundled_path("toy.src"),
        "tgt": bundled_path("toy.tgt"),
        "align": bundled_path("toy.pharaoh"),
        "novel_dict": bundled_path("toy.novel.dict"),
        "inverse_dict": bundled_path("toy.inverse.dict"),
        "mirror_src": bundled_path("toy_mirror.src"),
        "mirror_tgt": bundled_path("toy_mirror.tgt"),
        "mirror_align": bundled_path("toy_mirror.pharaoh"),
    }
