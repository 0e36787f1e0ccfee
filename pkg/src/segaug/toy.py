"""Seeded synthetic parallel corpora for tests, demos and benchmarks.

Each sentence is a run of clauses. A source clause is a list of words
``s<k>`` followed by "," or ";", and the target clause holds the matching
``t<k>`` words in shuffled order followed by "，" or "；". Clauses occasionally
swap places on the target side, and an untranslated particle is sometimes
added to a source clause. The gold word alignment is known exactly.
"""

from __future__ import annotations

import argparse
import random
from dataclasses import dataclass
from pathlib import Path

from .aligner import WordAlignment, format_pharaoh

SRC_DELIMS = (",", ";")
TGT_DELIMS = ("，", "；")
PARTICLE = "no"


@dataclass
class ToyCorpus:
    source: list
    target: list
    alignments: list
    vocab_size: int
    mirror: bool = False

    def inverse_dictionary(self) -> dict:
        """Target word -> its source word: a perfect back-translator."""
        d = {f"t{k}": f"s{k}" for k in range(self.vocab_size)}
        d.update({"。": ".", "，": ",", "；": ";"})
        return d

    def novel_dictionary(self) -> dict:
        """Target word -> a source-side synonym never seen in the corpus."""
        d = {f"t{k}": f"r{k}" for k in range(self.vocab_size)}
        d.update({"。": ".", "，": ",", "；": ";"})
        return d


def make_toy_corpus(n_pairs: int = 100, seed: int = 13, vocab_size: int = 80,
                    mirror: bool = False) -> ToyCorpus:
    """Generate ``n_pairs`` sentence pairs.

    With ``mirror=True`` the target side repeats the source tokens verbatim,
    which makes identity back-translation reproduce every source partial.
    """
    rng = random.Random(seed)
    sources, targets, aligns = [], [], []
    for _ in range(n_pairs):
        n_clauses = rng.choices((1, 2, 3, 4), weights=(2, 4, 3, 1))[0]
        clauses = []
        for c in range(n_clauses):
            words = rng.sample(range(vocab_size), rng.randint(2, 5))
            particle_at = rng.randrange(len(words) + 1) if rng.random() < 0.3 else None
            clauses.append((words, particle_at, rng.randrange(2)))
        order = list(range(n_clauses))
        if n_clauses >= 2 and rng.random() < 0.2:
            k = rng.randrange(n_clauses - 1)
            order[k], order[k + 1] = order[k + 1], order[k]

        src, src_pos = [], {}
        for c, (words, particle_at, delim) in enumerate(clauses):
            for i, w in enumerate(words):
                if i == particle_at:
                    src.append(PARTICLE)
                src_pos[(c, i)] = len(src)
                src.append(f"s{w}")
            if particle_at == len(words):
                src.append(PARTICLE)
            src_pos[(c, "d")] = len(src)
            src.append(SRC_DELIMS[delim] if c < n_clauses - 1 else ".")

        if mirror:
            tgt = list(src)
            links = {(i, i) for i in range(len(src))}
        else:
            tgt, links = [], set()
            for rank, c in enumerate(order):
                words, _, delim = clauses[c]
                perm = list(range(len(words)))
                rng.shuffle(perm)
                for i in perm:
                    links.add((src_pos[(c, i)], len(tgt)))
                    tgt.append(f"t{words[i]}")
                # the delimiter closing target slot `rank` is the one closing source clause `rank`
                links.add((src_pos[(rank, "d")], len(tgt)))
                last = rank == n_clauses - 1
                tgt.append(TGT_DELIMS[clauses[rank][2]] if not last else "。")
        sources.append(src)
        targets.append(tgt)
        aligns.append(WordAlignment(frozenset(links)))
    return ToyCorpus(sources, targets, aligns, vocab_size, mirror)


def write_toy_corpus(toy: ToyCorpus, out_dir, stem: str = "toy", langs=("src", "tgt")) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "src": out / f"{stem}.{langs[0]}",
        "tgt": out / f"{stem}.{langs[1]}",
        "align": out / f"{stem}.pharaoh",
    }
    paths["src"].write_text("".join(" ".join(s) + "\n" for s in toy.source), encoding="utf-8")
    paths["tgt"].write_text("".join(" ".join(t) + "\n" for t in toy.target), encoding="utf-8")
    paths["align"].write_text("".join(format_pharaoh(a) + "\n" for a in toy.alignments), encoding="utf-8")
    if toy.mirror:
        return paths
    for key, d in (("inverse_dict", toy.inverse_dictionary()), ("novel_dict", toy.novel_dictionary())):
        paths[key] = out / f"{stem}.{key.split('_')[0]}.dict"
        paths[key].write_text("".join(f"{k}\t{v}\n" for k, v in sorted(d.items())), encoding="utf-8")
    return paths


def bundled_path(name: str) -> Path:
    return Path(__file__).parent / "data" / name


def main(argv=None):
    p = argparse.ArgumentParser(description="write a synthetic toy parallel corpus")
    p.add_argument("out_dir")
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--seed", type=int, default=13)
    p.add_argument("--mirror", action="store_true")
    p.add_argument("--stem", default="toy")
    args = p.parse_args(argv)
    paths = write_toy_corpus(make_toy_corpus(args.pairs, args.seed, mirror=args.mirror),
                             args.out_dir, args.stem)
    for k, v in paths.items():
        print(f"{k}\t{v}")


if __name__ == "__main__":
    main()
