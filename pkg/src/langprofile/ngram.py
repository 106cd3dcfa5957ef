"""Add-k smoothed n-gram language models over child utterances.

Orders 1-3.  Tokens are lowercased clean child tokens; with padding on
(the default) each utterance gets ``order - 1`` leading ``<s>`` symbols
and one trailing ``</s>``.  Types rarer than ``unk_threshold`` map to
``<unk>`` at training time; unseen test tokens map to ``<unk>`` at
scoring time.  The prediction vocabulary is the post-mapping type set
plus ``<unk>`` (plus ``</s>`` when padding), so add-k probabilities over
any context sum to one.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .chat import Transcript
from .errors import EmptyCorpus, EmptyTranscript, ZeroProbability

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"


@dataclass(frozen=True)
class NGramModel:
    order: int
    smoothing_k: float
    unk_threshold: int
    pad: bool
    counts: dict[tuple[str, ...], int]
    context_totals: dict[tuple[str, ...], int]
    vocab: frozenset[str]

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def prob(self, ngram: tuple[str, ...]) -> float:
        k = self.smoothing_k
        num = self.counts.get(ngram, 0) + k
        den = self.context_totals.get(ngram[:-1], 0) + k * self.vocab_size
        if num == 0.0 or den == 0.0:
            return 0.0
        return num / den


def _child_sentences(transcripts) -> list[list[str]]:
    sents = []
    for t in transcripts:
        for u in t.child_utterances():
            toks = [w.lower() for w in u.clean_tokens]
            if toks:
                sents.append(toks)
    return sents


def train(transcripts, order: int, smoothing_k: float = 1.0,
          unk_threshold: int = 1, pad: bool = True) -> NGramModel:
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2, or 3, got {order}")
    sents = _child_sentences(transcripts)
    if not sents:
        raise EmptyCorpus("no child tokens to train on")

    freq = Counter(tok for s in sents for tok in s)
    rare = {tok for tok, c in freq.items() if c < unk_threshold}
    vocab = set(freq) - rare | {UNK}
    if pad:
        vocab.add(EOS)

    counts: Counter = Counter()
    context_totals: Counter = Counter()
    for s in sents:
        mapped = [tok if tok not in rare else UNK for tok in s]
        if pad:
            mapped = [BOS] * (order - 1) + mapped + [EOS]
        for i in range(len(mapped) - order + 1):
            gram = tuple(mapped[i:i + order])
            counts[gram] += 1
            context_totals[gram[:-1]] += 1
    return NGramModel(order, float(smoothing_k), int(unk_threshold), bool(pad),
                      dict(counts), dict(context_totals), frozenset(vocab))


def perplexity(model: NGramModel, t: Transcript) -> float:
    """exp of mean negative log probability per scored position.

    Padding symbols ``<s>`` only ever appear as context; ``</s>`` is a
    scored position when padding is on.
    """
    sents = _child_sentences([t])
    if not sents:
        raise EmptyTranscript(f"transcript {t.id!r} has no child tokens")
    log_sum = 0.0
    n = 0
    for s in sents:
        mapped = [tok if tok in model.vocab else UNK for tok in s]
        if model.pad:
            mapped = [BOS] * (model.order - 1) + mapped + [EOS]
        # every window predicts its final symbol; <s> fills context only
        for i in range(len(mapped) - model.order + 1):
            gram = tuple(mapped[i:i + model.order])
            p = model.prob(gram)
            if p <= 0.0:
                raise ZeroProbability(f"zero probability for {gram} (k=0 and unseen)")
            log_sum += math.log(p)
            n += 1
    if n == 0:
        raise EmptyTranscript(f"transcript {t.id!r} has no scorable positions")
    return math.exp(-log_sum / n)


def perplexity_features(t: Transcript, sli_models: dict[int, NGramModel],
                        td_models: dict[int, NGramModel]) -> dict[str, float]:
    """The six perplexity features: s_* against the SLI models, d_*
    against the TD models, orders 1-3."""
    return {
        "s_1g_ppl": perplexity(sli_models[1], t),
        "s_2g_ppl": perplexity(sli_models[2], t),
        "s_3g_ppl": perplexity(sli_models[3], t),
        "d_1g_ppl": perplexity(td_models[1], t),
        "d_2g_ppl": perplexity(td_models[2], t),
        "d_3g_ppl": perplexity(td_models[3], t),
    }


def train_group_models(transcripts, smoothing_k: float = 1.0,
                       unk_threshold: int = 1, pad: bool = True
                       ) -> dict[str, dict[int, NGramModel]]:
    """Train the six models (SLI/TD x orders 1-3) from labeled transcripts."""
    out: dict[str, dict[int, NGramModel]] = {}
    for label in ("SLI", "TD"):
        members = [t for t in transcripts if t.group.value == label]
        if not members:
            raise EmptyCorpus(f"no transcripts labeled {label}")
        out[label] = {o: train(members, o, smoothing_k, unk_threshold, pad)
                      for o in (1, 2, 3)}
    return out


# -- on-disk format -------------------------------------------------------
# header line: ngram\torder=<n>\tk=<float>\tunk_threshold=<int>\tpad=<0|1>
# then one line per n-gram: <count>\t<w1>[ <w2>[ <w3>]]   (sorted)

def save_model(model: NGramModel, path: str | Path) -> None:
    lines = [f"ngram\torder={model.order}\tk={model.smoothing_k!r}"
             f"\tunk_threshold={model.unk_threshold}\tpad={int(model.pad)}"]
    for gram in sorted(model.counts):
        lines.append(f"{model.counts[gram]}\t{' '.join(gram)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> NGramModel:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln]
    header = lines[0].split("\t")
    if not header or header[0] != "ngram":
        raise EmptyCorpus(f"{path}: not a model file")
    fields = dict(part.split("=", 1) for part in header[1:])
    order = int(fields["order"])
    k = float(fields["k"])
    threshold = int(fields["unk_threshold"])
    pad = bool(int(fields["pad"]))

    counts: dict[tuple[str, ...], int] = {}
    context_totals: Counter = Counter()
    vocab = {UNK}
    if pad:
        vocab.add(EOS)
    for ln in lines[1:]:
        count_text, gram_text = ln.split("\t")
        gram = tuple(gram_text.split(" "))
        counts[gram] = int(count_text)
        context_totals[gram[:-1]] += counts[gram]
        vocab.add(gram[-1])
    vocab.discard(BOS)
    return NGramModel(order, k, threshold, pad, counts,
                      dict(context_totals), frozenset(vocab))
