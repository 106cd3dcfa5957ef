"""Table-driven sentence scoring (DSS-style) and productive-syntax
checklist scoring (IPSyn-style).

Both instruments are data-driven: the shipped default tables are
deliberately simplified approximations of the published book-length
originals and can be replaced by passing a different JSON file.  Rule
semantics:

* token rules match one mor token: ``pos``/``pos_in`` are POS prefixes
  (segment-aware, so ``"n"`` matches ``n:prop`` but not ``neg``),
  ``lemma_in`` matches lowercased lemmas, ``suffix_in``/``fusion_in``
  match affix markers, ``inflected`` tests for any suffix or fusion
* ``sequence`` rules match consecutive mor tokens within an utterance
* ``structural`` rules test utterance shape: ``question``,
  ``wh_question``, ``aux_initial_question``, ``multiword``
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..chat import Terminator, Transcript, Utterance
from ..errors import NoScorableUtterances

_WH_LEMMAS = frozenset({"who", "whom", "whose", "what", "where",
                        "when", "why", "how", "which"})

_VERBAL_POS = ("v", "aux", "cop", "mod")


def _load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def default_dss_table() -> dict:
    ref = resources.files("langprofile.features").joinpath("data/dss_table.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def default_ipsyn_table() -> dict:
    ref = resources.files("langprofile.features").joinpath("data/ipsyn_table.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def load_table(path: str | Path) -> dict:
    return _load_json(path)


def pos_matches(pos_tag: str, prefix: str) -> bool:
    return pos_tag == prefix or pos_tag.startswith(prefix + ":")


def _token_matches(tok, pred: dict) -> bool:
    if "pos" in pred and not pos_matches(tok.pos_tag, pred["pos"]):
        return False
    if "pos_in" in pred and not any(pos_matches(tok.pos_tag, p) for p in pred["pos_in"]):
        return False
    if "lemma_in" in pred and tok.lemma.lower() not in pred["lemma_in"]:
        return False
    if "suffix_in" in pred and not any(s in tok.suffixes for s in pred["suffix_in"]):
        return False
    if "fusion_in" in pred and not any(f in tok.fusions for f in pred["fusion_in"]):
        return False
    if "inflected" in pred:
        inflected = bool(tok.suffixes or tok.fusions)
        if inflected != pred["inflected"]:
            return False
    return True


def _structural_matches(u: Utterance, name: str) -> bool:
    if name == "question":
        return u.terminator is Terminator.QUESTION
    if name == "wh_question":
        return (u.terminator is Terminator.QUESTION and u.mor_tokens is not None
                and any(t.lemma.lower() in _WH_LEMMAS for t in u.mor_tokens))
    if name == "aux_initial_question":
        return (u.terminator is Terminator.QUESTION and bool(u.mor_tokens)
                and any(pos_matches(u.mor_tokens[0].pos_tag, p)
                        for p in ("aux", "cop", "mod")))
    if name == "multiword":
        return len(u.clean_tokens) >= 2
    raise ValueError(f"unknown structural predicate {name!r}")


def _sequence_count(u: Utterance, preds: list[dict]) -> int:
    toks = u.mor_tokens or ()
    span = len(preds)
    hits = 0
    for i in range(len(toks) - span + 1):
        if all(_token_matches(toks[i + j], preds[j]) for j in range(span)):
            hits += 1
    return hits


def _is_scorable(u: Utterance) -> bool:
    if not u.mor_tokens:
        return False
    return any(pos_matches(t.pos_tag, p) for t in u.mor_tokens for p in _VERBAL_POS)


def dss_score(t: Transcript, table: dict | None = None) -> float:
    """Mean per-utterance score over scorable child utterances.

    An utterance is scorable when its mor tier contains a verbal element.
    Each category credits the highest-scoring matching rule once per
    utterance; a sentence point is added for complete, error-free
    utterances when the table enables it.
    """
    if table is None:
        table = default_dss_table()
    scorable = [u for u in t.child_utterances() if _is_scorable(u)]
    if not scorable:
        raise NoScorableUtterances("no child utterance with a verbal mor element")
    total = 0.0
    for u in scorable:
        score = 0
        for category in table["categories"]:
            best = 0
            for rule in category["rules"]:
                if "structural" in rule:
                    hit = _structural_matches(u, rule["structural"])
                elif "sequence" in rule:
                    hit = _sequence_count(u, rule["sequence"]) > 0
                else:
                    hit = any(_token_matches(tok, rule) for tok in u.mor_tokens)
                if hit and rule["points"] > best:
                    best = rule["points"]
            score += best
        if table.get("sentence_point") and u.events.word_errors == 0 \
                and not u.postcodes and u.terminator is not Terminator.TRAIL_OFF:
            score += 1
        total += score
    return total / len(scorable)


def ipsyn_total(t: Transcript, table: dict | None = None) -> float:
    """Checklist score: per structure, one credit per occurrence capped
    at ``cap`` (default 2), summed over the checklist."""
    if table is None:
        table = default_ipsyn_table()
    utts = [u for u in t.child_utterances() if u.mor_tokens]
    if not utts:
        raise NoScorableUtterances("no child utterance carries a mor tier")
    cap = int(table.get("cap", 2))
    total = 0
    for struct in table["structures"]:
        occurrences = 0
        for u in utts:
            if "structural" in struct:
                occurrences += 1 if _structural_matches(u, struct["structural"]) else 0
            elif "sequence" in struct:
                occurrences += _sequence_count(u, struct["sequence"])
            else:
                occurrences += sum(1 for tok in u.mor_tokens
                                   if _token_matches(tok, struct["token"]))
        total += min(cap, occurrences)
    return float(total)
