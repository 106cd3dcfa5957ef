"""The fixed 64-feature schema.

Column order is part of the on-disk CSV contract: the header is the five
metadata columns followed by the 64 feature names in ``FEATURE_NAMES``
order.  The inventory groups features as follows:

* 17 syntactic/error measures (word_errors .. dss)
* 14 grammatical-morpheme counts (present_progressive .. contractible_aux)
* 4 fluency/utterance-structure counts (n_dos .. fillers)
* 6 language-model perplexities (s_?g_ppl vs the SLI model, d_?g_ppl vs
  the TD model, orders 1-3)
* 8 z-score comparisons against SLI/TD group statistics
* 3 production counts + 4 lexical measures (child_TNW .. num_pos_tags)
* ipsyn_total
* 7 supplementary counts (total_utts .. pro_tokens) that round the
  published 56-name inventory up to the 64 columns this pipeline emits;
  each is a standard language-sample measure already computed as an
  intermediate (utterance totals, type counts, morpheme totals, and POS
  class token counts)
"""

from __future__ import annotations

CATEGORIES = (
    "production",
    "lexical",
    "morphological",
    "syntactic_error",
    "fluency",
    "perplexity",
    "zscore",
)

_SCHEMA: tuple[tuple[str, str], ...] = (
    # syntactic and error analysis
    ("word_errors", "syntactic_error"),
    ("f_k", "syntactic_error"),
    ("n_v", "syntactic_error"),
    ("n_aux", "syntactic_error"),
    ("n_3s_v", "syntactic_error"),
    ("det_n_pl", "syntactic_error"),
    ("det_pl_n", "syntactic_error"),
    ("pro_aux", "syntactic_error"),
    ("pro_3s_v", "syntactic_error"),
    ("total_error", "syntactic_error"),
    ("total_syl", "syntactic_error"),
    ("average_syl", "syntactic_error"),
    ("mlu_words", "syntactic_error"),
    ("mlu_morphemes", "syntactic_error"),
    ("mlu100_utts", "syntactic_error"),
    ("verb_utt", "syntactic_error"),
    ("dss", "syntactic_error"),
    # grammatical morpheme markers
    ("present_progressive", "morphological"),
    ("propositions_in", "morphological"),
    ("propositions_on", "morphological"),
    ("plural_s", "morphological"),
    ("irregular_past_tense", "morphological"),
    ("possessive_s", "morphological"),
    ("uncontractible_copula", "morphological"),
    ("articles", "morphological"),
    ("regular_past_ed", "morphological"),
    ("regular_3rd_person_s", "morphological"),
    ("irregular_3rd_person", "morphological"),
    ("uncontractible_aux", "morphological"),
    ("contractible_copula", "morphological"),
    ("contractible_aux", "morphological"),
    # utterance structure and fluency
    ("n_dos", "fluency"),
    ("repetition", "fluency"),
    ("retracing", "fluency"),
    ("fillers", "fluency"),
    # language-model perplexity
    ("s_1g_ppl", "perplexity"),
    ("s_2g_ppl", "perplexity"),
    ("s_3g_ppl", "perplexity"),
    ("d_1g_ppl", "perplexity"),
    ("d_2g_ppl", "perplexity"),
    ("d_3g_ppl", "perplexity"),
    # z-score comparisons
    ("z_mlu_sli", "zscore"),
    ("z_mlu_td", "zscore"),
    ("z_word_errors_sli", "zscore"),
    ("z_word_errors_td", "zscore"),
    ("z_r_2_i_verbs_sli", "zscore"),
    ("z_r_2_i_verbs_td", "zscore"),
    ("z_utts_sli", "zscore"),
    ("z_utts_td", "zscore"),
    # basic production
    ("child_TNW", "production"),
    ("child_TNS", "production"),
    ("examiner_TNW", "production"),
    # lexical diversity and complexity
    ("freq_ttr", "lexical"),
    ("r_2_i_verbs", "lexical"),
    ("mor_words", "lexical"),
    ("num_pos_tags", "lexical"),
    # productive syntax checklist score
    ("ipsyn_total", "syntactic_error"),
    # supplementary counts
    ("total_utts", "production"),
    ("examiner_TNS", "production"),
    ("total_morphemes", "production"),
    ("word_types", "lexical"),
    ("verb_tokens", "lexical"),
    ("noun_tokens", "lexical"),
    ("pro_tokens", "lexical"),
)

FEATURE_NAMES: tuple[str, ...] = tuple(name for name, _ in _SCHEMA)
FEATURE_CATEGORY: dict[str, str] = dict(_SCHEMA)

METADATA_COLUMNS: tuple[str, ...] = ("id", "corpus", "group", "age_months", "sex")

assert len(FEATURE_NAMES) == 64
assert len(set(FEATURE_NAMES)) == 64
assert set(FEATURE_CATEGORY.values()) <= set(CATEGORIES)


def csv_header() -> tuple[str, ...]:
    return METADATA_COLUMNS + FEATURE_NAMES


# ratio-like features live in (0, 1] or have other documented ranges;
# everything else in this set must be a non-negative count
RATIO_FEATURES = frozenset({
    "f_k", "average_syl", "mlu_words", "mlu_morphemes", "mlu100_utts",
    "dss", "freq_ttr", "r_2_i_verbs", "ipsyn_total",
    "s_1g_ppl", "s_2g_ppl", "s_3g_ppl", "d_1g_ppl", "d_2g_ppl", "d_3g_ppl",
    "z_mlu_sli", "z_mlu_td", "z_word_errors_sli", "z_word_errors_td",
    "z_r_2_i_verbs_sli", "z_r_2_i_verbs_td", "z_utts_sli", "z_utts_td",
})

COUNT_FEATURES = frozenset(FEATURE_NAMES) - RATIO_FEATURES
