"""Coreference evaluation: MUC, B³, CEAFE and LEA, plus the CoNLL average.

Scorers compare a key (gold) chain set against a response (predicted) chain
set over exact-match mention identities. Each metric reduces to precision
and recall numerator/denominator parts, so documents can be scored
independently and micro-averaged by summing parts in a fixed order.

Also here: mention-detection scoring, manual-correction statistics, and
whole-corpus statistics.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import wordlists
from .model import AnnotatedDocument, CoreferenceChain, Mention, mention_text

ChainSets = Sequence[frozenset]


def as_chain_sets(chains: Iterable) -> list[frozenset]:
    """Normalize chain collections to frozensets of hashable mention ids.

    Chains are put into a canonical order so that summation order, and with
    it every score, is bit-identical under any permutation of the input.
    """
    out = []
    for chain in chains:
        if isinstance(chain, CoreferenceChain):
            out.append(frozenset(chain.mentions))
        else:
            out.append(frozenset(chain))
    out = [c for c in out if c]
    out.sort(key=lambda c: (len(c), sorted(map(repr, c))))
    return out


@dataclass(frozen=True)
class MetricScore:
    precision: float
    recall: float
    f1: float
    flags: tuple[str, ...] = ()


def f1_score(precision: float, recall: float) -> float:
    if precision + recall > 0:
        return 2 * precision * recall / (precision + recall)
    return 0.0


@dataclass(frozen=True)
class MetricParts:
    """Numerator/denominator sums; add parts across documents to micro-average."""

    p_num: float = 0.0
    p_den: float = 0.0
    r_num: float = 0.0
    r_den: float = 0.0
    flags: tuple[str, ...] = ()

    def __add__(self, other: "MetricParts") -> "MetricParts":
        return MetricParts(
            self.p_num + other.p_num,
            self.p_den + other.p_den,
            self.r_num + other.r_num,
            self.r_den + other.r_den,
            tuple(dict.fromkeys(self.flags + other.flags)),
        )

    def score(self) -> MetricScore:
        flags = list(self.flags)
        if self.p_den <= 0:
            flags.append("undefined-precision")
        if self.r_den <= 0:
            flags.append("undefined-recall")
        p = self.p_num / self.p_den if self.p_den > 0 else 0.0
        r = self.r_num / self.r_den if self.r_den > 0 else 0.0
        return MetricScore(p, r, f1_score(p, r), tuple(dict.fromkeys(flags)))


def _membership(chains: ChainSets) -> dict[Hashable, int]:
    return {m: i for i, chain in enumerate(chains) for m in chain}


def _muc_half(chains: ChainSets, other_membership: dict) -> tuple[float, float]:
    """Link-based numerator/denominator for one role of MUC."""
    num = 0.0
    den = 0.0
    for chain in chains:
        partitions = set()
        absent = 0
        for m in chain:
            if m in other_membership:
                partitions.add(other_membership[m])
            else:
                absent += 1
        num += len(chain) - (len(partitions) + absent)
        den += len(chain) - 1
    return num, den


def muc_parts(key: Iterable, response: Iterable) -> MetricParts:
    k = as_chain_sets(key)
    r = as_chain_sets(response)
    r_num, r_den = _muc_half(k, _membership(r))
    p_num, p_den = _muc_half(r, _membership(k))
    return MetricParts(p_num, p_den, r_num, r_den)


def muc(key: Iterable, response: Iterable) -> MetricScore:
    """MUC: minimal-link score; singleton chains are invisible to it."""
    return muc_parts(key, response).score()


def _b3_half(chains: ChainSets, others: ChainSets) -> tuple[float, float]:
    membership = _membership(others)
    num = 0.0
    count = 0
    for chain in chains:
        for m in chain:
            count += 1
            other = others[membership[m]] if m in membership else frozenset()
            num += len(chain & other) / len(chain)
    return num, float(count)


def b_cubed(key: Iterable, response: Iterable) -> MetricScore:
    return b_cubed_parts(key, response).score()


def b_cubed_parts(key: Iterable, response: Iterable) -> MetricParts:
    """B³: per-mention overlap ratios; unaligned mentions contribute zero."""
    k = as_chain_sets(key)
    r = as_chain_sets(response)
    r_num, r_den = _b3_half(k, r)
    p_num, p_den = _b3_half(r, k)
    return MetricParts(p_num, p_den, r_num, r_den)


def phi4(a: frozenset, b: frozenset) -> float:
    return 2.0 * len(a & b) / (len(a) + len(b))


def ceaf_e_parts(key: Iterable, response: Iterable) -> MetricParts:
    k = as_chain_sets(key)
    r = as_chain_sets(response)
    if not k or not r:
        return MetricParts(0.0, float(len(r)), 0.0, float(len(k)))
    sim = np.zeros((len(k), len(r)))
    for i, kc in enumerate(k):
        for j, rc in enumerate(r):
            sim[i, j] = phi4(kc, rc)
    rows, cols = linear_sum_assignment(-sim)
    total = float(sim[rows, cols].sum())
    return MetricParts(total, float(len(r)), total, float(len(k)))


def ceaf_e(key: Iterable, response: Iterable) -> MetricScore:
    """CEAFE: optimal one-to-one chain alignment under the phi4 similarity."""
    return ceaf_e_parts(key, response).score()


def _link_count(size: int) -> float:
    return size * (size - 1) / 2.0


def _lea_half(chains: ChainSets, others: ChainSets) -> tuple[float, float]:
    num = 0.0
    den = 0.0
    for chain in chains:
        den += len(chain)
        if len(chain) == 1:
            resolved = 1.0 if any(chain <= o and len(o) == 1 for o in others) else 0.0
            links = 1.0
        else:
            resolved = sum(_link_count(len(chain & o)) for o in others)
            links = _link_count(len(chain))
        num += len(chain) * resolved / links
    return num, den


def lea_parts(key: Iterable, response: Iterable) -> MetricParts:
    k = as_chain_sets(key)
    r = as_chain_sets(response)
    r_num, r_den = _lea_half(k, r)
    p_num, p_den = _lea_half(r, k)
    return MetricParts(p_num, p_den, r_num, r_den)


def lea(key: Iterable, response: Iterable) -> MetricScore:
    """LEA: entity-size-weighted ratio of resolved links per entity.

    Singleton entities count one self-link, resolved only by a matching
    singleton on the other side.
    """
    return lea_parts(key, response).score()


@dataclass(frozen=True)
class ScoreReport:
    muc: MetricScore
    b3: MetricScore
    ceafe: MetricScore
    lea: MetricScore
    conll_avg_f1: float


_PARTS_FUNCS = {
    "muc": muc_parts,
    "b3": b_cubed_parts,
    "ceafe": ceaf_e_parts,
    "lea": lea_parts,
}


def conll_average(key: Iterable, response: Iterable) -> ScoreReport:
    """All four metrics plus the unweighted mean of the MUC/B³/CEAFE F1s."""
    return score_documents([(key, response)])


def score_documents(pairs: Iterable[tuple[Iterable, Iterable]]) -> ScoreReport:
    """Micro-average scores over (key, response) document pairs.

    Parts are accumulated in input order, so the reduction is deterministic
    no matter how the per-document work was scheduled.
    """
    sums = {name: MetricParts() for name in _PARTS_FUNCS}
    for key, response in pairs:
        k = as_chain_sets(key)
        r = as_chain_sets(response)
        for name, func in _PARTS_FUNCS.items():
            sums[name] = sums[name] + func(k, r)
    scores = {name: parts.score() for name, parts in sums.items()}
    avg = (scores["muc"].f1 + scores["b3"].f1 + scores["ceafe"].f1) / 3.0
    return ScoreReport(
        muc=scores["muc"],
        b3=scores["b3"],
        ceafe=scores["ceafe"],
        lea=scores["lea"],
        conll_avg_f1=avg,
    )


def mention_detection_score(
    predicted: Iterable[Mention], gold: Iterable[Mention]
) -> MetricScore:
    """Exact-boundary mention detection P/R/F1."""
    pred = set(predicted)
    gold_set = set(gold)
    hits = len(pred & gold_set)
    flags = []
    if not pred:
        flags.append("empty-predictions")
    if not gold_set:
        flags.append("empty-gold")
    p = hits / len(pred) if pred else 0.0
    r = hits / len(gold_set) if gold_set else 0.0
    return MetricScore(p, r, f1_score(p, r), tuple(flags))


@dataclass(frozen=True)
class CorrectionStats:
    """Bookkeeping of a manual correction pass over predicted mentions."""

    added: int
    corrected: int
    deleted: int
    unchanged: int
    precision: float
    recall: float
    f1: float

    @property
    def predicted_total(self) -> int:
        return self.unchanged + self.corrected + self.deleted

    @property
    def gold_total(self) -> int:
        return self.unchanged + self.corrected + self.added


def _span_overlap(a: Mention, b: Mention) -> int:
    if (a.message_index, a.sentence_index) != (b.message_index, b.sentence_index):
        return 0
    lo = max(a.start_token, b.start_token)
    hi = min(a.end_token, b.end_token)
    return max(0, hi - lo + 1)


def correction_stats(
    predicted: Iterable[Mention], gold: Iterable[Mention]
) -> CorrectionStats:
    """Classify predictions against corrected gold mentions.

    Exact matches are unchanged; remaining predictions pair greedily with
    overlapping unconsumed gold spans (largest overlap first) as corrected;
    leftovers are deleted (predictions) or added (gold).
    """
    pred = set(predicted)
    gold_set = set(gold)
    unchanged = pred & gold_set
    open_pred = sorted(pred - unchanged)
    open_gold = sorted(gold_set - unchanged)

    pairs = []
    for p in open_pred:
        for g in open_gold:
            overlap = _span_overlap(p, g)
            if overlap > 0:
                pairs.append((-overlap, p, g))
    pairs.sort()

    used_pred: set[Mention] = set()
    used_gold: set[Mention] = set()
    corrected = 0
    for _, p, g in pairs:
        if p in used_pred or g in used_gold:
            continue
        used_pred.add(p)
        used_gold.add(g)
        corrected += 1

    deleted = len(open_pred) - corrected
    added = len(open_gold) - corrected
    matched = len(unchanged) + corrected
    precision = matched / len(pred) if pred else 0.0
    recall = matched / len(gold_set) if gold_set else 0.0
    return CorrectionStats(
        added=added,
        corrected=corrected,
        deleted=deleted,
        unchanged=len(unchanged),
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
    )


@dataclass(frozen=True)
class CorpusStats:
    thread_count: int
    message_count: int
    word_count: int
    chain_count: int
    mention_count: int
    pronoun_count: int
    longest_chain: int
    average_chain_length: float


def corpus_stats(documents: Iterable[AnnotatedDocument]) -> CorpusStats:
    """Aggregate corpus statistics over annotated documents."""
    threads = messages = words = chains = mentions = pronouns = 0
    longest = 0
    for doc in documents:
        threads += 1
        messages += len(doc.thread.messages)
        words += sum(1 for _ in doc.thread.tokens())
        for chain in doc.chains:
            chains += 1
            mentions += len(chain)
            longest = max(longest, len(chain))
            for m in chain.mentions:
                if (
                    m.start_token == m.end_token
                    and mention_text(doc.thread, m).casefold() in wordlists.ALL_PRONOUNS
                ):
                    pronouns += 1
    average = mentions / chains if chains else 0.0
    return CorpusStats(
        thread_count=threads,
        message_count=messages,
        word_count=words,
        chain_count=chains,
        mention_count=mentions,
        pronoun_count=pronouns,
        longest_chain=longest,
        average_chain_length=average,
    )
