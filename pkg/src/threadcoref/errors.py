"""Automatic categorization of prediction errors.

Errors fall into four groups: references missing from an aligned chain
(subtyped pronoun / header / other), whole chains missing from the
response, references chained incorrectly (pronoun / other), and gold
chains decomposed into several predicted chains. The categorizer is a
deterministic approximation of a human pass: each key chain aligns to the
response chain with maximum mention overlap, ties broken toward the larger
response chain, then the lower chain id.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import wordlists
from .model import (
    CoreferenceChain,
    EmailThread,
    Mention,
    Section,
    mention_tokens,
)


@dataclass(frozen=True)
class ChainAlignment:
    """Greedy maximum-overlap mapping from key chain ids to response chain ids."""

    pairs: tuple[tuple[int, int], ...] = ()

    def get(self, key_chain_id: int) -> Optional[int]:
        for k, r in self.pairs:
            if k == key_chain_id:
                return r
        return None


def align_chains(
    key: Sequence[CoreferenceChain], response: Sequence[CoreferenceChain]
) -> ChainAlignment:
    """Map each key chain to its best-overlapping response chain.

    Unmapped when no response chain shares a mention. Several key chains
    may map to the same response chain.
    """
    pairs = []
    for kc in key:
        k_set = set(kc.mentions)
        best: Optional[CoreferenceChain] = None
        best_overlap = 0
        for rc in response:
            overlap = len(k_set & set(rc.mentions))
            if overlap == 0:
                continue
            if (
                best is None
                or overlap > best_overlap
                or (
                    overlap == best_overlap
                    and (len(rc) > len(best) or (len(rc) == len(best) and rc.chain_id < best.chain_id))
                )
            ):
                best = rc
                best_overlap = overlap
        if best is not None:
            pairs.append((kc.chain_id, best.chain_id))
    return ChainAlignment(pairs=tuple(pairs))


@dataclass(frozen=True)
class ErrorReport:
    missing_pronoun_refs: int = 0
    missing_header_refs: int = 0
    missing_other_refs: int = 0
    missing_chains: int = 0
    incorrect_pronoun_refs: int = 0
    incorrect_other_refs: int = 0
    decomposed_chain_count: int = 0
    new_chain_count: int = 0

    def __add__(self, other: "ErrorReport") -> "ErrorReport":
        return ErrorReport(
            self.missing_pronoun_refs + other.missing_pronoun_refs,
            self.missing_header_refs + other.missing_header_refs,
            self.missing_other_refs + other.missing_other_refs,
            self.missing_chains + other.missing_chains,
            self.incorrect_pronoun_refs + other.incorrect_pronoun_refs,
            self.incorrect_other_refs + other.incorrect_other_refs,
            self.decomposed_chain_count + other.decomposed_chain_count,
            self.new_chain_count + other.new_chain_count,
        )

    @property
    def is_zero(self) -> bool:
        return self == ErrorReport()


def _is_pronoun_mention(thread: EmailThread, mention: Mention) -> bool:
    if mention.start_token != mention.end_token:
        return False
    word = mention_tokens(thread, mention)[0].text.casefold()
    return word in wordlists.ALL_PRONOUNS


def _in_header(thread: EmailThread, mention: Mention) -> bool:
    return mention_tokens(thread, mention)[0].section is Section.HEADER


def categorize_errors(
    thread: EmailThread,
    key: Sequence[CoreferenceChain],
    response: Sequence[CoreferenceChain],
) -> ErrorReport:
    """Count prediction errors per category for one document.

    A perfect response yields the zero report. Every gold mention lands in
    at most one missing-reference subtype; subtype precedence is pronoun,
    then header, then other.
    """
    key_to_resp = align_chains(key, response)
    resp_to_key = align_chains(response, key)
    resp_by_id = {c.chain_id: c for c in response}
    key_by_id = {c.chain_id: c for c in key}

    missing_pronoun = missing_header = missing_other = 0
    missing_chains = 0
    incorrect_pronoun = incorrect_other = 0
    decomposed = 0
    new_chains = 0

    for kc in key:
        aligned_id = key_to_resp.get(kc.chain_id)
        if aligned_id is None:
            missing_chains += 1
        else:
            aligned = set(resp_by_id[aligned_id].mentions)
            for m in kc.mentions:
                if m in aligned:
                    continue
                if _is_pronoun_mention(thread, m):
                    missing_pronoun += 1
                elif _in_header(thread, m):
                    missing_header += 1
                else:
                    missing_other += 1
        k_set = set(kc.mentions)
        touched = sum(1 for rc in response if k_set & set(rc.mentions))
        if touched >= 2:
            decomposed += 1
            new_chains += touched

    for rc in response:
        aligned_id = resp_to_key.get(rc.chain_id)
        if aligned_id is None:
            continue
        aligned = set(key_by_id[aligned_id].mentions)
        for m in rc.mentions:
            if m in aligned:
                continue
            if _is_pronoun_mention(thread, m):
                incorrect_pronoun += 1
            else:
                incorrect_other += 1

    return ErrorReport(
        missing_pronoun_refs=missing_pronoun,
        missing_header_refs=missing_header,
        missing_other_refs=missing_other,
        missing_chains=missing_chains,
        incorrect_pronoun_refs=incorrect_pronoun,
        incorrect_other_refs=incorrect_other,
        decomposed_chain_count=decomposed,
        new_chain_count=new_chains,
    )
