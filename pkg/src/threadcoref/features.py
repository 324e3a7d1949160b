"""Conversational features over parsed threads.

Three per-thread features: the message identifier of each token (MI), the
section label of each token (SI), and temporal reordering of the thread's
messages (REV). MI and SI are pure projections of the token stream; REV
rebuilds the thread with messages sorted by date, remapping message indices
and token offsets, and can carry an attached annotation along consistently.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .model import (
    AnnotatedDocument,
    CoreferenceChain,
    EmailMessage,
    EmailThread,
    Section,
    ToolkitError,
)


class MissingDate(ToolkitError):
    """A message lacks a parseable Date header, so the thread cannot be reordered."""

    def __init__(self, message_index: int):
        super().__init__(f"message {message_index} has no parseable date")
        self.message_index = message_index


@dataclass(frozen=True)
class FeatureAnnotation:
    """Per-token MI and SI sequences in thread order."""

    mi: tuple[int, ...]
    si: tuple[Section, ...]


def message_identifier(thread: EmailThread) -> tuple[int, ...]:
    """MI: a token belonging to message i maps to i."""
    return tuple(t.message_index for t in thread.tokens())


def section_info(thread: EmailThread) -> tuple[Section, ...]:
    """SI: projection of each token's section label."""
    return tuple(t.section for t in thread.tokens())


def feature_annotation(thread: EmailThread) -> FeatureAnnotation:
    return FeatureAnnotation(mi=message_identifier(thread), si=section_info(thread))


def date_permutation(thread: EmailThread, descending: bool = False) -> list[int]:
    """Mapping old message index -> new index under a stable date sort."""
    for msg in thread.messages:
        if msg.date is None:
            raise MissingDate(msg.index)
    order = sorted(
        range(len(thread.messages)),
        key=lambda i: thread.messages[i].date,
        reverse=descending,
    )
    perm = [0] * len(order)
    for new_index, old_index in enumerate(order):
        perm[old_index] = new_index
    return perm


def _shift_message(msg: EmailMessage, new_index: int, new_base: int) -> tuple[EmailMessage, int]:
    """Renumber a message and shift its token offsets to start at new_base."""
    tokens = list(msg.tokens())
    if not tokens:
        return dataclasses.replace(msg, index=new_index), new_base
    old_base = tokens[0].char_start
    shift = new_base - old_base
    sentences = tuple(
        tuple(
            dataclasses.replace(
                tok,
                message_index=new_index,
                char_start=tok.char_start + shift,
                char_end=tok.char_end + shift,
            )
            for tok in sentence
        )
        for sentence in msg.sentences
    )
    next_base = tokens[-1].char_end + shift + 1
    return dataclasses.replace(msg, index=new_index, sentences=sentences), next_base


def reverse_thread(thread: EmailThread, descending: bool = False) -> EmailThread:
    """Reorder messages by date (oldest first by default; ties are stable).

    Message indices are renumbered 0..N-1 in the new order and token offsets
    are shifted so the thread-level stream stays strictly increasing. The
    multiset of messages and every token's text are preserved. Raises
    MissingDate when any message has no parseable date.
    """
    perm = date_permutation(thread, descending)
    if perm == list(range(len(perm))):
        return thread
    order = sorted(range(len(perm)), key=lambda old: perm[old])
    messages = []
    base = 0
    for new_index, old_index in enumerate(order):
        msg, base = _shift_message(thread.messages[old_index], new_index, base)
        messages.append(msg)
    return EmailThread(id=thread.id, messages=tuple(messages), source_path=thread.source_path)


def reverse_document(doc: AnnotatedDocument, descending: bool = False) -> AnnotatedDocument:
    """reverse_thread plus consistent remapping of mention message indices."""
    perm = date_permutation(doc.thread, descending)
    if perm == list(range(len(perm))):
        return doc
    thread = reverse_thread(doc.thread, descending)
    chains = tuple(
        CoreferenceChain(
            chain_id=chain.chain_id,
            mentions=tuple(
                sorted(
                    dataclasses.replace(m, message_index=perm[m.message_index])
                    for m in chain.mentions
                )
            ),
        )
        for chain in doc.chains
    )
    return AnnotatedDocument(thread=thread, chains=chains)
