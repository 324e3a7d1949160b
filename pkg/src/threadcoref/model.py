"""Core domain types for email-thread coreference documents.

Everything here is an immutable value object: threads, messages and tokens
are frozen dataclasses, so documents can be shared freely between workers.
Structural invariants that a constructor can check locally (token offsets,
message index contiguity) raise ``ValueError`` at construction time;
cross-object consistency of chains and mentions is reported as data by
:func:`validate_document`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterator, Optional


class ToolkitError(Exception):
    """Base class for data errors raised by this package."""


class Section(enum.Enum):
    """Part of an email message a token belongs to."""

    HEADER = "header"
    BODY = "body"
    FOOTER = "footer"


class EntityType(enum.Enum):
    PER = "PER"
    ORG = "ORG"
    LOC = "LOC"
    DIG = "DIG"


@dataclass(frozen=True)
class Token:
    """A single token with its position in the thread and raw-text offsets."""

    text: str
    sentence_index: int
    token_index: int
    message_index: int
    section: Section
    char_start: int
    char_end: int

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("token text must be nonempty")
        for name in ("sentence_index", "token_index", "message_index", "char_start"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.char_end <= self.char_start:
            raise ValueError(
                f"char_start must be < char_end, got [{self.char_start}, {self.char_end})"
            )
        if not isinstance(self.section, Section):
            raise ValueError(f"section must be a Section, got {self.section!r}")


def _as_tuple(value):
    return value if isinstance(value, tuple) else tuple(value)


@dataclass(frozen=True)
class EmailMessage:
    """One message of a thread: parsed header fields plus tokenized sentences.

    ``index`` is the message's position in thread file order. Sentences hold
    Token tuples; sentence indices run contiguously from 0 over the message
    and every token carries ``message_index == index``.
    """

    index: int
    date: Optional[datetime] = None
    from_addr: Optional[str] = None
    to_addrs: tuple[str, ...] = ()
    cc_addrs: tuple[str, ...] = ()
    subject: Optional[str] = None
    x_from: Optional[str] = None
    x_to: tuple[str, ...] = ()
    x_cc: tuple[str, ...] = ()
    sentences: tuple[tuple[Token, ...], ...] = ()

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("message index must be nonnegative")
        for name in ("to_addrs", "cc_addrs", "x_to", "x_cc"):
            object.__setattr__(self, name, _as_tuple(getattr(self, name)))
        object.__setattr__(
            self, "sentences", tuple(_as_tuple(sent) for sent in self.sentences)
        )
        for si, sentence in enumerate(self.sentences):
            if not sentence:
                raise ValueError(f"message {self.index}: sentence {si} is empty")
            for ti, tok in enumerate(sentence):
                if tok.message_index != self.index:
                    raise ValueError(
                        f"message {self.index}: token {tok.text!r} carries "
                        f"message_index {tok.message_index}"
                    )
                if tok.sentence_index != si or tok.token_index != ti:
                    raise ValueError(
                        f"message {self.index}: token {tok.text!r} at sentence "
                        f"{si} position {ti} carries indices "
                        f"({tok.sentence_index}, {tok.token_index})"
                    )

    def tokens(self) -> Iterator[Token]:
        for sentence in self.sentences:
            yield from sentence

    def body_tokens(self) -> Iterator[Token]:
        return (t for t in self.tokens() if t.section is Section.BODY)


@dataclass(frozen=True)
class EmailThread:
    """An ordered email conversation parsed from a single thread file."""

    id: str
    messages: tuple[EmailMessage, ...] = ()
    source_path: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "messages", _as_tuple(self.messages))
        for i, msg in enumerate(self.messages):
            if msg.index != i:
                raise ValueError(
                    f"thread {self.id}: message at position {i} has index {msg.index}"
                )
        last_end = 0
        for tok in self.tokens():
            if tok.char_start < last_end:
                raise ValueError(
                    f"thread {self.id}: token {tok.text!r} at char {tok.char_start} "
                    f"overlaps previous token ending at {last_end}"
                )
            last_end = tok.char_end

    def tokens(self) -> Iterator[Token]:
        for msg in self.messages:
            yield from msg.tokens()

    def sentence(self, message_index: int, sentence_index: int) -> tuple[Token, ...]:
        return self.messages[message_index].sentences[sentence_index]


@dataclass(frozen=True, order=True)
class Mention:
    """A token span referring to an entity, addressed sentence-relative.

    Equality and hashing use only the four location fields; the optional
    entity type never influences identity, so scorers compare spans exactly.
    """

    message_index: int
    sentence_index: int
    start_token: int
    end_token: int
    entity_type: Optional[EntityType] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        for name in ("message_index", "sentence_index", "start_token"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.end_token < self.start_token:
            raise ValueError(
                f"mention span [{self.start_token}, {self.end_token}] is inverted"
            )

    @property
    def location(self) -> tuple[int, int, int, int]:
        return (self.message_index, self.sentence_index, self.start_token, self.end_token)


@dataclass(frozen=True)
class CoreferenceChain:
    """A nonempty group of mentions asserted to refer to one entity."""

    chain_id: int
    mentions: tuple[Mention, ...]

    def __post_init__(self) -> None:
        if self.chain_id < 0:
            raise ValueError("chain_id must be nonnegative")
        object.__setattr__(self, "mentions", _as_tuple(self.mentions))
        if not self.mentions:
            raise ValueError(f"chain {self.chain_id} has no mentions")

    def __len__(self) -> int:
        return len(self.mentions)


@dataclass(frozen=True)
class AnnotatedDocument:
    """An email thread together with its coreference chains (key or response)."""

    thread: EmailThread
    chains: tuple[CoreferenceChain, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "chains", _as_tuple(self.chains))

    def mentions(self) -> Iterator[Mention]:
        for chain in self.chains:
            yield from chain.mentions


def mention_tokens(thread: EmailThread, mention: Mention) -> tuple[Token, ...]:
    """Tokens addressed by a mention; raises IndexError on out-of-range spans."""
    sentence = thread.messages[mention.message_index].sentences[mention.sentence_index]
    if mention.end_token >= len(sentence):
        raise IndexError(
            f"mention {mention.location} exceeds sentence length {len(sentence)}"
        )
    return sentence[mention.start_token : mention.end_token + 1]


def mention_text(thread: EmailThread, mention: Mention) -> str:
    """Display form of a mention: its token texts joined with single spaces."""
    return " ".join(t.text for t in mention_tokens(thread, mention))


def _span_in_range(thread: EmailThread, mention: Mention) -> bool:
    if mention.message_index >= len(thread.messages):
        return False
    msg = thread.messages[mention.message_index]
    if mention.sentence_index >= len(msg.sentences):
        return False
    return mention.end_token < len(msg.sentences[mention.sentence_index])


def validate_document(doc: AnnotatedDocument) -> list[str]:
    """Check chain/mention consistency; returns one description per violation.

    Violations are data, not failures: an empty list means the document
    satisfies every invariant (chains partition their mention set, chain ids
    are unique, no chain repeats a location, every span addresses real
    tokens). Deterministic and side-effect free.
    """
    violations: list[str] = []
    seen_ids: dict[int, int] = {}
    for chain in doc.chains:
        if chain.chain_id in seen_ids:
            violations.append(f"duplicate chain id {chain.chain_id}")
        seen_ids[chain.chain_id] = 1

    location_owner: dict[tuple[int, int, int, int], int] = {}
    for chain in doc.chains:
        in_chain: set[tuple[int, int, int, int]] = set()
        for mention in chain.mentions:
            loc = mention.location
            if loc in in_chain:
                violations.append(
                    f"chain {chain.chain_id}: duplicate mention at {loc}"
                )
            in_chain.add(loc)
            owner = location_owner.get(loc)
            if owner is not None and owner != chain.chain_id:
                violations.append(
                    f"mention at {loc} in multiple chains ({owner} and {chain.chain_id})"
                )
            location_owner.setdefault(loc, chain.chain_id)
            if not _span_in_range(doc.thread, mention):
                violations.append(
                    f"chain {chain.chain_id}: mention at {loc} addresses no valid span"
                )
    return violations
