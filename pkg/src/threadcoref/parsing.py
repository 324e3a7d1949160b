"""Parse raw email-thread text into structured, tokenized messages.

A thread file is a maildir-style plain-text conversation: a header block,
a body, and usually older messages embedded as quoted replies behind
separator lines ("-----Original Message-----", "Forwarded by ...") or fresh
header blocks. All functions here are pure; threads can be parsed
concurrently with no shared state.

The tokenizer is deliberately simple: whitespace split, punctuation peeled
off token edges, contraction suffixes split ("I'll" -> "I", "'ll"), email
addresses kept whole. Sentences break at terminal punctuation in the body
and at line breaks in header/footer sections (each header line is one
sentence). All fixtures shipped with the package are self-consistent with
these rules.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime
from email.utils import parsedate_to_datetime, parseaddr
from pathlib import Path
from typing import Optional, Sequence

from . import wordlists
from .model import EmailMessage, EmailThread, Section, Token, ToolkitError


class UnparseableThread(ToolkitError):
    """Raised when raw text contains no recognizable header block."""


@dataclass(frozen=True)
class RawThread:
    """Unparsed thread file contents."""

    id: str
    text: str
    source_path: Optional[str] = None


@dataclass(frozen=True)
class ParserConfig:
    """Marker phrases controlling message splitting and footer detection."""

    separator_markers: tuple[str, ...] = wordlists.SEPARATOR_MARKERS
    footer_markers: tuple[str, ...] = wordlists.FOOTER_MARKERS

    @classmethod
    def from_files(
        cls,
        separators: str | Path | None = None,
        footers: str | Path | None = None,
    ) -> "ParserConfig":
        return cls(
            separator_markers=(
                wordlists.load_phrase_file(separators)
                if separators
                else wordlists.SEPARATOR_MARKERS
            ),
            footer_markers=(
                wordlists.load_phrase_file(footers)
                if footers
                else wordlists.FOOTER_MARKERS
            ),
        )


DEFAULT_CONFIG = ParserConfig()

_HEADER_LINE_RE = re.compile(r"^([A-Za-z][A-Za-z0-9-]*)\s*:\s?(.*)$")

# Fields that prove we are looking at an email header at all.
_KNOWN_FIELDS = frozenset(
    [
        "message-id", "date", "sent", "from", "to", "cc", "bcc", "subject",
        "mime-version", "content-type", "content-transfer-encoding",
        "x-from", "x-to", "x-cc", "x-bcc", "x-folder", "x-origin", "x-filename",
    ]
)

_SENDER_FIELDS = frozenset(["from", "x-from"])
_RECIPIENT_FIELDS = frozenset(["to", "cc", "bcc", "x-to", "x-cc", "x-bcc"])


def _lines_with_offsets(text: str) -> list[tuple[str, int]]:
    lines = []
    offset = 0
    for raw in text.splitlines(keepends=True):
        line = raw.rstrip("\r\n")
        lines.append((line, offset))
        offset += len(raw)
    return lines


def _is_separator(line: str, config: ParserConfig) -> bool:
    folded = line.casefold()
    return any(marker in folded for marker in config.separator_markers)


def _is_header_line(line: str) -> bool:
    m = _HEADER_LINE_RE.match(line)
    return m is not None


def _is_known_header_line(line: str) -> bool:
    m = _HEADER_LINE_RE.match(line)
    return m is not None and m.group(1).casefold() in _KNOWN_FIELDS


def _starts_fresh_header_block(lines: Sequence[str], i: int) -> bool:
    """A From: line opening a header run with Date:/Sent: and Subject: in it.

    The run is the consecutive stretch of header lines starting at i, capped
    at 10 lines; it never extends past prose, blank lines, or separators, so
    a later message's headers cannot satisfy the check for an earlier line.
    """
    if not re.match(r"^from\s*:", lines[i], re.IGNORECASE):
        return False
    run = []
    for line in lines[i : i + 10]:
        if not _is_header_line(line):
            break
        run.append(line)
    has_date = any(re.match(r"^(date|sent)\s*:", l, re.IGNORECASE) for l in run)
    has_subject = any(re.match(r"^subject\s*:", l, re.IGNORECASE) for l in run)
    return has_date and has_subject


def split_messages(
    raw: RawThread, config: ParserConfig = DEFAULT_CONFIG
) -> list[tuple[str, int]]:
    """Cut a thread file into per-message slices of (text, char offset).

    Boundaries open at separator-marker lines and at fresh header blocks.
    Slices cover disjoint regions in file order; the first slice starts at
    offset 0. Raises UnparseableThread when the file contains no known
    header line at all.
    """
    if not raw.text.strip():
        raise UnparseableThread(f"thread {raw.id}: empty text")
    lines = _lines_with_offsets(raw.text)
    texts = [l for l, _ in lines]
    if not any(_is_known_header_line(l) for l in texts):
        raise UnparseableThread(f"thread {raw.id}: no header block found")

    boundaries = [0]
    for i in range(1, len(texts)):
        line = texts[i]
        is_boundary = _is_separator(line, config) or _starts_fresh_header_block(texts, i)
        if not is_boundary:
            continue
        # Suppress a split when the running segment holds nothing but its
        # own separator/blank lines (e.g. a marker immediately followed by
        # the quoted header it announces).
        segment = texts[boundaries[-1] : i]
        if all(not l.strip() or _is_separator(l, config) for l in segment):
            continue
        boundaries.append(i)

    slices = []
    for k, start_line in enumerate(boundaries):
        end_line = boundaries[k + 1] if k + 1 < len(boundaries) else len(lines)
        start_char = lines[start_line][1]
        end_char = (
            lines[end_line][1] if end_line < len(lines) else len(raw.text)
        )
        slices.append((raw.text[start_char:end_char], start_char))
    return slices


@dataclass(frozen=True)
class HeaderFields:
    """Best-effort header extraction; absent fields stay None/empty."""

    date: Optional[datetime] = None
    from_addr: Optional[str] = None
    to_addrs: tuple[str, ...] = ()
    cc_addrs: tuple[str, ...] = ()
    subject: Optional[str] = None
    x_from: Optional[str] = None
    x_to: tuple[str, ...] = ()
    x_cc: tuple[str, ...] = ()


def split_address_list(value: str) -> tuple[str, ...]:
    """Split a recipient header value on commas/semicolons.

    Semicolons always separate. A comma separates unless the accumulated
    item has no "@" and the text after the comma starts with an uppercase
    letter: that pattern is a "Last, First" display name, not a list break.
    Quoted stretches are never split.
    """
    items: list[str] = []
    buf: list[str] = []
    in_quotes = False

    def flush() -> None:
        item = "".join(buf).replace('"', "").strip()
        if item:
            items.append(item)
        buf.clear()

    for i, ch in enumerate(value):
        if ch == '"':
            in_quotes = not in_quotes
            buf.append(ch)
        elif ch == ";" and not in_quotes:
            flush()
        elif ch == "," and not in_quotes:
            current = "".join(buf)
            rest = value[i + 1 :].lstrip()
            if "@" in current or not rest[:1].isupper():
                flush()
            else:
                buf.append(ch)
        else:
            buf.append(ch)
    flush()
    return tuple(items)


def _header_region_end(lines: Sequence[str], config: ParserConfig) -> int:
    """Line index one past the leading header region of a message slice.

    The region covers leading separator/blank lines, then header lines with
    their folded continuations. The first blank or ordinary line after a
    header line closes it.
    """
    i = 0
    n = len(lines)
    while i < n and (not lines[i].strip() or _is_separator(lines[i], config)):
        i += 1
    saw_header = False
    while i < n:
        line = lines[i]
        if _is_header_line(line):
            saw_header = True
            i += 1
        elif saw_header and line[:1] in (" ", "\t") and line.strip():
            i += 1
        else:
            break
    return i if saw_header else 0


def _footer_region_start(
    lines: Sequence[str], header_end: int, config: ParserConfig
) -> int:
    for j in range(header_end, len(lines)):
        folded = lines[j].casefold()
        if any(marker in folded for marker in config.footer_markers):
            return j
    return len(lines)


def assign_sections(
    message_text: str, config: ParserConfig = DEFAULT_CONFIG
) -> list[Section]:
    """Per-line section labels for one message slice.

    Tokens inherit the label of their line, so per-message labels always
    follow the pattern HEADER* BODY* FOOTER*.
    """
    lines = message_text.splitlines()
    header_end = _header_region_end(lines, config)
    footer_start = _footer_region_start(lines, header_end, config)
    return (
        [Section.HEADER] * header_end
        + [Section.BODY] * (footer_start - header_end)
        + [Section.FOOTER] * (len(lines) - footer_start)
    )


def parse_header(message_text: str, config: ParserConfig = DEFAULT_CONFIG) -> HeaderFields:
    """Extract the known header fields from the top of a message slice.

    Unknown header lines are not errors; they simply stay header-section
    tokens. Address lists split per split_address_list; a missing field is
    absent (None or empty tuple), never an empty string.
    """
    lines = message_text.splitlines()
    header_end = _header_region_end(lines, config)
    fields: dict[str, str] = {}
    current: Optional[str] = None
    for line in lines[:header_end]:
        if _is_separator(line, config) or not line.strip():
            continue
        m = _HEADER_LINE_RE.match(line)
        if m:
            current = m.group(1).casefold()
            value = m.group(2).strip()
            if current in fields and value:
                fields[current] = f"{fields[current]}, {value}"
            elif current not in fields:
                fields[current] = value
        elif current and line[:1] in (" ", "\t"):
            fields[current] = (fields.get(current, "") + " " + line.strip()).strip()

    date = None
    for key in ("date", "sent"):
        if key in fields:
            try:
                date = parsedate_to_datetime(fields[key])
                break
            except (TypeError, ValueError):
                continue

    from_addr = None
    if "from" in fields and fields["from"]:
        value = fields["from"]
        if "<" in value:
            _, addr = parseaddr(value)
            from_addr = addr or value.strip()
        else:
            from_addr = value.strip()

    return HeaderFields(
        date=date,
        from_addr=from_addr,
        to_addrs=split_address_list(fields.get("to", "")),
        cc_addrs=split_address_list(fields.get("cc", "")),
        subject=fields.get("subject") or None,
        x_from=fields.get("x-from") or None,
        x_to=split_address_list(fields.get("x-to", "")),
        x_cc=split_address_list(fields.get("x-cc", "")),
    )


_LEADING_PUNCT = set("([{<\"“”‘’`")
_TRAILING_PUNCT = set(")]}>\"“”‘’`,;:!?'")
_CONTRACTIONS = ("'ll", "'ve", "'re", "'m", "'d", "'s", "n't")
_CONTRACTION_RE = re.compile(r"^(.+?)(n't|'ll|'ve|'re|'m|'d|'s)$", re.IGNORECASE)
_TERMINAL_RE = re.compile(r"^[.?!]+$")


def _split_chunk(chunk: str, start: int) -> list[tuple[str, int, int]]:
    """Split one whitespace-delimited chunk into (text, char_start, char_end)."""
    out: list[tuple[str, int, int]] = []
    # leading punctuation, except apostrophes that open a contraction token
    while chunk:
        ch = chunk[0]
        if ch in _LEADING_PUNCT or (
            ch == "'" and not chunk.casefold().startswith(_CONTRACTIONS)
        ):
            out.append((ch, start, start + 1))
            chunk = chunk[1:]
            start += 1
        else:
            break
    trailing: list[tuple[str, int, int]] = []
    while chunk:
        ch = chunk[-1]
        if ch in _TRAILING_PUNCT or (ch == "." and len(chunk) > 1):
            end = start + len(chunk)
            trailing.append((ch, end - 1, end))
            chunk = chunk[:-1]
        else:
            break
    if chunk:
        if "@" in chunk or chunk.casefold() in _CONTRACTIONS:
            out.append((chunk, start, start + len(chunk)))
        else:
            m = _CONTRACTION_RE.match(chunk)
            if m and "'" not in m.group(1):
                stem, suffix = m.group(1), m.group(2)
                out.append((stem, start, start + len(stem)))
                out.append((suffix, start + len(stem), start + len(chunk)))
            else:
                out.append((chunk, start, start + len(chunk)))
    out.extend(reversed(trailing))
    return out


def _tokenize_line(line: str, line_offset: int) -> list[tuple[str, int, int]]:
    toks: list[tuple[str, int, int]] = []
    for m in re.finditer(r"\S+", line):
        toks.extend(_split_chunk(m.group(), line_offset + m.start()))
    return toks


def tokenize_and_sentence_split(
    text: str,
    *,
    sections: Optional[Sequence[Section]] = None,
    message_index: int = 0,
    base_offset: int = 0,
) -> tuple[tuple[Token, ...], ...]:
    """Tokenize one message slice into sentences of Tokens.

    ``sections`` gives one Section per line (defaults to all BODY). Header
    and footer lines become one sentence each; body sentences break after a
    terminal-punctuation token and may span lines.
    """
    lines = _lines_with_offsets(text)
    if sections is None:
        sections = [Section.BODY] * len(lines)
    if len(sections) != len(lines):
        raise ValueError(
            f"sections length {len(sections)} != line count {len(lines)}"
        )

    raw_sentences: list[tuple[Section, list[tuple[str, int, int]]]] = []
    body_current: list[tuple[str, int, int]] = []

    def flush_body() -> None:
        if body_current:
            raw_sentences.append((Section.BODY, list(body_current)))
            body_current.clear()

    for (line, offset), section in zip(lines, sections):
        toks = _tokenize_line(line, base_offset + offset)
        if section is Section.BODY:
            for tok in toks:
                body_current.append(tok)
                if _TERMINAL_RE.match(tok[0]):
                    flush_body()
        else:
            flush_body()
            if toks:
                raw_sentences.append((section, toks))
    flush_body()

    sentences = []
    for si, (section, toks) in enumerate(raw_sentences):
        sentences.append(
            tuple(
                Token(
                    text=t,
                    sentence_index=si,
                    token_index=ti,
                    message_index=message_index,
                    section=section,
                    char_start=cs,
                    char_end=ce,
                )
                for ti, (t, cs, ce) in enumerate(toks)
            )
        )
    return tuple(sentences)


def parse_message(
    slice_text: str,
    slice_offset: int,
    index: int,
    config: ParserConfig = DEFAULT_CONFIG,
) -> EmailMessage:
    header = parse_header(slice_text, config)
    line_sections = assign_sections(slice_text, config)
    sentences = tokenize_and_sentence_split(
        slice_text,
        sections=line_sections,
        message_index=index,
        base_offset=slice_offset,
    )
    return EmailMessage(
        index=index,
        date=header.date,
        from_addr=header.from_addr,
        to_addrs=header.to_addrs,
        cc_addrs=header.cc_addrs,
        subject=header.subject,
        x_from=header.x_from,
        x_to=header.x_to,
        x_cc=header.x_cc,
        sentences=sentences,
    )


def parse_thread(raw: RawThread, config: ParserConfig = DEFAULT_CONFIG) -> EmailThread:
    """Parse a raw thread file into an EmailThread.

    Message indices follow file order, which for quoted threads is most
    recent first. Deterministic: parsing the same bytes twice yields
    structurally equal threads.
    """
    slices = split_messages(raw, config)
    messages = [
        parse_message(text, offset, i, config)
        for i, (text, offset) in enumerate(slices)
    ]
    return EmailThread(id=raw.id, messages=tuple(messages), source_path=raw.source_path)


def header_field_of_sentence(sentence: Sequence[Token]) -> Optional[str]:
    """Casefolded header field name of a header-line sentence, if any.

    A header sentence tokenizes as NAME ":" VALUE...; returns NAME when the
    sentence is a header line, else None.
    """
    if len(sentence) >= 2 and sentence[0].section is Section.HEADER and sentence[1].text == ":":
        return sentence[0].text.casefold()
    return None


def is_sender_field(field_name: Optional[str]) -> bool:
    return field_name in _SENDER_FIELDS


def is_recipient_field(field_name: Optional[str]) -> bool:
    return field_name in _RECIPIENT_FIELDS
