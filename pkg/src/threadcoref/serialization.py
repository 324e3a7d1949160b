"""Read/write the CoNLL coreference column format and the native JSONL format.

The CoNLL writer flattens a thread's tokens in document order and encodes
mentions in the last column with "(id" / "id)" / "(id)" entries, pipe
separated, exactly as coreference scorers expect. The reader is its
inverse: it rebuilds tokens and chains (a single-message skeleton; header
structure is not representable in the column format).

The native format keeps everything: one JSON record per line per thread,
losslessly round-tripping headers, sections, offsets, chains and entity
types, and streamable over large corpora.
"""
from __future__ import annotations

import json
from datetime import datetime
from typing import IO, Iterable, Optional, Sequence

from .model import (
    AnnotatedDocument,
    CoreferenceChain,
    EmailMessage,
    EmailThread,
    EntityType,
    Mention,
    Section,
    Token,
    ToolkitError,
)


class MalformedColumn(ToolkitError):
    """A CoNLL coreference column could not be parsed."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class OverlappingIdenticalSpan(ToolkitError):
    """Two chains claim the identical token span (invalid document)."""


class NativeSchemaError(ToolkitError):
    """A native record violates the expected schema."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------------------
# Addressing helpers
# ---------------------------------------------------------------------------

def global_sentences(thread: EmailThread) -> list[tuple[int, int, tuple[Token, ...]]]:
    """Sentences in thread order as (message_index, sentence_index, tokens)."""
    out = []
    for msg in thread.messages:
        for si, sentence in enumerate(msg.sentences):
            out.append((msg.index, si, sentence))
    return out


def mention_to_absolute(thread: EmailThread, mention: Mention) -> tuple[int, int]:
    """Inclusive absolute token indices of a mention in the flattened stream."""
    base = 0
    for mi, si, sentence in global_sentences(thread):
        if (mi, si) == (mention.message_index, mention.sentence_index):
            return base + mention.start_token, base + mention.end_token
        base += len(sentence)
    raise ValueError(f"mention {mention.location} addresses no sentence in thread")


def mention_from_absolute(
    thread: EmailThread, start: int, end: int, entity_type: Optional[EntityType] = None
) -> Mention:
    """Inverse of mention_to_absolute; the span must stay inside one sentence."""
    base = 0
    for mi, si, sentence in global_sentences(thread):
        if start < base + len(sentence):
            if end >= base + len(sentence) or start < base:
                raise ValueError(
                    f"absolute span [{start}, {end}] crosses a sentence boundary"
                )
            return Mention(mi, si, start - base, end - base, entity_type)
        base += len(sentence)
    raise ValueError(f"absolute span [{start}, {end}] exceeds document length")


# ---------------------------------------------------------------------------
# CoNLL column format
# ---------------------------------------------------------------------------

def write_conll(doc: AnnotatedDocument) -> str:
    """Serialize one document to CoNLL coreference columns."""
    sentences = global_sentences(doc.thread)
    sent_pos = {(mi, si): g for g, (mi, si, _) in enumerate(sentences)}

    starts: dict[tuple[int, int], list[tuple[int, int]]] = {}
    ends: dict[tuple[int, int], list[tuple[int, int]]] = {}
    singles: dict[tuple[int, int], list[int]] = {}
    seen_spans: dict[tuple, int] = {}
    for chain in doc.chains:
        for m in chain.mentions:
            span = m.location
            if span in seen_spans:
                raise OverlappingIdenticalSpan(
                    f"span {span} claimed by chains {seen_spans[span]} and {chain.chain_id}"
                )
            seen_spans[span] = chain.chain_id
            g = sent_pos.get((m.message_index, m.sentence_index))
            if g is None:
                raise ValueError(f"mention {span} addresses no sentence")
            if m.start_token == m.end_token:
                singles.setdefault((g, m.start_token), []).append(chain.chain_id)
            else:
                starts.setdefault((g, m.start_token), []).append((m.end_token, chain.chain_id))
                ends.setdefault((g, m.end_token), []).append((m.start_token, chain.chain_id))

    lines = [f"#begin document ({doc.thread.id}); part 000"]
    for g, (_, _, sentence) in enumerate(sentences):
        for ti, token in enumerate(sentence):
            entries = []
            for end_tok, cid in sorted(starts.get((g, ti), []), key=lambda x: (-x[0], x[1])):
                entries.append(f"({cid}")
            for cid in sorted(singles.get((g, ti), [])):
                entries.append(f"({cid})")
            for start_tok, cid in sorted(ends.get((g, ti), []), key=lambda x: (-x[0], x[1])):
                entries.append(f"{cid})")
            coref = "|".join(entries) if entries else "-"
            lines.append(f"{doc.thread.id}\t0\t{ti}\t{token.text}\t{coref}")
        lines.append("")
    lines.append("#end document")
    return "\n".join(lines) + "\n"


def write_conll_documents(docs: Iterable[AnnotatedDocument]) -> str:
    return "".join(write_conll(doc) for doc in docs)


def _skeleton_document(
    doc_id: str, sentences: list[list[str]], chains: dict[int, list[tuple[int, int, int]]]
) -> AnnotatedDocument:
    offset = 0
    token_sentences = []
    for si, words in enumerate(sentences):
        toks = []
        for ti, word in enumerate(words):
            toks.append(
                Token(
                    text=word,
                    sentence_index=si,
                    token_index=ti,
                    message_index=0,
                    section=Section.BODY,
                    char_start=offset,
                    char_end=offset + len(word),
                )
            )
            offset += len(word) + 1
        token_sentences.append(tuple(toks))
    message = EmailMessage(index=0, sentences=tuple(token_sentences))
    thread = EmailThread(id=doc_id, messages=(message,))
    chain_objs = tuple(
        CoreferenceChain(
            chain_id=cid,
            mentions=tuple(
                sorted(Mention(0, s, start, end) for (s, start, end) in spans)
            ),
        )
        for cid, spans in sorted(chains.items())
    )
    return AnnotatedDocument(thread=thread, chains=chain_objs)


def read_conll_documents(text: str) -> list[AnnotatedDocument]:
    """Parse CoNLL column text into document skeletons (tokens + chains)."""
    docs: list[AnnotatedDocument] = []
    doc_id: Optional[str] = None
    sentences: list[list[str]] = []
    current: list[str] = []
    chains: dict[int, list[tuple[int, int, int]]] = {}
    open_spans: dict[int, list[tuple[int, int]]] = {}

    def close_sentence() -> None:
        if current:
            sentences.append(list(current))
            current.clear()

    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("#begin document"):
            if doc_id is not None:
                raise MalformedColumn(line_no, "nested #begin document")
            try:
                doc_id = stripped.split("(", 1)[1].split(")", 1)[0]
            except IndexError:
                raise MalformedColumn(line_no, "malformed #begin document line") from None
            sentences, current, chains, open_spans = [], [], {}, {}
            continue
        if stripped.startswith("#end document"):
            if doc_id is None:
                raise MalformedColumn(line_no, "#end document without #begin")
            close_sentence()
            if any(stack for stack in open_spans.values()):
                open_ids = sorted(cid for cid, stack in open_spans.items() if stack)
                raise MalformedColumn(line_no, f"unclosed span(s) for chain(s) {open_ids}")
            docs.append(_skeleton_document(doc_id, sentences, chains))
            doc_id = None
            continue
        if stripped.startswith("#"):
            continue
        if not stripped:
            close_sentence()
            continue
        if doc_id is None:
            raise MalformedColumn(line_no, "token row outside a document")
        cols = stripped.split()
        if len(cols) < 5:
            raise MalformedColumn(line_no, f"expected >= 5 columns, got {len(cols)}")
        word = cols[3]
        coref = cols[-1]
        sent_index = len(sentences)
        tok_index = len(current)
        current.append(word)
        if coref == "-" or coref == "_":
            continue
        for entry in coref.split("|"):
            if entry.startswith("(") and entry.endswith(")"):
                cid_text = entry[1:-1]
                if not cid_text.isdigit():
                    raise MalformedColumn(line_no, f"bad coref entry {entry!r}")
                chains.setdefault(int(cid_text), []).append(
                    (sent_index, tok_index, tok_index)
                )
            elif entry.startswith("("):
                cid_text = entry[1:]
                if not cid_text.isdigit():
                    raise MalformedColumn(line_no, f"bad coref entry {entry!r}")
                open_spans.setdefault(int(cid_text), []).append((sent_index, tok_index))
            elif entry.endswith(")"):
                cid_text = entry[:-1]
                if not cid_text.isdigit():
                    raise MalformedColumn(line_no, f"bad coref entry {entry!r}")
                cid = int(cid_text)
                stack = open_spans.get(cid)
                if not stack:
                    raise MalformedColumn(line_no, f"closing unopened span for chain {cid}")
                open_sent, open_tok = stack.pop()
                if open_sent != sent_index:
                    raise MalformedColumn(
                        line_no, f"span for chain {cid} crosses a sentence boundary"
                    )
                chains.setdefault(cid, []).append((sent_index, open_tok, tok_index))
            else:
                raise MalformedColumn(line_no, f"bad coref entry {entry!r}")
    if doc_id is not None:
        raise MalformedColumn(len(text.splitlines()), "missing #end document")
    return docs


def read_conll(text: str) -> AnnotatedDocument:
    """Parse column text that holds exactly one document."""
    docs = read_conll_documents(text)
    if len(docs) != 1:
        raise MalformedColumn(0, f"expected exactly one document, found {len(docs)}")
    return docs[0]


# ---------------------------------------------------------------------------
# Native JSONL format
# ---------------------------------------------------------------------------

_SECTION_CODES = {Section.HEADER: "h", Section.BODY: "b", Section.FOOTER: "f"}
_CODE_SECTIONS = {v: k for k, v in _SECTION_CODES.items()}


def document_to_record(
    doc: AnnotatedDocument, features: Sequence[str] = ()
) -> dict:
    thread = doc.thread
    messages = []
    for msg in thread.messages:
        messages.append(
            {
                "date": msg.date.isoformat() if msg.date else None,
                "from": msg.from_addr,
                "to": list(msg.to_addrs),
                "cc": list(msg.cc_addrs),
                "subject": msg.subject,
                "x_from": msg.x_from,
                "x_to": list(msg.x_to),
                "x_cc": list(msg.x_cc),
                "sentences": [
                    [
                        [t.text, _SECTION_CODES[t.section], t.char_start, t.char_end]
                        for t in sentence
                    ]
                    for sentence in msg.sentences
                ],
            }
        )
    chains = [
        {
            "id": chain.chain_id,
            "mentions": [
                [
                    m.message_index,
                    m.sentence_index,
                    m.start_token,
                    m.end_token,
                    m.entity_type.value if m.entity_type else None,
                ]
                for m in chain.mentions
            ],
        }
        for chain in doc.chains
    ]
    record = {
        "id": thread.id,
        "source_path": thread.source_path,
        "messages": messages,
        "chains": chains,
    }
    if features:
        columns = {}
        if "mi" in features:
            columns["mi"] = [
                [[t.message_index for t in sentence] for sentence in msg.sentences]
                for msg in thread.messages
            ]
        if "si" in features:
            columns["si"] = [
                [[_SECTION_CODES[t.section] for t in sentence] for sentence in msg.sentences]
                for msg in thread.messages
            ]
        record["features"] = columns
    return record


def _expect(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise NativeSchemaError(path, message)


def record_to_document(record: dict) -> AnnotatedDocument:
    _expect(isinstance(record, dict), "$", "record must be an object")
    _expect(isinstance(record.get("id"), str), "$.id", "thread id must be a string")
    _expect(isinstance(record.get("messages"), list), "$.messages", "must be a list")
    messages = []
    for i, rec in enumerate(record["messages"]):
        path = f"$.messages[{i}]"
        _expect(isinstance(rec, dict), path, "must be an object")
        _expect(isinstance(rec.get("sentences"), list), f"{path}.sentences", "must be a list")
        date = None
        if rec.get("date") is not None:
            try:
                date = datetime.fromisoformat(rec["date"])
            except (TypeError, ValueError):
                raise NativeSchemaError(f"{path}.date", f"bad timestamp {rec['date']!r}") from None
        sentences = []
        for si, sent in enumerate(rec["sentences"]):
            spath = f"{path}.sentences[{si}]"
            _expect(isinstance(sent, list) and sent, spath, "must be a nonempty list")
            toks = []
            for ti, item in enumerate(sent):
                tpath = f"{spath}[{ti}]"
                _expect(
                    isinstance(item, list) and len(item) == 4, tpath,
                    "token must be [text, section, char_start, char_end]",
                )
                text, code, cs, ce = item
                _expect(code in _CODE_SECTIONS, tpath, f"unknown section code {code!r}")
                try:
                    toks.append(
                        Token(
                            text=text,
                            sentence_index=si,
                            token_index=ti,
                            message_index=i,
                            section=_CODE_SECTIONS[code],
                            char_start=cs,
                            char_end=ce,
                        )
                    )
                except (TypeError, ValueError) as exc:
                    raise NativeSchemaError(tpath, str(exc)) from None
            sentences.append(tuple(toks))
        try:
            messages.append(
                EmailMessage(
                    index=i,
                    date=date,
                    from_addr=rec.get("from"),
                    to_addrs=tuple(rec.get("to", [])),
                    cc_addrs=tuple(rec.get("cc", [])),
                    subject=rec.get("subject"),
                    x_from=rec.get("x_from"),
                    x_to=tuple(rec.get("x_to", [])),
                    x_cc=tuple(rec.get("x_cc", [])),
                    sentences=tuple(sentences),
                )
            )
        except (TypeError, ValueError) as exc:
            raise NativeSchemaError(path, str(exc)) from None
    try:
        thread = EmailThread(
            id=record["id"], messages=tuple(messages), source_path=record.get("source_path")
        )
    except (TypeError, ValueError) as exc:
        raise NativeSchemaError("$", str(exc)) from None

    chains = []
    _expect(isinstance(record.get("chains", []), list), "$.chains", "must be a list")
    for ci, rec in enumerate(record.get("chains", [])):
        path = f"$.chains[{ci}]"
        _expect(isinstance(rec, dict), path, "must be an object")
        _expect(isinstance(rec.get("id"), int), f"{path}.id", "chain id must be an int")
        _expect(
            isinstance(rec.get("mentions"), list) and rec["mentions"],
            f"{path}.mentions",
            "must be a nonempty list",
        )
        mentions = []
        for mi, item in enumerate(rec["mentions"]):
            mpath = f"{path}.mentions[{mi}]"
            _expect(
                isinstance(item, list) and len(item) in (4, 5),
                mpath,
                "mention must be [message, sentence, start, end, entity_type?]",
            )
            etype = None
            if len(item) == 5 and item[4] is not None:
                try:
                    etype = EntityType(item[4])
                except ValueError:
                    raise NativeSchemaError(mpath, f"unknown entity type {item[4]!r}") from None
            try:
                mentions.append(Mention(item[0], item[1], item[2], item[3], etype))
            except (TypeError, ValueError) as exc:
                raise NativeSchemaError(mpath, str(exc)) from None
        try:
            chains.append(CoreferenceChain(chain_id=rec["id"], mentions=tuple(mentions)))
        except ValueError as exc:
            raise NativeSchemaError(path, str(exc)) from None
    return AnnotatedDocument(thread=thread, chains=tuple(chains))


def write_native(
    docs: Iterable[AnnotatedDocument], fp: IO[str], features: Sequence[str] = ()
) -> None:
    """Write one JSON record per line; key order is fixed for determinism."""
    for doc in docs:
        record = document_to_record(doc, features=features)
        fp.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
        fp.write("\n")


def write_native_string(
    docs: Iterable[AnnotatedDocument], features: Sequence[str] = ()
) -> str:
    import io

    buf = io.StringIO()
    write_native(docs, buf, features=features)
    return buf.getvalue()


def read_native(source: IO[str] | str) -> list[AnnotatedDocument]:
    """Read JSONL records into annotated documents."""
    text = source if isinstance(source, str) else source.read()
    docs = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise NativeSchemaError(f"line {line_no}", f"invalid JSON: {exc}") from None
        docs.append(record_to_document(record))
    return docs
