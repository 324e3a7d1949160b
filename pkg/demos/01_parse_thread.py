"""Parse one raw email thread and inspect its structure.

Shows how a thread file becomes messages with parsed header fields and
sectioned, sentence-split tokens, and that token offsets slice back into
the original text.
"""
from pathlib import Path

from threadcoref import RawThread, parse_thread

DATA = Path(__file__).parent / "data"

text = (DATA / "alpha.txt").read_text(encoding="utf-8")
thread = parse_thread(RawThread(id="alpha", text=text, source_path="alpha.txt"))

print(f"thread {thread.id}: {len(thread.messages)} messages")
for msg in thread.messages:
    print(f"\nmessage {msg.index}  from={msg.from_addr}  date={msg.date}")
    print(f"  subject: {msg.subject}")
    for sentence in msg.sentences[:3]:
        section = sentence[0].section.name
        words = " ".join(t.text for t in sentence)
        print(f"  [{section:6s}] {words}")
    if len(msg.sentences) > 3:
        print(f"  ... {len(msg.sentences) - 3} more sentences")

# every token is an exact slice of the raw file
for tok in thread.tokens():
    assert text[tok.char_start : tok.char_end] == tok.text
print("\nall token offsets slice back to the raw text")
