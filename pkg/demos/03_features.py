"""Per-token conversational features: MI, SI, and date reordering (REV).

MI labels each token with its message index, SI with its section, and
reverse_thread rebuilds the thread oldest-first while keeping annotations
consistent.
"""
from pathlib import Path

from threadcoref import RawThread, parse_thread
from threadcoref.features import message_identifier, reverse_thread, section_info

DATA = Path(__file__).parent / "data"

text = (DATA / "charlie.txt").read_text(encoding="utf-8")
thread = parse_thread(RawThread(id="charlie", text=text))

mi = message_identifier(thread)
si = section_info(thread)
tokens = list(thread.tokens())
print("first tokens with MI/SI:")
for tok, m, s in list(zip(tokens, mi, si))[:8]:
    print(f"  {tok.text:12s} mi={m} si={s.name}")

print(f"\nstored order (newest first): {[m.date.strftime('%d %H:%M') for m in thread.messages]}")
ordered = reverse_thread(thread)
print(f"after REV (oldest first):    {[m.date.strftime('%d %H:%M') for m in ordered.messages]}")
print(f"token count preserved: {sum(1 for _ in ordered.tokens()) == len(tokens)}")
