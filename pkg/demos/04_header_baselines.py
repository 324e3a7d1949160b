"""Resolve coreference on the worked example with both header baselines.

First-person singular pronouns chain to the sender, second-person pronouns
to the recipients, and mentions with overlapping words merge transitively.
The two baselines differ only in how first-person plurals are handled, so
on a thread without "we"/"us"/"our" they agree exactly.
"""
from pathlib import Path

from threadcoref import Mention, RawThread, mention_text, parse_thread
from threadcoref.baselines import resolve_hb1, resolve_hb2

DATA = Path(__file__).parent / "data"

text = (DATA / "example1.txt").read_text(encoding="utf-8")
thread = parse_thread(RawThread(id="example1", text=text))

# gold mention spans: sender/recipient header mentions, two pronouns, one
# entity ("Crestone and Lost Creek")
mentions = [
    Mention(0, 1, 2, 2),
    Mention(0, 2, 2, 2),
    Mention(0, 4, 2, 6),
    Mention(0, 5, 2, 4),
    Mention(0, 6, 2, 2),
    Mention(0, 7, 1, 1),
    Mention(0, 7, 5, 8),
]

for name, resolver in (("Hb1", resolve_hb1), ("Hb2", resolve_hb2)):
    result = resolver(thread, mentions)
    print(f"{name} chains:")
    for chain in result.chains:
        texts = [mention_text(thread, m) for m in chain.mentions]
        print(f"  ({chain.chain_id}) {texts}")
    print()
