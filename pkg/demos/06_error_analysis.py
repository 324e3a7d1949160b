"""Categorize prediction errors against gold chains.

A gold chain split across two predictions counts as one decomposed chain
producing two new chains; gold mentions absent from the aligned prediction
are missing references, subtyped pronoun / header / other.
"""
from pathlib import Path

from threadcoref import CoreferenceChain, Mention, RawThread, parse_thread
from threadcoref.errors import categorize_errors

DATA = Path(__file__).parent / "data"

text = (DATA / "example1.txt").read_text(encoding="utf-8")
thread = parse_thread(RawThread(id="example1", text=text))

sender, x_from, i = Mention(0, 1, 2, 2), Mention(0, 4, 2, 6), Mention(0, 6, 2, 2)
recipient, x_to, you = Mention(0, 2, 2, 2), Mention(0, 5, 2, 4), Mention(0, 7, 1, 1)

key = (
    CoreferenceChain(0, (sender, x_from, i)),
    CoreferenceChain(1, (recipient, x_to, you)),
)
# prediction: sender chain decomposed in two, recipient chain missing "you"
response = (
    CoreferenceChain(0, (sender,)),
    CoreferenceChain(1, (x_from, i)),
    CoreferenceChain(2, (recipient, x_to)),
)

report = categorize_errors(thread, key, response)
print(f"missing pronoun references : {report.missing_pronoun_refs}")
print(f"missing header references  : {report.missing_header_refs}")
print(f"other missing references   : {report.missing_other_refs}")
print(f"missing chains             : {report.missing_chains}")
print(f"incorrectly chained (pron) : {report.incorrect_pronoun_refs}")
print(f"incorrectly chained (other): {report.incorrect_other_refs}")
print(f"decomposed chains          : {report.decomposed_chain_count}")
print(f"new chains                 : {report.new_chain_count}")
