"""Classify a small corpus with the validity filters.

Each thread receives exactly one verdict (accepted, duplicate, no content,
invalid attachment, non-English, exclusion overlap, too short) and the
report aggregates the distribution.
"""
from pathlib import Path

from threadcoref import RawThread, parse_thread
from threadcoref.filtering import ExclusionSet, filter_corpus

DATA = Path(__file__).parent / "data"

threads = []
for path in sorted(DATA.glob("*.txt")):
    raw = RawThread(id=path.name, text=path.read_text(encoding="utf-8"), source_path=path.name)
    threads.append(parse_thread(raw))

verdicts, report = filter_corpus(threads, ExclusionSet())

print("verdicts:")
for v in verdicts:
    detail = f"  ({v.detail})" if v.detail else ""
    print(f"  {v.thread_id:15s} {v.category.value}{detail}")

print("\ndistribution:")
for category, count in report.counts:
    print(f"  {category.value:20s} {count}")
print(f"  {'total':20s} {report.total}")
