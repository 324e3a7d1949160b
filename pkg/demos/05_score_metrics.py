"""Score a predicted chain set against gold with the full metric suite.

The toy partition below is the standard worked case: MUC 2/3, B-cubed
11/15, CEAFE 0.8, LEA 0.6, and the CoNLL average is the unweighted mean of
the first three F1 scores.
"""
from threadcoref.metrics import conll_average

key = [{"a", "b", "c"}, {"d", "e"}]
response = [{"a", "b"}, {"c", "d", "e"}]

report = conll_average(key, response)
for name in ("muc", "b3", "ceafe", "lea"):
    score = getattr(report, name)
    print(f"{name:6s} P={score.precision:.4f} R={score.recall:.4f} F1={score.f1:.4f}")
print(f"\nCoNLL average F1: {report.conll_avg_f1:.4f}")

perfect = conll_average(key, key)
print(f"identity sanity check: avg F1 = {perfect.conll_avg_f1:.4f}")
