import json
import random

import pytest

from conftest import CORPUS10_DIR, DATA_DIR, synthetic_document
from threadcoref.cli import main
from threadcoref.filtering import fingerprint_message
from threadcoref.serialization import read_native, write_conll, write_native


@pytest.fixture()
def parsed_corpus(tmp_path):
    out = tmp_path / "corpus.jsonl"
    code = main(["parse", "--in", str(CORPUS10_DIR), "--out", str(out)])
    assert code == 0
    return out


@pytest.fixture()
def gold_corpus(tmp_path):
    """Synthetic gold-annotated corpus written as native records."""
    rng = random.Random(2024)
    docs = []
    for _ in range(8):
        doc, _ = synthetic_document(rng)
        docs.append(doc)
    path = tmp_path / "gold.jsonl"
    with open(path, "w", encoding="utf-8") as fp:
        write_native(docs, fp)
    return path


class TestParse:
    def test_parses_whole_directory(self, parsed_corpus):
        docs = read_native(parsed_corpus.read_text(encoding="utf-8"))
        assert len(docs) == 10
        assert [d.thread.id for d in docs] == sorted(d.thread.id for d in docs)

    def test_single_file(self, tmp_path):
        out = tmp_path / "one.jsonl"
        code = main(["parse", "--in", str(DATA_DIR / "example1.txt"), "--out", str(out)])
        assert code == 0
        docs = read_native(out.read_text(encoding="utf-8"))
        assert len(docs) == 1
        assert len(docs[0].thread.messages) == 1

    def test_unparseable_file_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("no headers at all\n", encoding="utf-8")
        out = tmp_path / "out.jsonl"
        assert main(["parse", "--in", str(bad), "--out", str(out)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_deterministic_and_parallel_identical(self, tmp_path):
        outs = []
        for jobs in ("1", "1", "4"):
            out = tmp_path / f"c{len(outs)}.jsonl"
            main(["parse", "--in", str(CORPUS10_DIR), "--out", str(out), "--jobs", jobs])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] == outs[2]


class TestFilter:
    def test_report_matches_construction(self, tmp_path, corpus10_threads):
        hotel = next(t for t in corpus10_threads if t.id == "hotel.txt")
        fingerprints = tmp_path / "exclude.txt"
        fingerprints.write_text(
            "".join(fingerprint_message(m) + "\n" for m in hotel.messages),
            encoding="utf-8",
        )
        report = tmp_path / "report.tsv"
        verdicts = tmp_path / "verdicts.tsv"
        code = main(
            [
                "filter",
                "--in", str(CORPUS10_DIR),
                "--exclude-fingerprints", str(fingerprints),
                "--report", str(report),
                "--verdicts", str(verdicts),
            ]
        )
        assert code == 0
        rows = dict(
            line.split("\t") for line in report.read_text().splitlines()[1:]
        )
        assert rows == {
            "exclusion_overlap": "1",
            "duplicate": "2",
            "no_content": "1",
            "invalid_attachment": "1",
            "non_english": "1",
            "too_short": "0",
            "accepted": "4",
            "total": "10",
        }
        vlines = verdicts.read_text().splitlines()
        assert vlines[0] == "thread_id\tcategory\tdetail"
        assert len(vlines) == 11


class TestFeatures:
    def test_mi_si_columns(self, parsed_corpus, tmp_path):
        out = tmp_path / "feat.jsonl"
        code = main(["features", "--in", str(parsed_corpus), "--out", str(out), "--mi", "--si"])
        assert code == 0
        record = json.loads(out.read_text().splitlines()[0])
        assert set(record["features"]) == {"mi", "si"}

    def test_rev_orders_dates_ascending(self, parsed_corpus, tmp_path):
        out = tmp_path / "rev.jsonl"
        code = main(["features", "--in", str(parsed_corpus), "--out", str(out), "--rev"])
        assert code == 0
        for doc in read_native(out.read_text(encoding="utf-8")):
            dates = [m.date for m in doc.thread.messages]
            assert dates == sorted(dates)

    def test_rev_descending_flag(self, parsed_corpus, tmp_path):
        out = tmp_path / "rev.jsonl"
        main(["features", "--in", str(parsed_corpus), "--out", str(out), "--rev",
              "--direction", "descending"])
        for doc in read_native(out.read_text(encoding="utf-8")):
            dates = [m.date for m in doc.thread.messages]
            assert dates == sorted(dates, reverse=True)


class TestResolve:
    def test_hb2_on_example1_matches_hb1_partition(self, tmp_path, example1_document):
        src = tmp_path / "ex1.jsonl"
        with open(src, "w", encoding="utf-8") as fp:
            write_native([example1_document], fp)
        out1 = tmp_path / "hb1.jsonl"
        out2 = tmp_path / "hb2.jsonl"
        assert main(["resolve", "--baseline", "hb1", "--mentions", "gold",
                     "--in", str(src), "--out", str(out1)]) == 0
        assert main(["resolve", "--baseline", "hb2", "--mentions", "gold",
                     "--in", str(src), "--out", str(out2)]) == 0
        doc1 = read_native(out1.read_text(encoding="utf-8"))[0]
        doc2 = read_native(out2.read_text(encoding="utf-8"))[0]
        parts1 = {frozenset(c.mentions) for c in doc1.chains}
        parts2 = {frozenset(c.mentions) for c in doc2.chains}
        assert parts1 == parts2
        assert len(parts1) == 3

    def test_resolve_gold_corpus(self, gold_corpus, tmp_path):
        out = tmp_path / "resolved.jsonl"
        assert main(["resolve", "--baseline", "hb1", "--mentions", "gold",
                     "--in", str(gold_corpus), "--out", str(out)]) == 0
        docs = read_native(out.read_text(encoding="utf-8"))
        gold = read_native(gold_corpus.read_text(encoding="utf-8"))
        assert [d.thread.id for d in docs] == [d.thread.id for d in gold]
        for resolved, original in zip(docs, gold):
            assert {m for c in resolved.chains for m in c.mentions} == set(original.mentions())


class TestScore:
    def test_identity_conll_scores_one(self, tmp_path, example1_document, capsys):
        key = tmp_path / "k.conll"
        key.write_text(write_conll(example1_document), encoding="utf-8")
        code = main(["score", "--key", str(key), "--response", str(key)])
        assert code == 0
        header, values = capsys.readouterr().out.strip().splitlines()
        cols = dict(zip(header.split("\t"), values.split("\t")))
        assert cols["muc_f1"] == "1.0000"
        assert cols["b3_f1"] == "1.0000"
        assert cols["ceafe_f1"] == "1.0000"
        assert cols["lea_f1"] == "1.0000"
        assert cols["avg_f1"] == "1.0000"

    def test_metric_subset_drops_avg(self, tmp_path, example1_document, capsys):
        key = tmp_path / "k.conll"
        key.write_text(write_conll(example1_document), encoding="utf-8")
        main(["score", "--key", str(key), "--response", str(key), "--metrics", "muc,lea"])
        header = capsys.readouterr().out.splitlines()[0].split("\t")
        assert "avg_f1" not in header
        assert header == ["muc_p", "muc_r", "muc_f1", "lea_p", "lea_r", "lea_f1"]

    def test_unknown_metric_exits_1(self, tmp_path, example1_document, capsys):
        key = tmp_path / "k.conll"
        key.write_text(write_conll(example1_document), encoding="utf-8")
        assert main(["score", "--key", str(key), "--response", str(key),
                     "--metrics", "blanc"]) == 1

    def test_native_key_vs_resolved_response(self, gold_corpus, tmp_path, capsys):
        out = tmp_path / "resolved.jsonl"
        main(["resolve", "--baseline", "hb1", "--mentions", "gold",
              "--in", str(gold_corpus), "--out", str(out)])
        code = main(["score", "--key", str(gold_corpus), "--response", str(out)])
        assert code == 0
        header, values = capsys.readouterr().out.strip().splitlines()
        scores = dict(zip(header.split("\t"), values.split("\t")))
        assert 0.0 <= float(scores["avg_f1"]) <= 1.0


class TestErrors:
    def test_zero_report_on_identity(self, gold_corpus, capsys):
        code = main(["errors", "--key", str(gold_corpus), "--response", str(gold_corpus)])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "category\tcount"
        assert all(line.split("\t")[1] == "0" for line in lines[1:])
        assert len(lines) == 9

    def test_missing_response_document_exits_1(self, gold_corpus, tmp_path, capsys):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("", encoding="utf-8")
        assert main(["errors", "--key", str(gold_corpus), "--response", str(empty)]) == 1

    def test_conll_inputs(self, tmp_path, example1_document, capsys):
        key = tmp_path / "k.conll"
        key.write_text(write_conll(example1_document), encoding="utf-8")
        assert main(["errors", "--key", str(key), "--response", str(key)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert all(line.split("\t")[1] == "0" for line in lines[1:])


class TestStats:
    def test_table_shape(self, gold_corpus, capsys):
        code = main(["stats", "--in", str(gold_corpus)])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        stats = dict(line.split("\t") for line in lines[1:])
        assert stats["email_threads"] == "8"
        assert int(stats["annotated_mentions"]) >= int(stats["coreference_chains"])
        assert set(stats) == {
            "email_threads", "email_messages", "words", "coreference_chains",
            "annotated_mentions", "annotated_pronouns", "longest_chain_length",
            "average_chain_length",
        }


class TestCorrectionStats:
    def test_identity_all_unchanged(self, gold_corpus, capsys):
        code = main(["correction-stats", "--pred", str(gold_corpus), "--gold", str(gold_corpus)])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        stats = dict(line.split("\t") for line in lines[1:])
        assert stats["added_mentions"] == "0"
        assert stats["deleted_mentions"] == "0"
        assert stats["precision"] == "1.0000"
        assert stats["recall"] == "1.0000"


class TestUsage:
    def test_no_command_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["score", "--nope"])
        assert err.value.code == 2

    def test_pretty_flag_aligns(self, gold_corpus, capsys):
        main(["stats", "--in", str(gold_corpus), "--pretty"])
        out = capsys.readouterr().out
        assert "\t" not in out
