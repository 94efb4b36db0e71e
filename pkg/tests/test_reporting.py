import csv
import json
from datetime import date

import pytest

from newsreuse.analysis import HeatmapMatrix, build_position_table
from newsreuse.corpus import Corpus, Role
from newsreuse.embedding import BuiltinHashProvider
from newsreuse.errors import EmptyMatrix
from newsreuse.matcher import MatchRecord, MatchSet, MatchStatus, match_pipeline, recompute_accounting
from newsreuse.reporting import (
    emit_accounting,
    emit_heatmap_svg,
    emit_position_csv,
    emit_term_frequencies,
    heatmap_color,
    load_stopwords,
)

from conftest import FILLER_SENTENCES, source_article, target_article, utc


def _match_set_from_pipeline():
    planted = FILLER_SENTENCES[0]
    target = Corpus(
        Role.TARGET,
        [target_article("t1", utc(2023, 10, 7, 12), planted + " " + FILLER_SENTENCES[5])],
    )
    source = Corpus(
        Role.SOURCE,
        [
            source_article("s1", utc(2023, 10, 7, 8), planted),
            source_article("s2", utc(2023, 10, 7, 9), planted),
        ],
    )
    return match_pipeline(target, source, BuiltinHashProvider()), target, source


class TestEmitAccounting:
    def test_layout_and_earliest_em_dash_cells(self, tmp_path):
        match_set, _, _ = _match_set_from_pipeline()
        path = tmp_path / "accounting.csv"
        emit_accounting(match_set, path)
        with path.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "stage",
            "articles_target",
            "articles_source",
            "sentences_target",
            "sentences_source",
        ]
        assert [r[0] for r in rows[1:]] == ["True matches", "The earliest matches", "False positives"]
        true_row = rows[1]
        assert true_row[1:] == ["1", "2", "1", "2"]
        earliest = rows[2]
        assert earliest[1] == "" and earliest[3] == ""  # not applicable, never 0
        assert earliest[2] == "1" and earliest[4] == "1"

    def test_empty_match_set_all_zero(self, tmp_path):
        match_set = MatchSet(threshold=0.6, records=[])
        match_set.accounting = recompute_accounting(match_set)
        path = tmp_path / "accounting.csv"
        emit_accounting(match_set, path)
        with path.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[1][1:] == ["0", "0", "0", "0"]
        assert rows[3][1:] == ["0", "0", "0", "0"]

    def test_round_trip_values(self, tmp_path):
        match_set, _, _ = _match_set_from_pipeline()
        path = tmp_path / "accounting.csv"
        emit_accounting(match_set, path)
        with path.open() as fh:
            rows = {r[0]: r[1:] for r in list(csv.reader(fh))[1:]}
        counts = match_set.accounting["true_matches"]
        assert rows["True matches"] == [
            str(counts.target_articles),
            str(counts.source_articles),
            str(counts.target_sentences),
            str(counts.source_sentences),
        ]


class TestPositionCsv:
    def test_round_trip(self, tmp_path):
        match_set, target, source = _match_set_from_pipeline()
        attributed = [r for r in match_set.records if r.status is MatchStatus.EARLIEST]
        table = build_position_table(attributed, target, source)
        path = tmp_path / "position.csv"
        emit_position_csv(table, path)
        with path.open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["source\\target", "beginning", "middle", "end"]
        parsed = tuple(tuple(int(v) for v in row[1:]) for row in rows[1:])
        assert parsed == table.counts


class TestHeatmapSvg:
    def test_color_anchors(self):
        assert heatmap_color(0, 10) == "#0000FF"
        assert heatmap_color(10, 10) == "#FF0000"
        assert heatmap_color(5, 10) == "#FFFFFF"

    def test_clamping_above_max(self):
        assert heatmap_color(25, 10) == "#FF0000"

    def test_color_is_pure_function_of_value_and_scale(self):
        assert heatmap_color(3, 10) == heatmap_color(3, 10)
        assert heatmap_color(3, 10) != heatmap_color(3, 6)

    def test_cell_count_and_divider(self, tmp_path):
        matrix = HeatmapMatrix(
            bins=("beginning", "middle", "end"),
            article_ids=("a", "b", "c"),
            timestamps=(
                "2023-10-07T08:00:00+00:00",
                "2023-10-08T08:00:00+00:00",
                "2025-02-01T08:00:00+00:00",
            ),
            counts=((0, 1, 2), (3, 5, 10), (0, 0, 1)),
        )
        path = tmp_path / "heat.svg"
        emit_heatmap_svg(matrix, path, scale_max=10, divider_date=date(2025, 1, 1))
        svg = path.read_text()
        assert svg.count("<rect") == 9
        assert "stroke-dasharray" in svg
        assert "#0000FF" in svg and "#FF0000" in svg and "#FFFFFF" in svg

    def test_empty_matrix(self, tmp_path):
        matrix = HeatmapMatrix(bins=("beginning", "middle", "end"), article_ids=(), timestamps=(), counts=((), (), ()))
        with pytest.raises(EmptyMatrix):
            emit_heatmap_svg(matrix, tmp_path / "x.svg")


def _record(tkey, multiplicity_stub="s1#0"):
    return MatchRecord(
        target_key=tkey,
        source_key=multiplicity_stub,
        similarity=0.9,
        target_created_at=utc(2023, 10, 7, 12),
        source_received_at=utc(2023, 10, 7, 8),
        status=MatchStatus.EARLIEST,
    )


class TestTermFrequencies:
    def _target(self, sentences):
        return Corpus(Role.TARGET, [target_article("t1", utc(2023, 10, 7, 12), " ".join(sentences))])

    def test_counting_with_stopwords(self, tmp_path):
        stopfile = tmp_path / "stop.txt"
        stopfile.write_text("a\n")
        target = self._target(["A big storm hit. A big deal follows."])
        records = [_record("t1#0"), _record("t1#1")]
        terms = emit_term_frequencies(records, target, top_k_sentences=2, stopwords=stopfile)
        as_pairs = [(t.term, t.count) for t in terms]
        assert ("big", 2) in as_pairs
        assert ("storm", 1) in as_pairs
        assert ("deal", 1) in as_pairs
        assert all(t.term != "a" for t in terms)

    def test_all_stopworded(self, tmp_path):
        stopfile = tmp_path / "stop.txt"
        stopfile.write_text("some\nwords\nonly\n")
        target = self._target(["Some words only."])
        assert emit_term_frequencies([_record("t1#0")], target, 1, stopwords=stopfile) == []

    def test_tie_breaks_alphabetical(self, tmp_path):
        stopfile = tmp_path / "stop.txt"
        stopfile.write_text("")
        target = self._target(["Zebra apple zebra apple."])
        terms = emit_term_frequencies([_record("t1#0")], target, 1, stopwords=stopfile)
        assert [(t.term, t.count) for t in terms] == [("apple", 2), ("zebra", 2)]

    def test_top_k_selection_by_multiplicity(self, tmp_path):
        stopfile = tmp_path / "stop.txt"
        stopfile.write_text("")
        target = self._target(["Alpha beta gamma.", "Delta epsilon zeta."])
        # sentence 1 reused twice, sentence 0 once; top-1 must pick sentence 1
        records = [_record("t1#0"), _record("t1#1"), _record("t1#1", "s2#0")]
        terms = emit_term_frequencies(records, target, top_k_sentences=1, stopwords=stopfile)
        names = {t.term for t in terms}
        assert names == {"delta", "epsilon", "zeta"}

    def test_numbers_and_short_tokens_dropped(self, tmp_path):
        stopfile = tmp_path / "stop.txt"
        stopfile.write_text("")
        target = self._target(["The vote was 7 to 5 in room B."])
        terms = emit_term_frequencies([_record("t1#0")], target, 1, stopwords=stopfile)
        names = {t.term for t in terms}
        assert "7" not in names and "5" not in names and "b" not in names

    def test_permutation_invariance(self, tmp_path):
        stopfile = tmp_path / "stop.txt"
        stopfile.write_text("")
        target = self._target(["Alpha beta gamma.", "Delta epsilon zeta."])
        records = [_record("t1#0"), _record("t1#1")]
        one = emit_term_frequencies(records, target, 2, stopwords=stopfile)
        two = emit_term_frequencies(list(reversed(records)), target, 2, stopwords=stopfile)
        assert one == two

    def test_json_emission(self, tmp_path):
        stopfile = tmp_path / "stop.txt"
        stopfile.write_text("")
        target = self._target(["Alpha beta gamma."])
        out = tmp_path / "terms.json"
        terms = emit_term_frequencies([_record("t1#0")], target, 1, stopwords=stopfile, path=out)
        payload = json.loads(out.read_text())
        assert payload == [{"term": t.term, "count": t.count} for t in terms]

    def test_default_stopwords_load(self):
        stops = load_stopwords(None)
        assert "the" in stops and "and" in stops
