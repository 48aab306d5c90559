"""Tests for the CSV, TSV edge, and JSON file formats."""
import json

import numpy as np
import pytest

from neighsel.errors import ConstantColumn, ParseError, RaggedRow
from neighsel.formats import (
    FORMAT_VERSION,
    canonical_json,
    load_csv,
    read_edges,
    read_json,
    read_model,
    write_csv,
    write_edges,
    write_json,
    write_model,
)
from neighsel.graph import EdgeSet
from neighsel.numeric import DataMatrix, standardize, substream
from neighsel.synth import build_model, generate_geometric_graph


class TestCsv:
    def test_round_trip_is_exact(self, tmp_path):
        values = substream(7, 0).standard_normal((20, 5))
        path = tmp_path / "data.csv"
        write_csv(DataMatrix(values), path)
        back = load_csv(path)
        assert back.standardized is False
        assert back.values.shape == (20, 5)
        assert np.array_equal(back.values, values)

    def test_written_file_shape(self, tmp_path):
        path = tmp_path / "data.csv"
        write_csv(DataMatrix([[1.5, -2.0], [0.25, 3.0]]), path)
        text = path.read_bytes().decode("utf-8")
        assert text == "x1,x2\n1.5,-2.0\n0.25,3.0\n"

    def test_constant_columns_fail_downstream_not_on_load(self, tmp_path):
        path = tmp_path / "zeros.csv"
        path.write_bytes(b"x1,x2\n0.0,0.0\n0.0,0.0\n")
        data = load_csv(path)
        assert data.n == 2 and data.p == 2
        with pytest.raises(ConstantColumn):
            standardize(data)

    def test_missing_trailing_newline_is_fine(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_bytes(b"x1\n1.0\n2.0")
        assert load_csv(path).values.tolist() == [[1.0], [2.0]]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_bytes(b"")
        with pytest.raises(ParseError) as err:
            load_csv(path)
        assert err.value.line == 1 and err.value.column == 1

    def test_bad_header_field_position(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_bytes(b"x1,y2,x3\n1.0,2.0,3.0\n1.0,2.0,3.0\n")
        with pytest.raises(ParseError) as err:
            load_csv(path)
        assert err.value.line == 1 and err.value.column == 2

    def test_ragged_row_reports_one_based_line(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_bytes(b"x1,x2\n1.0,2.0\n1.0,2.0\n3.0\n")
        with pytest.raises(RaggedRow) as err:
            load_csv(path)
        # header is line 1, so the short row is line 4
        assert err.value.line == 4

    def test_bad_number_reports_line_and_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_bytes(b"x1,x2\n1.0,2.0\n1.0,oops\n")
        with pytest.raises(ParseError) as err:
            load_csv(path)
        assert err.value.line == 3 and err.value.column == 2

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "nan.csv"
        path.write_bytes(b"x1\nnan\n1.0\n")
        with pytest.raises(ParseError) as err:
            load_csv(path)
        assert err.value.line == 2 and err.value.column == 1

    def test_crlf_rejected(self, tmp_path):
        # the carriage return sticks to the last field and fails parsing
        path = tmp_path / "crlf.csv"
        path.write_bytes(b"x1,x2\r\n1.0,2.0\r\n1.0,2.0\r\n")
        with pytest.raises(ParseError) as err:
            load_csv(path)
        assert err.value.line == 1 and err.value.column == 2

    def test_invalid_utf8_locates_line(self, tmp_path):
        path = tmp_path / "bin.csv"
        path.write_bytes(b"x1\n1.0\n\xff\n")
        with pytest.raises(ParseError) as err:
            load_csv(path)
        assert err.value.line == 3


class TestEdgeFiles:
    def test_empty_set_empty_file(self, tmp_path):
        path = tmp_path / "edges.tsv"
        write_edges(EdgeSet(p=4, edges=frozenset(), rule="truth"), path)
        assert path.read_bytes() == b""
        assert read_edges(path, p=4).edges == frozenset()

    def test_reversed_pair_normalized(self, tmp_path):
        path = tmp_path / "edges.tsv"
        write_edges(EdgeSet(p=2, edges=frozenset({(1, 0)}), rule="truth"), path)
        assert path.read_bytes() == b"1\t2\n"

    def test_lines_sorted_lexicographically(self, tmp_path):
        edges = frozenset({(2, 3), (0, 5), (0, 1), (1, 4)})
        path = tmp_path / "edges.tsv"
        write_edges(EdgeSet(p=6, edges=edges, rule="truth"), path)
        assert path.read_bytes() == b"1\t2\n1\t6\n2\t5\n3\t4\n"

    def test_large_truth_file_round_trips_byte_identically(self, tmp_path):
        graph = generate_geometric_graph(1000, seed=11)
        assert len(graph.edges) > 1000
        first = tmp_path / "a.tsv"
        second = tmp_path / "b.tsv"
        write_edges(graph.edge_set(), first)
        back = read_edges(first, p=1000)
        assert back.edges == graph.edges
        write_edges(back, second)
        assert first.read_bytes() == second.read_bytes()

    def test_read_accepts_unordered_pairs(self, tmp_path):
        path = tmp_path / "edges.tsv"
        path.write_bytes(b"2\t1\n")
        assert read_edges(path, p=2).edges == frozenset({(0, 1)})

    def test_read_keeps_requested_rule(self, tmp_path):
        path = tmp_path / "edges.tsv"
        path.write_bytes(b"1\t2\n")
        assert read_edges(path, p=3, rule="and").rule == "and"

    def test_read_rejects_bad_lines(self, tmp_path):
        path = tmp_path / "edges.tsv"
        cases = [
            (b"1\t2\t3\n", RaggedRow),
            (b"1\n", RaggedRow),
            (b"1\tx\n", ParseError),
            (b"0\t2\n", ParseError),
            (b"1\t9\n", ParseError),
            (b"2\t2\n", ParseError),
            (b"1\t2\n2\t1\n", ParseError),  # duplicate after normalization
        ]
        for content, exc in cases:
            path.write_bytes(content)
            with pytest.raises(exc) as err:
                read_edges(path, p=5)
            assert err.value.line == content[:-1].count(b"\n") + 1


class TestModelJson:
    def test_round_trip(self, tmp_path):
        model = build_model(generate_geometric_graph(30, seed=3))
        path = tmp_path / "model.json"
        write_model(model, path)
        back = read_model(path)
        assert back.graph.p == 30
        assert back.graph.edges == model.graph.edges
        assert back.graph.raw_edge_count == model.graph.raw_edge_count
        assert back.graph.max_degree == model.graph.max_degree
        assert np.array_equal(back.graph.positions, model.graph.positions)
        assert np.array_equal(back.precision.values, model.precision.values)
        # covariance is recomputed from identical precision bits
        assert np.array_equal(back.covariance.values, model.covariance.values)

    def test_write_is_deterministic(self, tmp_path):
        model = build_model(generate_geometric_graph(12, seed=5))
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_model(model, a)
        write_model(model, b)
        assert a.read_bytes() == b.read_bytes()

    def test_rejects_wrong_kind_and_version(self, tmp_path):
        model = build_model(generate_geometric_graph(5, seed=1))
        path = tmp_path / "model.json"
        write_model(model, path)
        payload = read_json(path)
        for key, value in [("kind", "report"), ("format_version", FORMAT_VERSION + 1)]:
            broken = dict(payload)
            broken[key] = value
            write_json(broken, path)
            with pytest.raises(ParseError):
                read_model(path)

    def test_truncated_json_locates_error(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_bytes(b'{"kind": "model",\n  "p": ')
        with pytest.raises(ParseError) as err:
            read_model(path)
        assert err.value.line == 2


class TestCanonicalJson:
    def test_sorted_keys_and_trailing_newline(self):
        text = canonical_json({"b": 1, "a": [1.5, 2]})
        assert text == '{\n  "a": [\n    1.5,\n    2\n  ],\n  "b": 1\n}\n'
        assert json.loads(text) == {"a": [1.5, 2], "b": 1}

    def test_floats_round_trip(self):
        values = substream(3, 0).standard_normal(50).tolist()
        assert json.loads(canonical_json(values)) == values

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            canonical_json({"x": float("nan")})

    def test_write_read_json(self, tmp_path):
        path = tmp_path / "blob.json"
        obj = {"format_version": FORMAT_VERSION, "rows": [[1, 2], [3, 4]]}
        write_json(obj, path)
        assert read_json(path) == obj
        assert path.read_bytes().endswith(b"}\n")
