import struct

import numpy as np
import pytest

from conftest import complete_graph, path_graph
from propenc.encoder import FeatureMatrix, propenc_encode_dataset
from propenc.errors import CrossGraphEdge, InconsistentCounts, LengthMismatch, MalformedLine, UnsupportedFormat
from propenc.graph import GraphDataset, gen_erdos_renyi, graph_from_edges, synth_dataset
from propenc.io import (
    format_real,
    parse_tu_dataset,
    read_boundaries,
    read_npy,
    write_csv,
    write_npy,
    write_tu_dataset,
)
from propenc.metrics import degree


def write_fixture(tmp_path, edges="1, 2\n2, 1\n2, 3\n3, 2\n4, 5\n5, 4\n", indicator="1\n1\n1\n2\n2\n", labels="1\n-1\n"):
    (tmp_path / "FX_A.txt").write_text(edges)
    (tmp_path / "FX_graph_indicator.txt").write_text(indicator)
    (tmp_path / "FX_graph_labels.txt").write_text(labels)
    return tmp_path


class TestParseTU:
    def test_fixture(self, tmp_path):
        ds = parse_tu_dataset(write_fixture(tmp_path), "FX")
        assert ds.graphs == (path_graph(3), graph_from_edges(2, [(0, 1)]))
        assert ds.labels == (1, 0)
        assert ds.name == "FX"

    def test_cross_graph_edge(self, tmp_path):
        write_fixture(tmp_path, edges="1, 2\n2, 4\n")
        with pytest.raises(CrossGraphEdge):
            parse_tu_dataset(tmp_path, "FX")

    def test_empty_labels(self, tmp_path):
        write_fixture(tmp_path, labels="")
        with pytest.raises(InconsistentCounts):
            parse_tu_dataset(tmp_path, "FX")

    def test_indicator_beyond_labels(self, tmp_path):
        write_fixture(tmp_path, labels="1\n")
        with pytest.raises(InconsistentCounts):
            parse_tu_dataset(tmp_path, "FX")

    def test_node_id_beyond_indicator(self, tmp_path):
        write_fixture(tmp_path, edges="1, 9\n")
        with pytest.raises(InconsistentCounts):
            parse_tu_dataset(tmp_path, "FX")

    def test_malformed_line_number(self, tmp_path):
        write_fixture(tmp_path, edges="1, 2\n2, x\n")
        with pytest.raises(MalformedLine) as info:
            parse_tu_dataset(tmp_path, "FX")
        assert info.value.line_number == 2

    def test_separator_tolerance(self, tmp_path):
        write_fixture(tmp_path, edges="1,2\n 2 ,\t3 \n\n4 5\n")
        ds = parse_tu_dataset(tmp_path, "FX")
        assert ds.graphs[0] == path_graph(3)

    def test_duplicates_collapse(self, tmp_path):
        write_fixture(tmp_path, edges="1, 2\n1, 2\n2, 1\n")
        assert parse_tu_dataset(tmp_path, "FX").graphs[0].num_edges == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            parse_tu_dataset(tmp_path, "NOPE")

    def test_extra_files_ignored(self, tmp_path):
        write_fixture(tmp_path)
        (tmp_path / "FX_node_labels.txt").write_text("garbage\n")
        assert len(parse_tu_dataset(tmp_path, "FX")) == 2

    def test_round_trip(self, tmp_path):
        ds = synth_dataset(15, 2, 6, seed=4, name="RT")
        ds = GraphDataset(ds.graphs + (graph_from_edges(3, []),), ds.labels + (1,), "RT")
        write_tu_dataset(ds, tmp_path, "RT")
        back = parse_tu_dataset(tmp_path, "RT")
        assert back.graphs == ds.graphs and back.labels == ds.labels
        write_tu_dataset(back, tmp_path / "again", "RT")
        assert parse_tu_dataset(tmp_path / "again", "RT").graphs == ds.graphs

    def test_counts(self, tmp_path):
        graphs = tuple(gen_erdos_renyi(n, 0.3, n) for n in (4, 9, 2))
        write_tu_dataset(GraphDataset(graphs, (3, 5, 3)), tmp_path, "C")
        ds = parse_tu_dataset(tmp_path, "C")
        indicator = (tmp_path / "C_graph_indicator.txt").read_text().split()
        assert len(ds) == 3
        assert sum(g.num_nodes for g in ds.graphs) == len(indicator)
        assert ds.labels == (0, 1, 0)


class TestCSV:
    def test_degree_propenc(self, tmp_path):
        _, mats = propenc_encode_dataset([degree(path_graph(3)), degree(complete_graph(3))], 2)
        lines = write_csv(mats[:1], tmp_path / "p3.csv").read_text().splitlines()
        assert lines == ["graph_id,node_id,f0,f1", "0,0,1,0", "0,1,0,1", "0,2,1,0"]

    def test_empty(self, tmp_path):
        assert write_csv([], tmp_path / "e.csv").read_text() == "graph_id,node_id\n"

    def test_width_mismatch_writes_nothing(self, tmp_path):
        out = tmp_path / "bad.csv"
        with pytest.raises(LengthMismatch):
            write_csv([FeatureMatrix(np.zeros((1, 2))), FeatureMatrix(np.zeros((1, 3)))], out)
        assert not out.exists()

    def test_graph_id_ordering(self, tmp_path):
        mats = [FeatureMatrix([[1.0]]), FeatureMatrix([[2.0]])]
        lines = write_csv(mats, tmp_path / "o.csv", graph_ids=[7, 3]).read_text().splitlines()
        assert lines[1:] == ["3,0,2", "7,0,1"]

    @pytest.mark.parametrize("x", [0.1, 1 / 3, -2.5e-300, 1e300, 123456789.0, 0.0])
    def test_format_round_trips(self, x):
        assert float(format_real(x)) == x


class TestNPY:
    def test_layout(self, tmp_path):
        m = np.arange(6, dtype=float).reshape(3, 2)
        path = write_npy(FeatureMatrix(m), tmp_path / "a.npy")
        raw = path.read_bytes()
        assert raw[:8] == b"\x93NUMPY\x01\x00"
        (hlen,) = struct.unpack("<H", raw[8:10])
        assert (10 + hlen) % 64 == 0
        assert len(raw) == 10 + hlen + 48
        assert raw[10 + hlen - 1:10 + hlen] == b"\n"
        assert raw[10 + hlen:] == m.astype("<f8").tobytes()

    def test_numpy_reads_it(self, tmp_path):
        m = np.random.default_rng(0).normal(size=(4, 3))
        path = write_npy(FeatureMatrix(m), tmp_path / "b.npy")
        loaded = np.load(path)
        assert loaded.dtype == np.dtype("<f8") and loaded.tobytes() == m.tobytes()

    def test_reads_numpy_output(self, tmp_path):
        m = np.random.default_rng(1).normal(size=(5, 2))
        np.save(tmp_path / "c.npy", m)
        assert read_npy(tmp_path / "c.npy").rows.tobytes() == m.tobytes()

    def test_empty_rows(self, tmp_path):
        path = write_npy(FeatureMatrix(np.zeros((0, 4))), tmp_path / "z.npy")
        back = read_npy(path)
        assert back.rows.shape == (0, 4)
        assert np.load(path).shape == (0, 4)

    def test_boundaries(self, tmp_path):
        mats = [FeatureMatrix(np.ones((n, 2)) * n) for n in (3, 1, 2)]
        path = write_npy(mats, tmp_path / "s.npy")
        assert read_npy(path).rows.shape == (6, 2)
        assert read_boundaries(path) == [(0, 0, 3), (1, 3, 1), (2, 4, 2)]

    def test_big_endian_rejected(self, tmp_path):
        np.save(tmp_path / "be.npy", np.zeros((2, 2), dtype=">f8"))
        with pytest.raises(UnsupportedFormat, match="descr"):
            read_npy(tmp_path / "be.npy")

    def test_three_d_rejected(self, tmp_path):
        np.save(tmp_path / "t.npy", np.zeros((2, 2, 2)))
        with pytest.raises(UnsupportedFormat, match="shape"):
            read_npy(tmp_path / "t.npy")

    def test_other_rejections(self, tmp_path):
        np.save(tmp_path / "i.npy", np.zeros((2, 2), dtype=np.int64))
        with pytest.raises(UnsupportedFormat):
            read_npy(tmp_path / "i.npy")
        np.save(tmp_path / "f.npy", np.asfortranarray(np.zeros((2, 3))))
        with pytest.raises(UnsupportedFormat, match="fortran"):
            read_npy(tmp_path / "f.npy")
        (tmp_path / "junk.npy").write_bytes(b"not numpy at all")
        with pytest.raises(UnsupportedFormat, match="magic"):
            read_npy(tmp_path / "junk.npy")

    def test_random_round_trips(self, tmp_path):
        rng = np.random.default_rng(2)
        for i in range(100):
            shape = (int(rng.integers(0, 20)), int(rng.integers(1, 8)))
            m = rng.normal(size=shape) * 10.0 ** rng.integers(-300, 300, size=shape)
            path = write_npy(FeatureMatrix(m), tmp_path / f"r{i}.npy")
            assert read_npy(path).rows.tobytes() == m.tobytes()
