import numpy as np
import pytest

from motifboot.graphs import (Graph, GraphonSpec, agreement_matrix,
                              export_edge_list, ingest_edge_list,
                              ingest_rollcall, read_rollcall_csv,
                              rollcall_threshold, sample_graph, sbm_g, sm_g)

from conftest import gnp


class TestGraph:
    def test_rejects_self_loops(self):
        with pytest.raises(ValueError):
            Graph(np.eye(3, dtype=bool))

    def test_rejects_asymmetric(self):
        adj = np.zeros((3, 3), dtype=bool)
        adj[0, 1] = True
        with pytest.raises(ValueError):
            Graph(adj)

    def test_degrees_and_edges(self):
        g = gnp(30, 0.4, seed=0)
        assert np.array_equal(g.degrees, g.adjacency.sum(axis=0))
        assert g.n_edges == int(g.degrees.sum()) // 2

    def test_edge_list_canonical(self):
        g = gnp(15, 0.5, seed=1)
        el = g.edge_list()
        assert (el[:, 0] < el[:, 1]).all()
        assert el.shape[0] == g.n_edges
        order = np.lexsort((el[:, 1], el[:, 0]))
        assert np.array_equal(el, el[order])


class TestGraphonSpec:
    def test_sbm_g_parameters(self):
        spec = sbm_g(rho=1.0)
        assert spec.kind == "sbm"
        assert spec.block_matrix[0, 0] == 0.6
        assert spec.block_matrix[0, 1] == 0.2
        assert np.allclose(spec.block_probs, [0.65, 0.35])

    def test_sm_g_valid(self):
        spec = sm_g(rho=1.0)
        assert spec.kind == "formula"
        assert spec.sup_w() <= 1.0 + 1e-9

    def test_rejects_bad_rho(self):
        with pytest.raises(ValueError):
            sbm_g(rho=1.5)

    def test_rejects_invalid_block_matrix(self):
        with pytest.raises(ValueError):
            GraphonSpec(block_matrix=np.array([[0.5, 0.3], [0.2, 0.5]]),
                        block_probs=np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            GraphonSpec(block_matrix=np.array([[1.2, 0.2], [0.2, 0.2]]),
                        block_probs=np.array([0.5, 0.5]))

    def test_rejects_bad_block_probs(self):
        with pytest.raises(ValueError):
            GraphonSpec(block_matrix=np.array([[0.5, 0.2], [0.2, 0.5]]),
                        block_probs=np.array([0.6, 0.6]))

    def test_requires_exactly_one_kind(self):
        with pytest.raises(ValueError):
            GraphonSpec()
        with pytest.raises(ValueError):
            GraphonSpec(formula="smg", table=np.full((2, 2), 0.3))

    def test_rejects_rho_sup_above_one(self):
        with pytest.raises(ValueError):
            GraphonSpec(rho=0.9, table=np.full((2, 2), 2.0))

    def test_unknown_formula(self):
        with pytest.raises(ValueError):
            GraphonSpec(formula="nope")


class TestSampler:
    def test_rho_zero_gives_empty_graph(self):
        graph, _ = sample_graph(sbm_g(rho=0.0), n=50, seed=1)
        assert graph.n == 50
        assert graph.n_edges == 0

    def test_deterministic(self):
        a, lat_a = sample_graph(sbm_g(), n=80, seed=42)
        b, lat_b = sample_graph(sbm_g(), n=80, seed=42)
        assert np.array_equal(a.adjacency, b.adjacency)
        assert np.array_equal(lat_a, lat_b)
        c, _ = sample_graph(sbm_g(), n=80, seed=43)
        assert not np.array_equal(a.adjacency, c.adjacency)

    def test_latents_returned(self):
        _, lat = sample_graph(sbm_g(), n=100, seed=5)
        assert set(np.unique(lat)) <= {0, 1}
        _, lat = sample_graph(sm_g(), n=100, seed=5)
        assert lat.min() >= 0.0 and lat.max() <= 1.0

    def test_sbm_density_within_three_se(self):
        spec = sbm_g(rho=1.0)
        p = spec.mean_edge_probability()
        n, n_graphs = 200, 100
        dens = [sample_graph(spec, n, seed=s)[0].edge_density()
                for s in range(n_graphs)]
        se = np.std(dens, ddof=1) / np.sqrt(n_graphs)
        assert abs(np.mean(dens) - p) <= 3 * se

    def test_rejects_tiny_n(self):
        with pytest.raises(ValueError):
            sample_graph(sbm_g(), n=1, seed=0)


class TestEdgeListIO:
    def test_basic_path_graph(self, tmp_path):
        f = tmp_path / "g.edges"
        f.write_text("0 1\n1 2\n")
        graph, info = ingest_edge_list(f)
        assert graph.n == 3
        assert graph.n_edges == 2
        assert info == {"self_loops_dropped": 0, "duplicates_collapsed": 0}

    def test_self_loop_dropped(self, tmp_path):
        f = tmp_path / "g.edges"
        f.write_text("0 0\n0 1\n")
        graph, info = ingest_edge_list(f)
        assert graph.n_edges == 1
        assert info["self_loops_dropped"] == 1

    def test_duplicate_collapsed(self, tmp_path):
        f = tmp_path / "g.edges"
        f.write_text("0 1\n1 0\n")
        graph, info = ingest_edge_list(f)
        assert graph.n_edges == 1
        assert info["duplicates_collapsed"] == 1

    def test_one_based(self, tmp_path):
        f = tmp_path / "g.edges"
        f.write_text("1 2\n2 3\n")
        graph, _ = ingest_edge_list(f, one_based=True)
        assert graph.n == 3
        assert graph.adjacency[0, 1] and graph.adjacency[1, 2]

    def test_malformed_line_reports_number(self, tmp_path):
        f = tmp_path / "g.edges"
        f.write_text("0 1\nbroken\n")
        with pytest.raises(ValueError, match=":2:"):
            ingest_edge_list(f)
        f.write_text("0 1\n2 x\n")
        with pytest.raises(ValueError, match=":2:"):
            ingest_edge_list(f)

    def test_export_ingest_roundtrip(self, tmp_path):
        g = gnp(40, 0.3, seed=9)
        f = tmp_path / "round.edges"
        export_edge_list(g, f)
        back, info = ingest_edge_list(f)
        assert np.array_equal(g.adjacency, back.adjacency)
        assert info == {"self_loops_dropped": 0, "duplicates_collapsed": 0}

    def test_export_bytes_stable(self, tmp_path):
        g = gnp(25, 0.5, seed=2)
        a, b = tmp_path / "a.edges", tmp_path / "b.edges"
        export_edge_list(g, a)
        export_edge_list(g, b)
        assert a.read_bytes() == b.read_bytes()


class TestRollcall:
    def test_identical_votes_with_override(self):
        votes = np.tile([1, -1], 100)  # 200 bills, full agreement
        votes = np.vstack([votes, votes])
        graph, threshold = ingest_rollcall(votes, ["D", "R"], threshold=124)
        assert threshold == 124
        assert graph.adjacency[0, 1]  # 200 > 124

    def test_all_disagree_empty_graph(self):
        votes = np.array([[1] * 10, [-1] * 10])
        graph, _ = ingest_rollcall(votes, ["D", "R"], threshold=0)
        assert graph.n_edges == 0

    def test_agreement_matrix_counts(self):
        votes = np.array([[1, 1, -1, 0],
                          [1, -1, -1, 0],
                          [-1, 1, 1, 1]])
        agree = agreement_matrix(votes)
        assert agree[0, 1] == 2  # bills 0 and 2
        assert agree[0, 2] == 1  # bill 1
        assert agree[1, 2] == 0
        assert np.array_equal(agree, agree.T)
        assert (agree.diagonal() == 0).all()

    def test_threshold_separates_synthetic_parties(self):
        # same-party pairs agree on ~90 bills, cross-party on ~10
        rng = np.random.default_rng(0)
        base_d = np.where(rng.random(100) < 0.95, 1, -1)
        base_r = -base_d
        votes = []
        parties = []
        for _ in range(10):
            noise = rng.random(100) < 0.05
            votes.append(np.where(noise, -base_d, base_d))
            parties.append("D")
        for _ in range(10):
            noise = rng.random(100) < 0.05
            votes.append(np.where(noise, -base_r, base_r))
            parties.append("R")
        votes = np.array(votes)
        agree = agreement_matrix(votes)
        parties = np.array(parties)
        t = rollcall_threshold(agree, parties)
        iu = np.triu_indices(20, 1)
        same = parties[iu[0]] == parties[iu[1]]
        cp_max = agree[iu][~same].max()
        sp_min = agree[iu][same].min()
        assert cp_max < sp_min  # histograms actually separated
        assert cp_max <= t < sp_min
        graph, _ = ingest_rollcall(votes, parties, threshold=t)
        adj_same = graph.adjacency[iu][same]
        adj_cross = graph.adjacency[iu][~same]
        assert adj_same.all() and not adj_cross.any()

    def test_one_party_error(self):
        votes = np.array([[1, 1], [1, -1]])
        with pytest.raises(ValueError):
            ingest_rollcall(votes, ["D", "D"])

    def test_string_votes_accepted(self):
        votes = np.array([["Y", "Y"], ["Y", "N"], ["N", "N"]])
        graph, _ = ingest_rollcall(votes, ["D", "D", "R"], threshold=0)
        assert graph.adjacency[0, 1]
        assert not graph.adjacency[0, 2]

    def test_read_rollcall_csv(self, tmp_path):
        f = tmp_path / "votes.csv"
        f.write_text("m1,D,Y,N\nm2,D,Y,Y\nm3,R,N,N\n")
        ids, parties, votes = read_rollcall_csv(f)
        assert ids == ["m1", "m2", "m3"]
        assert list(parties) == ["D", "D", "R"]
        assert votes.shape == (3, 2)
        bad = tmp_path / "bad.csv"
        bad.write_text("m1,D,Y\nm2,D,Y,N\n")
        with pytest.raises(ValueError):
            read_rollcall_csv(bad)
