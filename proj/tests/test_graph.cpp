#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "coin/graph/io.hpp"
#include "coin/graph/knn.hpp"
#include "coin/graph/ops.hpp"
#include "support/oracles.hpp"

using namespace coin;
using namespace coin::graph;

TEST(FromEdgeList, SingleEdge) {
  const auto g = from_edge_list({{0, 1, 1.0}}, 2);
  EXPECT_EQ(g.nnz(), 1u);
  EXPECT_EQ(g.weight(0, 1), 1.0);
  EXPECT_EQ(g.weight(1, 0), 0.0);
  EXPECT_EQ(g.degree()[0], 1.0);
  EXPECT_EQ(g.degree()[1], 0.0);
}

TEST(FromEdgeList, DuplicatesAreSummed) {
  const auto g = from_edge_list({{0, 1, 1.0}, {0, 1, 2.0}}, 2);
  ASSERT_EQ(g.nnz(), 1u);
  EXPECT_EQ(g.weight(0, 1), 3.0);
}

TEST(FromEdgeList, EmptyList) {
  const auto g = from_edge_list({}, 3);
  EXPECT_EQ(g.n_nodes(), 3u);
  EXPECT_EQ(g.nnz(), 0u);
  for (double d : g.degree()) EXPECT_EQ(d, 0.0);
}

TEST(FromEdgeList, RejectsBadInput) {
  EXPECT_THROW(from_edge_list({{0, 5, 1.0}}, 2), InputError);
  EXPECT_THROW(from_edge_list({{0, 1, -1.0}}, 2), InputError);
  EXPECT_THROW(from_edge_list({{0, 1, std::nan("")}}, 2), InputError);
}

TEST(FromEdgeList, ColumnsSortedWithinRows) {
  const auto g = from_edge_list({{0, 3, 1.0}, {0, 1, 1.0}, {0, 2, 1.0}}, 4);
  const auto cols = g.neighbors(0);
  ASSERT_EQ(cols.size(), 3u);
  EXPECT_EQ(cols[0], 1u);
  EXPECT_EQ(cols[1], 2u);
  EXPECT_EQ(cols[2], 3u);
}

TEST(Symmetrize, Mirror) {
  const auto s = symmetrize(from_edge_list({{0, 1, 1.0}}, 2));
  EXPECT_EQ(s.weight(0, 1), 1.0);
  EXPECT_EQ(s.weight(1, 0), 1.0);
  EXPECT_TRUE(s.is_symmetric());
}

TEST(Symmetrize, MaxRule) {
  const auto s = symmetrize(from_edge_list({{0, 1, 2.0}, {1, 0, 5.0}}, 2));
  EXPECT_EQ(s.weight(0, 1), 5.0);
  EXPECT_EQ(s.weight(1, 0), 5.0);
}

TEST(Symmetrize, IdempotentOnRandomGraphs) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_symmetric(1 + rng.below(30), 0.2, rng);
    EXPECT_EQ(symmetrize(g), g);
  }
}

TEST(Symmetrize, MatchesDenseMaxOracle) {
  Rng rng(3);
  EdgeList edges;
  const std::size_t n = 12;
  for (int e = 0; e < 40; ++e) edges.push_back({rng.below(n), rng.below(n), rng.uniform(0.0, 2.0)});
  const auto g = detail::build_csr(edges, n, detail::Combine::max);
  const auto a = oracle::dense(g);
  const auto s = oracle::dense(symmetrize(g));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(s[i][j], std::max(a[i][j], a[j][i]));
  }
}

TEST(LargestComponent, TieGoesToSmallestIds) {
  EdgeList e;
  const auto tri = [&](NodeId a, NodeId b, NodeId c) {
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, c}, std::pair{a, c}}) {
      e.push_back({x, y, 1.0});
      e.push_back({y, x, 1.0});
    }
  };
  tri(4, 5, 6);
  tri(0, 1, 2);  // node 3 isolated
  const auto sub = largest_connected_component(from_edge_list(e, 7));
  EXPECT_EQ(sub.graph.n_nodes(), 3u);
  EXPECT_EQ(sub.new_to_old, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(sub.graph.undirected_edge_count(), 3u);
  EXPECT_EQ(sub.old_to_new[3], kNotKept);
  EXPECT_EQ(sub.old_to_new[5], kNotKept);
}

TEST(LargestComponent, ConnectedPathUnchanged) {
  EdgeList e;
  for (NodeId i = 0; i + 1 < 5; ++i) {
    e.push_back({i, i + 1, 1.0});
    e.push_back({i + 1, i, 1.0});
  }
  const auto g = from_edge_list(e, 5);
  const auto sub = largest_connected_component(g);
  EXPECT_EQ(sub.graph, g);
  EXPECT_EQ(sub.new_to_old, (std::vector<NodeId>{0, 1, 2, 3, 4}));
}

TEST(GcnNormalize, IsolatedNode) {
  const auto g = gcn_normalize(from_edge_list({}, 1));
  EXPECT_EQ(g.weight(0, 0), 1.0);
}

TEST(GcnNormalize, TwoNodes) {
  const auto g = gcn_normalize(from_edge_list({{0, 1, 1.0}, {1, 0, 1.0}}, 2));
  for (NodeId i = 0; i < 2; ++i) {
    for (NodeId j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(g.weight(i, j), 0.5);
  }
}

TEST(GcnNormalize, PathMatchesDenseOracle) {
  const auto g = from_edge_list({{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}}, 3);
  const auto want = oracle::gcn(oracle::dense(g));
  const auto got = oracle::dense(gcn_normalize(g));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(got[i][j], want[i][j], 1e-15);
  }
}

TEST(GcnNormalize, RandomGraphsMatchDenseOracle) {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::random_symmetric(1 + rng.below(50), rng.uniform(0.02, 0.4), rng);
    const auto norm = gcn_normalize(g);
    EXPECT_TRUE(norm.is_symmetric());
    const auto want = oracle::gcn(oracle::dense(g));
    const auto got = oracle::dense(norm);
    for (std::size_t i = 0; i < got.size(); ++i) {
      for (std::size_t j = 0; j < got.size(); ++j) ASSERT_NEAR(got[i][j], want[i][j], 1e-14);
    }
  }
}

TEST(Laplacian, ConstantsInKernel) {
  Rng rng(5);
  const auto g = oracle::random_symmetric(20, 0.3, rng);
  const auto lu = laplacian_apply(g, nn::Tensor(20, 3, 1.0));
  for (double v : lu.values()) EXPECT_EQ(v, 0.0);
}

TEST(Laplacian, TwoNodeHandEvaluation) {
  const auto g = from_edge_list({{0, 1, 1.0}, {1, 0, 1.0}}, 2);
  const auto lu = laplacian_apply(g, nn::Tensor::from_rows({{1.0}, {0.0}}));
  EXPECT_EQ(lu, nn::Tensor::from_rows({{1.0}, {-1.0}}));
}

TEST(Laplacian, ColumnSumsVanishOnSymmetricGraphs) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    const auto g = gcn_normalize(oracle::random_symmetric(n, 0.2, rng));
    const auto lu = laplacian_apply(g, oracle::random_tensor(n, 4, rng));
    for (std::size_t c = 0; c < 4; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += lu(i, c);
      EXPECT_NEAR(s, 0.0, 1e-12);
    }
  }
}

TEST(Laplacian, DiagonalDropsOut) {
  const auto g = from_edge_list({{0, 0, 7.0}, {0, 1, 1.0}, {1, 0, 1.0}}, 2);
  EXPECT_EQ(g.laplacian_degree(0), 1.0);
  EXPECT_EQ(laplacian_apply(g, nn::Tensor::from_rows({{2.0}, {0.0}})), nn::Tensor::from_rows({{2.0}, {-2.0}}));
}

TEST(Knn, CollinearPointsMatchKernelFormula) {
  const auto x = nn::Tensor::from_rows({{0.0}, {1.0}, {3.0}});
  const auto k = knn_gaussian_kernel(x, 2, 1);
  // Point 0: sigma = distance to nearest other point = 1.
  EXPECT_EQ(k.bandwidth[0], 1.0);
  ASSERT_GE(k.edges.size(), 2u);
  EXPECT_EQ(k.edges[0].dst, 1u);
  EXPECT_DOUBLE_EQ(k.edges[0].weight, std::exp(-1.0));
  EXPECT_EQ(k.edges[1].dst, 2u);
  EXPECT_DOUBLE_EQ(k.edges[1].weight, std::exp(-9.0));
}

TEST(Knn, AllPairsOracle) {
  Rng rng(21);
  const auto x = oracle::random_tensor(15, 3, rng);
  const auto k = knn_gaussian_kernel(x, 4, 2);
  for (const auto& e : k.edges) {
    const double d2 = squared_distance(x.row(e.src), x.row(e.dst));
    // Every kept neighbour is among the 4 closest by brute-force rank.
    std::size_t closer = 0;
    for (NodeId j = 0; j < x.rows(); ++j) {
      if (j != e.src && squared_distance(x.row(e.src), x.row(j)) < d2) ++closer;
    }
    EXPECT_LT(closer, 4u);
    const double s = k.bandwidth[e.src];
    const double want = std::exp(-d2 / (s * s));
    EXPECT_NEAR(e.weight, want, 1e-13 * want);
  }
}

TEST(Knn, DuplicatePointsGiveUnitRawWeight) {
  const auto x = nn::Tensor::from_rows({{1.0, 1.0}, {1.0, 1.0}, {5.0, 5.0}});
  const auto k = knn_gaussian_kernel(x, 1, 2);
  EXPECT_EQ(k.edges[0].dst, 1u);
  EXPECT_EQ(k.edges[0].weight, 1.0);
}

TEST(Knn, DegenerateBandwidthFloored) {
  const auto x = nn::Tensor::from_rows({{0.0}, {0.0}, {0.0}});
  const auto k = knn_gaussian_kernel(x, 1, 1);
  EXPECT_EQ(k.degenerate_bandwidths, 3u);
  EXPECT_EQ(k.bandwidth[0], kMinBandwidth);
}

TEST(Knn, OutputSymmetricNonNegative) {
  Rng rng(4);
  const auto x = oracle::random_tensor(40, 5, rng);
  const auto g = build_knn_gaussian(x, 8, 4).graph;
  EXPECT_TRUE(g.is_symmetric());
  for (double w : g.weights()) EXPECT_GE(w, 0.0);
  for (NodeId i = 0; i < g.n_nodes(); ++i) EXPECT_EQ(g.weight(i, i), 0.0);
}

TEST(Knn, TooFewPoints) {
  EXPECT_THROW(knn_gaussian_kernel(nn::Tensor(8, 2), 8, 4), InputError);
}

TEST(EdgeListIo, ParsesCommentsAndWeights) {
  const auto p = parse_edge_list("# header\n0\t1\n1\t2\t0.5\n\n", "toy");
  EXPECT_EQ(p.n_nodes, 3u);
  ASSERT_EQ(p.edges.size(), 2u);
  EXPECT_EQ(p.edges[1], (Edge{1, 2, 0.5}));
}

TEST(EdgeListIo, ErrorNamesSourceAndLine) {
  try {
    parse_edge_list("0\t1\nx\t2\n", "toy.tsv");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("toy.tsv:2"), std::string::npos) << e.what();
  }
}

TEST(GraphCache, RoundTripIsBitExact) {
  Rng rng(12);
  const auto g = gcn_normalize(oracle::random_symmetric(30, 0.2, rng));
  EXPECT_EQ(decode_graph(encode_graph(g)), g);
  const auto path = std::filesystem::temp_directory_path() / "coin_graph_roundtrip.bin";
  save_graph(path, g);
  EXPECT_EQ(load_graph(path), g);
  std::filesystem::remove(path);
}

TEST(GraphCache, RejectsTruncatedAndForeignBlobs) {
  const auto blob = encode_graph(from_edge_list({{0, 1, 1.0}}, 2));
  EXPECT_THROW(decode_graph(blob.substr(0, blob.size() - 3)), InputError);
  EXPECT_THROW(decode_graph(std::string("NOTAGRPH") + blob.substr(8)), InputError);
}
