#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "support.hpp"

using namespace ksom;

TEST(Agglomerate, TwoVectorsOneMerge) {
    const std::vector<double> flat{0.0, 0.0, 3.0, 4.0};
    const Dendrogram dg = agglomerate(flat, 2, 2);
    ASSERT_EQ(dg.merges.size(), 1u);
    EXPECT_DOUBLE_EQ(dg.merges[0].height, 5.0);
    EXPECT_EQ(dg.merges[0].size, 2u);
}

TEST(Agglomerate, ClosestPairFirst) {
    const std::vector<double> flat{0.0, 1.0, 3.0};
    const Dendrogram dg = agglomerate(flat, 3, 1);
    EXPECT_EQ(dg.merges[0].left, 0u);
    EXPECT_EQ(dg.merges[0].right, 1u);
}

TEST(Agglomerate, FewerThanTwoThrows) {
    const std::vector<double> flat{1.0};
    EXPECT_THROW(agglomerate(flat, 1, 1), ConfigError);
}

// Reference linkage matrix from scipy.cluster.hierarchy.linkage(X, "ward").
TEST(Agglomerate, MatchesFrozenScipyWard) {
    const std::vector<double> flat{0.0, 0.0, 1.0, 0.2, 4.0, 4.5, 0.3, 2.0, 5.0, 1.0, 4.2, 3.9, 2.5, 2.5};
    const std::vector<Merge> expected{
        {2, 5, 0.63245553203367599, 2}, {0, 1, 1.019803902718557, 2},  {3, 8, 2.2060522810365728, 3},
        {6, 7, 2.695675549220764, 3},   {4, 10, 3.6719658676699773, 4}, {9, 11, 7.6830363541406994, 7},
    };
    const Dendrogram dg = agglomerate(flat, 7, 2);
    ASSERT_EQ(dg.merges.size(), expected.size());
    for (std::size_t j = 0; j < expected.size(); ++j) {
        EXPECT_EQ(dg.merges[j].left, expected[j].left) << j;
        EXPECT_EQ(dg.merges[j].right, expected[j].right) << j;
        EXPECT_NEAR(dg.merges[j].height, expected[j].height, 1e-12) << j;
        EXPECT_EQ(dg.merges[j].size, expected[j].size) << j;
    }
}

TEST(Agglomerate, HeightsMonotoneAndDeterministic) {
    std::mt19937_64 g(14);
    for (int trial = 0; trial < 100; ++trial) {
        const Codebook cb = test::random_codebook(g, 3, 4, 3);
        const Dendrogram dg = agglomerate(cb);
        for (std::size_t j = 1; j < dg.merges.size(); ++j) EXPECT_GE(dg.merges[j].height, dg.merges[j - 1].height);
        const Dendrogram again = agglomerate(cb);
        for (std::size_t j = 0; j < dg.merges.size(); ++j) EXPECT_EQ(again.merges[j].height, dg.merges[j].height);
    }
}

TEST(Cut, TripletsRecovered) {
    // Three tight triplets, gaps far larger than the within-triplet spread.
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    const std::vector<std::size_t> planted{2, 0, 1, 1, 2, 0, 0, 1, 2};
    std::vector<double> flat;
    for (std::size_t u = 0; u < 9; ++u) {
        flat.push_back(10.0 * static_cast<double>(planted[u]) + jitter(g));
        flat.push_back(-10.0 * static_cast<double>(planted[u]) + jitter(g));
    }
    const SuperClassing sc = cut(agglomerate(flat, 9, 2), 3);
    EXPECT_EQ(sc.k, 3u);
    for (std::size_t a = 0; a < 9; ++a) {
        for (std::size_t b = 0; b < 9; ++b) {
            EXPECT_EQ(sc.assignment[a] == sc.assignment[b], planted[a] == planted[b]);
        }
    }
    EXPECT_EQ(adjusted_rand_index(sc, partition_from_labels(planted)), 1.0);
}

TEST(Cut, ExtremesAndRange) {
    std::mt19937_64 g(2);
    const Dendrogram dg = agglomerate(test::random_codebook(g, 2, 3, 2));
    EXPECT_EQ(cut(dg, 6).k, 6u);
    const SuperClassing one = cut(dg, 1);
    EXPECT_EQ(one.k, 1u);
    EXPECT_EQ(one.members[0].size(), 6u);
    EXPECT_THROW(cut(dg, 0), ConfigError);
    EXPECT_THROW(cut(dg, 7), ConfigError);
}

TEST(Cut, FinerCutsRefineCoarserOnes) {
    std::mt19937_64 g(3);
    for (int trial = 0; trial < 30; ++trial) {
        const Dendrogram dg = agglomerate(test::random_codebook(g, 3, 3, 4));
        for (std::size_t k = 2; k <= 9; ++k) {
            const SuperClassing fine = cut(dg, k), coarse = cut(dg, k - 1);
            EXPECT_EQ(fine.k, k);
            for (const auto& group : fine.members) {
                std::set<std::size_t> parents;
                for (std::size_t u : group) parents.insert(coarse.assignment[u]);
                EXPECT_EQ(parents.size(), 1u);
            }
        }
    }
}

TEST(Contiguity, Cases) {
    const GridTopology t(3, 3);
    EXPECT_EQ(superclass_contiguity(partition_from_labels(std::vector<std::size_t>(9, 0)), t), std::vector<bool>{true});
    // (1,1) and (2,2) touch diagonally; (1,1) and (3,3) do not.
    const std::vector<std::size_t> diag{0, 1, 1, 1, 0, 1, 1, 1, 2};
    EXPECT_TRUE(superclass_contiguity(partition_from_labels(diag), t)[0]);
    const std::vector<std::size_t> split{0, 1, 1, 1, 1, 1, 1, 1, 0};
    EXPECT_FALSE(superclass_contiguity(partition_from_labels(split), t)[0]);
}

TEST(SuperclassIo, DendrogramJsonRoundTrip) {
    std::mt19937_64 g(4);
    const Dendrogram dg = agglomerate(test::random_codebook(g, 3, 3, 2));
    const Dendrogram back = dendrogram_from_json(dendrogram_to_json(dg));
    ASSERT_EQ(back.merges.size(), dg.merges.size());
    for (std::size_t j = 0; j < dg.merges.size(); ++j) {
        EXPECT_EQ(back.merges[j].height, dg.merges[j].height);
        EXPECT_EQ(back.merges[j].left, dg.merges[j].left);
    }
    EXPECT_THROW(dendrogram_from_json("{\"leaves\": 3}"), DataError);
}

TEST(SuperclassIo, CsvRoundTrip) {
    const GridTopology t(2, 3);
    const SuperClassing sc = partition_from_labels(std::vector<std::size_t>{5, 5, 7, 9, 7, 5});
    std::stringstream io;
    write_superclass_csv(io, sc, t);
    const SuperClassing back = read_superclass_csv(io, t);
    EXPECT_EQ(back.assignment, sc.assignment);
    EXPECT_EQ(sc.assignment, (std::vector<std::size_t>{0, 0, 1, 2, 1, 0}));
}
