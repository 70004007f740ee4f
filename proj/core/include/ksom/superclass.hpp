#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ksom/som.hpp"

namespace ksom {

/// One agglomeration step. Node ids follow the usual convention: leaves are
/// 0..n-1 and the cluster created by merge j gets id n + j.
struct Merge {
    std::size_t left = 0;   // smaller node id
    std::size_t right = 0;  // larger node id
    double height = 0.0;
    std::size_t size = 0;   // leaves under the new node
};

struct Dendrogram {
    std::size_t leaves = 0;
    std::vector<Merge> merges;  // leaves - 1 entries, in merge order
};

/// Ward-linkage agglomerative clustering of the code-vectors.
///
/// Heights use the Lance-Williams recurrence on Euclidean distances, so two
/// singletons merge at their Euclidean distance and a merge of clusters A, B
/// sits at sqrt(2 |A||B| / (|A|+|B|)) * |mean_A - mean_B|. Ties go to the
/// lexicographically smallest (left, right) node pair.
Dendrogram agglomerate(const Codebook& cb);
Dendrogram agglomerate(std::span<const double> flat, std::size_t count, std::size_t dim);

/// Partition of the map units into super-classes.
struct SuperClassing {
    std::size_t k = 0;
    /// Super-class id per unit; ids are numbered by each group's smallest unit.
    std::vector<std::size_t> assignment;
    std::vector<std::vector<std::size_t>> members;
};

/// Partition left after undoing the last k-1 merges; 1 <= k <= leaves.
SuperClassing cut(const Dendrogram& dg, std::size_t k);

/// Builds a SuperClassing from any labelling (labels need not be contiguous).
SuperClassing partition_from_labels(std::span<const std::size_t> labels);

/// 8-connectivity flag per super-class on the map grid.
std::vector<bool> superclass_contiguity(const SuperClassing& sc, const GridTopology& topo);

std::string dendrogram_to_json(const Dendrogram& dg);
Dendrogram dendrogram_from_json(const std::string& text);

/// Columns: unit_row,unit_col,superclass_id (0-based grid coordinates).
void write_superclass_csv(std::ostream& out, const SuperClassing& sc, const GridTopology& topo);
SuperClassing read_superclass_csv(std::istream& in, const GridTopology& topo);

}  // namespace ksom
