#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "semcx/encodings.hpp"

namespace semcx {

struct DistanceMatrix {
    std::size_t size = 0;
    std::vector<double> entries;  // N x N, symmetric, zero diagonal
    std::string metric_tag = "cosine";

    double at(std::size_t i, std::size_t j) const { return entries[i * size + j]; }
};

struct MstEdge {
    std::size_t a = 0;  // a < b
    std::size_t b = 0;
    double weight = 0.0;
};

struct MstEdgeList {
    std::vector<MstEdge> edges;  // N-1 edges in discovery order
    double total_weight = 0.0;
};

struct ClusterAssignment {
    std::vector<std::size_t> labels;  // cluster ids in [0, cluster_count)
    std::size_t cluster_count = 0;
};

struct MstComplexityResult {
    double value = 0.0;
    double inter_class_weight = 0.0;
    double total_weight = 0.0;
    bool degenerate = false;  // total weight 0 (all encodings identical)
    MstEdgeList tree;
};

struct AriComplexityResult {
    double ari = 0.0;
    double value = 0.0;       // (1 - ari) / 2
    bool degenerate = false;  // single distinct semantic label
    ClusterAssignment clusters;
};

/// Per-encoder geometric block of a report.
struct GeometricMeasures {
    std::string encoder_tag;
    double mst_complexity = 0.0;
    double ari = 0.0;
    double ari_complexity = 0.0;
    bool mst_degenerate = false;
    bool ari_degenerate = false;
};

/// Pairwise cosine distances. Rows may be filled concurrently (SEMCX_THREADS
/// caps the worker count); per-row arithmetic is identical regardless of the
/// thread count. Throws InputError naming the row on a zero vector.
DistanceMatrix distance_matrix(const EmbeddingMatrix& e);

/// Dense-graph MST grown from vertex 0 with an O(N^2) frontier scan.
/// Vertex selection ties go to the smallest index and parents are only
/// replaced on strictly smaller weights, so equidistant inputs yield the
/// star on vertex 0.
MstEdgeList minimum_spanning_tree(const DistanceMatrix& m);

/// Fraction of MST weight on edges joining differently labeled examples.
MstComplexityResult mst_complexity(const DistanceMatrix& m, std::span<const std::string> labels);
MstComplexityResult mst_complexity(const EmbeddingMatrix& e, std::span<const std::string> labels);

/// Bottom-up complete-linkage merging over cosine distances, stopping at k
/// clusters. The pair with the smallest linkage merges first; exact ties go
/// to the smallest (i, j) cluster-id pair. Cluster ids during merging are the
/// smallest member index; the returned assignment renumbers them to [0, k)
/// by first appearance.
ClusterAssignment agglomerative_cluster(const DistanceMatrix& m, std::size_t k);
ClusterAssignment agglomerative_cluster(const EmbeddingMatrix& e, std::size_t k);

/// Hubert-Arabie adjusted Rand index over two labelings of the same items.
/// 1 iff the labelings are identical up to relabeling. Requires N >= 2.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);
double adjusted_rand_index(std::span<const std::string> a, std::span<const std::string> b);

/// Clusters with k = number of distinct semantic labels, then scores
/// (1 - ARI(labels, clusters)) / 2. A single distinct label is degenerate:
/// the score is pinned at 0.5 and flagged.
AriComplexityResult ari_complexity(const DistanceMatrix& m, std::span<const std::string> labels);
AriComplexityResult ari_complexity(const EmbeddingMatrix& e, std::span<const std::string> labels);

/// Computes the distance matrix once and derives both complexity scores.
GeometricMeasures geometric_measures(const EmbeddingMatrix& e, std::span<const std::string> labels);

/// Debug dumps: `i,j,weight,inter_class_flag` edges and `id,cluster` rows.
std::string mst_dump(const MstEdgeList& tree, std::span<const std::string> labels);
std::string cluster_dump(const ClusterAssignment& clusters, std::span<const std::string> ids);

}  // namespace semcx
