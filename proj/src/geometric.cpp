#include "semcx/geometric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "semcx/serialize.hpp"

namespace semcx {

namespace {

unsigned env_thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("SEMCX_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) {
            return static_cast<unsigned>(std::min<long>(v, hw));
        }
    }
    return hw;
}

std::vector<std::size_t> label_ids(std::span<const std::string> labels) {
    std::vector<std::size_t> ids(labels.size());
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ids[i] = index.emplace(labels[i], index.size()).first->second;
    }
    return ids;
}

double comb2(double n) {
    return n * (n - 1.0) / 2.0;
}

}  // namespace

DistanceMatrix distance_matrix(const EmbeddingMatrix& e) {
    if (e.rows < 2) {
        throw std::invalid_argument("distance_matrix requires at least 2 rows");
    }
    const std::size_t n = e.rows;
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (double x : e.row(i)) norm += x * x;
        if (norm == 0.0) {
            throw InputError("distance_matrix: zero encoding vector at row " + std::to_string(i));
        }
    }

    DistanceMatrix m;
    m.size = n;
    m.entries.assign(n * n, 0.0);

    // Upper-triangle rows are independent, so worker threads write disjoint
    // cells and every cell's arithmetic is identical at any thread count.
    auto fill_rows = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < n; i += stride) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dist = cosine_distance(e.row(i), e.row(j));
                m.entries[i * n + j] = dist;
                m.entries[j * n + i] = dist;
            }
        }
    };

    const unsigned workers = std::min<unsigned>(env_thread_cap(), static_cast<unsigned>(n));
    if (workers <= 1) {
        fill_rows(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back(fill_rows, t, workers);
        }
        for (auto& th : pool) th.join();
    }
    return m;
}

MstEdgeList minimum_spanning_tree(const DistanceMatrix& m) {
    const std::size_t n = m.size;
    if (n < 2) {
        throw std::invalid_argument("minimum_spanning_tree requires at least 2 vertices");
    }

    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(n, 0);

    in_tree[0] = true;
    for (std::size_t v = 1; v < n; ++v) {
        best[v] = m.at(0, v);
    }

    MstEdgeList tree;
    tree.edges.reserve(n - 1);
    for (std::size_t added = 1; added < n; ++added) {
        std::size_t next = n;
        double next_key = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v) {
            if (!in_tree[v] && best[v] < next_key) {  // strict: ties keep the smaller index
                next_key = best[v];
                next = v;
            }
        }
        in_tree[next] = true;
        MstEdge edge;
        edge.a = std::min(parent[next], next);
        edge.b = std::max(parent[next], next);
        edge.weight = next_key;
        tree.total_weight += next_key;
        tree.edges.push_back(edge);

        for (std::size_t v = 0; v < n; ++v) {
            if (!in_tree[v] && m.at(next, v) < best[v]) {  // strict: ties keep the earlier parent
                best[v] = m.at(next, v);
                parent[v] = next;
            }
        }
    }
    return tree;
}

MstComplexityResult mst_complexity(const DistanceMatrix& m, std::span<const std::string> labels) {
    if (labels.size() != m.size) {
        throw std::invalid_argument("mst_complexity: labels not aligned to matrix");
    }
    MstComplexityResult result;
    result.tree = minimum_spanning_tree(m);
    result.total_weight = result.tree.total_weight;
    for (const auto& edge : result.tree.edges) {
        if (labels[edge.a] != labels[edge.b]) {
            result.inter_class_weight += edge.weight;
        }
    }
    if (result.total_weight == 0.0) {
        // All encodings identical: no geometry to split. Constant labels make
        // this trivially easy (0), anything else trivially hard (1).
        result.degenerate = true;
        const bool constant =
            std::all_of(labels.begin(), labels.end(), [&](const auto& l) { return l == labels[0]; });
        result.value = constant ? 0.0 : 1.0;
    } else {
        result.value = result.inter_class_weight / result.total_weight;
    }
    return result;
}

MstComplexityResult mst_complexity(const EmbeddingMatrix& e, std::span<const std::string> labels) {
    return mst_complexity(distance_matrix(e), labels);
}

ClusterAssignment agglomerative_cluster(const DistanceMatrix& m, std::size_t k) {
    const std::size_t n = m.size;
    if (k < 1 || k > n) {
        throw std::invalid_argument("agglomerative_cluster requires 1 <= k <= N");
    }

    // Cluster slot = smallest member index; merges fold slot b into slot a
    // (a < b) with the complete-linkage update d(a,x) = max(d(a,x), d(b,x)).
    std::vector<double> dist(m.entries);
    std::vector<bool> active(n, true);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // nearest[i] caches the row minimum over active j > i. Complete-linkage
    // distances only grow under merges, so a cached entry stays valid until
    // its partner merges away.
    std::vector<double> nearest_dist(n, kInf);
    std::vector<std::size_t> nearest_idx(n, n);
    auto refresh = [&](std::size_t i) {
        nearest_dist[i] = kInf;
        nearest_idx[i] = n;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (active[j] && dist[i * n + j] < nearest_dist[i]) {
                nearest_dist[i] = dist[i * n + j];
                nearest_idx[i] = j;
            }
        }
    };
    for (std::size_t i = 0; i < n; ++i) refresh(i);

    std::vector<std::size_t> owner(n);
    for (std::size_t i = 0; i < n; ++i) owner[i] = i;

    for (std::size_t clusters = n; clusters > k; --clusters) {
        std::size_t a = n;
        double best = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            if (active[i] && nearest_idx[i] < n && nearest_dist[i] < best) {
                best = nearest_dist[i];
                a = i;
            }
        }
        const std::size_t b = nearest_idx[a];

        for (std::size_t x = 0; x < n; ++x) {
            if (!active[x] || x == a || x == b) continue;
            const double d = std::max(dist[a * n + x], dist[b * n + x]);
            dist[a * n + x] = d;
            dist[x * n + a] = d;
        }
        active[b] = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (owner[i] == b) owner[i] = a;
        }
        refresh(a);
        // Cached minima referencing a (distance grew) or b (gone) are stale;
        // nearest_idx[i] > i, so candidates live below b.
        for (std::size_t i = 0; i < b; ++i) {
            if (i != a && active[i] && (nearest_idx[i] == a || nearest_idx[i] == b)) {
                refresh(i);
            }
        }
    }

    ClusterAssignment out;
    out.labels.assign(n, 0);
    out.cluster_count = k;
    std::unordered_map<std::size_t, std::size_t> renumber;
    renumber.reserve(k);
    for (std::size_t i = 0; i < n; ++i) {
        out.labels[i] = renumber.emplace(owner[i], renumber.size()).first->second;
    }
    return out;
}

ClusterAssignment agglomerative_cluster(const EmbeddingMatrix& e, std::size_t k) {
    return agglomerative_cluster(distance_matrix(e), k);
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("adjusted_rand_index: labelings differ in length");
    }
    const std::size_t n = a.size();
    if (n < 2) {
        throw std::invalid_argument("adjusted_rand_index requires at least 2 items");
    }

    std::size_t ka = 0, kb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ka = std::max(ka, a[i] + 1);
        kb = std::max(kb, b[i] + 1);
    }
    std::vector<std::size_t> table(ka * kb, 0);
    std::vector<std::size_t> row_sum(ka, 0), col_sum(kb, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++table[a[i] * kb + b[i]];
        ++row_sum[a[i]];
        ++col_sum[b[i]];
    }

    double sum_cells = 0.0;
    for (auto c : table) sum_cells += comb2(static_cast<double>(c));
    double sum_rows = 0.0;
    for (auto c : row_sum) sum_rows += comb2(static_cast<double>(c));
    double sum_cols = 0.0;
    for (auto c : col_sum) sum_cols += comb2(static_cast<double>(c));

    const double pairs = comb2(static_cast<double>(n));
    const double expected = sum_rows * sum_cols / pairs;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) {
        return 1.0;  // both partitions trivial and identical
    }
    return (sum_cells - expected) / (max_index - expected);
}

double adjusted_rand_index(std::span<const std::string> a, std::span<const std::string> b) {
    const auto ia = label_ids(a);
    const auto ib = label_ids(b);
    return adjusted_rand_index(ia, ib);
}

AriComplexityResult ari_complexity(const DistanceMatrix& m, std::span<const std::string> labels) {
    if (labels.size() != m.size) {
        throw std::invalid_argument("ari_complexity: labels not aligned to matrix");
    }
    AriComplexityResult result;
    std::size_t distinct = 0;
    {
        std::unordered_map<std::string, std::size_t> index;
        for (const auto& l : labels) index.emplace(l, index.size());
        distinct = index.size();
    }
    if (distinct < 2) {
        // k = 1: the clustering is a single cluster and the chance-corrected
        // agreement with a constant labeling is 0 by construction.
        result.degenerate = true;
        result.ari = 0.0;
        result.value = 0.5;
        result.clusters.labels.assign(m.size, 0);
        result.clusters.cluster_count = 1;
        return result;
    }
    result.clusters = agglomerative_cluster(m, distinct);
    const auto semantic = label_ids(labels);
    result.ari = adjusted_rand_index(semantic, result.clusters.labels);
    result.value = (1.0 - result.ari) / 2.0;
    return result;
}

AriComplexityResult ari_complexity(const EmbeddingMatrix& e, std::span<const std::string> labels) {
    return ari_complexity(distance_matrix(e), labels);
}

GeometricMeasures geometric_measures(const EmbeddingMatrix& e, std::span<const std::string> labels) {
    const auto m = distance_matrix(e);
    GeometricMeasures g;
    g.encoder_tag = e.encoder_tag;
    const auto mst = mst_complexity(m, labels);
    g.mst_complexity = mst.value;
    g.mst_degenerate = mst.degenerate;
    const auto ari = ari_complexity(m, labels);
    g.ari = ari.ari;
    g.ari_complexity = ari.value;
    g.ari_degenerate = ari.degenerate;
    return g;
}

std::string mst_dump(const MstEdgeList& tree, std::span<const std::string> labels) {
    std::string out = "i,j,weight,inter_class\n";
    for (const auto& edge : tree.edges) {
        const bool inter = labels[edge.a] != labels[edge.b];
        out += std::to_string(edge.a) + "," + std::to_string(edge.b) + "," +
               format_full(edge.weight) + "," + (inter ? "1" : "0") + "\n";
    }
    return out;
}

std::string cluster_dump(const ClusterAssignment& clusters, std::span<const std::string> ids) {
    std::string out = "id,cluster\n";
    for (std::size_t i = 0; i < clusters.labels.size(); ++i) {
        out += ids[i] + "," + std::to_string(clusters.labels[i]) + "\n";
    }
    return out;
}

}  // namespace semcx
