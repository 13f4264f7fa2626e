#include "fastmapd/embedder.hpp"

#include <limits>
#include <stdexcept>

#include "fastmapd/errors.hpp"
#include "fastmapd/shortest_paths.hpp"

namespace fmd {

void EmbedConfig::validate() const
{
    if (k_max < 2)
        throw std::invalid_argument("k_max must be at least 2");
    if (!(epsilon >= 0.0))
        throw std::invalid_argument("epsilon must be non-negative");
    if (pivot_iters < 1)
        throw std::invalid_argument("pivot_iters must be positive");
}

AverageDistances::AverageDistances(const DirectedGraph& g) : g_(g), reversed_(reverse_graph(g)) {}

const Eigen::VectorXd& AverageDistances::from(VertexId root)
{
    ++clock_;
    for (auto& slot : cache_)
        if (slot.stamp != 0 && slot.root == root) {
            slot.stamp = clock_;
            return slot.dist;
        }
    Slot* victim = &cache_[0];
    for (auto& slot : cache_)
        if (slot.stamp < victim->stamp)
            victim = &slot;
    victim->dist = average_distance(g_, reversed_, root);
    victim->root = root;
    victim->stamp = clock_;
    ++calls_;
    return victim->dist;
}

Embedding start_embedding(std::size_t vertex_count, const EmbedConfig& cfg)
{
    Embedding emb;
    emb.config = cfg;
    emb.coords = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vertex_count), cfg.k_max);
    return emb;
}

namespace {

struct Farthest {
    VertexId vertex;
    double residual;
};

/// argmax over v != from of the residual to `from`; lowest id wins ties.
Farthest farthest_from(const Eigen::VectorXd& avg, const Embedding& emb, VertexId from, bool clamp)
{
    Farthest best{from, -std::numeric_limits<double>::infinity()};
    const auto p_from = emb.coords.row(from);
    for (Eigen::Index v = 0; v < emb.coords.rows(); ++v) {
        if (v == from)
            continue;
        const double r = residual_sq(avg[v], emb.coords.row(v), p_from, emb.k, clamp);
        if (r > best.residual) {
            best = {static_cast<VertexId>(v), r};
        }
    }
    return best;
}

std::pair<VertexId, VertexId> random_distinct_pair(std::size_t n, std::mt19937_64& rng)
{
    std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
    const VertexId a = pick(rng);
    VertexId b = pick(rng);
    while (b == a)
        b = pick(rng);
    return {a, b};
}

} // namespace

PivotPair choose_farthest_pair(AverageDistances& distances, Embedding& emb, const EmbedConfig& cfg,
                               std::mt19937_64& rng)
{
    const std::size_t n = static_cast<std::size_t>(emb.coords.rows());
    if (n < 2)
        throw std::invalid_argument("choosing a pivot pair needs at least two vertices");

    std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
    VertexId a = pick(rng);
    VertexId b = a;
    // Residual of the current (a, b); unknown until the first round.
    double pair_residual = -std::numeric_limits<double>::infinity();

    PivotPair best_seen{a, a};
    double best_residual = -std::numeric_limits<double>::infinity();
    std::size_t reassign_budget = n;

    for (int round = 0; round < cfg.pivot_iters; ++round) {
        const Eigen::VectorXd& avg = distances.from(a);
        const Farthest c = farthest_from(avg, emb, a, cfg.enhancements);
        if (c.residual > best_residual) {
            best_residual = c.residual;
            best_seen = {a, c.vertex};
        }
        if (c.vertex == b) {
            pair_residual = c.residual;
            if (cfg.enhancements && pair_residual < cfg.epsilon && reassign_budget > 0) {
                --reassign_budget;
                ++emb.stats.reassignments;
                std::tie(a, b) = random_distinct_pair(n, rng);
                pair_residual = -std::numeric_limits<double>::infinity();
                continue;
            }
            break;
        }
        b = a;
        a = c.vertex;
        pair_residual = c.residual;
    }

    emb.stats.average_distance_calls = distances.calls();
    if (a == b || (cfg.enhancements && pair_residual < cfg.epsilon))
        return best_seen;
    return {a, b};
}

bool compute_coordinate_column(AverageDistances& distances, Embedding& emb, PivotPair pivots, const EmbedConfig& cfg)
{
    const Eigen::Index col = emb.k;
    if (col + 1 >= emb.coords.cols())
        throw std::logic_error("embedding has no room for another column");

    // Copies: the cache may evict one vector while fetching the other.
    const Eigen::VectorXd d_a = distances.from(pivots.a);
    const Eigen::VectorXd d_b = distances.from(pivots.b);
    emb.stats.average_distance_calls = distances.calls();

    const bool clamp = cfg.enhancements;
    const auto p_a = emb.coords.row(pivots.a);
    const auto p_b = emb.coords.row(pivots.b);
    const double raw_ab = residual_sq(d_a[pivots.b], p_b, p_a, col, false);
    double d_ab = clamp && raw_ab < 0.0 ? 0.0 : raw_ab;
    if (d_ab < cfg.epsilon) {
        if (!cfg.enhancements)
            return false;
        d_ab = 1.0;
        ++emb.stats.fallbacks;
    }

    const double scale = 2.0 * std::sqrt(d_ab);
    Eigen::VectorXd column(emb.coords.rows());
    for (Eigen::Index i = 0; i < emb.coords.rows(); ++i) {
        const auto p_i = emb.coords.row(i);
        const double raw_ai = residual_sq(d_a[i], p_i, p_a, col, false);
        const double raw_ib = residual_sq(d_b[i], p_b, p_i, col, false);
        double d_ai = raw_ai;
        double d_ib = raw_ib;
        if (clamp) {
            if (raw_ai < 0.0) {
                d_ai = 0.0;
                ++emb.stats.clamped_residuals;
            }
            if (raw_ib < 0.0) {
                d_ib = 0.0;
                ++emb.stats.clamped_residuals;
            }
        }
        column[i] = (d_ai + d_ab - d_ib) / scale;
    }
    // The projection formula reduces to these values at the pivots; pin them so
    // rounding (or the d'_ab = 1 fallback) cannot move them.
    column[pivots.a] = 0.0;
    column[pivots.b] = std::sqrt(d_ab);

    emb.coords.col(col) = column;
    emb.pivots.push_back(pivots);
    ++emb.k;
    return true;
}

Embedding embed_average_distances(const DirectedGraph& g, const EmbedConfig& cfg)
{
    cfg.validate();
    if (g.vertex_count() < 2)
        throw std::invalid_argument("embedding needs at least two vertices");
    if (const auto v = first_disconnected_vertex(g); v != g.vertex_count())
        throw ConnectivityError("graph not strongly connected: vertex " + std::to_string(v)
                                    + " is not mutually reachable with vertex 0",
                                v);

    AverageDistances distances(g);
    std::mt19937_64 rng(cfg.seed);
    Embedding emb = start_embedding(g.vertex_count(), cfg);
    for (int iteration = 1; iteration <= cfg.k_max - 1; ++iteration) {
        const PivotPair pair = choose_farthest_pair(distances, emb, cfg, rng);
        if (!compute_coordinate_column(distances, emb, pair, cfg))
            break;
    }
    emb.coords.conservativeResize(Eigen::NoChange, emb.k + 1);
    emb.coords.col(emb.k).setZero();
    emb.stats.average_distance_calls = distances.calls();
    return emb;
}

} // namespace fmd
