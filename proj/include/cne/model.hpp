#pragma once

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cne/graph.hpp"
#include "cne/prior.hpp"

namespace cne {

// n x d coordinates plus the spread parameters that interpret them.
struct Embedding {
    int n = 0;
    int d = 0;
    std::vector<double> coords;  // row-major, row i = x_i
    double sigma1 = 1.0;
    double sigma2 = 2.0;

    Embedding() = default;
    Embedding(int n_, int d_, double s1 = 1.0, double s2 = 2.0)
        : n(n_), d(d_), coords(std::size_t(n_) * d_, 0.0), sigma1(s1), sigma2(s2) {
        if (d < 1) throw std::invalid_argument("dimension must be >= 1");
        if (!(s2 > s1 && s1 > 0)) throw std::invalid_argument("need sigma2 > sigma1 > 0");
    }

    double* row(int i) { return coords.data() + std::size_t(i) * d; }
    const double* row(int i) const { return coords.data() + std::size_t(i) * d; }

    double squared_distance(int i, int j) const {
        const double* a = row(i);
        const double* b = row(j);
        double s = 0.0;
        for (int t = 0; t < d; ++t) {
            double diff = a[t] - b[t];
            s += diff * diff;
        }
        return s;
    }
    double distance(int i, int j) const { return std::sqrt(squared_distance(i, j)); }
};

struct TrainConfig {
    int dim = 8;
    double sigma2 = 2.0;
    int k = 50;
    double learning_rate = 0.05;
    int epochs = 250;
    std::uint64_t seed = 0;
    double init_scale = 1.0;

    void validate() const {
        if (dim < 1) throw std::invalid_argument("dim must be >= 1");
        if (sigma2 <= 1.0) throw std::invalid_argument("sigma2 must exceed sigma1 = 1");
        if (k < 1) throw std::invalid_argument("k must be >= 1");
        if (learning_rate <= 0) throw std::invalid_argument("learning rate must be positive");
        if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
        if (init_scale <= 0) throw std::invalid_argument("init scale must be positive");
    }
};

inline double half_normal_logpdf(double dist, double sigma) {
    if (dist < 0) throw std::invalid_argument("half-normal support is [0,inf)");
    if (sigma <= 0) throw std::invalid_argument("sigma must be positive");
    return 0.5 * std::log(2.0 / (std::numbers::pi * sigma * sigma)) -
           dist * dist / (2.0 * sigma * sigma);
}

// Log-odds of a link given prior log-odds and embedding distance:
// prior + ln(s2/s1) + (d^2/2)(1/s2^2 - 1/s1^2). All posterior arithmetic
// stays in log-odds space.
inline double posterior_log_odds(double prior_log_odds, double sq_dist, double sigma1,
                                 double sigma2) {
    if (!(sigma2 > sigma1 && sigma1 > 0))
        throw std::invalid_argument("need sigma2 > sigma1 > 0");
    return prior_log_odds + std::log(sigma2 / sigma1) +
           0.5 * sq_dist * (1.0 / (sigma2 * sigma2) - 1.0 / (sigma1 * sigma1));
}

inline double posterior_link_prob(double prior_log_odds, double dist, double sigma1,
                                  double sigma2) {
    if (dist < 0) throw std::invalid_argument("distance must be nonnegative");
    return sigmoid(posterior_log_odds(prior_log_odds, dist * dist, sigma1, sigma2));
}

namespace detail {
// log(sigmoid(z)), stable for large |z|
inline double log_sigmoid(double z) {
    return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}
}  // namespace detail

// Full log posterior of the graph given the embedding, over all C(n,2) pairs.
inline double log_likelihood(const Embedding& emb, const Graph& g, const PriorModel& prior) {
    if (emb.n != g.node_count())
        throw std::invalid_argument("embedding/graph size mismatch");
    double ll = 0.0;
    for (int i = 0; i < emb.n; ++i)
        for (int j = i + 1; j < emb.n; ++j) {
            double z = posterior_log_odds(prior.log_odds(i, j), emb.squared_distance(i, j),
                                          emb.sigma1, emb.sigma2);
            ll += g.has_edge(i, j) ? detail::log_sigmoid(z) : detail::log_sigmoid(-z);
        }
    return ll;
}

// Log-likelihood restricted to a fixed pair subset, for progress reporting
// on graphs too large for the exact sum.
inline double log_likelihood_on_pairs(const Embedding& emb, const Graph& g,
                                      const PriorModel& prior,
                                      const std::vector<NodePair>& pairs) {
    double ll = 0.0;
    for (const auto& p : pairs) {
        double z = posterior_log_odds(prior.log_odds(p.i, p.j), emb.squared_distance(p.i, p.j),
                                      emb.sigma1, emb.sigma2);
        ll += g.has_edge(p.i, p.j) ? detail::log_sigmoid(z) : detail::log_sigmoid(-z);
    }
    return ll;
}

// Exact gradient of the log-likelihood w.r.t. row i. Connected partners pull,
// unconnected partners push, each weighted by the current misprediction.
inline std::vector<double> grad_node_exact(const Embedding& emb, const Graph& g,
                                           const PriorModel& prior, int i) {
    if (emb.n != g.node_count())
        throw std::invalid_argument("embedding/graph size mismatch");
    const double inv1 = 1.0 / (emb.sigma1 * emb.sigma1);
    const double inv2 = 1.0 / (emb.sigma2 * emb.sigma2);
    std::vector<double> grad(emb.d, 0.0);
    const double* xi = emb.row(i);
    for (int j = 0; j < emb.n; ++j) {
        if (j == i) continue;
        double p = sigmoid(posterior_log_odds(prior.log_odds(i, j), emb.squared_distance(i, j),
                                              emb.sigma1, emb.sigma2));
        const double* xj = emb.row(j);
        double w = g.has_edge(i, j) ? (1.0 - p) * (inv2 - inv1) : p * (inv1 - inv2);
        for (int t = 0; t < emb.d; ++t) grad[t] += w * (xi[t] - xj[t]);
    }
    return grad;
}

namespace detail {

// Samples `count` distinct values from [0, population) without replacement.
inline std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count,
                                               std::mt19937_64& rng) {
    std::vector<std::size_t> out;
    out.reserve(count);
    if (count * 2 >= population) {
        std::vector<std::size_t> pool(population);
        for (std::size_t t = 0; t < population; ++t) pool[t] = t;
        for (std::size_t t = 0; t < count; ++t) {
            std::uniform_int_distribution<std::size_t> pick(t, population - 1);
            std::swap(pool[t], pool[pick(rng)]);
            out.push_back(pool[t]);
        }
    } else {
        std::unordered_set<std::size_t> taken;
        std::uniform_int_distribution<std::size_t> pick(0, population - 1);
        while (out.size() < count) {
            std::size_t v = pick(rng);
            if (taken.insert(v).second) out.push_back(v);
        }
    }
    return out;
}

// Maps rank r among the non-neighbors of i (excluding i itself) to a node id,
// given i's sorted neighbor list.
inline int rth_non_neighbor(int i, const std::vector<int>& nbrs, std::size_t r) {
    std::size_t skipped = 0;  // neighbors and self already passed
    std::size_t ni = 0;
    for (int v = 0;; ++v) {
        while (ni < nbrs.size() && nbrs[ni] < v) ++ni;
        bool excluded = (v == i) || (ni < nbrs.size() && nbrs[ni] == v);
        if (excluded) {
            ++skipped;
            continue;
        }
        if (std::size_t(v) - skipped == r) return v;
    }
}

}  // namespace detail

// Stratified k-sample estimate of grad_node_exact: min(k, deg) connected and
// 2k - that many unconnected partners (mirrored when non-neighbors run short),
// each stratum scaled by population/sample so the estimator is unbiased.
inline std::vector<double> grad_node_sampled(const Embedding& emb, const Graph& g,
                                             const PriorModel& prior, int i, int k,
                                             std::mt19937_64& rng) {
    if (emb.n != g.node_count())
        throw std::invalid_argument("embedding/graph size mismatch");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    const int n = emb.n;
    const auto& nbrs = g.neighbors(i);
    const std::size_t n_con = nbrs.size();
    const std::size_t n_unc = std::size_t(n) - 1 - n_con;

    std::size_t want_con = std::min<std::size_t>(k, n_con);
    std::size_t want_unc = std::min<std::size_t>(2 * std::size_t(k) - want_con, n_unc);
    want_con = std::min(2 * std::size_t(k) - want_unc, n_con);

    const double inv1 = 1.0 / (emb.sigma1 * emb.sigma1);
    const double inv2 = 1.0 / (emb.sigma2 * emb.sigma2);
    std::vector<double> grad(emb.d, 0.0);
    const double* xi = emb.row(i);

    auto accumulate = [&](int j, double scale, bool connected) {
        double p = sigmoid(posterior_log_odds(prior.log_odds(i, j), emb.squared_distance(i, j),
                                              emb.sigma1, emb.sigma2));
        double w = connected ? (1.0 - p) * (inv2 - inv1) : p * (inv1 - inv2);
        w *= scale;
        const double* xj = emb.row(j);
        for (int t = 0; t < emb.d; ++t) grad[t] += w * (xi[t] - xj[t]);
    };

    if (want_con > 0) {
        double scale = double(n_con) / double(want_con);
        for (std::size_t r : detail::sample_indices(n_con, want_con, rng))
            accumulate(nbrs[r], scale, true);
    }
    if (want_unc > 0) {
        double scale = double(n_unc) / double(want_unc);
        for (std::size_t r : detail::sample_indices(n_unc, want_unc, rng))
            accumulate(detail::rth_non_neighbor(i, nbrs, r), scale, false);
    }
    return grad;
}

struct FitResult {
    Embedding embedding;
    std::vector<double> loglik_per_epoch;
    bool loglik_sampled = false;  // true when reported on a fixed pair sample
};

// Block stochastic gradient ascent: seeded normal init, per-epoch node
// permutation, each row updated in place with the k-sampled gradient.
inline FitResult fit_embedding(const Graph& g, const PriorModel& prior, const TrainConfig& cfg) {
    cfg.validate();
    const int n = g.node_count();
    if (n == 0) throw std::invalid_argument("cannot embed an empty graph");

    std::mt19937_64 rng(cfg.seed);
    FitResult res;
    res.embedding = Embedding(n, cfg.dim, 1.0, cfg.sigma2);
    Embedding& emb = res.embedding;
    std::normal_distribution<double> init(0.0, cfg.init_scale);
    for (auto& c : emb.coords) c = init(rng);

    // Large graphs get a fixed sampled pair set for the per-epoch trace.
    std::vector<NodePair> trace_pairs;
    if (n > 2000) {
        res.loglik_sampled = true;
        std::mt19937_64 trace_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_int_distribution<int> pick(0, n - 1);
        while (trace_pairs.size() < 100000) {
            int a = pick(trace_rng), b = pick(trace_rng);
            if (a != b) trace_pairs.emplace_back(a, b);
        }
    }
    auto trace_ll = [&]() {
        return res.loglik_sampled ? log_likelihood_on_pairs(emb, g, prior, trace_pairs)
                                  : log_likelihood(emb, g, prior);
    };

    std::vector<int> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;

    res.loglik_per_epoch.reserve(cfg.epochs);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (int i : order) {
            auto grad = grad_node_sampled(emb, g, prior, i, cfg.k, rng);
            double* xi = emb.row(i);
            for (int t = 0; t < cfg.dim; ++t) {
                xi[t] += cfg.learning_rate * grad[t];
                if (!std::isfinite(xi[t]))
                    throw std::runtime_error("non-finite coordinate at epoch " +
                                             std::to_string(epoch) + ", node " +
                                             std::to_string(i));
            }
        }
        res.loglik_per_epoch.push_back(trace_ll());
    }
    return res;
}

// "node dim0 .. dim{d-1}" header, then token + coordinates at 17 significant
// digits so files round-trip losslessly.
inline void save_embedding(const Embedding& emb, const std::vector<std::string>& tokens,
                           std::ostream& out) {
    if (static_cast<int>(tokens.size()) != emb.n)
        throw std::invalid_argument("token count does not match embedding");
    out << "node";
    for (int t = 0; t < emb.d; ++t) out << " dim" << t;
    out << '\n';
    out.precision(17);
    for (int i = 0; i < emb.n; ++i) {
        out << tokens[i];
        for (int t = 0; t < emb.d; ++t) out << ' ' << emb.row(i)[t];
        out << '\n';
    }
}

inline Embedding load_embedding(std::istream& in, std::vector<std::string>* tokens_out = nullptr,
                                double sigma1 = 1.0, double sigma2 = 2.0) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty embedding file");
    std::istringstream hs(header);
    std::string word;
    int d = -1;
    hs >> word;
    if (word != "node") throw std::runtime_error("embedding file missing 'node' header");
    while (hs >> word) ++d;
    ++d;
    if (d < 1) throw std::runtime_error("embedding file header names no dimensions");

    std::vector<std::string> tokens;
    std::vector<double> coords;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        tokens.push_back(tok);
        for (int t = 0; t < d; ++t) {
            double v;
            if (!(ls >> v))
                throw std::runtime_error("embedding row for '" + tok + "' has fewer than " +
                                         std::to_string(d) + " coordinates");
            coords.push_back(v);
        }
    }
    Embedding emb(static_cast<int>(tokens.size()), d, sigma1, sigma2);
    emb.coords = std::move(coords);
    if (tokens_out) *tokens_out = std::move(tokens);
    return emb;
}

}  // namespace cne
