#pragma once

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cne/graph.hpp"

namespace cne {

enum class ConstraintKind { Uniform, Degree, Block, BlockDegree };

inline const char* constraint_name(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::Uniform: return "uniform";
        case ConstraintKind::Degree: return "degree";
        case ConstraintKind::Block: return "block";
        case ConstraintKind::BlockDegree: return "block_degree";
    }
    throw std::logic_error("bad constraint kind");
}

inline ConstraintKind constraint_from_name(const std::string& s) {
    if (s == "uniform") return ConstraintKind::Uniform;
    if (s == "degree") return ConstraintKind::Degree;
    if (s == "block") return ConstraintKind::Block;
    if (s == "block_degree") return ConstraintKind::BlockDegree;
    throw std::invalid_argument("unknown prior kind '" + s +
                                "' (expected uniform|degree|block|block_degree)");
}

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

// Fitted MaxEnt edge-probability model. P_ij is the sigmoid of the sum of
// the Lagrange multipliers whose constraint subset covers pair {i,j}.
class PriorModel {
public:
    ConstraintKind kind = ConstraintKind::Uniform;
    double lambda_global = 0.0;              // uniform
    std::vector<double> node_lambda;         // degree, block_degree
    std::vector<double> block_gamma;         // block, block_degree (upper-triangle flat)
    std::vector<int> blocks;                 // node -> block, block kinds only
    int num_blocks = 0;
    double eps = 1e-9;
    bool degenerate = false;  // some constraint was empty or saturated

    int node_count() const {
        if (!node_lambda.empty()) return static_cast<int>(node_lambda.size());
        return n_;
    }
    void set_node_count(int n) { n_ = n; }

    double raw_log_odds(int i, int j) const {
        if (i == j) throw std::invalid_argument("P_ii is undefined");
        double theta = 0.0;
        switch (kind) {
            case ConstraintKind::Uniform: theta = lambda_global; break;
            case ConstraintKind::Degree: theta = node_lambda[i] + node_lambda[j]; break;
            case ConstraintKind::Block: theta = gamma(blocks[i], blocks[j]); break;
            case ConstraintKind::BlockDegree:
                theta = node_lambda[i] + node_lambda[j] + gamma(blocks[i], blocks[j]);
                break;
        }
        return theta;
    }

    // Clamped so link_probability stays in [eps, 1-eps] and
    // log_odds == logit(link_probability) exactly.
    double log_odds(int i, int j) const {
        double hi = logit(1.0 - eps);
        return std::clamp(raw_log_odds(i, j), -hi, hi);
    }

    double link_probability(int i, int j) const { return sigmoid(log_odds(i, j)); }

    double& gamma(int a, int b) {
        return block_gamma[tri_index(std::min(a, b), std::max(a, b))];
    }
    double gamma(int a, int b) const {
        return block_gamma[tri_index(std::min(a, b), std::max(a, b))];
    }

private:
    // index of unordered pair (a<=b) in the flattened upper triangle
    std::size_t tri_index(int a, int b) const {
        return std::size_t(a) * num_blocks - std::size_t(a) * (a - 1) / 2 + (b - a);
    }
    int n_ = 0;
};

namespace detail {

constexpr double kMultiplierCap = 40.0;

// Solves sum_j sigmoid(t + offsets[j]) = target for t, monotone in t.
// Safeguarded Newton within [-cap, cap]; returns the clamped endpoint for
// degenerate targets (0 or the full population).
inline double solve_coordinate(const std::vector<double>& offsets, double target, double t0,
                               double tol, bool* hit_cap) {
    const double cap = kMultiplierCap;
    double lo = -cap, hi = cap;
    double t = std::clamp(t0, lo, hi);
    for (int iter = 0; iter < 100; ++iter) {
        double f = 0.0, fp = 0.0;
        for (double c : offsets) {
            double s = sigmoid(t + c);
            f += s;
            fp += s * (1.0 - s);
        }
        double r = f - target;
        if (std::abs(r) <= tol * 0.1) {
            if (hit_cap) *hit_cap = false;
            return t;
        }
        if (r > 0)
            hi = t;
        else
            lo = t;
        double step = (fp > 1e-300) ? r / fp : 0.0;
        double next = t - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
        if (hi - lo < 1e-14) break;
    }
    if (hit_cap) *hit_cap = (std::abs(t) >= cap - 1e-9);
    return t;
}

}  // namespace detail

// Fits the MaxEnt prior by cyclic coordinate ascent on the dual: each
// multiplier update solves its 1-D moment equation by safeguarded Newton,
// cycling until every constraint residual is within tol.
inline PriorModel fit_prior(const Graph& g, ConstraintKind kind, double tol = 1e-6,
                            int max_iter = 1000) {
    if (tol <= 0) throw std::invalid_argument("tol must be positive");
    const int n = g.node_count();
    const bool needs_blocks = (kind == ConstraintKind::Block || kind == ConstraintKind::BlockDegree);
    if (needs_blocks && !g.has_blocks())
        throw std::invalid_argument("block prior requires a block assignment");
    const bool has_degree =
        (kind == ConstraintKind::Degree || kind == ConstraintKind::BlockDegree);
    if (has_degree && n == 0) throw std::invalid_argument("degree prior on empty graph");

    PriorModel m;
    m.kind = kind;
    m.set_node_count(n);
    if (needs_blocks) {
        m.blocks = g.blocks();
        m.num_blocks = g.block_count();
        m.block_gamma.assign(std::size_t(m.num_blocks) * (m.num_blocks + 1) / 2, 0.0);
    }

    if (kind == ConstraintKind::Uniform) {
        const double total = double(n) * (n - 1) / 2.0;
        if (total == 0) {
            m.lambda_global = 0.0;
            return m;
        }
        double observed = double(g.edge_count());
        if (observed <= 0.0) {
            m.lambda_global = -detail::kMultiplierCap;
            m.degenerate = true;
        } else if (observed >= total) {
            m.lambda_global = detail::kMultiplierCap;
            m.degenerate = true;
        } else {
            m.lambda_global = logit(observed / total);
        }
        return m;
    }

    if (has_degree) m.node_lambda.assign(n, logit(std::max(1e-6, std::min(1.0 - 1e-6, double(g.edge_count()) * 2.0 / std::max(1.0, double(n) * (n - 1))))) / 2.0);

    // Per-block-pair population sizes and observed edge sums.
    std::vector<std::size_t> pair_count;
    std::vector<std::size_t> edge_sum;
    std::vector<std::size_t> block_size;
    auto tri = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        return std::size_t(a) * m.num_blocks - std::size_t(a) * (a - 1) / 2 + (b - a);
    };
    if (needs_blocks) {
        const int B = m.num_blocks;
        block_size.assign(B, 0);
        for (int v = 0; v < n; ++v) ++block_size[m.blocks[v]];
        pair_count.assign(m.block_gamma.size(), 0);
        edge_sum.assign(m.block_gamma.size(), 0);
        for (int a = 0; a < B; ++a)
            for (int b = a; b < B; ++b)
                pair_count[tri(a, b)] = (a == b) ? block_size[a] * (block_size[a] - 1) / 2
                                                 : block_size[a] * block_size[b];
        for (const auto& e : g.edges()) ++edge_sum[tri(m.blocks[e.i], m.blocks[e.j])];
    }

    // Pure block prior has a closed-form dual optimum per block pair.
    if (kind == ConstraintKind::Block) {
        for (int a = 0; a < m.num_blocks; ++a)
            for (int b = a; b < m.num_blocks; ++b) {
                std::size_t idx = tri(a, b);
                if (pair_count[idx] == 0) continue;
                double frac = double(edge_sum[idx]) / double(pair_count[idx]);
                if (edge_sum[idx] == 0) {
                    m.block_gamma[idx] = -detail::kMultiplierCap;
                    m.degenerate = true;
                } else if (edge_sum[idx] == pair_count[idx]) {
                    m.block_gamma[idx] = detail::kMultiplierCap;
                    m.degenerate = true;
                } else {
                    m.block_gamma[idx] = logit(frac);
                }
            }
        return m;
    }

    // Degree and block+degree: cyclic coordinate ascent.
    std::vector<double> offsets;
    offsets.reserve(n);
    std::vector<char> node_degenerate(n, 0);
    double worst = std::numeric_limits<double>::infinity();
    for (int cycle = 0; cycle < max_iter; ++cycle) {
        // node multipliers
        for (int i = 0; i < n; ++i) {
            offsets.clear();
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                double c = m.node_lambda[j];
                if (kind == ConstraintKind::BlockDegree) c += m.gamma(m.blocks[i], m.blocks[j]);
                offsets.push_back(c);
            }
            double target = double(g.degree(i));
            m.node_lambda[i] =
                detail::solve_coordinate(offsets, target, m.node_lambda[i], tol, nullptr);
            node_degenerate[i] = (g.degree(i) == 0 || g.degree(i) == n - 1);
            if (node_degenerate[i]) {
                m.degenerate = true;
                // drive the incident probabilities to the clamp floor/ceiling
                m.node_lambda[i] = g.degree(i) == 0 ? -detail::kMultiplierCap
                                                    : detail::kMultiplierCap;
            }
        }
        // block multipliers
        if (kind == ConstraintKind::BlockDegree) {
            for (int a = 0; a < m.num_blocks; ++a)
                for (int b = a; b < m.num_blocks; ++b) {
                    std::size_t idx = tri(a, b);
                    if (pair_count[idx] == 0) continue;
                    offsets.clear();
                    for (int i = 0; i < n; ++i) {
                        if (m.blocks[i] != a) continue;
                        for (int j = (a == b ? i + 1 : 0); j < n; ++j) {
                            if (m.blocks[j] != b || j == i) continue;
                            offsets.push_back(m.node_lambda[i] + m.node_lambda[j]);
                        }
                    }
                    m.block_gamma[idx] = detail::solve_coordinate(
                        offsets, double(edge_sum[idx]), m.block_gamma[idx], tol, nullptr);
                    if (edge_sum[idx] == 0 || edge_sum[idx] == pair_count[idx])
                        m.degenerate = true;
                }
        }

        // residuals over all constraints (degenerate ones excluded)
        worst = 0.0;
        for (int i = 0; i < n; ++i) {
            if (node_degenerate[i]) continue;
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                s += sigmoid(m.raw_log_odds(i, j));
            }
            worst = std::max(worst, std::abs(s - double(g.degree(i))));
        }
        if (kind == ConstraintKind::BlockDegree) {
            std::vector<double> sums(m.block_gamma.size(), 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    sums[tri(m.blocks[i], m.blocks[j])] += sigmoid(m.raw_log_odds(i, j));
            for (std::size_t idx = 0; idx < sums.size(); ++idx) {
                if (pair_count[idx] == 0) continue;
                if (edge_sum[idx] == 0 || edge_sum[idx] == pair_count[idx]) continue;
                worst = std::max(worst, std::abs(sums[idx] - double(edge_sum[idx])));
            }
        }
        if (worst <= tol) return m;
    }
    throw std::runtime_error("prior fit did not converge in " + std::to_string(max_iter) +
                             " cycles; worst residual " + std::to_string(worst));
}

// Text persistence: header naming the spec, then one "name value" line per
// multiplier. Extra "meta" lines carry eps and input digest for provenance.
inline void save_prior(const PriorModel& m, std::ostream& out,
                       const std::string& edges_digest = "") {
    out.precision(17);
    out << "prior " << constraint_name(m.kind) << '\n';
    out << "meta nodes " << m.node_count() << '\n';
    out << "meta eps " << m.eps << '\n';
    out << "meta degenerate " << (m.degenerate ? 1 : 0) << '\n';
    if (!edges_digest.empty()) out << "meta edges_digest " << edges_digest << '\n';
    if (m.kind == ConstraintKind::Uniform) out << "lambda_global " << m.lambda_global << '\n';
    for (std::size_t i = 0; i < m.node_lambda.size(); ++i)
        out << "lambda " << i << ' ' << m.node_lambda[i] << '\n';
    if (m.num_blocks > 0) {
        out << "meta num_blocks " << m.num_blocks << '\n';
        for (int a = 0; a < m.num_blocks; ++a)
            for (int b = a; b < m.num_blocks; ++b)
                out << "gamma " << a << ' ' << b << ' ' << m.gamma(a, b) << '\n';
        for (std::size_t v = 0; v < m.blocks.size(); ++v)
            out << "assign " << v << ' ' << m.blocks[v] << '\n';
    }
}

inline PriorModel load_prior(std::istream& in, std::string* edges_digest = nullptr) {
    PriorModel m;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "prior") {
            std::string name;
            ls >> name;
            m.kind = constraint_from_name(name);
        } else if (key == "meta") {
            std::string what;
            ls >> what;
            if (what == "nodes") {
                ls >> n;
            } else if (what == "eps") {
                ls >> m.eps;
            } else if (what == "degenerate") {
                int d = 0;
                ls >> d;
                m.degenerate = d != 0;
            } else if (what == "num_blocks") {
                ls >> m.num_blocks;
                m.block_gamma.assign(std::size_t(m.num_blocks) * (m.num_blocks + 1) / 2, 0.0);
                m.blocks.assign(n, 0);
            } else if (what == "edges_digest" && edges_digest) {
                ls >> *edges_digest;
            }
        } else if (key == "lambda_global") {
            ls >> m.lambda_global;
        } else if (key == "lambda") {
            std::size_t i;
            double v;
            ls >> i >> v;
            if (m.node_lambda.size() <= i) m.node_lambda.resize(i + 1, 0.0);
            m.node_lambda[i] = v;
        } else if (key == "gamma") {
            int a, b;
            double v;
            ls >> a >> b >> v;
            m.gamma(a, b) = v;
        } else if (key == "assign") {
            std::size_t v;
            int b;
            ls >> v >> b;
            if (m.blocks.size() <= v) m.blocks.resize(v + 1, 0);
            m.blocks[v] = b;
        } else {
            throw std::runtime_error("unknown prior file key '" + key + "'");
        }
    }
    m.set_node_count(n);
    return m;
}

}  // namespace cne
