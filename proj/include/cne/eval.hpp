#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cne/graph.hpp"
#include "cne/model.hpp"
#include "cne/prior.hpp"

namespace cne {

struct EvalSplit {
    Graph train;
    std::vector<std::pair<NodePair, int>> test_pairs;  // label 1 = held-out edge
    std::uint64_t seed = 0;
    bool shortfall = false;
};

struct ScoredPair {
    NodePair pair;
    double score;
    int label;
};

// Remove 50% of edges keeping the train graph connected, then top up with an
// equal number of negatives drawn from the non-edges of the ORIGINAL graph.
inline EvalSplit make_linkpred_split(const Graph& g, std::uint64_t seed) {
    SplitResult split = connected_split(g, 0.5, seed);
    if (split.removed.empty())
        throw std::runtime_error("no removable edges: every edge is a bridge");
    EvalSplit ev;
    ev.seed = seed;
    ev.shortfall = split.shortfall;
    ev.train = std::move(split.train);
    auto negatives = sample_non_edges(g, split.removed.size(), seed ^ 0xda3e39cb94b95bdbULL);
    for (const auto& e : split.removed) ev.test_pairs.emplace_back(e, 1);
    for (const auto& e : negatives) ev.test_pairs.emplace_back(e, 0);
    return ev;
}

// Mann-Whitney AUC with half credit for ties, via average ranks.
inline double auc(const std::vector<ScoredPair>& scored) {
    std::size_t pos = 0, neg = 0;
    for (const auto& s : scored) {
        if (!std::isfinite(s.score)) throw std::invalid_argument("non-finite score");
        (s.label ? pos : neg)++;
    }
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("AUC needs at least one positive and one negative");

    std::vector<std::size_t> idx(scored.size());
    for (std::size_t t = 0; t < idx.size(); ++t) idx[t] = t;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scored[a].score < scored[b].score; });

    double rank_sum_pos = 0.0;
    std::size_t t = 0;
    while (t < idx.size()) {
        std::size_t u = t;
        while (u < idx.size() && scored[idx[u]].score == scored[idx[t]].score) ++u;
        double avg_rank = 0.5 * double(t + 1 + u);  // ranks are 1-based
        for (std::size_t v = t; v < u; ++v)
            if (scored[idx[v]].label) rank_sum_pos += avg_rank;
        t = u;
    }
    double u_stat = rank_sum_pos - double(pos) * (pos + 1) / 2.0;
    return u_stat / (double(pos) * double(neg));
}

enum class BaselineMethod { CommonNeighbors, Jaccard, AdamicAdar, PreferentialAttachment };

inline BaselineMethod baseline_from_name(const std::string& s) {
    if (s == "common_neighbors") return BaselineMethod::CommonNeighbors;
    if (s == "jaccard") return BaselineMethod::Jaccard;
    if (s == "adamic_adar") return BaselineMethod::AdamicAdar;
    if (s == "preferential_attachment") return BaselineMethod::PreferentialAttachment;
    throw std::invalid_argument("unknown baseline method '" + s + "'");
}

inline const char* baseline_name(BaselineMethod m) {
    switch (m) {
        case BaselineMethod::CommonNeighbors: return "common_neighbors";
        case BaselineMethod::Jaccard: return "jaccard";
        case BaselineMethod::AdamicAdar: return "adamic_adar";
        case BaselineMethod::PreferentialAttachment: return "preferential_attachment";
    }
    throw std::logic_error("bad baseline method");
}

// Neighborhood similarity scores computed on the TRAIN graph.
inline std::vector<ScoredPair> baseline_scores(const Graph& train,
                                               const std::vector<std::pair<NodePair, int>>& pairs,
                                               BaselineMethod method) {
    std::vector<ScoredPair> out;
    out.reserve(pairs.size());
    for (const auto& [p, label] : pairs) {
        const auto& ni = train.neighbors(p.i);
        const auto& nj = train.neighbors(p.j);
        double score = 0.0;
        switch (method) {
            case BaselineMethod::CommonNeighbors: {
                std::vector<int> common;
                std::set_intersection(ni.begin(), ni.end(), nj.begin(), nj.end(),
                                      std::back_inserter(common));
                score = double(common.size());
                break;
            }
            case BaselineMethod::Jaccard: {
                std::vector<int> common;
                std::set_intersection(ni.begin(), ni.end(), nj.begin(), nj.end(),
                                      std::back_inserter(common));
                std::size_t uni = ni.size() + nj.size() - common.size();
                score = uni == 0 ? 0.0 : double(common.size()) / double(uni);
                break;
            }
            case BaselineMethod::AdamicAdar: {
                std::vector<int> common;
                std::set_intersection(ni.begin(), ni.end(), nj.begin(), nj.end(),
                                      std::back_inserter(common));
                for (int t : common) {
                    int dt = train.degree(t);
                    if (dt > 1) score += 1.0 / std::log(double(dt));
                }
                break;
            }
            case BaselineMethod::PreferentialAttachment:
                score = double(ni.size()) * double(nj.size());
                break;
        }
        out.push_back({p, score, label});
    }
    return out;
}

// Posterior P(a_ij = 1 | X) per test pair.
inline std::vector<ScoredPair> cne_link_scores(const Embedding& emb, const PriorModel& prior,
                                               const std::vector<std::pair<NodePair, int>>& pairs) {
    std::vector<ScoredPair> out;
    out.reserve(pairs.size());
    for (const auto& [p, label] : pairs) {
        if (p.j >= emb.n) throw std::out_of_range("pair node outside embedding");
        double z = posterior_log_odds(prior.log_odds(p.i, p.j), emb.squared_distance(p.i, p.j),
                                      emb.sigma1, emb.sigma2);
        out.push_back({p, sigmoid(z), label});
    }
    return out;
}

struct LabelAugmentation {
    Graph augmented;                              // original nodes + one node per label
    std::vector<std::pair<int, int>> held_out;    // (node, label id) incidences
    int label_base = 0;                           // label l lives at node label_base + l
};

// Casts multi-label classification as link prediction: one new node per label,
// each node-label incidence becomes an edge with probability 1 - held_fraction,
// the rest are held out for testing. Augmented blocks: 0 = original, 1 = label.
inline LabelAugmentation augment_with_labels(const Graph& g, double held_fraction,
                                             std::uint64_t seed) {
    if (!g.has_labels()) throw std::invalid_argument("graph has no labels");
    if (held_fraction < 0.0 || held_fraction > 1.0)
        throw std::invalid_argument("held fraction must be in [0,1]");
    const int n = g.node_count();
    const int L = g.label_count();

    LabelAugmentation res;
    res.label_base = n;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    std::vector<NodePair> edges = g.edges();
    for (int v = 0; v < n; ++v)
        for (int l : g.labels()[v]) {
            if (coin(rng) < held_fraction)
                res.held_out.emplace_back(v, l);
            else
                edges.emplace_back(v, n + l);
        }

    std::vector<std::string> tokens = g.tokens();
    for (int l = 0; l < L; ++l) tokens.push_back("label:" + g.label_tokens()[l]);
    res.augmented = Graph::from_edges(n + L, std::move(edges), std::move(tokens));
    std::vector<int> blocks(n + L, 0);
    for (int l = 0; l < L; ++l) blocks[n + l] = 1;
    res.augmented.set_blocks(std::move(blocks), {"original", "label"});
    return res;
}

struct NodeLabelScores {
    int node;
    std::vector<double> scores;       // score per label id
    std::vector<int> true_labels;     // held-out true labels
    std::vector<int> training_labels; // labels already linked in training, excluded
};

// Top-m prediction (m = number of held-out true labels per node), then
// micro-F1 pools TP/FP/FN over all labels while macro-F1 averages per-label F1
// over labels with at least one true or predicted instance. Passing a
// threshold switches to predicting every label scoring at or above it,
// for sensitivity checks against the top-m rule.
inline std::pair<double, double> multilabel_f1(const std::vector<NodeLabelScores>& nodes,
                                               std::optional<double> threshold = std::nullopt) {
    bool any_truth = false;
    for (const auto& nd : nodes) any_truth |= !nd.true_labels.empty();
    if (!any_truth) throw std::invalid_argument("no held-out true labels to evaluate");

    std::map<int, std::array<std::size_t, 3>> per_label;  // label -> {tp, fp, fn}
    for (const auto& nd : nodes) {
        if (nd.true_labels.empty()) continue;
        std::size_t m = nd.true_labels.size();
        std::vector<int> candidates;
        for (std::size_t l = 0; l < nd.scores.size(); ++l)
            if (!std::binary_search(nd.training_labels.begin(), nd.training_labels.end(),
                                    static_cast<int>(l)))
                candidates.push_back(static_cast<int>(l));
        if (threshold) {
            std::erase_if(candidates, [&](int l) { return nd.scores[l] < *threshold; });
        } else {
            std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
                if (nd.scores[a] != nd.scores[b]) return nd.scores[a] > nd.scores[b];
                return a < b;
            });
            candidates.resize(std::min(m, candidates.size()));
        }

        std::set<int> predicted(candidates.begin(), candidates.end());
        std::set<int> truth(nd.true_labels.begin(), nd.true_labels.end());
        for (int l : predicted) per_label[l][truth.count(l) ? 0 : 1]++;
        for (int l : truth)
            if (!predicted.count(l)) per_label[l][2]++;
    }

    std::size_t tp = 0, fp = 0, fn = 0;
    double macro_sum = 0.0;
    std::size_t macro_count = 0;
    for (const auto& [label, counts] : per_label) {
        tp += counts[0];
        fp += counts[1];
        fn += counts[2];
        double denom = 2.0 * counts[0] + counts[1] + counts[2];
        macro_sum += denom == 0 ? 0.0 : 2.0 * counts[0] / denom;
        ++macro_count;
    }
    double micro_denom = 2.0 * tp + fp + fn;
    double micro = micro_denom == 0 ? 0.0 : 2.0 * double(tp) / micro_denom;
    double macro = macro_count == 0 ? 0.0 : macro_sum / double(macro_count);
    return {macro, micro};
}

}  // namespace cne
