#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cne/eval.hpp"
#include "cne/graph.hpp"
#include "cne/model.hpp"
#include "cne/prior.hpp"

namespace cne {

struct MetricRecord {
    std::string dataset;
    std::string prior;
    std::uint64_t seed;
    int dim;
    int k;
    double sigma2;
    std::string metric;
    double value;
};

inline void write_report_csv(const std::vector<MetricRecord>& records, std::ostream& out) {
    out << "dataset,prior,seed,d,k,sigma2,metric,value\n";
    out.precision(12);
    for (const auto& r : records)
        out << r.dataset << ',' << r.prior << ',' << r.seed << ',' << r.dim << ',' << r.k << ','
            << r.sigma2 << ',' << r.metric << ',' << r.value << '\n';
}

// One link-prediction repetition: split, refit the prior on the TRAIN graph,
// train an embedding on it, score the test pairs with CNE and each baseline.
inline std::vector<MetricRecord> run_linkpred_seed(const Graph& g, const std::string& dataset,
                                                   ConstraintKind kind, TrainConfig cfg,
                                                   const std::vector<BaselineMethod>& methods,
                                                   std::uint64_t seed, double prior_tol = 1e-6,
                                                   int prior_max_iter = 1000) {
    EvalSplit split = make_linkpred_split(g, seed);
    PriorModel prior = fit_prior(split.train, kind, prior_tol, prior_max_iter);
    cfg.seed = seed;
    FitResult fit = fit_embedding(split.train, prior, cfg);

    std::vector<MetricRecord> records;
    auto add = [&](const std::string& metric, double value) {
        records.push_back({dataset, constraint_name(kind), seed, cfg.dim, cfg.k, cfg.sigma2,
                           metric, value});
    };
    add("auc_cne", auc(cne_link_scores(fit.embedding, prior, split.test_pairs)));
    for (BaselineMethod m : methods)
        add(std::string("auc_") + baseline_name(m), auc(baseline_scores(split.train,
                                                                        split.test_pairs, m)));
    return records;
}

// One multi-label repetition (label-link prediction protocol): augment with
// label nodes, hold out half the label links, train, predict held-out labels.
inline std::vector<MetricRecord> run_multilabel_seed(const Graph& g, const std::string& dataset,
                                                     ConstraintKind kind, TrainConfig cfg,
                                                     std::uint64_t seed,
                                                     double held_fraction = 0.5,
                                                     double prior_tol = 1e-6,
                                                     int prior_max_iter = 1000,
                                                     std::optional<double> threshold = {}) {
    LabelAugmentation aug = augment_with_labels(g, held_fraction, seed);
    PriorModel prior = fit_prior(aug.augmented, kind, prior_tol, prior_max_iter);
    cfg.seed = seed;
    FitResult fit = fit_embedding(aug.augmented, prior, cfg);

    const int L = g.label_count();
    std::map<int, std::vector<int>> held_by_node;
    for (const auto& [node, label] : aug.held_out) held_by_node[node].push_back(label);

    std::vector<NodeLabelScores> nodes;
    for (auto& [node, truth] : held_by_node) {
        NodeLabelScores nls;
        nls.node = node;
        nls.true_labels = truth;
        for (int l = 0; l < L; ++l) {
            int label_node = aug.label_base + l;
            double z = posterior_log_odds(prior.log_odds(node, label_node),
                                          fit.embedding.squared_distance(node, label_node),
                                          fit.embedding.sigma1, fit.embedding.sigma2);
            nls.scores.push_back(sigmoid(z));
            if (aug.augmented.has_edge(node, label_node)) nls.training_labels.push_back(l);
        }
        nodes.push_back(std::move(nls));
    }
    auto [macro, micro] = multilabel_f1(nodes, threshold);

    std::vector<MetricRecord> records;
    records.push_back({dataset, constraint_name(kind), seed, cfg.dim, cfg.k, cfg.sigma2,
                       "macro_f1", macro});
    records.push_back({dataset, constraint_name(kind), seed, cfg.dim, cfg.k, cfg.sigma2,
                       "micro_f1", micro});
    return records;
}

}  // namespace cne
