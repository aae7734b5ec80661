// Command-line front end: fit priors, train embeddings, run the evaluation
// protocols, and export 2-D scatter plots.

#include <exception>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cne/eval.hpp"
#include "cne/graph.hpp"
#include "cne/manifest.hpp"
#include "cne/model.hpp"
#include "cne/pipeline.hpp"
#include "cne/prior.hpp"
#include "cne/sbm.hpp"
#include "cne/svg.hpp"

namespace {

cne::Graph load_graph(const std::string& edge_path, const std::string& block_path = "",
                      const std::string& label_path = "") {
    std::ifstream in(edge_path);
    if (!in) throw std::runtime_error("cannot open edge file: " + edge_path);
    cne::Graph g = cne::load_edge_list(in);
    if (g.merged_duplicates() > 0)
        std::cerr << "warning: merged " << g.merged_duplicates() << " duplicate edge line(s)\n";
    if (!block_path.empty()) {
        std::ifstream bin(block_path);
        if (!bin) throw std::runtime_error("cannot open block file: " + block_path);
        cne::load_blocks(g, bin);
    }
    if (!label_path.empty()) {
        std::ifstream lin(label_path);
        if (!lin) throw std::runtime_error("cannot open label file: " + label_path);
        cne::load_labels(g, lin);
    }
    return g;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << contents;
}

struct CommonTrainFlags {
    int dim = 8;
    double sigma2 = 2.0;
    int k = 50;
    double lr = 0.05;
    int epochs = 250;
    std::uint64_t seed = 0;
    double init_scale = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dim", dim, "embedding dimensionality");
        cmd->add_option("--sigma2", sigma2, "spread parameter for unlinked pairs");
        cmd->add_option("--k", k, "gradient sample size per stratum");
        cmd->add_option("--lr", lr, "learning rate");
        cmd->add_option("--epochs", epochs, "training epochs");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--init-scale", init_scale, "stddev of the coordinate initialization");
    }
    cne::TrainConfig config() const {
        cne::TrainConfig cfg;
        cfg.dim = dim;
        cfg.sigma2 = sigma2;
        cfg.k = k;
        cfg.learning_rate = lr;
        cfg.epochs = epochs;
        cfg.seed = seed;
        cfg.init_scale = init_scale;
        return cfg;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Conditional network embeddings: priors, training, evaluation, plots"};
    app.require_subcommand(1);

    // ---- fit-prior ----
    std::string fp_edges, fp_blocks, fp_prior = "uniform", fp_out = "prior.txt";
    double fp_tol = 1e-6;
    int fp_max_iter = 1000;
    auto* fit_prior_cmd = app.add_subcommand("fit-prior", "fit a MaxEnt prior to an edge list");
    fit_prior_cmd->add_option("edge-file", fp_edges)->required();
    fit_prior_cmd->add_option("--prior", fp_prior, "uniform|degree|block|block_degree");
    fit_prior_cmd->add_option("--blocks", fp_blocks, "block assignment file");
    fit_prior_cmd->add_option("--tol", fp_tol, "moment-matching tolerance");
    fit_prior_cmd->add_option("--max-iter", fp_max_iter, "max coordinate-ascent cycles");
    fit_prior_cmd->add_option("--out", fp_out, "output prior file");

    // ---- embed ----
    std::string em_edges, em_prior_file, em_out = "embedding.txt";
    bool em_force = false;
    CommonTrainFlags em_flags;
    auto* embed_cmd = app.add_subcommand("embed", "train an embedding under a fitted prior");
    embed_cmd->add_option("edge-file", em_edges)->required();
    embed_cmd->add_option("prior-file", em_prior_file)->required();
    em_flags.attach(embed_cmd);
    embed_cmd->add_option("--out", em_out, "output embedding file");
    embed_cmd->add_flag("--force", em_force, "skip the prior/edge digest check");

    // ---- eval-linkpred ----
    std::string lp_edges, lp_blocks, lp_prior = "degree", lp_out = "linkpred.csv";
    std::string lp_dataset = "dataset";
    std::vector<std::string> lp_methods = {"common_neighbors", "jaccard", "adamic_adar",
                                           "preferential_attachment"};
    int lp_repeats = 10;
    double lp_tol = 1e-6;
    CommonTrainFlags lp_flags;
    auto* linkpred_cmd = app.add_subcommand("eval-linkpred", "link-prediction protocol with AUC");
    linkpred_cmd->add_option("edge-file", lp_edges)->required();
    linkpred_cmd->add_option("--prior", lp_prior, "uniform|degree|block|block_degree");
    linkpred_cmd->add_option("--blocks", lp_blocks, "block assignment file");
    linkpred_cmd->add_option("--methods", lp_methods, "baseline methods to score")->delimiter(',');
    linkpred_cmd->add_option("--repeats", lp_repeats, "number of seeded repetitions");
    linkpred_cmd->add_option("--tol", lp_tol, "prior fit tolerance");
    linkpred_cmd->add_option("--dataset", lp_dataset, "dataset name in the report");
    lp_flags.attach(linkpred_cmd);
    linkpred_cmd->add_option("--out", lp_out, "output report CSV");

    // ---- eval-multilabel ----
    std::string ml_edges, ml_labels, ml_prior = "block_degree", ml_out = "multilabel.csv";
    std::string ml_dataset = "dataset";
    int ml_repeats = 10;
    double ml_held = 0.5, ml_tol = 1e-6, ml_threshold = 0.5;
    bool ml_use_threshold = false;
    CommonTrainFlags ml_flags;
    auto* multilabel_cmd =
        app.add_subcommand("eval-multilabel", "multi-label classification via label-link "
                                              "prediction");
    multilabel_cmd->add_option("edge-file", ml_edges)->required();
    multilabel_cmd->add_option("--labels", ml_labels, "node-label incidence file")->required();
    multilabel_cmd->add_option("--prior", ml_prior, "uniform|degree|block|block_degree");
    multilabel_cmd->add_option("--repeats", ml_repeats, "number of seeded repetitions");
    multilabel_cmd->add_option("--held-fraction", ml_held, "fraction of label links held out");
    multilabel_cmd
        ->add_option("--threshold", ml_threshold,
                     "predict labels scoring at or above this instead of top-m")
        ->trigger_on_parse()
        ->each([&](const std::string&) { ml_use_threshold = true; });
    multilabel_cmd->add_option("--tol", ml_tol, "prior fit tolerance");
    multilabel_cmd->add_option("--dataset", ml_dataset, "dataset name in the report");
    ml_flags.attach(multilabel_cmd);
    multilabel_cmd->add_option("--out", ml_out, "output report CSV");

    // ---- plot ----
    std::string pl_embedding, pl_edges, pl_blocks, pl_out = "embedding.svg";
    auto* plot_cmd = app.add_subcommand("plot", "render a 2-D embedding as an SVG scatter");
    plot_cmd->add_option("embedding-file", pl_embedding)->required();
    plot_cmd->add_option("--edges", pl_edges, "edge file; marker radius follows log(degree+1)");
    plot_cmd->add_option("--blocks", pl_blocks, "block file; marker color keyed by block");
    plot_cmd->add_option("--out", pl_out, "output SVG path");

    CLI11_PARSE(app, argc, argv);

    if (fit_prior_cmd->parsed()) {
        cne::ConstraintKind kind = cne::constraint_from_name(fp_prior);
        bool needs_blocks = kind == cne::ConstraintKind::Block ||
                            kind == cne::ConstraintKind::BlockDegree;
        if (needs_blocks && fp_blocks.empty()) {
            std::cerr << "error: --blocks is required for prior '" << fp_prior << "'\n";
            return 1;
        }
        cne::RunManifest manifest("fit-prior");
        manifest.input("edges", fp_edges);
        if (!fp_blocks.empty()) manifest.input("blocks", fp_blocks);
        manifest.param("prior", fp_prior);
        manifest.param("tol", fp_tol);
        manifest.param("max_iter", fp_max_iter);

        cne::Graph g = load_graph(fp_edges, fp_blocks);
        cne::PriorModel prior = cne::fit_prior(g, kind, fp_tol, fp_max_iter);
        if (prior.degenerate)
            std::cerr << "warning: degenerate constraints clamped to the probability floor\n";
        std::ofstream out(fp_out);
        if (!out) throw std::runtime_error("cannot write: " + fp_out);
        cne::save_prior(prior, out, cne::file_digest(fp_edges));
        manifest.output(fp_out);
        manifest.write(fp_out + ".manifest.json");
        std::cout << "wrote " << fp_out << '\n';
        return 0;
    }

    if (embed_cmd->parsed()) {
        cne::RunManifest manifest("embed");
        manifest.input("edges", em_edges);
        manifest.input("prior", em_prior_file);
        manifest.param("dim", em_flags.dim);
        manifest.param("sigma2", em_flags.sigma2);
        manifest.param("k", em_flags.k);
        manifest.param("lr", em_flags.lr);
        manifest.param("epochs", em_flags.epochs);
        manifest.param("seed", em_flags.seed);

        cne::Graph g = load_graph(em_edges);
        std::ifstream pin(em_prior_file);
        if (!pin) throw std::runtime_error("cannot open prior file: " + em_prior_file);
        std::string prior_digest;
        cne::PriorModel prior = cne::load_prior(pin, &prior_digest);
        if (!prior_digest.empty() && prior_digest != cne::file_digest(em_edges) && !em_force)
            throw std::runtime_error(
                "prior was fitted on a different edge set (digest mismatch); pass --force to "
                "override");

        cne::FitResult fit = cne::fit_embedding(g, prior, em_flags.config());
        std::ofstream out(em_out);
        if (!out) throw std::runtime_error("cannot write: " + em_out);
        cne::save_embedding(fit.embedding, g.tokens(), out);

        std::string trace_path = em_out + ".trace.txt";
        std::ofstream trace(trace_path);
        trace << "epoch loglik" << (fit.loglik_sampled ? " (sampled pairs)" : "") << '\n';
        trace.precision(17);
        for (std::size_t e = 0; e < fit.loglik_per_epoch.size(); ++e)
            trace << e << ' ' << fit.loglik_per_epoch[e] << '\n';

        manifest.output(em_out);
        manifest.output(trace_path);
        manifest.write(em_out + ".manifest.json");
        std::cout << "wrote " << em_out << '\n';
        return 0;
    }

    if (linkpred_cmd->parsed()) {
        cne::ConstraintKind kind = cne::constraint_from_name(lp_prior);
        bool needs_blocks = kind == cne::ConstraintKind::Block ||
                            kind == cne::ConstraintKind::BlockDegree;
        if (needs_blocks && lp_blocks.empty()) {
            std::cerr << "error: --blocks is required for prior '" << lp_prior << "'\n";
            return 1;
        }
        cne::RunManifest manifest("eval-linkpred");
        manifest.input("edges", lp_edges);
        if (!lp_blocks.empty()) manifest.input("blocks", lp_blocks);
        manifest.param("prior", lp_prior);
        manifest.param("repeats", lp_repeats);
        manifest.param("seed", lp_flags.seed);
        manifest.param("dim", lp_flags.dim);
        manifest.param("k", lp_flags.k);
        manifest.param("sigma2", lp_flags.sigma2);
        manifest.param("epochs", lp_flags.epochs);

        cne::Graph g = load_graph(lp_edges, lp_blocks);
        std::vector<cne::BaselineMethod> methods;
        for (const auto& m : lp_methods) methods.push_back(cne::baseline_from_name(m));

        std::vector<cne::MetricRecord> records;
        double cne_sum = 0.0;
        for (int r = 0; r < lp_repeats; ++r) {
            std::uint64_t seed = lp_flags.seed + std::uint64_t(r);
            auto recs = cne::run_linkpred_seed(g, lp_dataset, kind, lp_flags.config(), methods,
                                               seed, lp_tol);
            for (const auto& rec : recs)
                if (rec.metric == "auc_cne") cne_sum += rec.value;
            records.insert(records.end(), recs.begin(), recs.end());
        }
        std::ofstream out(lp_out);
        if (!out) throw std::runtime_error("cannot write: " + lp_out);
        cne::write_report_csv(records, out);
        manifest.output(lp_out);
        manifest.write(lp_out + ".manifest.json");
        std::cout << "mean CNE AUC over " << lp_repeats << " seeds: "
                  << cne_sum / double(lp_repeats) << '\n';
        return 0;
    }

    if (multilabel_cmd->parsed()) {
        cne::ConstraintKind kind = cne::constraint_from_name(ml_prior);
        cne::RunManifest manifest("eval-multilabel");
        manifest.input("edges", ml_edges);
        manifest.input("labels", ml_labels);
        manifest.param("prior", ml_prior);
        manifest.param("repeats", ml_repeats);
        manifest.param("held_fraction", ml_held);
        manifest.param("seed", ml_flags.seed);

        cne::Graph g = load_graph(ml_edges, "", ml_labels);
        std::vector<cne::MetricRecord> records;
        double macro_sum = 0.0;
        for (int r = 0; r < ml_repeats; ++r) {
            std::uint64_t seed = ml_flags.seed + std::uint64_t(r);
            auto recs = cne::run_multilabel_seed(
                g, ml_dataset, kind, ml_flags.config(), seed, ml_held, ml_tol, 1000,
                ml_use_threshold ? std::optional<double>(ml_threshold) : std::nullopt);
            for (const auto& rec : recs)
                if (rec.metric == "macro_f1") macro_sum += rec.value;
            records.insert(records.end(), recs.begin(), recs.end());
        }
        std::ofstream out(ml_out);
        if (!out) throw std::runtime_error("cannot write: " + ml_out);
        cne::write_report_csv(records, out);
        manifest.output(ml_out);
        manifest.write(ml_out + ".manifest.json");
        std::cout << "mean macro-F1 over " << ml_repeats << " seeds: "
                  << macro_sum / double(ml_repeats) << '\n';
        return 0;
    }

    if (plot_cmd->parsed()) {
        cne::RunManifest manifest("plot");
        manifest.input("embedding", pl_embedding);
        std::ifstream ein(pl_embedding);
        if (!ein) throw std::runtime_error("cannot open embedding file: " + pl_embedding);
        std::vector<std::string> tokens;
        cne::Embedding emb = cne::load_embedding(ein, &tokens, 1.0, 2.0);

        std::vector<int> blocks, degrees;
        if (!pl_edges.empty()) {
            manifest.input("edges", pl_edges);
            cne::Graph g = load_graph(pl_edges, pl_blocks);
            std::unordered_map<std::string, int> node_of;
            for (int v = 0; v < g.node_count(); ++v) node_of.emplace(g.token(v), v);
            degrees.reserve(tokens.size());
            if (g.has_blocks()) blocks.reserve(tokens.size());
            for (const auto& tok : tokens) {
                auto it = node_of.find(tok);
                if (it == node_of.end())
                    throw std::runtime_error("embedding token '" + tok +
                                             "' not present in edge file");
                degrees.push_back(g.degree(it->second));
                if (g.has_blocks()) blocks.push_back(g.block(it->second));
            }
        } else if (!pl_blocks.empty()) {
            throw std::runtime_error("--blocks requires --edges to resolve node tokens");
        }

        write_text_file(pl_out, cne::render_scatter_svg(emb, blocks, degrees));
        manifest.output(pl_out);
        manifest.write(pl_out + ".manifest.json");
        std::cout << "wrote " << pl_out << '\n';
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
