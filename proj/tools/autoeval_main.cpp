#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "autoeval/harness.hpp"
#include "autoeval/hash.hpp"

namespace fs = std::filesystem;
using namespace autoeval;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitThreshold = 4;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kNumerical:
        case ErrorKind::kTrainingFailure:
            return kExitNumerical;
        default:
            return kExitConfig;
    }
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out_dir;
    bool porcelain = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
    auto* config_opt = cmd->add_option("--config", flags.config_path, "config file path");
    if (config_required) config_opt->required();
    cmd->add_option("--seed", flags.seed, "override [run] seed");
    cmd->add_option("--jobs", flags.jobs, "worker threads; 0 = all cores, 1 = fully serial");
    cmd->add_option("--out-dir", flags.out_dir, "override [run] out_dir");
    cmd->add_flag("--porcelain", flags.porcelain, "machine-readable output");
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
    ExperimentConfig cfg =
        flags.config_path.empty() ? ExperimentConfig{} : load_config(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.jobs) cfg.jobs = *flags.jobs;
    if (flags.out_dir) cfg.out_dir = *flags.out_dir;
    cfg.validate();
    return cfg;
}

fs::path classifier_path(const ExperimentConfig& cfg) {
    return fs::path(cfg.out_dir) / "classifier.aeck";
}
fs::path manifest_path(const ExperimentConfig& cfg) {
    return fs::path(cfg.out_dir) / "meta" / "manifest.jsonl";
}
fs::path stats_dir(const ExperimentConfig& cfg) {
    return fs::path(cfg.out_dir) / "meta" / "stats";
}
fs::path linear_path(const ExperimentConfig& cfg) {
    return fs::path(cfg.out_dir) / "predictors" / "linear.aelp";
}
fs::path neural_path(const ExperimentConfig& cfg) {
    return fs::path(cfg.out_dir) / "predictors" / "neural.aenp";
}
fs::path reports_dir(const ExperimentConfig& cfg) {
    return fs::path(cfg.out_dir) / "reports";
}

// Load the checkpoint when one exists, otherwise train and save it, so every
// subcommand sees the same classifier for a given config and seed.
void attach_classifier(Experiment& experiment) {
    const fs::path path = classifier_path(experiment.config());
    if (fs::exists(path)) {
        experiment.use_classifier(TinyClassifier::load(path.string()));
    } else {
        fs::create_directories(path.parent_path());
        experiment.classifier().save(path.string());
    }
}

void attach_meta(Experiment& experiment) {
    const fs::path path = manifest_path(experiment.config());
    if (fs::exists(path)) experiment.use_meta(read_meta_manifest(path.string()));
}

// Returns true when fitted checkpoints were loaded from disk.
bool attach_predictors(Experiment& experiment) {
    const fs::path lin = linear_path(experiment.config());
    const fs::path net = neural_path(experiment.config());
    if (!fs::exists(lin) || !fs::exists(net)) return false;
    auto [linear, ori_a] = load_linear_predictor(lin.string());
    auto [neural, ori_b] = load_neural_predictor(net.string());
    experiment.use_predictors(linear, std::move(neural));
    return true;
}

int cmd_print_defaults() {
    std::cout << serialize_config(ExperimentConfig{});
    return kExitOk;
}

int cmd_train_classifier(const CommonFlags& flags) {
    const ExperimentConfig cfg = resolve_config(flags);
    Experiment experiment(cfg);
    fs::create_directories(cfg.out_dir);

    const TinyClassifier& clf = experiment.classifier();
    const fs::path path = classifier_path(cfg);
    fs::create_directories(path.parent_path());
    clf.save(path.string());
    const double train_accuracy = accuracy(clf, experiment.train_set().images);

    if (flags.porcelain) {
        std::printf("classifier %s %s\n", path.c_str(), hash_to_hex(clf.param_hash()).c_str());
        std::printf("train_accuracy %.6f\n", train_accuracy);
    } else {
        std::printf("classifier checkpoint: %s\n", path.c_str());
        std::printf("parameter hash:        %s\n", hash_to_hex(clf.param_hash()).c_str());
        std::printf("training accuracy:     %.4f\n", train_accuracy);
    }
    return kExitOk;
}

int cmd_synth(const CommonFlags& flags) {
    const ExperimentConfig cfg = resolve_config(flags);
    Experiment experiment(cfg);
    attach_classifier(experiment);

    const fs::path manifest = manifest_path(cfg);
    fs::create_directories(manifest.parent_path());
    write_meta_manifest(experiment.meta(), manifest.string(), stats_dir(cfg).string());
    const std::uint64_t manifest_hash = hash_file(manifest.string());

    const CorrelationResult correlation = experiment.run_correlation_study();
    fs::create_directories(reports_dir(cfg));
    const fs::path scatter = reports_dir(cfg) / "fd_accuracy.txt";
    write_scatter(correlation.points, scatter.string());

    if (flags.porcelain) {
        std::printf("manifest %s %s\n", manifest.c_str(), hash_to_hex(manifest_hash).c_str());
        std::printf("records %zu\n", experiment.meta().size());
        std::printf("rho %.6f\n", correlation.rho);
        std::printf("scatter %s\n", scatter.c_str());
    } else {
        std::printf("meta manifest:   %s (%zu records, hash %s)\n", manifest.c_str(),
                    experiment.meta().size(), hash_to_hex(manifest_hash).c_str());
        std::printf("fd/accuracy scatter: %s\n", scatter.c_str());
        std::printf("Spearman rho(fd, accuracy) = %.4f\n", correlation.rho);
    }
    return kExitOk;
}

int cmd_fit(const CommonFlags& flags) {
    const ExperimentConfig cfg = resolve_config(flags);
    Experiment experiment(cfg);
    attach_classifier(experiment);
    attach_meta(experiment);

    const fs::path lin = linear_path(cfg);
    const fs::path net = neural_path(cfg);
    fs::create_directories(lin.parent_path());
    save_linear_predictor(experiment.linear_predictor(), experiment.ori_stats(), lin.string());
    save_neural_predictor(experiment.neural_predictor(), experiment.ori_stats(), net.string());

    if (flags.porcelain) {
        std::printf("predictor linear %s\n", lin.c_str());
        std::printf("predictor neural %s\n", net.c_str());
        std::printf("val_rmse linear %.6f\n", experiment.linear_val_rmse());
        std::printf("val_rmse neural %.6f\n", experiment.neural_val_rmse());
    } else {
        std::printf("linear predictor: %s (w0=%.6f, w1=%.6g), val RMSE %.4f\n", lin.c_str(),
                    experiment.linear_predictor().w0, experiment.linear_predictor().w1,
                    experiment.linear_val_rmse());
        std::printf("neural predictor: %s, val RMSE %.4f\n", net.c_str(),
                    experiment.neural_val_rmse());
    }
    return kExitOk;
}

int cmd_predict(const std::string& checkpoint, const std::string& bundle_path, bool with_truth,
                bool porcelain) {
    const FeatureBundle bundle = import_feature_bundle(bundle_path);

    double estimate = 0.0;
    const PredictorKind kind = peek_predictor_kind(checkpoint);
    if (kind == PredictorKind::kLinear) {
        auto [predictor, ori] = load_linear_predictor(checkpoint);
        const DatasetStats stats = compute_stats(bundle.features.cast<double>());
        estimate = predictor.predict(assemble_representation(stats, ori).fd);
    } else {
        auto [predictor, ori] = load_neural_predictor(checkpoint);
        const DatasetStats stats = compute_stats(bundle.features.cast<double>());
        estimate = predictor.predict(assemble_representation(stats, ori));
    }

    if (with_truth && !bundle.labels)
        throw Error(ErrorKind::kValidation, "--with-truth requires a labeled bundle");

    if (porcelain) {
        if (with_truth) {
            const double truth = bundle_accuracy(bundle);
            std::printf("predict %s %.6f %.6f %.6f\n", bundle_path.c_str(), estimate, truth,
                        std::abs(estimate - truth));
        } else {
            std::printf("predict %s %.6f\n", bundle_path.c_str(), estimate);
        }
    } else {
        std::printf("estimated accuracy: %.4f\n", estimate);
        if (with_truth) {
            const double truth = bundle_accuracy(bundle);
            std::printf("ground truth:       %.4f\n", truth);
            std::printf("absolute error:     %.4f\n", std::abs(estimate - truth));
        }
    }
    return kExitOk;
}

int cmd_eval(const CommonFlags& flags) {
    const ExperimentConfig cfg = resolve_config(flags);
    Experiment experiment(cfg);
    attach_classifier(experiment);
    attach_meta(experiment);
    attach_predictors(experiment);

    const PredictionReport comparison = experiment.run_method_comparison();
    const PredictionReport robustness = experiment.run_robustness_suite();

    fs::create_directories(reports_dir(cfg));
    const std::string comparison_base = (reports_dir(cfg) / "comparison").string();
    const std::string robustness_base = (reports_dir(cfg) / "robustness").string();
    write_report(comparison, comparison_base);
    write_report(robustness, robustness_base);

    const ThresholdCheck check =
        check_thresholds(cfg, comparison, robustness, experiment.clean_seed_accuracy());

    if (flags.porcelain) {
        std::printf("report comparison %s.jsonl %s\n", comparison_base.c_str(),
                    hash_to_hex(hash_file(comparison_base + ".jsonl")).c_str());
        std::printf("report robustness %s.jsonl %s\n", robustness_base.c_str(),
                    hash_to_hex(hash_file(robustness_base + ".jsonl")).c_str());
        for (const auto& method : comparison.methods)
            std::printf("rmse %s %.6f\n", method.c_str(),
                        comparison.has_truth ? comparison.rmse_percent.at(method) / 100.0 : -1.0);
        std::printf("thresholds %s\n", check.ok ? "pass" : "fail");
    } else {
        std::printf("comparison report: %s.txt\n", comparison_base.c_str());
        std::printf("robustness report: %s.txt\n", robustness_base.c_str());
        if (comparison.has_truth)
            for (const auto& method : comparison.methods)
                std::printf("  %-10s RMSE %6.2f%%  MAE %6.2f%%\n", method.c_str(),
                            comparison.rmse_percent.at(method), comparison.mae_percent.at(method));
        std::printf("thresholds: %s\n", check.ok ? "pass" : "FAIL");
    }
    for (const auto& violation : check.violations)
        std::fprintf(stderr, "threshold violation: %s\n", violation.c_str());
    return check.ok ? kExitOk : kExitThreshold;
}

int cmd_ablate(const CommonFlags& flags) {
    const ExperimentConfig cfg = resolve_config(flags);
    Experiment experiment(cfg);
    attach_classifier(experiment);
    attach_meta(experiment);

    const AblationTable table = experiment.run_size_ablation();
    fs::create_directories(reports_dir(cfg));
    const std::string base = (reports_dir(cfg) / "ablation").string();
    write_ablation(table, base);

    if (flags.porcelain) {
        for (const auto& row : table.rows)
            std::printf("ablation %s %zu %.6f %.6f\n", row.axis.c_str(), row.value,
                        row.linear_abs_err, row.neural_abs_err);
    } else {
        std::printf("ablation table: %s.txt\n", base.c_str());
        for (const auto& row : table.rows)
            std::printf("  %-9s %5zu  linear |err| %5.2f%%  neural |err| %5.2f%%\n",
                        row.axis.c_str(), row.value, 100.0 * row.linear_abs_err,
                        100.0 * row.neural_abs_err);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AutoEval: estimate classifier accuracy on unlabeled test sets"};
    app.require_subcommand(1);

    CommonFlags synth_flags, train_flags, fit_flags, eval_flags, ablate_flags;
    std::string predict_checkpoint, predict_bundle;
    bool predict_with_truth = false, predict_porcelain = false;

    auto* synth = app.add_subcommand("synth", "synthesize the meta-dataset manifest");
    add_common(synth, synth_flags);
    auto* train = app.add_subcommand("train-classifier", "train and save the classifier");
    add_common(train, train_flags);
    auto* fit = app.add_subcommand("fit", "fit accuracy predictors on the meta-dataset");
    add_common(fit, fit_flags);
    auto* eval = app.add_subcommand("eval", "run method comparison and robustness reports");
    add_common(eval, eval_flags);
    auto* ablate = app.add_subcommand("ablate", "run meta-size and set-size ablations");
    add_common(ablate, ablate_flags);
    auto* predict = app.add_subcommand("predict", "predict accuracy for a feature bundle");
    predict->add_option("--checkpoint", predict_checkpoint, "predictor checkpoint")->required();
    predict->add_option("--bundle", predict_bundle, "feature bundle file")->required();
    predict->add_flag("--with-truth", predict_with_truth, "also print truth and absolute error");
    predict->add_flag("--porcelain", predict_porcelain, "machine-readable output");
    app.add_subcommand("print-defaults", "print the default config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("print-defaults")) return cmd_print_defaults();
        if (app.got_subcommand(synth)) return cmd_synth(synth_flags);
        if (app.got_subcommand(train)) return cmd_train_classifier(train_flags);
        if (app.got_subcommand(fit)) return cmd_fit(fit_flags);
        if (app.got_subcommand(eval)) return cmd_eval(eval_flags);
        if (app.got_subcommand(ablate)) return cmd_ablate(ablate_flags);
        if (app.got_subcommand(predict))
            return cmd_predict(predict_checkpoint, predict_bundle, predict_with_truth,
                               predict_porcelain);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
