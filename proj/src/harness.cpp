#include "autoeval/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "autoeval/parallel.hpp"

namespace autoeval {

namespace {

std::string tau_method_name(double tau) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "conf@%.2f", tau);
    return buf;
}

std::string indexed_name(const std::string& prefix, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03zu", i);
    return prefix + buf;
}

}  // namespace

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
    config_.validate();
}

void Experiment::use_classifier(TinyClassifier clf) { classifier_ = std::move(clf); }

void Experiment::use_meta(MetaDataset meta) { meta_ = std::move(meta); }

void Experiment::use_predictors(LinearPredictor linear, NeuralPredictor neural) {
    linear_ = linear;
    neural_ = std::move(neural);
}

const SeedSet& Experiment::train_set() {
    if (!train_set_) train_set_ = render_seed(config_.train_glyph_config());
    return *train_set_;
}

const SeedSet& Experiment::synth_seed() {
    if (!synth_seed_) synth_seed_ = render_seed(config_.synth_glyph_config());
    return *synth_seed_;
}

const BackgroundCorpus& Experiment::corpus() {
    if (!corpus_) {
        BackgroundCorpus built;
        if (config_.procedural_textures)
            built = make_procedural_corpus(config_.textures, config_.seed);
        if (!config_.background_dir.empty()) {
            BackgroundCorpus extra = load_corpus_directory(config_.background_dir);
            if (built.size() == 0)
                built = std::move(extra);
            else
                merge_corpus(built, extra);
        }
        if (built.size() == 0)
            throw Error(ErrorKind::kConfig, "background corpus is empty");
        corpus_ = std::move(built);
    }
    return *corpus_;
}

const TinyClassifier& Experiment::classifier() {
    if (!classifier_)
        classifier_ = train_classifier(train_set().images, config_.classifier, config_.seed);
    return *classifier_;
}

const DatasetStats& Experiment::ori_stats() {
    if (!ori_stats_) {
        const FeatureBundle bundle = classifier().extract(train_set().images.images);
        ori_stats_ = compute_stats(bundle.features.cast<double>());
    }
    return *ori_stats_;
}

const MetaDataset& Experiment::meta() {
    if (!meta_) {
        MetaBuildConfig build;
        build.n_sets = config_.meta_sets;
        build.set_size = config_.set_size;
        build.split_train = config_.split_train;
        build.split_val = config_.split_val;
        build.jobs = config_.jobs;
        RecipeSampler sampler;
        if (config_.identity_recipes)
            sampler = [](CounterRng&) { return identity_recipe(); };
        MetaDataset built = build_meta_dataset(synth_seed(), classifier(), ori_stats(), build,
                                               corpus(), config_.seed, sampler);
        built.provenance.seed_config = config_.synth_glyph_config();
        meta_ = std::move(built);
    }
    return *meta_;
}

double Experiment::clean_seed_accuracy() {
    if (!clean_accuracy_) clean_accuracy_ = accuracy(classifier(), synth_seed().images);
    return *clean_accuracy_;
}

void Experiment::fit_predictors() {
    if (linear_ && neural_) return;
    const MetaDataset& m = meta();

    std::vector<std::pair<double, double>> linear_train;
    std::vector<DatasetRepresentation> train_x, val_x;
    std::vector<double> train_y, val_y;
    for (std::size_t i : m.train_indices) {
        const SampleSetRecord& r = m.records[i];
        linear_train.emplace_back(r.fd, r.accuracy);
        train_x.push_back(DatasetRepresentation{r.fd, r.stats.mean, r.stats.cov});
        train_y.push_back(r.accuracy);
    }
    for (std::size_t i : m.val_indices) {
        const SampleSetRecord& r = m.records[i];
        val_x.push_back(DatasetRepresentation{r.fd, r.stats.mean, r.stats.cov});
        val_y.push_back(r.accuracy);
    }

    linear_ = fit_linear(linear_train, config_.huber_delta);
    NeuralFitInfo info;
    neural_ = fit_neural(train_x, train_y, val_x, val_y, config_.neural, config_.seed, &info);
    neural_val_rmse_ = info.best_val_rmse;

    std::vector<double> linear_preds, truths;
    for (std::size_t i = 0; i < val_x.size(); ++i) {
        linear_preds.push_back(linear_->predict(val_x[i].fd));
        truths.push_back(val_y[i]);
    }
    linear_val_rmse_ = rmse(linear_preds, truths);
}

const LinearPredictor& Experiment::linear_predictor() {
    fit_predictors();
    return *linear_;
}

const NeuralPredictor& Experiment::neural_predictor() {
    fit_predictors();
    return *neural_;
}

double Experiment::neural_val_rmse() {
    fit_predictors();
    if (!neural_val_rmse_)
        throw Error(ErrorKind::kParameter, "validation RMSE unavailable for injected predictors");
    return *neural_val_rmse_;
}

double Experiment::linear_val_rmse() {
    fit_predictors();
    if (!linear_val_rmse_)
        throw Error(ErrorKind::kParameter, "validation RMSE unavailable for injected predictors");
    return *linear_val_rmse_;
}

DatasetRepresentation Experiment::representation_of(const FeatureBundle& bundle) {
    const DatasetStats stats = compute_stats(bundle.features.cast<double>());
    return assemble_representation(stats, ori_stats());
}

CorrelationResult Experiment::run_correlation_study() {
    const MetaDataset& m = meta();
    CorrelationResult result;
    std::vector<double> fds, accuracies;
    result.points.reserve(m.size());
    for (const auto& record : m.records) {
        result.points.emplace_back(record.fd, record.accuracy);
        fds.push_back(record.fd);
        accuracies.push_back(record.accuracy);
    }
    result.rho = spearman_rho(fds, accuracies);
    return result;
}

std::vector<NamedBundle> Experiment::generate_catalog_bundles(std::size_t count,
                                                              std::uint64_t stream_base,
                                                              const std::string& name_prefix) {
    const SeedSet& seed = synth_seed();
    const TinyClassifier& clf = classifier();
    const DatasetStats& ori = ori_stats();
    const BackgroundCorpus& bg = corpus();

    std::vector<NamedBundle> bundles(count);
    parallel_for(count, config_.jobs, [&](std::size_t i) {
        const std::uint64_t base = stream_base + 4 * i;
        CounterRng recipe_rng(config_.seed, base);
        const TransformRecipe recipe = sample_recipe(bg, recipe_rng);
        CounterRng body_rng(config_.seed, base + 1);
        MaterializedSet made =
            materialize_sample_set(seed, recipe, clf, ori, bg, config_.set_size, body_rng);
        bundles[i].name = indexed_name(name_prefix, i);
        bundles[i].bundle = std::move(made.bundle);
        bundles[i].bundle.source_id = bundles[i].name;
    });
    return bundles;
}

const std::vector<NamedBundle>& Experiment::heldout_bundles() {
    if (!heldout_)
        heldout_ = generate_catalog_bundles(config_.heldout_sets, kStreamHeldOut, "test-");
    return *heldout_;
}

PredictionReport Experiment::make_report(const std::vector<NamedBundle>& bundles,
                                         const LinearPredictor& linear,
                                         const NeuralPredictor& neural) {
    PredictionReport report;
    for (double tau : config_.taus) report.methods.push_back(tau_method_name(tau));
    report.methods.emplace_back("linear");
    report.methods.emplace_back("neural");
    report.seed = config_.seed;
    report.classifier_hash = hash_to_hex(classifier().param_hash());
    report.corpus_hash = hash_to_hex(corpus().content_hash);

    report.rows.resize(bundles.size());
    parallel_for(bundles.size(), config_.jobs, [&](std::size_t i) {
        const FeatureBundle& bundle = bundles[i].bundle;
        ReportRow& row = report.rows[i];
        row.name = bundles[i].name;
        if (bundle.labels) row.truth = bundle_accuracy(bundle);
        const DatasetRepresentation rep = representation_of(bundle);
        for (double tau : config_.taus)
            row.predictions.emplace_back(tau_method_name(tau), predict_confidence(bundle, tau));
        row.predictions.emplace_back("linear", linear.predict(rep.fd));
        row.predictions.emplace_back("neural", neural.predict(rep));
    });

    report.finalize();
    return report;
}

PredictionReport Experiment::run_method_comparison(const std::vector<NamedBundle>& test_bundles) {
    fit_predictors();
    return make_report(test_bundles, *linear_, *neural_);
}

PredictionReport Experiment::run_method_comparison() {
    return run_method_comparison(heldout_bundles());
}

PredictionReport Experiment::run_robustness_suite() {
    fit_predictors();
    const SeedSet& seed = synth_seed();
    const TinyClassifier& clf = classifier();
    const BackgroundCorpus& bg = corpus();

    std::vector<NamedBundle> bundles(config_.robustness_sets);
    parallel_for(config_.robustness_sets, config_.jobs, [&](std::size_t i) {
        const std::uint64_t base = kStreamRobust + 4 * i;
        CounterRng recipe_rng(config_.seed, base);
        const HeldOutRecipe recipe = sample_held_out_recipe(bg, recipe_rng);
        CounterRng body_rng(config_.seed, base + 1);

        LabeledImageSet images = apply_held_out_recipe(seed.images, seed.masks, recipe, bg, body_rng);
        FeatureBundle bundle = clf.extract(images.images);
        bundle.labels = images.labels;

        std::string family;
        for (const auto& slot : recipe.transforms) {
            if (!family.empty()) family += "+";
            family += held_out_name(slot.id);
        }
        bundles[i].name = indexed_name("robust-" + family + "-", i);
        bundles[i].bundle = std::move(bundle);
        bundles[i].bundle.source_id = bundles[i].name;
    });

    return make_report(bundles, *linear_, *neural_);
}

AblationTable Experiment::run_size_ablation() {
    const MetaDataset& m = meta();
    const std::vector<NamedBundle>& eval_bundles = heldout_bundles();

    // Precompute representations and truths for the fixed evaluation sets.
    std::vector<DatasetRepresentation> eval_reps(eval_bundles.size());
    std::vector<double> eval_truths(eval_bundles.size());
    parallel_for(eval_bundles.size(), config_.jobs, [&](std::size_t i) {
        eval_reps[i] = representation_of(eval_bundles[i].bundle);
        eval_truths[i] = bundle_accuracy(eval_bundles[i].bundle);
    });

    AblationTable table;
    table.seed = config_.seed;

    auto evaluate = [&](const std::vector<SampleSetRecord>& records, std::uint64_t split_stream,
                        const std::string& axis, std::size_t value) {
        // Fresh shuffled split of the subset at the configured ratio.
        std::vector<std::size_t> order(records.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        CounterRng split_rng(config_.seed, split_stream);
        split_rng.shuffle(order);
        const double share = static_cast<double>(config_.split_train) /
                             static_cast<double>(config_.split_train + config_.split_val);
        std::size_t n_train = static_cast<std::size_t>(
            std::lround(share * static_cast<double>(records.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, records.size() - 1);

        std::vector<std::pair<double, double>> linear_train;
        std::vector<DatasetRepresentation> train_x, val_x;
        std::vector<double> train_y, val_y;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const SampleSetRecord& r = records[order[i]];
            DatasetRepresentation rep{r.fd, r.stats.mean, r.stats.cov};
            if (i < n_train) {
                linear_train.emplace_back(r.fd, r.accuracy);
                train_x.push_back(std::move(rep));
                train_y.push_back(r.accuracy);
            } else {
                val_x.push_back(std::move(rep));
                val_y.push_back(r.accuracy);
            }
        }

        const LinearPredictor lin = fit_linear(linear_train, config_.huber_delta);
        const NeuralPredictor net =
            fit_neural(train_x, train_y, val_x, val_y, config_.neural, config_.seed);

        double linear_err = 0.0, neural_err = 0.0;
        for (std::size_t i = 0; i < eval_reps.size(); ++i) {
            linear_err += std::abs(lin.predict(eval_reps[i].fd) - eval_truths[i]);
            neural_err += std::abs(net.predict(eval_reps[i]) - eval_truths[i]);
        }
        const double n_eval = static_cast<double>(eval_reps.size());
        table.rows.push_back({axis, value, linear_err / n_eval, neural_err / n_eval});
    };

    for (std::size_t n : config_.ablate_meta_sizes) {
        const std::size_t take = std::min(n, m.records.size());
        std::vector<SampleSetRecord> subset(m.records.begin(),
                                            m.records.begin() + static_cast<std::ptrdiff_t>(take));
        evaluate(subset, kStreamSplit + take, "meta_size", take);
    }

    for (std::size_t s : config_.ablate_set_sizes) {
        MetaBuildConfig build;
        build.n_sets = config_.meta_sets;
        build.set_size = s;
        build.split_train = config_.split_train;
        build.split_val = config_.split_val;
        build.jobs = config_.jobs;
        const MetaDataset sized = build_meta_dataset(synth_seed(), classifier(), ori_stats(),
                                                     build, corpus(), config_.seed);
        evaluate(sized.records, kStreamSplit, "set_size", s);
    }

    return table;
}

ThresholdCheck check_thresholds(const ExperimentConfig& config,
                                const PredictionReport& comparison,
                                const PredictionReport& robustness,
                                double clean_seed_accuracy) {
    ThresholdCheck check;
    auto fail = [&check](const std::string& message) {
        check.ok = false;
        check.violations.push_back(message);
    };

    if (comparison.has_truth) {
        const double neural_rmse = comparison.rmse_percent.at("neural") / 100.0;
        const double linear_rmse = comparison.rmse_percent.at("linear") / 100.0;
        if (config.max_neural_rmse > 0.0 && neural_rmse > config.max_neural_rmse) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "neural RMSE %.4f exceeds %.4f", neural_rmse,
                          config.max_neural_rmse);
            fail(buf);
        }
        if (config.require_neural_beats_linear && neural_rmse > linear_rmse) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "neural RMSE %.4f above linear RMSE %.4f",
                          neural_rmse, linear_rmse);
            fail(buf);
        }
    }

    if (robustness.has_truth && config.robust_abs_err > 0.0 && config.robust_fraction > 0.0) {
        std::size_t within = 0;
        for (const auto& row : robustness.rows) {
            if (std::abs(row.prediction("neural") - *row.truth) <= config.robust_abs_err) ++within;
            if (*row.truth >= clean_seed_accuracy)
                fail("robustness set " + row.name + " not below clean seed accuracy");
        }
        const double fraction =
            static_cast<double>(within) / static_cast<double>(robustness.rows.size());
        if (fraction < config.robust_fraction) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "only %.0f%% of robustness sets within %.2f absolute error",
                          100.0 * fraction, config.robust_abs_err);
            fail(buf);
        }
    }

    return check;
}

}  // namespace autoeval
