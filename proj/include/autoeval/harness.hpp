#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "autoeval/config.hpp"
#include "autoeval/heldout.hpp"
#include "autoeval/metaset.hpp"
#include "autoeval/predictors.hpp"
#include "autoeval/report.hpp"

namespace autoeval {

struct CorrelationResult {
    double rho = 0.0;
    std::vector<std::pair<double, double>> points;  // (fd, accuracy)
};

// A labeled test set reduced to its bundle plus a display name.
struct NamedBundle {
    std::string name;
    FeatureBundle bundle;
};

// Lazily builds and caches every pipeline artifact for one config: seed
// sets, background corpus, classifier, original-training-set stats, the meta
// dataset, and the fitted predictors. All orchestration entry points hang
// off this type; the CLI can inject artifacts loaded from disk instead.
class Experiment {
public:
    explicit Experiment(ExperimentConfig config);

    const ExperimentConfig& config() const { return config_; }

    void use_classifier(TinyClassifier clf);
    void use_meta(MetaDataset meta);
    void use_predictors(LinearPredictor linear, NeuralPredictor neural);

    const SeedSet& train_set();
    const SeedSet& synth_seed();
    const BackgroundCorpus& corpus();
    const TinyClassifier& classifier();
    const DatasetStats& ori_stats();
    const MetaDataset& meta();
    const LinearPredictor& linear_predictor();
    const NeuralPredictor& neural_predictor();
    double clean_seed_accuracy();
    double neural_val_rmse();   // best validation RMSE of the neural fit
    double linear_val_rmse();   // linear predictor RMSE on the same val split

    DatasetRepresentation representation_of(const FeatureBundle& bundle);

    // Spearman's rho between FD and accuracy over every meta record, plus
    // the scatter points.
    CorrelationResult run_correlation_study();

    // Synthetic labeled test sets drawn from the training transform catalog
    // but from rng streams disjoint from the meta set.
    const std::vector<NamedBundle>& heldout_bundles();

    // All methods (confidence at each tau, linear, neural) on the given
    // test bundles; aggregates present only when every bundle is labeled.
    PredictionReport run_method_comparison(const std::vector<NamedBundle>& test_bundles);
    PredictionReport run_method_comparison();  // uses heldout_bundles()

    // Test sets built only from the four held-out transform families.
    PredictionReport run_robustness_suite();

    // Meta-size and sample-set-size grids, absolute errors per regressor.
    AblationTable run_size_ablation();

private:
    std::vector<NamedBundle> generate_catalog_bundles(std::size_t count,
                                                      std::uint64_t stream_base,
                                                      const std::string& name_prefix);
    void fit_predictors();
    PredictionReport make_report(const std::vector<NamedBundle>& bundles,
                                 const LinearPredictor& linear, const NeuralPredictor& neural);

    ExperimentConfig config_;
    std::optional<SeedSet> train_set_;
    std::optional<SeedSet> synth_seed_;
    std::optional<BackgroundCorpus> corpus_;
    std::optional<TinyClassifier> classifier_;
    std::optional<DatasetStats> ori_stats_;
    std::optional<MetaDataset> meta_;
    std::optional<LinearPredictor> linear_;
    std::optional<NeuralPredictor> neural_;
    std::optional<double> clean_accuracy_;
    std::optional<double> neural_val_rmse_;
    std::optional<double> linear_val_rmse_;
    std::optional<std::vector<NamedBundle>> heldout_;
};

// CI-threshold evaluation for the eval subcommand (exit code 4 on failure).
struct ThresholdCheck {
    bool ok = true;
    std::vector<std::string> violations;
};

ThresholdCheck check_thresholds(const ExperimentConfig& config,
                                const PredictionReport& comparison,
                                const PredictionReport& robustness,
                                double clean_seed_accuracy);

}  // namespace autoeval
