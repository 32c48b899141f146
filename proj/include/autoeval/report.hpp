#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace autoeval {

// One evaluated test set: name, ground truth when labels were available, and
// the per-method estimated accuracies. Accuracy values are stored in [0,1];
// the human-readable table prints percent.
struct ReportRow {
    std::string name;
    std::optional<double> truth;
    std::vector<std::pair<std::string, double>> predictions;  // method -> accuracy

    double prediction(const std::string& method) const;
};

struct PredictionReport {
    std::vector<std::string> methods;  // column order
    std::vector<ReportRow> rows;
    // Aggregates in percent units, present only when every row carries truth.
    std::map<std::string, double> rmse_percent;
    std::map<std::string, double> mae_percent;
    bool has_truth = false;

    // Deterministic run metadata; no wall-clock values, so a rerun of the
    // same config and seed reproduces the file byte for byte.
    std::uint64_t seed = 0;
    std::string classifier_hash;
    std::string corpus_hash;

    // Recomputes rmse/mae aggregates from the rows.
    void finalize();
};

// base path without extension; writes base.txt (table) and base.jsonl.
void write_report(const PredictionReport& report, const std::string& base_path);
PredictionReport read_report(const std::string& jsonl_path);

// Size-ablation output: one row per grid point.
struct AblationRow {
    std::string axis;  // "meta_size" or "set_size"
    std::size_t value = 0;
    double linear_abs_err = 0.0;  // mean |prediction - truth| over eval sets
    double neural_abs_err = 0.0;
};

struct AblationTable {
    std::vector<AblationRow> rows;
    std::uint64_t seed = 0;
};

void write_ablation(const AblationTable& table, const std::string& base_path);
AblationTable read_ablation(const std::string& jsonl_path);

// Two-column numeric text (fd accuracy), one point per line.
void write_scatter(const std::vector<std::pair<double, double>>& points,
                   const std::string& path);

}  // namespace autoeval
