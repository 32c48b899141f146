#include "autoeval/report.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "autoeval/errors.hpp"
#include "autoeval/stats.hpp"

namespace autoeval {

using nlohmann::json;

double ReportRow::prediction(const std::string& method) const {
    for (const auto& [name, value] : predictions)
        if (name == method) return value;
    throw Error(ErrorKind::kParameter, "method not present in report row: " + method);
}

void PredictionReport::finalize() {
    rmse_percent.clear();
    mae_percent.clear();
    has_truth = !rows.empty();
    for (const auto& row : rows)
        if (!row.truth) has_truth = false;
    if (!has_truth) return;

    std::vector<double> truths;
    truths.reserve(rows.size());
    for (const auto& row : rows) truths.push_back(*row.truth);
    for (const auto& method : methods) {
        std::vector<double> preds;
        preds.reserve(rows.size());
        for (const auto& row : rows) preds.push_back(row.prediction(method));
        rmse_percent[method] = 100.0 * rmse(preds, truths);
        mae_percent[method] = 100.0 * mae(preds, truths);
    }
}

namespace {

std::string format_percent(double value01) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%7.2f", 100.0 * value01);
    return buf;
}

}  // namespace

void write_report(const PredictionReport& report, const std::string& base_path) {
    // Human-readable table, accuracies in percent.
    {
        std::ofstream out(base_path + ".txt", std::ios::binary);
        if (!out) throw Error(ErrorKind::kFormat, "cannot write report: " + base_path + ".txt");

        std::size_t name_width = 4;
        for (const auto& row : report.rows) name_width = std::max(name_width, row.name.size());

        out << std::left << std::setw(static_cast<int>(name_width)) << "set" << "  " << std::right
            << std::setw(7) << "truth";
        for (const auto& method : report.methods) out << "  " << std::setw(9) << method;
        out << "\n";

        for (const auto& row : report.rows) {
            out << std::left << std::setw(static_cast<int>(name_width)) << row.name << "  "
                << std::right;
            out << (row.truth ? format_percent(*row.truth) : std::string("      -"));
            for (const auto& method : report.methods)
                out << "  " << std::setw(9) << format_percent(row.prediction(method));
            out << "\n";
        }

        if (report.has_truth) {
            out << "\n"
                << std::left << std::setw(static_cast<int>(name_width)) << "RMSE%" << "  "
                << std::right << std::setw(7) << "-";
            for (const auto& method : report.methods) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%9.2f", report.rmse_percent.at(method));
                out << "  " << buf;
            }
            out << "\n"
                << std::left << std::setw(static_cast<int>(name_width)) << "MAE%" << "  "
                << std::right << std::setw(7) << "-";
            for (const auto& method : report.methods) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%9.2f", report.mae_percent.at(method));
                out << "  " << buf;
            }
            out << "\n";
        } else {
            out << "\n(no ground-truth labels; RMSE/MAE omitted)\n";
        }
        out.flush();
        if (!out) throw Error(ErrorKind::kFormat, "report write failed");
    }

    // Machine-readable lines.
    {
        std::ofstream out(base_path + ".jsonl", std::ios::binary);
        if (!out) throw Error(ErrorKind::kFormat, "cannot write report: " + base_path + ".jsonl");
        json header{{"format", "autoeval-report"},
                    {"version", 1},
                    {"methods", report.methods},
                    {"has_truth", report.has_truth},
                    {"seed", report.seed},
                    {"classifier_hash", report.classifier_hash},
                    {"corpus_hash", report.corpus_hash}};
        if (report.has_truth) {
            header["rmse_percent"] = report.rmse_percent;
            header["mae_percent"] = report.mae_percent;
        }
        out << header.dump() << "\n";
        for (const auto& row : report.rows) {
            json predictions = json::object();
            for (const auto& [method, value] : row.predictions) predictions[method] = value;
            json line{{"set", row.name}, {"predictions", predictions}};
            if (row.truth) line["truth"] = *row.truth;
            out << line.dump() << "\n";
        }
        out.flush();
        if (!out) throw Error(ErrorKind::kFormat, "report write failed");
    }
}

PredictionReport read_report(const std::string& jsonl_path) {
    std::ifstream in(jsonl_path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kFormat, "cannot read report: " + jsonl_path);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::kFormat, "empty report: " + jsonl_path);

    PredictionReport report;
    try {
        const json header = json::parse(line);
        if (header.at("format").get<std::string>() != "autoeval-report")
            throw Error(ErrorKind::kFormat, "not a report file: " + jsonl_path);
        report.methods = header.at("methods").get<std::vector<std::string>>();
        report.has_truth = header.at("has_truth").get<bool>();
        report.seed = header.at("seed").get<std::uint64_t>();
        report.classifier_hash = header.at("classifier_hash").get<std::string>();
        report.corpus_hash = header.at("corpus_hash").get<std::string>();
        if (report.has_truth) {
            report.rmse_percent =
                header.at("rmse_percent").get<std::map<std::string, double>>();
            report.mae_percent = header.at("mae_percent").get<std::map<std::string, double>>();
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json j = json::parse(line);
            ReportRow row;
            row.name = j.at("set").get<std::string>();
            if (j.contains("truth")) row.truth = j.at("truth").get<double>();
            for (const auto& method : report.methods)
                row.predictions.emplace_back(method,
                                             j.at("predictions").at(method).get<double>());
            report.rows.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::kFormat, "malformed report " + jsonl_path + ": " + e.what());
    }
    return report;
}

void write_ablation(const AblationTable& table, const std::string& base_path) {
    {
        std::ofstream out(base_path + ".txt", std::ios::binary);
        if (!out) throw Error(ErrorKind::kFormat, "cannot write ablation table");
        out << std::left << std::setw(10) << "axis" << std::right << std::setw(8) << "value"
            << std::setw(14) << "linear|err|%" << std::setw(14) << "neural|err|%" << "\n";
        for (const auto& row : table.rows) {
            char linear_buf[32], neural_buf[32];
            std::snprintf(linear_buf, sizeof(linear_buf), "%14.2f", 100.0 * row.linear_abs_err);
            std::snprintf(neural_buf, sizeof(neural_buf), "%14.2f", 100.0 * row.neural_abs_err);
            out << std::left << std::setw(10) << row.axis << std::right << std::setw(8)
                << row.value << linear_buf << neural_buf << "\n";
        }
        out.flush();
        if (!out) throw Error(ErrorKind::kFormat, "ablation write failed");
    }
    {
        std::ofstream out(base_path + ".jsonl", std::ios::binary);
        if (!out) throw Error(ErrorKind::kFormat, "cannot write ablation table");
        out << json{{"format", "autoeval-ablation"}, {"version", 1}, {"seed", table.seed}}.dump()
            << "\n";
        for (const auto& row : table.rows)
            out << json{{"axis", row.axis},
                        {"value", row.value},
                        {"linear_abs_err", row.linear_abs_err},
                        {"neural_abs_err", row.neural_abs_err}}
                       .dump()
                << "\n";
        out.flush();
        if (!out) throw Error(ErrorKind::kFormat, "ablation write failed");
    }
}

AblationTable read_ablation(const std::string& jsonl_path) {
    std::ifstream in(jsonl_path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kFormat, "cannot read ablation table: " + jsonl_path);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::kFormat, "empty ablation table");

    AblationTable table;
    try {
        const json header = json::parse(line);
        if (header.at("format").get<std::string>() != "autoeval-ablation")
            throw Error(ErrorKind::kFormat, "not an ablation file: " + jsonl_path);
        table.seed = header.at("seed").get<std::uint64_t>();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json j = json::parse(line);
            table.rows.push_back({j.at("axis").get<std::string>(),
                                  j.at("value").get<std::size_t>(),
                                  j.at("linear_abs_err").get<double>(),
                                  j.at("neural_abs_err").get<double>()});
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::kFormat, "malformed ablation " + jsonl_path + ": " + e.what());
    }
    return table;
}

void write_scatter(const std::vector<std::pair<double, double>>& points,
                   const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::kFormat, "cannot write scatter file: " + path);
    out << std::setprecision(17);
    for (const auto& [fd, accuracy] : points) out << fd << " " << accuracy << "\n";
    out.flush();
    if (!out) throw Error(ErrorKind::kFormat, "scatter write failed");
}

}  // namespace autoeval
