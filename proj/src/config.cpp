#include "autoeval/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "autoeval/rng.hpp"

namespace autoeval {

void ExperimentConfig::validate() const {
    train_glyph_config().validate();
    synth_glyph_config().validate();
    if (meta_sets < 2) throw Error(ErrorKind::kConfig, "meta.sets must be >= 2");
    if (split_train == 0 || split_val == 0)
        throw Error(ErrorKind::kConfig, "split ratio parts must be positive");
    if (taus.empty()) throw Error(ErrorKind::kConfig, "predictors.taus must be nonempty");
    for (double tau : taus)
        if (!(tau > 0.0) || !(tau < 1.0))
            throw Error(ErrorKind::kConfig, "tau values must lie strictly inside (0,1)");
    if (!procedural_textures && background_dir.empty())
        throw Error(ErrorKind::kConfig,
                    "no background source: procedural textures disabled and no background_dir");
    if (procedural_textures && textures == 0)
        throw Error(ErrorKind::kConfig, "meta.textures must be positive");
    if (heldout_sets < 2) throw Error(ErrorKind::kConfig, "eval.heldout_sets must be >= 2");
    if (robustness_sets < 2) throw Error(ErrorKind::kConfig, "eval.robustness_sets must be >= 2");
    if (ablate_meta_sizes.empty() || ablate_set_sizes.empty())
        throw Error(ErrorKind::kConfig, "ablation grids must be nonempty");
    for (std::size_t v : ablate_meta_sizes)
        if (v < 2) throw Error(ErrorKind::kConfig, "ablate.meta_sizes entries must be >= 2");
    for (std::size_t v : ablate_set_sizes)
        if (v < 2) throw Error(ErrorKind::kConfig, "ablate.set_sizes entries must be >= 2");
    if (huber_delta <= 0.0) throw Error(ErrorKind::kConfig, "huber_delta must be positive");
}

GlyphSeedConfig ExperimentConfig::train_glyph_config() const {
    GlyphSeedConfig g;
    g.class_count = classes;
    g.images_per_class = train_per_class;
    g.height = height;
    g.width = width;
    g.stroke_min = stroke_min;
    g.stroke_max = stroke_max;
    g.rng_seed = CounterRng(seed, kStreamTrainSet).next_u64();
    return g;
}

GlyphSeedConfig ExperimentConfig::synth_glyph_config() const {
    GlyphSeedConfig g;
    g.class_count = classes;
    g.images_per_class = seed_per_class;
    g.height = height;
    g.width = width;
    g.stroke_min = stroke_min;
    g.stroke_max = stroke_max;
    g.rng_seed = CounterRng(seed, kStreamSeedSet).next_u64();
    return g;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

[[noreturn]] void bad_key(const std::string& section, const std::string& key) {
    throw Error(ErrorKind::kConfig, "unknown config key [" + section + "] " + key);
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key,
                            const std::string& value) {
    throw Error(ErrorKind::kConfig,
                "bad value for [" + section + "] " + key + ": '" + value + "'");
}

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) bad_value(section, key, v);
        return x;
    } catch (const std::logic_error&) {
        bad_value(section, key, v);
    }
}

long long parse_int(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) bad_value(section, key, v);
        return x;
    } catch (const std::logic_error&) {
        bad_value(section, key, v);
    }
}

std::uint64_t parse_u64(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) bad_value(section, key, v);
        return x;
    } catch (const std::logic_error&) {
        bad_value(section, key, v);
    }
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(section, key, v);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& section, const std::string& key,
                          const std::string& v, Parse parse_one) {
    std::vector<T> out;
    std::stringstream stream(v);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) bad_value(section, key, v);
        out.push_back(parse_one(section, key, item));
    }
    if (out.empty()) bad_value(section, key, v);
    return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw_line;
    std::string section;
    int line_number = 0;

    while (std::getline(in, raw_line)) {
        ++line_number;
        std::string line = raw_line;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorKind::kConfig,
                            "malformed section header at line " + std::to_string(line_number));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::kConfig,
                        "expected 'key = value' at line " + std::to_string(line_number));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (section == "run") {
            if (key == "seed") cfg.seed = parse_u64(section, key, value);
            else if (key == "jobs") cfg.jobs = static_cast<int>(parse_int(section, key, value));
            else if (key == "out_dir") cfg.out_dir = value;
            else bad_key(section, key);
        } else if (section == "glyphs") {
            if (key == "classes") cfg.classes = static_cast<std::uint32_t>(parse_int(section, key, value));
            else if (key == "train_per_class") cfg.train_per_class = static_cast<std::uint32_t>(parse_int(section, key, value));
            else if (key == "seed_per_class") cfg.seed_per_class = static_cast<std::uint32_t>(parse_int(section, key, value));
            else if (key == "height") cfg.height = static_cast<int>(parse_int(section, key, value));
            else if (key == "width") cfg.width = static_cast<int>(parse_int(section, key, value));
            else if (key == "stroke_min") cfg.stroke_min = static_cast<float>(parse_double(section, key, value));
            else if (key == "stroke_max") cfg.stroke_max = static_cast<float>(parse_double(section, key, value));
            else bad_key(section, key);
        } else if (section == "classifier") {
            if (key == "hidden") cfg.classifier.hidden = static_cast<int>(parse_int(section, key, value));
            else if (key == "epochs") cfg.classifier.epochs = static_cast<int>(parse_int(section, key, value));
            else if (key == "batch") cfg.classifier.batch_size = static_cast<int>(parse_int(section, key, value));
            else if (key == "learning_rate") cfg.classifier.learning_rate = parse_double(section, key, value);
            else if (key == "momentum") cfg.classifier.momentum = parse_double(section, key, value);
            else bad_key(section, key);
        } else if (section == "meta") {
            if (key == "sets") cfg.meta_sets = static_cast<std::size_t>(parse_int(section, key, value));
            else if (key == "set_size") cfg.set_size = static_cast<std::size_t>(parse_int(section, key, value));
            else if (key == "split_train") cfg.split_train = static_cast<unsigned>(parse_int(section, key, value));
            else if (key == "split_val") cfg.split_val = static_cast<unsigned>(parse_int(section, key, value));
            else if (key == "textures") cfg.textures = static_cast<std::size_t>(parse_int(section, key, value));
            else if (key == "background_dir") cfg.background_dir = value;
            else if (key == "procedural_textures") cfg.procedural_textures = parse_bool(section, key, value);
            else if (key == "identity_recipes") cfg.identity_recipes = parse_bool(section, key, value);
            else bad_key(section, key);
        } else if (section == "predictors") {
            if (key == "taus") cfg.taus = parse_list<double>(section, key, value, parse_double);
            else if (key == "huber_delta") cfg.huber_delta = parse_double(section, key, value);
            else if (key == "neural_hidden1") cfg.neural.hidden1 = static_cast<int>(parse_int(section, key, value));
            else if (key == "neural_hidden2") cfg.neural.hidden2 = static_cast<int>(parse_int(section, key, value));
            else if (key == "neural_learning_rate") cfg.neural.learning_rate = parse_double(section, key, value);
            else if (key == "neural_momentum") cfg.neural.momentum = parse_double(section, key, value);
            else if (key == "neural_batch") cfg.neural.batch_size = static_cast<int>(parse_int(section, key, value));
            else if (key == "neural_epochs") cfg.neural.max_epochs = static_cast<int>(parse_int(section, key, value));
            else if (key == "neural_patience") cfg.neural.patience = static_cast<int>(parse_int(section, key, value));
            else bad_key(section, key);
        } else if (section == "eval") {
            if (key == "heldout_sets") cfg.heldout_sets = static_cast<std::size_t>(parse_int(section, key, value));
            else if (key == "robustness_sets") cfg.robustness_sets = static_cast<std::size_t>(parse_int(section, key, value));
            else if (key == "max_neural_rmse") cfg.max_neural_rmse = parse_double(section, key, value);
            else if (key == "require_neural_beats_linear") cfg.require_neural_beats_linear = parse_bool(section, key, value);
            else if (key == "robust_abs_err") cfg.robust_abs_err = parse_double(section, key, value);
            else if (key == "robust_fraction") cfg.robust_fraction = parse_double(section, key, value);
            else bad_key(section, key);
        } else if (section == "ablate") {
            auto parse_size = [](const std::string& s, const std::string& k, const std::string& v2) {
                return static_cast<std::size_t>(parse_int(s, k, v2));
            };
            if (key == "meta_sizes") cfg.ablate_meta_sizes = parse_list<std::size_t>(section, key, value, parse_size);
            else if (key == "set_sizes") cfg.ablate_set_sizes = parse_list<std::size_t>(section, key, value, parse_size);
            else bad_key(section, key);
        } else {
            throw Error(ErrorKind::kConfig, "unknown config section [" + section + "]");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kConfig, "cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "[run]\n";
    out << "seed = " << cfg.seed << "\n";
    out << "jobs = " << cfg.jobs << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    out << "\n[glyphs]\n";
    out << "classes = " << cfg.classes << "\n";
    out << "train_per_class = " << cfg.train_per_class << "\n";
    out << "seed_per_class = " << cfg.seed_per_class << "\n";
    out << "height = " << cfg.height << "\n";
    out << "width = " << cfg.width << "\n";
    out << "stroke_min = " << cfg.stroke_min << "\n";
    out << "stroke_max = " << cfg.stroke_max << "\n";
    out << "\n[classifier]\n";
    out << "hidden = " << cfg.classifier.hidden << "\n";
    out << "epochs = " << cfg.classifier.epochs << "\n";
    out << "batch = " << cfg.classifier.batch_size << "\n";
    out << "learning_rate = " << cfg.classifier.learning_rate << "\n";
    out << "momentum = " << cfg.classifier.momentum << "\n";
    out << "\n[meta]\n";
    out << "sets = " << cfg.meta_sets << "\n";
    out << "set_size = " << cfg.set_size << "\n";
    out << "split_train = " << cfg.split_train << "\n";
    out << "split_val = " << cfg.split_val << "\n";
    out << "textures = " << cfg.textures << "\n";
    out << "background_dir = " << cfg.background_dir << "\n";
    out << "procedural_textures = " << (cfg.procedural_textures ? "true" : "false") << "\n";
    out << "identity_recipes = " << (cfg.identity_recipes ? "true" : "false") << "\n";
    out << "\n[predictors]\n";
    out << "taus = ";
    for (std::size_t i = 0; i < cfg.taus.size(); ++i)
        out << (i ? "," : "") << cfg.taus[i];
    out << "\n";
    out << "huber_delta = " << cfg.huber_delta << "\n";
    out << "neural_hidden1 = " << cfg.neural.hidden1 << "\n";
    out << "neural_hidden2 = " << cfg.neural.hidden2 << "\n";
    out << "neural_learning_rate = " << cfg.neural.learning_rate << "\n";
    out << "neural_momentum = " << cfg.neural.momentum << "\n";
    out << "neural_batch = " << cfg.neural.batch_size << "\n";
    out << "neural_epochs = " << cfg.neural.max_epochs << "\n";
    out << "neural_patience = " << cfg.neural.patience << "\n";
    out << "\n[eval]\n";
    out << "heldout_sets = " << cfg.heldout_sets << "\n";
    out << "robustness_sets = " << cfg.robustness_sets << "\n";
    out << "max_neural_rmse = " << cfg.max_neural_rmse << "\n";
    out << "require_neural_beats_linear = " << (cfg.require_neural_beats_linear ? "true" : "false") << "\n";
    out << "robust_abs_err = " << cfg.robust_abs_err << "\n";
    out << "robust_fraction = " << cfg.robust_fraction << "\n";
    out << "\n[ablate]\n";
    out << "meta_sizes = ";
    for (std::size_t i = 0; i < cfg.ablate_meta_sizes.size(); ++i)
        out << (i ? "," : "") << cfg.ablate_meta_sizes[i];
    out << "\n";
    out << "set_sizes = ";
    for (std::size_t i = 0; i < cfg.ablate_set_sizes.size(); ++i)
        out << (i ? "," : "") << cfg.ablate_set_sizes[i];
    out << "\n";
    return out.str();
}

}  // namespace autoeval
