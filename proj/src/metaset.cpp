#include "autoeval/metaset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "autoeval/binary_io.hpp"
#include "autoeval/hash.hpp"
#include "autoeval/parallel.hpp"

namespace autoeval {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t record_recipe_stream(std::uint64_t id) { return 4 * id; }
std::uint64_t record_body_stream(std::uint64_t id) { return 4 * id + 1; }

void MetaDataset::validate() const {
    std::vector<char> seen(records.size(), 0);
    auto mark = [&](const std::vector<std::size_t>& idx) {
        for (std::size_t i : idx) {
            if (i >= records.size())
                throw Error(ErrorKind::kValidation, "split index out of range");
            if (seen[i]) throw Error(ErrorKind::kValidation, "splits overlap");
            seen[i] = 1;
        }
    };
    mark(train_indices);
    mark(val_indices);
    if (static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1)) != records.size())
        throw Error(ErrorKind::kValidation, "splits do not cover all records");
    for (const auto& record : records) {
        if (record.accuracy < 0.0 || record.accuracy > 1.0)
            throw Error(ErrorKind::kValidation, "record accuracy outside [0,1]");
        if (record.fd < 0.0)
            throw Error(ErrorKind::kValidation, "record fd negative");
        record.stats.validate();
        record.recipe.validate();
    }
}

MaterializedSet materialize_sample_set(const SeedSet& seed, const TransformRecipe& recipe,
                                       const TinyClassifier& clf, const DatasetStats& ori_stats,
                                       const BackgroundCorpus& corpus, std::size_t set_size,
                                       CounterRng& rng) {
    const SeedSet* source = &seed;
    SeedSet subsampled;
    if (set_size > 0 && set_size < seed.images.size()) {
        subsampled = subsample_seed(seed, set_size, rng);
        source = &subsampled;
    }

    MaterializedSet out;
    out.images = apply_recipe(source->images, source->masks, recipe, corpus, rng);
    out.bundle = clf.extract(out.images.images);
    out.bundle.labels = out.images.labels;
    out.stats = compute_stats(out.bundle.features.cast<double>());
    out.fd = frechet_distance(ori_stats, out.stats);
    out.accuracy = bundle_accuracy(out.bundle);
    return out;
}

MetaDataset build_meta_dataset(const SeedSet& seed, const TinyClassifier& clf,
                               const DatasetStats& ori_stats, const MetaBuildConfig& config,
                               const BackgroundCorpus& corpus, std::uint64_t rng_seed,
                               const RecipeSampler& sampler) {
    if (config.n_sets < 2)
        throw Error(ErrorKind::kConfig, "meta dataset needs at least 2 sample sets");
    if (clf.feature_dim() != static_cast<int>(ori_stats.dim()))
        throw Error(ErrorKind::kShape, "classifier feature dim does not match original stats");
    if (config.split_train == 0 || config.split_val == 0)
        throw Error(ErrorKind::kConfig, "split ratio parts must be positive");

    MetaDataset meta;
    meta.records.resize(config.n_sets);
    meta.provenance.rng_seed = rng_seed;
    meta.provenance.classifier_hash = clf.param_hash();
    meta.provenance.corpus_hash = corpus.content_hash;

    parallel_for(config.n_sets, config.jobs, [&](std::size_t i) {
        const auto id = static_cast<std::uint64_t>(i);
        CounterRng recipe_rng(rng_seed, record_recipe_stream(id));
        const TransformRecipe recipe =
            sampler ? sampler(recipe_rng) : sample_recipe(corpus, recipe_rng);

        CounterRng body_rng(rng_seed, record_body_stream(id));
        MaterializedSet made =
            materialize_sample_set(seed, recipe, clf, ori_stats, corpus, config.set_size, body_rng);

        SampleSetRecord& record = meta.records[i];
        record.id = id;
        record.recipe = recipe;
        record.stats = std::move(made.stats);
        record.fd = made.fd;
        record.accuracy = made.accuracy;
        record.image_count = made.images.size();
    });

    // Shuffled split at the requested ratio (default 2:1 train:val).
    std::vector<std::size_t> order(config.n_sets);
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng split_rng(rng_seed, kStreamSplit);
    split_rng.shuffle(order);
    const double train_share = static_cast<double>(config.split_train) /
                               static_cast<double>(config.split_train + config.split_val);
    std::size_t n_train = static_cast<std::size_t>(
        std::lround(train_share * static_cast<double>(config.n_sets)));
    n_train = std::clamp<std::size_t>(n_train, 1, config.n_sets - 1);
    meta.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    meta.val_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

    meta.validate();
    return meta;
}

namespace {

constexpr char kStatsMagic[4] = {'A', 'E', 'D', 'S'};
constexpr std::uint32_t kStatsVersion = 1;

json recipe_to_json(const TransformRecipe& recipe) {
    json background{{"source", recipe.background.source},
                    {"x", recipe.background.x},
                    {"y", recipe.background.y},
                    {"w", recipe.background.w},
                    {"h", recipe.background.h}};
    json transforms = json::array();
    for (const auto& slot : recipe.transforms)
        transforms.push_back(
            {{"name", transform_name(slot.id)}, {"lo", slot.lo}, {"hi", slot.hi}});
    return json{{"background", background}, {"transforms", transforms}};
}

TransformRecipe recipe_from_json(const json& j) {
    TransformRecipe recipe;
    const json& background = j.at("background");
    recipe.background.source = background.at("source").get<int>();
    recipe.background.x = background.at("x").get<int>();
    recipe.background.y = background.at("y").get<int>();
    recipe.background.w = background.at("w").get<int>();
    recipe.background.h = background.at("h").get<int>();
    const json& transforms = j.at("transforms");
    if (transforms.size() != recipe.transforms.size())
        throw Error(ErrorKind::kFormat, "recipe must hold exactly 3 transforms");
    for (std::size_t i = 0; i < recipe.transforms.size(); ++i) {
        recipe.transforms[i].id = transform_from_name(transforms[i].at("name").get<std::string>());
        recipe.transforms[i].lo = transforms[i].at("lo").get<double>();
        recipe.transforms[i].hi = transforms[i].at("hi").get<double>();
    }
    recipe.validate();
    return recipe;
}

std::string stats_file_name(std::uint64_t id) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "set-%06llu.aeds", static_cast<unsigned long long>(id));
    return buf;
}

}  // namespace

void write_dataset_stats(const DatasetStats& stats, const std::string& path) {
    stats.validate();
    BinaryWriter out(path);
    out.magic(kStatsMagic);
    out.u32(kStatsVersion);
    out.u32(static_cast<std::uint32_t>(stats.dim()));
    out.u64(stats.count);
    out.f64_array(stats.mean.data(), stats.dim());
    for (Eigen::Index i = 0; i < stats.cov.rows(); ++i)
        for (Eigen::Index j = 0; j < stats.cov.cols(); ++j)
            out.f64(stats.cov(i, j));
    out.close();
}

DatasetStats read_dataset_stats(const std::string& path) {
    BinaryReader in(path);
    in.expect_magic(kStatsMagic);
    if (in.u32() != kStatsVersion)
        throw Error(ErrorKind::kFormat, "unsupported stats version in " + path);
    const std::uint32_t d = in.u32();
    DatasetStats stats;
    stats.count = in.u64();
    stats.mean.resize(d);
    in.f64_array(stats.mean.data(), d);
    stats.cov.resize(d, d);
    for (Eigen::Index i = 0; i < stats.cov.rows(); ++i)
        for (Eigen::Index j = 0; j < stats.cov.cols(); ++j)
            stats.cov(i, j) = in.f64();
    stats.validate();
    return stats;
}

void write_meta_manifest(const MetaDataset& meta, const std::string& manifest_path,
                         const std::string& stats_dir) {
    meta.validate();
    fs::create_directories(stats_dir);
    const fs::path manifest_dir = fs::path(manifest_path).parent_path();

    std::vector<char> in_train(meta.records.size(), 0);
    for (std::size_t i : meta.train_indices) in_train[i] = 1;

    std::ofstream out(manifest_path, std::ios::binary);  // binary: stable newlines
    if (!out) throw Error(ErrorKind::kFormat, "cannot write manifest: " + manifest_path);

    const auto& seed_config = meta.provenance.seed_config;
    json header{
        {"format", "autoeval-meta"},
        {"version", 1},
        {"records", meta.records.size()},
        {"provenance",
         {{"rng_seed", meta.provenance.rng_seed},
          {"classifier_hash", hash_to_hex(meta.provenance.classifier_hash)},
          {"corpus_hash", hash_to_hex(meta.provenance.corpus_hash)},
          {"seed_config",
           {{"class_count", seed_config.class_count},
            {"images_per_class", seed_config.images_per_class},
            {"height", seed_config.height},
            {"width", seed_config.width},
            {"stroke_min", seed_config.stroke_min},
            {"stroke_max", seed_config.stroke_max},
            {"rng_seed", seed_config.rng_seed}}}}}};
    out << header.dump() << "\n";

    for (std::size_t i = 0; i < meta.records.size(); ++i) {
        const SampleSetRecord& record = meta.records[i];
        const std::string stats_name = stats_file_name(record.id);
        const fs::path stats_path = fs::path(stats_dir) / stats_name;
        write_dataset_stats(record.stats, stats_path.string());

        // Stats paths are stored relative to the manifest's directory.
        const fs::path relative = fs::relative(stats_path, manifest_dir.empty() ? "." : manifest_dir);
        json line{{"id", record.id},
                  {"split", in_train[i] ? "train" : "val"},
                  {"recipe", recipe_to_json(record.recipe)},
                  {"fd", record.fd},
                  {"accuracy", record.accuracy},
                  {"images", record.image_count},
                  {"stats", relative.generic_string()}};
        out << line.dump() << "\n";
    }
    out.flush();
    if (!out) throw Error(ErrorKind::kFormat, "manifest write failed: " + manifest_path);
}

MetaDataset read_meta_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw Error(ErrorKind::kFormat, "cannot read manifest: " + manifest_path);
    const fs::path manifest_dir = fs::path(manifest_path).parent_path();

    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::kFormat, "manifest is empty: " + manifest_path);

    MetaDataset meta;
    try {
        const json header = json::parse(line);
        if (header.at("format").get<std::string>() != "autoeval-meta")
            throw Error(ErrorKind::kFormat, "not a meta manifest: " + manifest_path);
        if (header.at("version").get<int>() != 1)
            throw Error(ErrorKind::kFormat, "unsupported manifest version");
        const json& provenance = header.at("provenance");
        meta.provenance.rng_seed = provenance.at("rng_seed").get<std::uint64_t>();
        meta.provenance.classifier_hash =
            std::stoull(provenance.at("classifier_hash").get<std::string>(), nullptr, 16);
        meta.provenance.corpus_hash =
            std::stoull(provenance.at("corpus_hash").get<std::string>(), nullptr, 16);
        const json& seed_config = provenance.at("seed_config");
        meta.provenance.seed_config.class_count = seed_config.at("class_count").get<std::uint32_t>();
        meta.provenance.seed_config.images_per_class =
            seed_config.at("images_per_class").get<std::uint32_t>();
        meta.provenance.seed_config.height = seed_config.at("height").get<int>();
        meta.provenance.seed_config.width = seed_config.at("width").get<int>();
        meta.provenance.seed_config.stroke_min = seed_config.at("stroke_min").get<float>();
        meta.provenance.seed_config.stroke_max = seed_config.at("stroke_max").get<float>();
        meta.provenance.seed_config.rng_seed = seed_config.at("rng_seed").get<std::uint64_t>();

        std::size_t index = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json j = json::parse(line);
            SampleSetRecord record;
            record.id = j.at("id").get<std::uint64_t>();
            record.recipe = recipe_from_json(j.at("recipe"));
            record.fd = j.at("fd").get<double>();
            record.accuracy = j.at("accuracy").get<double>();
            record.image_count = j.at("images").get<std::size_t>();
            const fs::path stats_path = manifest_dir / j.at("stats").get<std::string>();
            record.stats = read_dataset_stats(stats_path.string());
            if (j.at("split").get<std::string>() == "train")
                meta.train_indices.push_back(index);
            else
                meta.val_indices.push_back(index);
            meta.records.push_back(std::move(record));
            ++index;
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::kFormat,
                    "malformed manifest " + manifest_path + ": " + e.what());
    }
    meta.validate();
    return meta;
}

}  // namespace autoeval
