#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autoeval/raster.hpp"

namespace autoeval {

// Pool of background source images. Either procedurally generated textures,
// PNGs loaded from a user directory, or both. `content_hash` fingerprints
// the pixel bytes of every image, in order, for provenance records.
struct BackgroundCorpus {
    std::vector<Raster> images;
    std::vector<std::string> names;
    std::uint64_t content_hash = 0;

    std::size_t size() const { return images.size(); }
    void recompute_hash();
};

// Deterministic texture bank spanning dark to bright, smooth to busy; the
// brightness ladder matters because sample sets composited over near-black
// textures stay close to the training distribution while bright busy ones
// land far away.
BackgroundCorpus make_procedural_corpus(std::size_t count, std::uint64_t seed);

// Loads every *.png in `dir`, sorted by filename. Throws Error(kConfig) if
// the directory does not exist or holds no PNGs.
BackgroundCorpus load_corpus_directory(const std::string& dir);

// Appends `extra`'s images to `base` and refreshes the hash.
void merge_corpus(BackgroundCorpus& base, const BackgroundCorpus& extra);

}  // namespace autoeval
