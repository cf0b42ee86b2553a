#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sear/data/sample.hpp"

namespace sear::data {

// Validated list of (image, mask) pairs. Entries are ordered
// lexicographically by id and ids are unique.
struct DatasetManifest {
    std::filesystem::path root;
    std::vector<ManifestEntry> entries;
    std::string split_tag = "train";  // train | test

    size_t size() const { return entries.size(); }
    std::vector<std::string> ids() const;
};

struct SplitSpec {
    double train_fraction = 0.75;
    uint64_t seed = 0;
};

// Accepts either a directory with images/ and masks/ subtrees paired by
// filename stem, or a JSONL manifest file ({id, image, mask} per line,
// paths relative to the manifest's directory). Every referenced file must
// exist and decode.
DatasetManifest load_manifest(const std::filesystem::path& path);

// Disjoint, exhaustive, deterministic split with |train| = round(f * N).
std::pair<DatasetManifest, DatasetManifest> split_dataset(const DatasetManifest& manifest, const SplitSpec& spec);

void write_manifest_jsonl(const std::filesystem::path& file, const DatasetManifest& manifest);

}  // namespace sear::data
