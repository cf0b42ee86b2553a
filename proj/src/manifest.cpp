#include "sear/data/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "sear/rng.hpp"

namespace sear::data {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> DatasetManifest::ids() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.id);
    return out;
}

namespace {

DatasetManifest from_directory(const fs::path& root) {
    const fs::path images = root / "images";
    const fs::path masks = root / "masks";
    if (!fs::is_directory(images) || !fs::is_directory(masks))
        throw DataError("dataset root must contain images/ and masks/: " + root.string());

    DatasetManifest m;
    m.root = root;
    for (const auto& de : fs::directory_iterator(images)) {
        if (!de.is_regular_file()) continue;
        const std::string stem = de.path().stem().string();
        fs::path mask = masks / de.path().filename();
        if (!fs::exists(mask)) throw DataError("missing mask for image id '" + stem + "'");
        m.entries.push_back({stem, de.path(), mask});
    }
    return m;
}

DatasetManifest from_jsonl(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open manifest: " + file.string());
    DatasetManifest m;
    m.root = file.parent_path();
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("manifest " + file.string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.contains("id") || !j.contains("image") || !j.contains("mask"))
            throw DataError("manifest line " + std::to_string(lineno) + " needs {id,image,mask}");
        ManifestEntry e;
        e.id = j["id"].get<std::string>();
        e.image_path = m.root / j["image"].get<std::string>();
        e.mask_path = m.root / j["mask"].get<std::string>();
        if (!fs::exists(e.image_path)) throw DataError("missing image for id '" + e.id + "'");
        if (!fs::exists(e.mask_path)) throw DataError("missing mask for id '" + e.id + "'");
        m.entries.push_back(std::move(e));
    }
    return m;
}

}  // namespace

DatasetManifest load_manifest(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("no such dataset path: " + path.string());
    DatasetManifest m = fs::is_directory(path) ? from_directory(path) : from_jsonl(path);

    std::sort(m.entries.begin(), m.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
    std::set<std::string> seen;
    for (const auto& e : m.entries)
        if (!seen.insert(e.id).second) throw DataError("duplicate id in manifest: '" + e.id + "'");

    // every entry must decode; this also validates shapes and bit depth
    for (const auto& e : m.entries) load_sample(e);
    return m;
}

std::pair<DatasetManifest, DatasetManifest> split_dataset(const DatasetManifest& manifest, const SplitSpec& spec) {
    const size_t n = manifest.size();
    if (n < 2) throw DataError("cannot split a dataset with fewer than 2 samples");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw DataError("train_fraction must be in (0,1)");

    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(Rng::derive(spec.seed, 0x5711));
    rng.shuffle(idx);

    size_t n_train = static_cast<size_t>(std::lround(spec.train_fraction * static_cast<double>(n)));
    n_train = std::min(n - 1, std::max<size_t>(1, n_train));  // both sides non-empty

    DatasetManifest train, test;
    train.root = test.root = manifest.root;
    train.split_tag = "train";
    test.split_tag = "test";
    for (size_t i = 0; i < n; ++i)
        (i < n_train ? train : test).entries.push_back(manifest.entries[idx[i]]);
    auto by_id = [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; };
    std::sort(train.entries.begin(), train.entries.end(), by_id);
    std::sort(test.entries.begin(), test.entries.end(), by_id);
    return {train, test};
}

void write_manifest_jsonl(const fs::path& file, const DatasetManifest& manifest) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write manifest: " + file.string());
    for (const auto& e : manifest.entries) {
        json j;
        j["id"] = e.id;
        j["image"] = fs::relative(e.image_path, file.parent_path()).string();
        j["mask"] = fs::relative(e.mask_path, file.parent_path()).string();
        out << j.dump() << "\n";
    }
}

}  // namespace sear::data
