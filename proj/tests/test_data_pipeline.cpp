#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>

#include "oracles.hpp"
#include "sear/data/manifest.hpp"
#include "sear/data/resize.hpp"
#include "sear/data/synth.hpp"
#include "sear/rng.hpp"

using namespace sear;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

data::ForgerySample make_sample(Rng& rng, const std::string& id, int size) {
    data::ForgerySample s;
    s.id = id;
    s.image = Tensor(3, size, size);
    s.mask = Tensor(1, size, size);
    for (size_t i = 0; i < s.image.numel(); ++i) s.image[i] = rng.uniform();
    for (size_t i = 0; i < s.mask.numel(); ++i) s.mask[i] = rng.uniform() < 0.3f ? 1.0f : 0.0f;
    return s;
}

}  // namespace

TEST_CASE("directory manifest: three valid pairs load, order is lexicographic") {
    TempDir dir("sear_dp_three");
    Rng rng(51);
    for (const char* id : {"b_two", "a_one", "c_three"}) data::save_sample(dir.path, make_sample(rng, id, 32));
    auto m = data::load_manifest(dir.path);
    REQUIRE(m.size() == 3);
    CHECK(m.entries[0].id == "a_one");
    CHECK(m.entries[1].id == "b_two");
    CHECK(m.entries[2].id == "c_three");
}

TEST_CASE("missing mask is a hard error naming the stem") {
    TempDir dir("sear_dp_missing");
    Rng rng(52);
    data::save_sample(dir.path, make_sample(rng, "kept", 32));
    data::save_sample(dir.path, make_sample(rng, "orphan", 32));
    fs::remove(dir.path / "masks" / "orphan.png");
    try {
        data::load_manifest(dir.path);
        FAIL("expected DataError");
    } catch (const data::DataError& e) {
        CHECK(std::string(e.what()).find("orphan") != std::string::npos);
    }
}

TEST_CASE("empty dataset directory gives an empty manifest without error") {
    TempDir dir("sear_dp_empty");
    fs::create_directories(dir.path / "images");
    fs::create_directories(dir.path / "masks");
    auto m = data::load_manifest(dir.path);
    CHECK(m.size() == 0);
}

TEST_CASE("undecodable image file is a hard error") {
    TempDir dir("sear_dp_garbage");
    Rng rng(53);
    data::save_sample(dir.path, make_sample(rng, "ok", 32));
    std::ofstream(dir.path / "images" / "bad.png") << "this is not a png";
    std::ofstream(dir.path / "masks" / "bad.png") << "this is not a png";
    CHECK_THROWS_AS(data::load_manifest(dir.path), data::DataError);
}

TEST_CASE("jsonl manifest loads and round-trips") {
    TempDir dir("sear_dp_jsonl");
    Rng rng(54);
    for (const char* id : {"x", "y"}) data::save_sample(dir.path, make_sample(rng, id, 32));
    auto m = data::load_manifest(dir.path);
    data::write_manifest_jsonl(dir.path / "manifest.jsonl", m);
    auto back = data::load_manifest(dir.path / "manifest.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back.entries[0].id == "x");
    CHECK(back.entries[1].id == "y");
}

TEST_CASE("mask binarization thresholds at value > 127") {
    TempDir dir("sear_dp_thresh");
    data::PngImage img;
    img.width = img.height = 4;
    img.channels = 3;
    img.pixels.assign(48, 100);
    data::write_png(dir.path / "img.png", img);

    data::PngImage mask;
    mask.width = mask.height = 4;
    mask.channels = 1;
    mask.pixels.assign(16, 0);
    mask.pixels[0] = 255;
    mask.pixels[1] = 0;
    mask.pixels[2] = 128;
    mask.pixels[3] = 127;
    data::write_png(dir.path / "mask.png", mask);

    auto s = data::load_sample({"t", dir.path / "img.png", dir.path / "mask.png"});
    CHECK(s.mask[0] == 1.0f);
    CHECK(s.mask[1] == 0.0f);
    CHECK(s.mask[2] == 1.0f);  // 128 > 127
    CHECK(s.mask[3] == 0.0f);  // 127 is not
    CHECK(s.image[0] == doctest::Approx(100.0f / 255.0f));
}

TEST_CASE("color mask is rejected as a channel mismatch") {
    TempDir dir("sear_dp_colormask");
    data::PngImage rgb;
    rgb.width = rgb.height = 4;
    rgb.channels = 3;
    rgb.pixels.assign(48, 7);
    data::write_png(dir.path / "img.png", rgb);
    data::write_png(dir.path / "mask.png", rgb);  // 3-channel mask
    try {
        data::load_sample({"t", dir.path / "img.png", dir.path / "mask.png"});
        FAIL("expected DataError");
    } catch (const data::DataError& e) {
        CHECK(std::string(e.what()).find("single-channel") != std::string::npos);
    }
}

TEST_CASE("resize") {
    Rng rng(55);
    SUBCASE("identity resize is bit-exact") {
        auto s = make_sample(rng, "id", 32);
        auto r = data::resize_sample(s, 32);
        for (size_t i = 0; i < s.image.numel(); ++i) CHECK(r.image[i] == s.image[i]);
        for (size_t i = 0; i < s.mask.numel(); ++i) CHECK(r.mask[i] == s.mask[i]);
    }
    SUBCASE("all-ones mask stays all ones at any size") {
        auto s = make_sample(rng, "ones", 32);
        s.mask.fill(1.0f);
        for (int size : {16, 24, 48, 64}) {
            auto r = data::resize_sample(s, size);
            for (size_t i = 0; i < r.mask.numel(); ++i) CHECK(r.mask[i] == 1.0f);
        }
    }
    SUBCASE("4x4 checkerboard to 2x2 matches the nearest-neighbour oracle") {
        Tensor cb(1, 4, 4);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) cb.at(0, y, x) = static_cast<float>((x + y) % 2);
        Tensor r = data::resize_nearest(cb, 2, 2);
        // src index = floor((d + 0.5) * 4 / 2) = {1, 3}
        CHECK(r.at(0, 0, 0) == cb.at(0, 1, 1));
        CHECK(r.at(0, 0, 1) == cb.at(0, 1, 3));
        CHECK(r.at(0, 1, 0) == cb.at(0, 3, 1));
        CHECK(r.at(0, 1, 1) == cb.at(0, 3, 3));
    }
    SUBCASE("random nearest resize matches an enumeration oracle") {
        Tensor m(1, 7, 5);
        for (size_t i = 0; i < m.numel(); ++i) m[i] = rng.uniform() < 0.5f ? 0.0f : 1.0f;
        Tensor r = data::resize_nearest(m, 3, 4);
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 4; ++x) {
                const int sy = std::min(6, static_cast<int>(std::floor((y + 0.5) * 7.0 / 3.0)));
                const int sx = std::min(4, static_cast<int>(std::floor((x + 0.5) * 5.0 / 4.0)));
                CHECK(r.at(0, y, x) == m.at(0, sy, sx));
            }
    }
    SUBCASE("bilinear resize of an image stays in range and matches shape") {
        auto s = make_sample(rng, "bil", 32);
        auto r = data::resize_sample(s, 48);
        CHECK(r.image.height() == 48);
        r.validate();  // [0,1] range, binary mask, shape agreement
    }
    SUBCASE("size below 16 is rejected") {
        auto s = make_sample(rng, "small", 32);
        CHECK_THROWS_AS(data::resize_sample(s, 8), data::DataError);
    }
}

TEST_CASE("split_dataset") {
    TempDir dir("sear_dp_split");
    Rng rng(56);
    for (int i = 0; i < 8; ++i) data::save_sample(dir.path, make_sample(rng, "s" + std::to_string(i), 32));
    auto m = data::load_manifest(dir.path);

    SUBCASE("75/25 on N=8 gives 6/2 with exhaustive union") {
        auto [train, test] = data::split_dataset(m, {0.75, 1});
        CHECK(train.size() == 6);
        CHECK(test.size() == 2);
        std::set<std::string> all;
        for (const auto& e : train.entries) all.insert(e.id);
        for (const auto& e : test.entries) all.insert(e.id);
        CHECK(all.size() == 8);
        CHECK(train.split_tag == "train");
        CHECK(test.split_tag == "test");
    }
    SUBCASE("same seed gives identical splits") {
        auto [t1, e1] = data::split_dataset(m, {0.75, 42});
        auto [t2, e2] = data::split_dataset(m, {0.75, 42});
        CHECK(t1.ids() == t2.ids());
        CHECK(e1.ids() == e2.ids());
    }
    SUBCASE("N=4 with fraction 0.75 gives 3/1 for any seed") {
        data::DatasetManifest m4 = m;
        m4.entries.resize(4);
        for (uint64_t seed = 0; seed < 10; ++seed) {
            auto [train, test] = data::split_dataset(m4, {0.75, seed});
            CHECK(train.size() == 3);
            CHECK(test.size() == 1);
            std::set<std::string> all;
            for (const auto& e : train.entries) all.insert(e.id);
            for (const auto& e : test.entries) all.insert(e.id);
            CHECK(all.size() == 4);
        }
    }
    SUBCASE("single-sample dataset cannot be split") {
        data::DatasetManifest m1 = m;
        m1.entries.resize(1);
        CHECK_THROWS_AS(data::split_dataset(m1, {0.75, 0}), data::DataError);
    }
}

TEST_CASE("split disjointness/exhaustiveness property over random sizes and seeds") {
    Rng rng(57);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + rng.uniform_int(40);
        data::DatasetManifest m;
        for (int i = 0; i < n; ++i) m.entries.push_back({"id" + std::to_string(i), "", ""});
        const double frac = 0.1 + 0.8 * rng.uniform();
        auto [train, test] = data::split_dataset(m, {frac, rng.next_u32()});
        std::set<std::string> tr;
        for (const auto& e : train.entries) tr.insert(e.id);
        size_t inter = 0;
        for (const auto& e : test.entries) inter += tr.count(e.id);
        CHECK(inter == 0);
        CHECK(train.size() + test.size() == static_cast<size_t>(n));
        CHECK(train.size() >= 1);
        CHECK(test.size() >= 1);
    }
}

TEST_CASE("synthetic splices") {
    SUBCASE("count, mask fraction and validity") {
        auto samples = data::synth_toy_forgery(7, 64, 10);
        REQUIRE(samples.size() == 10);
        for (const auto& s : samples) {
            s.validate();
            double frac = 0;
            for (size_t i = 0; i < s.mask.numel(); ++i) frac += s.mask[i];
            frac /= static_cast<double>(s.mask.numel());
            CHECK(frac >= 0.05);
            CHECK(frac <= 0.40);
        }
    }
    SUBCASE("same seed is byte-identical") {
        auto a = data::synth_toy_forgery(99, 32, 4);
        auto b = data::synth_toy_forgery(99, 32, 4);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].id == b[i].id);
            CHECK(bytes_hash(a[i].image.data(), a[i].image.numel()) ==
                  bytes_hash(b[i].image.data(), b[i].image.numel()));
            CHECK(bytes_hash(a[i].mask.data(), a[i].mask.numel()) ==
                  bytes_hash(b[i].mask.data(), b[i].mask.numel()));
        }
    }
    SUBCASE("different seeds differ") {
        auto a = data::synth_toy_forgery(1, 32, 2);
        auto b = data::synth_toy_forgery(2, 32, 2);
        CHECK(bytes_hash(a[0].image.data(), a[0].image.numel()) !=
              bytes_hash(b[0].image.data(), b[0].image.numel()));
    }
    SUBCASE("splice boundary shows up in a Laplacian residual") {
        auto samples = data::synth_toy_forgery(11, 64, 5);
        for (const auto& s : samples) {
            // gray Laplacian response accumulated along the inner mask boundary
            auto gray = [&](int y, int x) {
                return (s.image.at(0, y, x) + s.image.at(1, y, x) + s.image.at(2, y, x)) / 3.0;
            };
            double boundary_response = 0;
            long boundary_px = 0;
            for (int y = 1; y < 63; ++y)
                for (int x = 1; x < 63; ++x) {
                    const bool inside = s.mask.at(0, y, x) == 1.0f;
                    const bool edge = inside && (s.mask.at(0, y - 1, x) == 0.0f || s.mask.at(0, y + 1, x) == 0.0f ||
                                                 s.mask.at(0, y, x - 1) == 0.0f || s.mask.at(0, y, x + 1) == 0.0f);
                    if (!edge) continue;
                    boundary_response +=
                        std::fabs(4 * gray(y, x) - gray(y - 1, x) - gray(y + 1, x) - gray(y, x - 1) - gray(y, x + 1));
                    ++boundary_px;
                }
            REQUIRE(boundary_px > 0);
            CHECK(boundary_response / boundary_px > 1e-3);
        }
    }
}

TEST_CASE("on-disk round trip: mask exact, image within 1/255") {
    TempDir dir("sear_dp_roundtrip");
    Rng rng(58);
    auto s = make_sample(rng, "rt", 32);
    auto entry = data::save_sample(dir.path, s);
    auto back = data::load_sample(entry);
    back.validate();
    for (size_t i = 0; i < s.mask.numel(); ++i) CHECK(back.mask[i] == s.mask[i]);
    float worst = 0;
    for (size_t i = 0; i < s.image.numel(); ++i) worst = std::max(worst, std::fabs(back.image[i] - s.image[i]));
    CHECK(worst <= 1.0f / 255.0f + 1e-6f);
}

TEST_CASE("every loaded toy sample satisfies the data invariants") {
    auto samples = data::synth_toy_forgery(123, 32, 50);
    for (const auto& s : samples) {
        REQUIRE_NOTHROW(s.validate());
        CHECK(s.image.height() == s.mask.height());
        CHECK(s.image.width() == s.mask.width());
    }
}
