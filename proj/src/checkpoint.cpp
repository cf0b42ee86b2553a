#include "sear/models/checkpoint.hpp"

#include <fstream>

namespace sear::models {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'S', 'E', 'A', 'R', 'C', 'K', 'P', '1'};

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_u64(std::ostream& os, uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
uint64_t read_u64(std::istream& is) {
    uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

void write_string(std::ostream& os, const std::string& s) {
    write_u64(os, s.size());
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string read_string(std::istream& is) {
    const uint64_t n = read_u64(is);
    std::string s(n, '\0');
    is.read(s.data(), static_cast<std::streamsize>(n));
    return s;
}

void write_floats(std::ostream& os, const std::vector<float>& v) {
    write_u64(os, v.size());
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(float)));
}
void read_floats(std::istream& is, std::vector<float>& v, size_t expect) {
    const uint64_t n = read_u64(is);
    if (n != expect) throw CheckpointError("checkpoint tensor size mismatch");
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(float)));
}

}  // namespace

void save_checkpoint(const fs::path& path, const json& header, const std::vector<nn::Param*>& params,
                     bool with_optimizer) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw CheckpointError("cannot write checkpoint: " + path.string());

    json h = header;
    h["format"] = "sear-checkpoint";
    h["version"] = 1;
    h["with_optimizer"] = with_optimizer;

    os.write(kMagic, 8);
    write_string(os, h.dump());
    write_u64(os, params.size());
    for (const nn::Param* p : params) {
        write_string(os, p->name);
        write_u64(os, p->dims.size());
        for (int d : p->dims) write_u64(os, static_cast<uint64_t>(d));
        write_floats(os, p->w);
        if (with_optimizer) {
            write_floats(os, p->m);
            write_floats(os, p->v);
        }
    }
    if (!os) throw CheckpointError("short write: " + path.string());
}

json read_checkpoint_header(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CheckpointError("cannot open checkpoint: " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw CheckpointError("not a sear checkpoint: " + path.string());
    return json::parse(read_string(is));
}

namespace {

json load_checkpoint_impl(const fs::path& path, const std::vector<nn::Param*>& params, bool want_optimizer,
                          bool prefix_ok) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CheckpointError("cannot open checkpoint: " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw CheckpointError("not a sear checkpoint: " + path.string());
    json header = json::parse(read_string(is));
    const bool has_opt = header.value("with_optimizer", false);
    if (want_optimizer && !has_opt)
        throw CheckpointError("checkpoint has no optimizer state: " + path.string());

    const uint64_t count = read_u64(is);
    if (prefix_ok ? count < params.size() : count != params.size())
        throw CheckpointError("checkpoint parameter count mismatch (config incompatible?)");
    for (nn::Param* p : params) {
        const std::string name = read_string(is);
        if (name != p->name) throw CheckpointError("parameter name mismatch: have " + p->name + ", file " + name);
        const uint64_t nd = read_u64(is);
        if (nd != p->dims.size()) throw CheckpointError("parameter rank mismatch for " + name);
        for (int d : p->dims)
            if (read_u64(is) != static_cast<uint64_t>(d))
                throw CheckpointError("parameter shape mismatch for " + name);
        read_floats(is, p->w, p->size());
        if (has_opt) {
            read_floats(is, p->m, p->size());
            read_floats(is, p->v, p->size());
        }
    }
    if (!is) throw CheckpointError("truncated checkpoint: " + path.string());
    return header;
}

}  // namespace

json load_checkpoint(const fs::path& path, const std::vector<nn::Param*>& params, bool want_optimizer) {
    return load_checkpoint_impl(path, params, want_optimizer, false);
}

json load_checkpoint_prefix(const fs::path& path, const std::vector<nn::Param*>& params) {
    return load_checkpoint_impl(path, params, false, true);
}

json concealer_config_to_json(const ConcealerConfig& c) {
    return {{"block", to_string(c.block)},
            {"depth", c.depth},
            {"base_channels", c.base_channels},
            {"dilation_rates", c.dilation_rates}};
}

ConcealerConfig concealer_config_from_json(const json& j) {
    ConcealerConfig c;
    c.block = block_kind_from_string(j.value("block", "vgg"));
    c.depth = j.value("depth", c.depth);
    c.base_channels = j.value("base_channels", c.base_channels);
    if (j.contains("dilation_rates")) c.dilation_rates = j["dilation_rates"].get<std::vector<int>>();
    c.validate();
    return c;
}

json localizer_config_to_json(const LocalizerConfig& c) {
    return {{"kind", c.kind == LocalizerKind::supervisor_refined ? "supervisor_refined" : "small_distill"},
            {"block", to_string(c.block)},
            {"high_pass", c.high_pass},
            {"depth", c.depth},
            {"base_channels", c.base_channels},
            {"dilation_rates", c.dilation_rates}};
}

LocalizerConfig localizer_config_from_json(const json& j) {
    LocalizerConfig c;
    const std::string kind = j.value("kind", "supervisor_refined");
    if (kind == "supervisor_refined")
        c.kind = LocalizerKind::supervisor_refined;
    else if (kind == "small_distill")
        c.kind = LocalizerKind::small_distill;
    else
        throw std::invalid_argument("unknown localizer kind: " + kind);
    c.block = block_kind_from_string(j.value("block", "vgg"));
    c.high_pass = j.value("high_pass", true);
    c.depth = j.value("depth", c.depth);
    c.base_channels = j.value("base_channels", c.base_channels);
    if (j.contains("dilation_rates")) c.dilation_rates = j["dilation_rates"].get<std::vector<int>>();
    c.validate();
    return c;
}

void save_concealer(const fs::path& path, ConcealerNet& net, json extra, bool with_optimizer) {
    json h = std::move(extra);
    h["model"] = "concealer";
    h["config"] = concealer_config_to_json(net.config());
    save_checkpoint(path, h, net.params(), with_optimizer);
}

void save_localizer(const fs::path& path, LocalizerNet& net, json extra, bool with_optimizer) {
    json h = std::move(extra);
    h["model"] = "localizer";
    h["config"] = localizer_config_to_json(net.config());
    save_checkpoint(path, h, net.params(), with_optimizer);
}

ConcealerNet load_concealer(const fs::path& path) {
    json h = read_checkpoint_header(path);
    if (h.value("model", "") != "concealer")
        throw CheckpointError(path.string() + " is not a concealer checkpoint");
    ConcealerNet net(concealer_config_from_json(h.at("config")));
    load_checkpoint(path, net.params(), false);
    return net;
}

LocalizerNet load_localizer(const fs::path& path) {
    json h = read_checkpoint_header(path);
    if (h.value("model", "") != "localizer")
        throw CheckpointError(path.string() + " is not a localizer checkpoint");
    LocalizerNet net(localizer_config_from_json(h.at("config")));
    load_checkpoint(path, net.params(), false);
    return net;
}

}  // namespace sear::models
