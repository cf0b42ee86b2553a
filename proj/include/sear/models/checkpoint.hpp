#pragma once

#include <filesystem>

#include <json.hpp>

#include "sear/models/concealer.hpp"
#include "sear/models/localizer.hpp"

namespace sear::models {

// Binary container: magic + version, a JSON header (model kind, config
// echo, iteration, optional RNG state), then named float tensors. When
// with_optimizer is set the ADAM moments ride along so interrupted runs
// resume exactly.

nlohmann::json concealer_config_to_json(const ConcealerConfig& c);
ConcealerConfig concealer_config_from_json(const nlohmann::json& j);
nlohmann::json localizer_config_to_json(const LocalizerConfig& c);
LocalizerConfig localizer_config_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const nlohmann::json& header,
                     const std::vector<nn::Param*>& params, bool with_optimizer);

nlohmann::json read_checkpoint_header(const std::filesystem::path& path);

// Fills params in place; name/dims mismatches and config mismatches are
// hard errors. Returns the header.
nlohmann::json load_checkpoint(const std::filesystem::path& path, const std::vector<nn::Param*>& params,
                               bool want_optimizer);

// Reads only the first params.size() tensors of the container (a joint
// checkpoint stores the concealer first); trailing tensors are ignored.
nlohmann::json load_checkpoint_prefix(const std::filesystem::path& path, const std::vector<nn::Param*>& params);

void save_concealer(const std::filesystem::path& path, ConcealerNet& net, nlohmann::json extra = {},
                    bool with_optimizer = false);
void save_localizer(const std::filesystem::path& path, LocalizerNet& net, nlohmann::json extra = {},
                    bool with_optimizer = false);

// Construct a net of the checkpointed configuration and load the weights.
ConcealerNet load_concealer(const std::filesystem::path& path);
LocalizerNet load_localizer(const std::filesystem::path& path);

}  // namespace sear::models
