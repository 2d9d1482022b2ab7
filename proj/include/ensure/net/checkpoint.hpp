#pragma once

#include "ensure/net/network.hpp"

#include <filesystem>
#include <string>

namespace ensure {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// path: binary checkpoint ("ENSC", version, config, then the parameters as
// little-endian float64). metadata (a JSON object) goes to path + ".json".
void save_checkpoint(std::filesystem::path const &path, ReconNetwork const &net, std::string const &metadata_json);
auto load_checkpoint(std::filesystem::path const &path) -> ReconNetwork;

} // namespace ensure
