#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "mexec/model.hpp"

namespace mexec {

struct SimSettings {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 0;
};

/// A market specification as read from scenario JSON.
struct Scenario {
    MarketSpec spec;
    std::optional<SimSettings> sim;
};

/// Parses and validates scenario JSON; unknown keys and malformed values raise a schema error.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Serializes constants and step tables; callables cannot be written.
std::string scenario_to_json(const Scenario& scenario);

}  // namespace mexec
