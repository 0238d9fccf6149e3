#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pchsh/strategy.h"

namespace pchsh {

/// JSON document {n, dim_A, dim_B, state, alice_obs, bob_obs}. Complex numbers
/// are [re, im] pairs printed with 17 significant digits, so a write/read
/// cycle reproduces every double exactly. Observable matrices are row-major
/// lists keyed by the question string.
std::string strategy_to_json(const Strategy &strategy);

/// Parses the document written by strategy_to_json. Throws
/// std::invalid_argument on malformed input; no validation of the physics.
Strategy strategy_from_json(std::string_view text);

void save_strategy(const Strategy &strategy, const std::filesystem::path &path);
Strategy load_strategy(const std::filesystem::path &path);

}  // namespace pchsh
