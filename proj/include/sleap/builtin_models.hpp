#pragma once

#include <span>
#include <string>
#include <string_view>

#include "sleap/model.hpp"

namespace sleap {

/// Names of the bundled benchmark models.
std::span<const std::string_view> builtin_model_names();

/// Model text for a bundled model; throws ModelError on an unknown name.
std::string_view builtin_model_text(std::string_view name);

/// Load a network from either a bundled model name or "file:<path>".
ReactionNetwork load_model(const std::string& spec);

}  // namespace sleap
