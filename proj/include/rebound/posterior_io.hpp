#pragma once

#include <string>

#include "rebound/tvp.hpp"

namespace rebound {

/// Versioned little-endian binary snapshot of a posterior (magic
/// "REBOUND1"), so analysis can run without re-sampling. Layout is
/// documented in the README.
void save_posterior(const std::string& path, const TvpPosterior& post);

TvpPosterior load_posterior(const std::string& path);

}  // namespace rebound
