#pragma once

#include <optional>
#include <string>

#include "geobeam/config.hpp"
#include "geobeam/kernels.hpp"

namespace geobeam {

struct RunArtifacts {
    json report;
    std::optional<std::string> csv;
    std::optional<std::string> binary;
};

bool known_subcommand(const std::string& name);

// Execute one pipeline; module errors propagate as geobeam::Error.
RunArtifacts run_subcommand(const std::string& name, const RunConfig& cfg, Policy policy = Policy::Parallel);

// Report emitted instead of the result when a run fails.
json error_report(const std::string& name, const RunConfig* cfg, const std::exception& e, int code);

// Atomically write <dir>/<prefix>.{json,csv,bin} as enabled in the output block.
void write_artifacts(const std::string& name, const RunConfig& cfg, const RunArtifacts& art);

}  // namespace geobeam
