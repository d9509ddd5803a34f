#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mhdbfed/integrator.hpp"
#include "mhdbfed/verification.hpp"

namespace mhdbfed {

/// Fully resolved run description.  Every field has a default except
/// time.t_end, which the config must provide.
struct RunConfig {
    PhysParams physics;
    int N = 16;
    double L = 2.0 * 3.14159265358979323846;
    TimeControls time;
    ICSpec ic;
    std::string out_dir = "out";
    int monitor_every = 1;
    int checkpoint_every = 0;
};

/// Parses an INI-style config with sections [physics], [grid], [time], [ic],
/// [output].  Unknown sections or keys, duplicate keys, malformed values, and
/// a missing time.t_end are ConfigErrors carrying "file:line".  Text from '#'
/// or ';' to end of line is a comment.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& name);

/// Advisory checks that do not block a run: currently, a continuous-dependence
/// experiment with alpha < 3/2 is outside the regime where the
/// squared-separation bound is justified.  Returns human-readable warnings.
std::vector<std::string> lint_config(const RunConfig& cfg, const std::string& command);

/// Everything needed to reproduce a run bit for bit, echoed as INI.
struct RunManifest {
    RunConfig cfg;
    std::string command;
    std::uint64_t seed = 0;  ///< resolved seed (config value or CLI override)
    int threads = 1;
};

std::string render_manifest(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& path);

}  // namespace mhdbfed
