#include "mhdbfed/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mhdbfed/errors.hpp"

namespace mhdbfed {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

struct Cursor {
    const std::string& name;
    long line = 0;
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
    }
};

double to_double(const Cursor& c, const std::string& key, const std::string& v) {
    const char* s = v.c_str();
    char* end = nullptr;
    const double x = std::strtod(s, &end);
    if (end == s || !trim(end).empty())
        c.fail(key + ": expected a number, got '" + v + "'");
    return x;
}

long to_long(const Cursor& c, const std::string& key, const std::string& v) {
    const char* s = v.c_str();
    char* end = nullptr;
    const long x = std::strtol(s, &end, 10);
    if (end == s || !trim(end).empty())
        c.fail(key + ": expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t to_u64(const Cursor& c, const std::string& key, const std::string& v) {
    const char* s = v.c_str();
    char* end = nullptr;
    const unsigned long long x = std::strtoull(s, &end, 10);
    if (end == s || !trim(end).empty() || v.find('-') != std::string::npos)
        c.fail(key + ": expected an unsigned integer, got '" + v + "'");
    return static_cast<std::uint64_t>(x);
}

bool to_bool(const Cursor& c, const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    c.fail(key + ": expected true/false, got '" + v + "'");
}

Vec3 to_vec3(const Cursor& c, const std::string& key, const std::string& v) {
    std::istringstream in(v);
    Vec3 out;
    std::string tail;
    if (!(in >> out[0] >> out[1] >> out[2]) || (in >> tail))
        c.fail(key + ": expected three numbers, got '" + v + "'");
    return out;
}

std::array<int, 3> to_ivec3(const Cursor& c, const std::string& key, const std::string& v) {
    std::istringstream in(v);
    std::array<int, 3> out{};
    std::string tail;
    if (!(in >> out[0] >> out[1] >> out[2]) || (in >> tail))
        c.fail(key + ": expected three integers, got '" + v + "'");
    return out;
}

ICKind to_kind(const Cursor& c, const std::string& v) {
    if (v == "single_mode") return ICKind::single_mode;
    if (v == "random_band") return ICKind::random_band;
    if (v == "taylor_green") return ICKind::taylor_green;
    c.fail("kind: expected single_mode, random_band, or taylor_green, got '" + v + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& name) {
    RunConfig cfg;
    Cursor cur{name};
    std::istringstream in(text);
    std::string raw, section;
    std::set<std::string> seen;
    bool have_t_end = false;

    while (std::getline(in, raw)) {
        ++cur.line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const auto hash = raw.find_first_of("#;");
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') cur.fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "physics" && section != "grid" && section != "time" &&
                section != "ic" && section != "output")
                cur.fail("unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) cur.fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) cur.fail("empty key");
        if (section.empty()) cur.fail("key '" + key + "' appears before any section");
        if (!seen.insert(section + "." + key).second)
            cur.fail("duplicate key '" + key + "' in [" + section + "]");

        if (section == "physics") {
            if (key == "nu") cfg.physics.nu = to_double(cur, key, val);
            else if (key == "kappa") cfg.physics.kappa = to_double(cur, key, val);
            else if (key == "a") cfg.physics.a = to_double(cur, key, val);
            else if (key == "alpha") cfg.physics.alpha = to_double(cur, key, val);
            else cur.fail("unknown key '" + key + "' in [physics]");
        } else if (section == "grid") {
            if (key == "N") cfg.N = static_cast<int>(to_long(cur, key, val));
            else if (key == "L") cfg.L = to_double(cur, key, val);
            else cur.fail("unknown key '" + key + "' in [grid]");
        } else if (section == "time") {
            if (key == "t_end") { cfg.time.t_end = to_double(cur, key, val); have_t_end = true; }
            else if (key == "dt_init") cfg.time.dt_init = to_double(cur, key, val);
            else if (key == "dt_min") cfg.time.dt_min = to_double(cur, key, val);
            else if (key == "dt_max") cfg.time.dt_max = to_double(cur, key, val);
            else if (key == "cfl_safety") cfg.time.cfl_safety = to_double(cur, key, val);
            else if (key == "rk_order") cfg.time.rk_order = static_cast<int>(to_long(cur, key, val));
            else if (key == "adaptive") cfg.time.adaptive = to_bool(cur, key, val);
            else cur.fail("unknown key '" + key + "' in [time]");
        } else if (section == "ic") {
            if (key == "kind") cfg.ic.kind = to_kind(cur, val);
            else if (key == "amplitude") cfg.ic.amplitude = to_double(cur, key, val);
            else if (key == "energy") cfg.ic.energy = to_double(cur, key, val);
            else if (key == "b_fraction") cfg.ic.b_fraction = to_double(cur, key, val);
            else if (key == "mode") cfg.ic.mode = to_ivec3(cur, key, val);
            else if (key == "polarization") cfg.ic.polarization = to_vec3(cur, key, val);
            else if (key == "kmin") cfg.ic.kmin = static_cast<int>(to_long(cur, key, val));
            else if (key == "kmax") cfg.ic.kmax = static_cast<int>(to_long(cur, key, val));
            else if (key == "seed") cfg.ic.seed = to_u64(cur, key, val);
            else if (key == "mean_u") cfg.ic.mean_u = to_vec3(cur, key, val);
            else if (key == "mean_b") cfg.ic.mean_b = to_vec3(cur, key, val);
            else cur.fail("unknown key '" + key + "' in [ic]");
        } else {  // output
            if (key == "dir") cfg.out_dir = val;
            else if (key == "monitor_every") cfg.monitor_every = static_cast<int>(to_long(cur, key, val));
            else if (key == "checkpoint_every") cfg.checkpoint_every = static_cast<int>(to_long(cur, key, val));
            else cur.fail("unknown key '" + key + "' in [output]");
        }
    }

    if (!have_t_end) throw ConfigError(name + ": missing required key time.t_end");
    try {
        cfg.physics.validate();
        cfg.time.validate();
        make_grid(cfg.N, cfg.L);
    } catch (const Error& e) {
        throw ConfigError(name + ": " + e.what());
    }
    if (cfg.monitor_every < 0 || cfg.checkpoint_every < 0)
        throw ConfigError(name + ": output cadences must be >= 0");
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

std::vector<std::string> lint_config(const RunConfig& cfg, const std::string& command) {
    std::vector<std::string> warnings;
    if (command == "dependence" && cfg.physics.alpha < 1.5)
        warnings.push_back(
            "alpha = " + std::to_string(cfg.physics.alpha) +
            " is below 3/2: the squared-separation bound behind the dependence experiment is "
            "only justified for alpha >= 3/2; results are exploratory");
    return warnings;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* kind_name(ICKind k) {
    switch (k) {
        case ICKind::single_mode: return "single_mode";
        case ICKind::taylor_green: return "taylor_green";
        case ICKind::random_band: break;
    }
    return "random_band";
}

}  // namespace

std::string render_manifest(const RunManifest& m) {
    std::ostringstream out;
    out << "# resolved run parameters\n";
    out << "command = " << m.command << "\n";
    out << "seed = " << m.seed << "\n";
    out << "threads = " << m.threads << "\n\n";
    out << "[physics]\n";
    out << "nu = " << fmt(m.cfg.physics.nu) << "\n";
    out << "kappa = " << fmt(m.cfg.physics.kappa) << "\n";
    out << "a = " << fmt(m.cfg.physics.a) << "\n";
    out << "alpha = " << fmt(m.cfg.physics.alpha) << "\n\n";
    out << "[grid]\n";
    out << "N = " << m.cfg.N << "\n";
    out << "L = " << fmt(m.cfg.L) << "\n\n";
    out << "[time]\n";
    out << "t_end = " << fmt(m.cfg.time.t_end) << "\n";
    out << "dt_init = " << fmt(m.cfg.time.dt_init) << "\n";
    out << "dt_min = " << fmt(m.cfg.time.dt_min) << "\n";
    out << "dt_max = " << fmt(m.cfg.time.dt_max) << "\n";
    out << "cfl_safety = " << fmt(m.cfg.time.cfl_safety) << "\n";
    out << "rk_order = " << m.cfg.time.rk_order << "\n";
    out << "adaptive = " << (m.cfg.time.adaptive ? "true" : "false") << "\n\n";
    out << "[ic]\n";
    out << "kind = " << kind_name(m.cfg.ic.kind) << "\n";
    out << "amplitude = " << fmt(m.cfg.ic.amplitude) << "\n";
    out << "energy = " << fmt(m.cfg.ic.energy) << "\n";
    out << "b_fraction = " << fmt(m.cfg.ic.b_fraction) << "\n";
    out << "mode = " << m.cfg.ic.mode[0] << " " << m.cfg.ic.mode[1] << " " << m.cfg.ic.mode[2]
        << "\n";
    out << "polarization = " << fmt(m.cfg.ic.polarization[0]) << " "
        << fmt(m.cfg.ic.polarization[1]) << " " << fmt(m.cfg.ic.polarization[2]) << "\n";
    out << "kmin = " << m.cfg.ic.kmin << "\n";
    out << "kmax = " << m.cfg.ic.kmax << "\n";
    out << "seed = " << m.cfg.ic.seed << "\n";
    out << "mean_u = " << fmt(m.cfg.ic.mean_u[0]) << " " << fmt(m.cfg.ic.mean_u[1]) << " "
        << fmt(m.cfg.ic.mean_u[2]) << "\n";
    out << "mean_b = " << fmt(m.cfg.ic.mean_b[0]) << " " << fmt(m.cfg.ic.mean_b[1]) << " "
        << fmt(m.cfg.ic.mean_b[2]) << "\n\n";
    out << "[output]\n";
    out << "dir = " << m.cfg.out_dir << "\n";
    out << "monitor_every = " << m.cfg.monitor_every << "\n";
    out << "checkpoint_every = " << m.cfg.checkpoint_every << "\n";
    return out.str();
}

void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileFormatError(path + ": cannot open for writing");
    out << render_manifest(m);
    if (!out.flush()) throw FileFormatError(path + ": write failed");
}

}  // namespace mhdbfed
