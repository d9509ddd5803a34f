#include "mhdbfed/io_store.hpp"

#include <bit>

#include "mhdbfed/errors.hpp"
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>

namespace mhdbfed {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; byte swapping is not implemented");

namespace {

constexpr char kMagic[8] = {'M', 'H', 'D', 'B', 'F', 'E', 'D', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFieldCount = 2;
// Layout 1: half-complex r2c storage, row-major (kx, ky, kz) with kz fastest,
// components x,y,z per field, (re, im) f64 pairs.
constexpr std::uint32_t kLayoutHalfComplex = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in, const std::string& path, const char* what) {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw FileFormatError(path + ": truncated while reading " + what);
    return v;
}

double get_f64(std::istream& in, const std::string& path, const char* what) {
    double v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw FileFormatError(path + ": truncated while reading " + what);
    return v;
}

const char* kHeader =
    "t,E,grad_u_sq,grad_b_sq,u_damp_norm,b_crit_norm,div_u_res,div_b_res,"
    "mean_ux,mean_uy,mean_uz,mean_bx,mean_by,mean_bz";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_snapshot(const std::string& path, const State& s, const PhysParams& p) {
    p.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileFormatError(path + ": cannot open for writing");

    out.write(kMagic, sizeof kMagic);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(s.grid().N()));
    put_f64(out, s.grid().L());
    put_f64(out, p.nu);
    put_f64(out, p.kappa);
    put_f64(out, p.a);
    put_f64(out, p.alpha);
    put_f64(out, s.t);
    put_u32(out, kFieldCount);
    put_u32(out, kLayoutHalfComplex);

    for (const SpectralVectorField* f : {&s.u, &s.b})
        for (int d = 0; d < 3; ++d)
            out.write(reinterpret_cast<const char*>(f->c[d].data()),
                      static_cast<std::streamsize>(sizeof(Complex) * f->c[d].size()));
    out.flush();
    if (!out) throw FileFormatError(path + ": write failed");
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileFormatError(path + ": cannot open");

    char magic[8] = {};
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw FileFormatError(path + ": not a snapshot file (bad magic)");
    const std::uint32_t version = get_u32(in, path, "version");
    if (version != kVersion)
        throw FileFormatError(path + ": unsupported snapshot version " + std::to_string(version));

    const std::uint32_t n_raw = get_u32(in, path, "resolution");
    if (n_raw < 4 || n_raw > 65536 || n_raw % 2 != 0)
        throw FileFormatError(path + ": implausible resolution " + std::to_string(n_raw));
    const double L = get_f64(in, path, "box size");
    if (!(L > 0.0) || !std::isfinite(L))
        throw FileFormatError(path + ": implausible box size");

    PhysParams p;
    p.nu = get_f64(in, path, "nu");
    p.kappa = get_f64(in, path, "kappa");
    p.a = get_f64(in, path, "a");
    p.alpha = get_f64(in, path, "alpha");
    try {
        p.validate();
    } catch (const Error& e) {
        throw FileFormatError(path + ": implausible parameters: " + e.what());
    }
    const double t = get_f64(in, path, "time");
    if (get_u32(in, path, "field count") != kFieldCount)
        throw FileFormatError(path + ": unexpected field count");
    if (get_u32(in, path, "layout") != kLayoutHalfComplex)
        throw FileFormatError(path + ": unknown coefficient layout");

    Snapshot snap(make_grid(static_cast<int>(n_raw), L));
    snap.params = p;
    snap.state.t = t;
    for (SpectralVectorField* f : {&snap.state.u, &snap.state.b})
        for (int d = 0; d < 3; ++d)
            if (!in.read(reinterpret_cast<char*>(f->c[d].data()),
                         static_cast<std::streamsize>(sizeof(Complex) * f->c[d].size())))
                throw FileFormatError(path + ": truncated coefficient block");
    char extra;
    if (in.read(&extra, 1)) throw FileFormatError(path + ": trailing data after coefficients");
    return snap;
}

void require_restart_match(const Snapshot& snap, const Grid& g, const PhysParams& p) {
    std::ostringstream bad;
    const auto mismatch = [&](const char* name, double have, double want) {
        if (have != want) bad << (bad.tellp() > 0 ? ", " : "") << name << " " << have
                              << " != " << want;
    };
    mismatch("N", snap.state.grid().N(), g.N());
    mismatch("L", snap.state.grid().L(), g.L());
    mismatch("nu", snap.params.nu, p.nu);
    mismatch("kappa", snap.params.kappa, p.kappa);
    mismatch("a", snap.params.a, p.a);
    mismatch("alpha", snap.params.alpha, p.alpha);
    if (bad.tellp() > 0)
        throw ParamMismatchError("snapshot does not match the requested run: " + bad.str());
}

TimeseriesWriter::TimeseriesWriter(const std::string& path, bool truncate) : path_(path) {
    if (!truncate) {
        // Appending to a foreign file would silently interleave columns;
        // demand the exact header before adding rows.
        std::ifstream probe(path);
        std::string first;
        if (probe && std::getline(probe, first)) {
            if (!first.empty() && first.back() == '\r') first.pop_back();
            if (first != kHeader)
                throw FileFormatError(path + ": existing header does not match the " +
                                      "time-series column set");
        }
    }
    const auto mode = std::ios::out | (truncate ? std::ios::trunc : std::ios::app);
    out_.open(path, mode);
    if (!out_) throw FileFormatError(path + ": cannot open for writing");
    if (out_.tellp() == 0) out_ << kHeader << "\n";
}

void TimeseriesWriter::append(const MonitorRecord& r) {
    out_ << fmt(r.t) << ',' << fmt(r.E) << ',' << fmt(r.grad_u_sq) << ',' << fmt(r.grad_b_sq)
         << ',' << fmt(r.u_damp_norm) << ',';
    if (r.b_crit_norm) out_ << fmt(*r.b_crit_norm);
    out_ << ',' << fmt(r.div_u_res) << ',' << fmt(r.div_b_res);
    for (int d = 0; d < 3; ++d) out_ << ',' << fmt(r.mean_u[d]);
    for (int d = 0; d < 3; ++d) out_ << ',' << fmt(r.mean_b[d]);
    out_ << '\n';
    if (!out_) throw FileFormatError(path_ + ": write failed");
}

void TimeseriesWriter::flush() { out_.flush(); }

std::vector<MonitorRecord> read_timeseries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileFormatError(path + ": cannot open");

    std::string line;
    if (!std::getline(in, line)) throw FileFormatError(path + ": empty file");
    if (line == std::string(kHeader) + "\r") line.pop_back();
    if (line != kHeader)
        throw FileFormatError(path + ": header does not match the monitor columns");

    std::vector<MonitorRecord> out;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> cells;
        std::string::size_type pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            cells.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (cells.size() != 14)
            throw FileFormatError(path + ":" + std::to_string(lineno) + ": expected 14 columns, got " +
                                  std::to_string(cells.size()));

        const auto num = [&](const std::string& cell, int col) {
            const char* s = cell.c_str();
            char* end = nullptr;
            const double v = std::strtod(s, &end);
            if (end == s || *end != '\0')
                throw FileFormatError(path + ":" + std::to_string(lineno) + ": column " +
                                      std::to_string(col + 1) + " is not a number: '" + cell + "'");
            return v;
        };

        MonitorRecord r;
        r.t = num(cells[0], 0);
        r.E = num(cells[1], 1);
        r.grad_u_sq = num(cells[2], 2);
        r.grad_b_sq = num(cells[3], 3);
        r.u_damp_norm = num(cells[4], 4);
        if (!cells[5].empty()) r.b_crit_norm = num(cells[5], 5);
        r.div_u_res = num(cells[6], 6);
        r.div_b_res = num(cells[7], 7);
        for (int d = 0; d < 3; ++d) r.mean_u[d] = num(cells[8 + d], 8 + d);
        for (int d = 0; d < 3; ++d) r.mean_b[d] = num(cells[11 + d], 11 + d);
        out.push_back(r);
    }
    return out;
}

}  // namespace mhdbfed
