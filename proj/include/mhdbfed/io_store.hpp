#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "mhdbfed/diagnostics.hpp"
#include "mhdbfed/state.hpp"

namespace mhdbfed {

/// Binary state snapshot: an 8-byte magic, a fixed little-endian header
/// (version, N, L, nu, kappa, a, alpha, t, field count, coefficient layout),
/// then the raw (re, im) f64 coefficient pairs of u and b in storage order.
/// Round trips are bit exact.
struct Snapshot {
    State state;
    PhysParams params;
    explicit Snapshot(const Grid& g) : state(g) {}
};

void write_snapshot(const std::string& path, const State& s, const PhysParams& p);
Snapshot read_snapshot(const std::string& path);

/// Restart guard: the snapshot must carry the same resolution, box, and
/// physical parameters the caller is about to continue with.  Throws
/// ParamMismatchError naming every disagreeing entry.
void require_restart_match(const Snapshot& snap, const Grid& g, const PhysParams& p);

/// Appending CSV writer for monitor records.  The header is written when the
/// file starts out empty; values carry 17 significant digits so the series
/// reproduces the in-memory doubles exactly.  b_crit_norm renders as an empty
/// field when absent (alpha = 0).
class TimeseriesWriter {
  public:
    explicit TimeseriesWriter(const std::string& path, bool truncate = true);
    void append(const MonitorRecord& r);
    void flush();

  private:
    std::ofstream out_;
    std::string path_;
};

/// Reads a CSV written by TimeseriesWriter; the header line must match the
/// writer's columns exactly.  Malformed rows report their line number.
std::vector<MonitorRecord> read_timeseries(const std::string& path);

}  // namespace mhdbfed
