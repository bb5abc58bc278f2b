#pragma once

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "atlas/familytree.hpp"
#include "atlas/geodesy.hpp"
#include "atlas/similarity.hpp"

namespace atlas {

// Tab-separated report writers. Floating point values use 6 significant
// digits; undefined values print as "NA".

/// `id<TAB>c` per language, then `mu<TAB>sigma<TAB>n_excluded`.
void EmitReport(std::ostream& out, const CorrelationReport& report);

/// `k<TAB>hit_rate` per k, then `n_eligible<TAB>N`.
void EmitReport(std::ostream& out, const TreeMetricReport& report);

/// Header `id nearby_family family nearby distance`, a `mean±std` summary
/// row, then up to `top` rows (0 = all).
void EmitReport(std::ostream& out, const OutlierReport& report, std::size_t top = 0);

/// Header `method k=...`, one row per method.
void EmitReport(std::ostream& out, const ZeroShotReport& report);

/// Header `source non_single percent families isolates`, one row.
void EmitReport(std::ostream& out, const std::string& source, const ForestStats& stats);

template <typename Report>
std::string FormatReport(const Report& report) {
  std::ostringstream ss;
  EmitReport(ss, report);
  return ss.str();
}

}  // namespace atlas
