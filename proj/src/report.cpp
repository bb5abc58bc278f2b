#include "atlas/report.hpp"

#include <cmath>

#include "atlas/text_io.hpp"

namespace atlas {
namespace {

std::string Num(double v) { return std::isfinite(v) ? text::FormatSig6(v) : "NA"; }

std::string MeanStd(const ColumnSummary& s) { return Num(s.mean) + "±" + Num(s.std); }

}  // namespace

void EmitReport(std::ostream& out, const CorrelationReport& report) {
  for (const auto& [id, c] : report.per_language) out << id << '\t' << (c ? Num(*c) : "NA") << '\n';
  out << Num(report.mu) << '\t' << Num(report.sigma) << '\t' << report.n_excluded << '\n';
}

void EmitReport(std::ostream& out, const TreeMetricReport& report) {
  for (std::size_t i = 0; i < report.k_values.size(); ++i) {
    out << report.k_values[i] << '\t' << Num(report.hit_rate[i]) << '\n';
  }
  out << "n_eligible\t" << report.n_eligible << '\n';
}

void EmitReport(std::ostream& out, const OutlierReport& report, std::size_t top) {
  out << "id\tnearby_family\tfamily\tnearby\tdistance\n";
  out << "mean±std\t" << MeanStd(report.nearby_family) << '\t' << MeanStd(report.family) << '\t'
      << MeanStd(report.nearby) << '\t' << MeanStd(report.distance) << '\n';
  const std::size_t n = top == 0 ? report.rows.size() : std::min(top, report.rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = report.rows[i];
    out << r.id << '\t' << r.n_nearby_family << '\t' << r.n_family << '\t' << r.n_nearby << '\t'
        << Num(r.mean_family_distance) << '\n';
  }
}

void EmitReport(std::ostream& out, const ZeroShotReport& report) {
  out << "method";
  for (std::size_t k : report.k_values) out << "\tk=" << k;
  out << '\n';
  for (const auto& method : report.methods) {
    out << method;
    for (std::size_t k : report.k_values) {
      const auto it = report.cells.find({method, k});
      out << '\t' << (it == report.cells.end() ? "NA" : Num(it->second));
    }
    out << '\n';
  }
}

void EmitReport(std::ostream& out, const std::string& source, const ForestStats& stats) {
  out << "source\tnon_single\tpercent\tfamilies\tisolates\n";
  out << source << '\t' << stats.n_non_single << '\t' << Num(stats.non_single_percent) << '\t' << stats.n_families
      << '\t' << stats.n_isolates << '\n';
}

}  // namespace atlas
