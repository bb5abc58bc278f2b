#pragma once

// Shared fixtures and reference implementations for the test binaries. The
// references are deliberately naive: plain loops, no Eigen expressions, no
// shortcuts shared with the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "atlas/corpus.hpp"
#include "atlas/distance.hpp"

namespace atlas::testing {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("atlas-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string Id(int i) {
  std::string s = "L" + std::to_string(i);
  while (s.size() < 6) s.insert(1, "0");
  return s;
}

inline std::vector<std::string> Ids(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(Id(i));
  return ids;
}

/// Symmetric zero-diagonal matrix with entries uniform in [lo, hi).
inline Eigen::MatrixXd RandomDistances(std::mt19937_64& rng, int n, double lo = 0.0, double hi = 10.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = u(rng);
  }
  return d;
}

/// Same as RandomDistances but drawn from few distinct values so ties occur.
inline Eigen::MatrixXd TiedDistances(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> u(1, 3);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = u(rng);
  }
  return d;
}

// Reference implementations ------------------------------------------------

inline std::optional<double> OraclePearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  bool x_const = true, y_const = true;
  for (std::size_t i = 1; i < n; ++i) {
    x_const = x_const && x[i] == x[0];
    y_const = y_const && y[i] == y[0];
  }
  if (x_const || y_const) return std::nullopt;
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

/// Sorts every other id by (distance, id) and keeps the first k.
inline std::vector<std::string> OracleNeighbors(const std::vector<std::string>& ids, const Eigen::MatrixXd& d,
                                                const std::string& id, std::size_t k) {
  std::size_t q = 0;
  while (ids[q] != id) ++q;
  std::vector<std::pair<double, std::string>> all;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (j != q) all.emplace_back(d(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(j)), ids[j]);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(all[i].second);
  return out;
}

/// Haversine written out from the textbook formula in degrees.
inline double OracleHaversine(double lat1, double lon1, double lat2, double lon2) {
  const double r = 6371.0088;
  const double to_rad = std::numbers::pi / 180.0;
  const double dphi = (lat2 - lat1) * to_rad;
  const double dlambda = (lon2 - lon1) * to_rad;
  const double a = std::pow(std::sin(dphi / 2), 2) +
                   std::cos(lat1 * to_rad) * std::cos(lat2 * to_rad) * std::pow(std::sin(dlambda / 2), 2);
  return 2 * r * std::asin(std::min(1.0, std::sqrt(a)));
}

/// Orthonormal DCT-II by direct summation.
inline std::vector<double> OracleDct(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * std::cos(std::numbers::pi * (i + 0.5) * k / n);
    const double w = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    out[k] = static_cast<double>(w * s);
  }
  return out;
}

/// Textbook O(T^2) DTW table over L2 costs of coefficients 1..D. Ties in
/// cost go to the shorter path. Returns 10*sqrt(2)/ln(10) * cost / length.
inline double OracleMcd(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  const std::size_t n = a.size(), m = b.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> cost(n + 1, std::vector<double>(m + 1, inf));
  std::vector<std::vector<std::size_t>> len(n + 1, std::vector<std::size_t>(m + 1, 0));
  cost[0][0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      double local = 0.0;
      for (std::size_t c = 1; c < a[i - 1].size(); ++c) {
        const double diff = a[i - 1][c] - b[j - 1][c];
        local += diff * diff;
      }
      local = std::sqrt(local);
      double best = inf;
      std::size_t best_len = 0;
      const std::pair<std::size_t, std::size_t> preds[3] = {{i - 1, j - 1}, {i - 1, j}, {i, j - 1}};
      for (const auto& [pi, pj] : preds) {
        const double c = cost[pi][pj];
        if (c < best || (c == best && len[pi][pj] < best_len)) {
          best = c;
          best_len = len[pi][pj];
        }
      }
      cost[i][j] = best + local;
      len[i][j] = best_len + 1;
    }
  }
  const double scale = 10.0 * std::sqrt(2.0) / std::log(10.0);
  return scale * cost[n][m] / static_cast<double>(len[n][m]);
}

/// Exhaustive search over every monotone contiguous path; tiny inputs only.
inline double BruteForceMcd(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  const double inf = std::numeric_limits<double>::infinity();
  double best_cost = inf;
  std::size_t best_len = 0;
  const auto local = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 1; c < a[i].size(); ++c) s += (a[i][c] - b[j][c]) * (a[i][c] - b[j][c]);
    return std::sqrt(s);
  };
  const auto walk = [&](auto&& self, std::size_t i, std::size_t j, double cost, std::size_t len) -> void {
    cost += local(i, j);
    ++len;
    if (i + 1 == a.size() && j + 1 == b.size()) {
      if (cost < best_cost || (cost == best_cost && len < best_len)) {
        best_cost = cost;
        best_len = len;
      }
      return;
    }
    if (i + 1 < a.size() && j + 1 < b.size()) self(self, i + 1, j + 1, cost, len);
    if (i + 1 < a.size()) self(self, i + 1, j, cost, len);
    if (j + 1 < b.size()) self(self, i, j + 1, cost, len);
  };
  walk(walk, 0, 0, 0.0, 0);
  return 10.0 * std::sqrt(2.0) / std::log(10.0) * best_cost / static_cast<double>(best_len);
}

inline LanguageRecord Language(const std::string& id, double lat, double lon,
                               std::map<std::string, ClassificationPath> classes = {}) {
  LanguageRecord r;
  r.id = id;
  r.name = id;
  r.lat = lat;
  r.lon = lon;
  r.classifications = std::move(classes);
  return r;
}

}  // namespace atlas::testing
