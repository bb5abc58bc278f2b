#include "atlas/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "atlas/error.hpp"
#include "atlas/geodesy.hpp"
#include "atlas/text_io.hpp"
#include "atlas/wav.hpp"

namespace atlas {

OutlierReport ComputeOutlierReport(const DistanceMatrix& emb, const DistanceMatrix& geo, const FamilyForest& forest,
                                   double radius_km) {
  if (!(radius_km > 0.0)) throw RangeError("radius must be positive");
  if (!emb.SameIds(geo)) throw InvalidArgument("embedding and geographic matrices cover different languages");
  for (const auto& id : forest.Languages()) {
    if (!emb.Contains(id)) throw InvalidArgument("language " + id + " has no embedding");
  }
  OutlierReport report;
  report.radius_km = radius_km;
  for (const auto& id : forest.NonSingleLanguages()) {
    OutlierRow row;
    row.id = id;
    const auto members = forest.FamilyMembers(id);
    row.n_family = members.size();
    double sum = 0.0;
    for (const auto& m : members) {
      sum += emb.Between(id, m);
      if (geo.Between(id, m) < radius_km) ++row.n_nearby_family;
    }
    row.mean_family_distance = sum / static_cast<double>(members.size());
    const std::size_t gi = geo.IndexOf(id);
    for (std::size_t j = 0; j < geo.size(); ++j) {
      if (j != gi && geo(gi, j) < radius_km) ++row.n_nearby;
    }
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const OutlierRow& a, const OutlierRow& b) {
    if (a.mean_family_distance != b.mean_family_distance) return a.mean_family_distance > b.mean_family_distance;
    return a.id < b.id;
  });
  const auto summarize = [&report](auto column) {
    std::vector<double> values;
    for (const auto& r : report.rows) values.push_back(column(r));
    const auto [mean, std] = MeanAndSampleStd(values);
    return ColumnSummary{mean, std};
  };
  report.nearby_family = summarize([](const OutlierRow& r) { return static_cast<double>(r.n_nearby_family); });
  report.family = summarize([](const OutlierRow& r) { return static_cast<double>(r.n_family); });
  report.nearby = summarize([](const OutlierRow& r) { return static_cast<double>(r.n_nearby); });
  report.distance = summarize([](const OutlierRow& r) { return r.mean_family_distance; });
  return report;
}

PhonemeSpace BuildPhonemeVectors(const std::map<std::string, std::set<std::string>>& inventories) {
  if (inventories.empty()) throw InvalidArgument("no phoneme inventories");
  std::set<std::string> all;
  for (const auto& [id, inv] : inventories) {
    if (inv.empty()) throw InvalidArgument("empty phoneme inventory for " + id);
    all.insert(inv.begin(), inv.end());
  }
  PhonemeSpace space;
  space.alphabet.assign(all.begin(), all.end());
  for (const auto& [id, inv] : inventories) {
    PhonemeVector v;
    v.language_id = id;
    v.bits.reserve(space.alphabet.size());
    for (const auto& p : space.alphabet) v.bits.push_back(inv.count(p) ? 1 : 0);
    space.vectors.push_back(std::move(v));
  }
  return space;
}

DistanceMatrix PhonemeDistances(const PhonemeSpace& space) {
  std::map<std::string, Eigen::VectorXd> vectors;
  for (const auto& v : space.vectors) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.bits.size()));
    for (std::size_t i = 0; i < v.bits.size(); ++i) x(static_cast<Eigen::Index>(i)) = v.bits[i];
    vectors.emplace(v.language_id, std::move(x));
  }
  if (vectors.size() < 2) throw InvalidArgument("phoneme distances need at least 2 inventories");
  std::vector<std::string> ids;
  for (const auto& [id, x] : vectors) ids.push_back(id);
  const auto n = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = (vectors[ids[static_cast<std::size_t>(i)]] - vectors[ids[static_cast<std::size_t>(j)]]).norm();
    }
  }
  return DistanceMatrix(std::move(ids), std::move(d), DistanceKind::kPhoneme);
}

std::string_view ToString(NeighborMethod method) {
  switch (method) {
    case NeighborMethod::kEmbedding: return "emb";
    case NeighborMethod::kGeographic: return "geo";
    case NeighborMethod::kPhoneme: return "ph";
  }
  return "unknown";
}

NeighborMethod ParseNeighborMethod(std::string_view name) {
  if (name == "emb" || name == "embedding") return NeighborMethod::kEmbedding;
  if (name == "geo" || name == "geographic") return NeighborMethod::kGeographic;
  if (name == "ph" || name == "phoneme" || name == "phonemes") return NeighborMethod::kPhoneme;
  throw InvalidArgument("unknown neighbour method '" + std::string(name) + "' (expected emb, geo or ph)");
}

std::string SelectNeighbor(NeighborMethod method, const DistanceMatrix& matrix, std::string_view id, std::size_t k) {
  const DistanceKind expected = method == NeighborMethod::kEmbedding    ? DistanceKind::kEmbedding
                                : method == NeighborMethod::kGeographic ? DistanceKind::kGeographic
                                                                        : DistanceKind::kPhoneme;
  if (matrix.kind() != expected) {
    throw InvalidArgument("method " + std::string(ToString(method)) + " needs a " + std::string(ToString(expected)) +
                          " matrix, got " + std::string(ToString(matrix.kind())));
  }
  if (method == NeighborMethod::kPhoneme && !matrix.Contains(id)) {
    throw InvalidArgument("language " + std::string(id) + " has no phoneme inventory");
  }
  return NearestNeighbors(matrix, id, k).back();
}

std::vector<std::string> SelectTargets(const FamilyForest& forest, std::size_t count) {
  auto ids = forest.NonSingleLanguages();
  std::stable_sort(ids.begin(), ids.end(), [&forest](const std::string& a, const std::string& b) {
    return forest.FamilySize(a) > forest.FamilySize(b);
  });
  if (ids.size() > count) ids.resize(count);
  return ids;
}

std::vector<ScoringPair> ParseScoringPairs(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<ScoringPair> out;
  const auto lines = text::Split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::Split(line, '\t');
    if (f.size() != 6) throw ParseError("pair line needs 6 tab-separated fields", i + 1);
    ScoringPair p;
    p.method = std::string(f[0]);
    long long k = 0;
    if (!text::ParseInt(f[1], k) || k < 1) throw ParseError("k must be a positive integer", i + 1);
    p.k = static_cast<std::size_t>(k);
    p.target_id = std::string(f[2]);
    p.neighbor_id = std::string(f[3]);
    const auto resolve = [&base_dir](std::string_view s) {
      const std::filesystem::path path{std::string(s)};
      return path.is_absolute() ? path : base_dir / path;
    };
    p.target_dir = resolve(f[4]);
    p.neighbor_dir = resolve(f[5]);
    if (p.method.empty()) throw ParseError("empty method name", i + 1);
    out.push_back(std::move(p));
  }
  if (out.empty()) throw ParseError("no scoring pairs", 0);
  return out;
}

std::vector<ScoringPair> LoadScoringPairs(const std::filesystem::path& path) {
  try {
    return ParseScoringPairs(text::ReadFile(path), path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line(), e.column());
  }
}

std::vector<std::filesystem::path> ListWavFiles(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("audio directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

MelCepstrum CepstrumOf(const std::filesystem::path& wav, const ZeroShotOptions& options,
                       std::unordered_map<std::string, MelCepstrum>& cache) {
  const auto it = cache.find(wav.string());
  if (it != cache.end()) return it->second;
  const Audio audio = ReadWav(wav);
  const MelSpectrogram spec = ComputeMelSpectrogram(audio.samples, audio.sample_rate, options.mel);
  MelCepstrum cep = ComputeMelCepstrum(spec, options.order);
  cache.emplace(wav.string(), cep);
  return cep;
}

}  // namespace

ZeroShotReport ScoreZeroShot(const std::vector<ScoringPair>& pairs, const ZeroShotOptions& options) {
  ZeroShotReport report;
  std::unordered_map<std::string, MelCepstrum> cache;
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> cell_values;
  for (const auto& p : pairs) {
    auto targets = ListWavFiles(p.target_dir);
    auto neighbors = ListWavFiles(p.neighbor_dir);
    if (options.max_utterances > 0) {
      if (targets.size() > options.max_utterances) targets.resize(options.max_utterances);
      if (neighbors.size() > options.max_utterances) neighbors.resize(options.max_utterances);
    }
    if (targets.size() != neighbors.size()) {
      throw Error("pair " + p.target_id + "/" + p.neighbor_id + ": " + std::to_string(targets.size()) +
                  " target utterances vs " + std::to_string(neighbors.size()) + " neighbour utterances");
    }
    if (targets.empty()) throw Error("pair " + p.target_id + "/" + p.neighbor_id + " has no utterances");
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      sum += MelCepstralDistortion(CepstrumOf(targets[i], options, cache), CepstrumOf(neighbors[i], options, cache));
    }
    PairScore score{p, targets.size(), sum / static_cast<double>(targets.size())};
    if (std::find(report.methods.begin(), report.methods.end(), p.method) == report.methods.end()) {
      report.methods.push_back(p.method);
    }
    if (std::find(report.k_values.begin(), report.k_values.end(), p.k) == report.k_values.end()) {
      report.k_values.push_back(p.k);
    }
    cell_values[{p.method, p.k}].push_back(score.mean_mcd);
    report.pairs.push_back(std::move(score));
  }
  std::sort(report.k_values.begin(), report.k_values.end());
  for (const auto& [key, values] : cell_values) {
    double s = 0.0;
    for (double v : values) s += v;
    report.cells[key] = s / static_cast<double>(values.size());
  }
  return report;
}

}  // namespace atlas
