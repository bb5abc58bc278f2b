#include "atlas/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

#include "atlas/error.hpp"
#include "atlas/familytree.hpp"
#include "atlas/geodesy.hpp"
#include "atlas/rng.hpp"
#include "atlas/text_io.hpp"
#include "atlas/wav.hpp"

namespace atlas {

bool IsTreeSource(std::string_view name) {
  return name == kEthnologue || name == kWikipedia || name == kGlottolog;
}

bool IsLanguageId(std::string_view id) {
  if (id.size() != 6) return false;
  return std::all_of(id.begin(), id.end(),
                     [](char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); });
}

std::string_view ToString(Split split) { return split == Split::kTrain ? "train" : "test"; }

const LanguageRecord* CorpusManifest::FindLanguage(std::string_view id) const {
  for (const auto& l : languages) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

std::filesystem::path CorpusManifest::ResolveAudio(const UtteranceEntry& u) const {
  const std::filesystem::path p(u.path);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::string> CorpusManifest::SortedIds() const {
  std::vector<std::string> ids;
  ids.reserve(languages.size());
  for (const auto& l : languages) ids.push_back(l.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

bool ValidLabel(std::string_view label) {
  return !label.empty() && text::Trim(label) == label &&
         label.find_first_of(",;=\t\n") == std::string_view::npos;
}

void ValidateLanguage(const LanguageRecord& l, std::size_t line) {
  if (!IsLanguageId(l.id)) {
    throw ParseError("language id '" + l.id + "' is not 6 uppercase alphanumerics", line);
  }
  if (l.name.empty()) throw ParseError("language " + l.id + " has an empty name", line);
  if (!(l.lat >= -90.0 && l.lat <= 90.0)) {
    throw ParseError("latitude " + text::FormatRoundTrip(l.lat) + " of " + l.id + " outside [-90, 90]", line);
  }
  if (!(l.lon >= -180.0 && l.lon <= 180.0)) {
    throw ParseError("longitude " + text::FormatRoundTrip(l.lon) + " of " + l.id + " outside [-180, 180]", line);
  }
  for (const auto& [source, path] : l.classifications) {
    if (source.empty() || source.find_first_of(",;=\t") != std::string::npos) {
      throw ParseError("invalid tree source name '" + source + "'", line);
    }
    if (path.empty()) throw ParseError("empty " + source + " classification for " + l.id, line);
    for (const auto& label : path) {
      if (!ValidLabel(label)) {
        throw ParseError("invalid label '" + label + "' in " + source + " classification of " + l.id, line);
      }
    }
  }
}

}  // namespace

void ValidateManifest(const CorpusManifest& manifest) {
  if (manifest.sample_rate <= 0) throw Error("sample rate must be positive");
  std::unordered_set<std::string> ids;
  for (const auto& l : manifest.languages) {
    ValidateLanguage(l, 0);
    if (!ids.insert(l.id).second) throw Error("duplicate language id " + l.id);
  }
  for (const auto& u : manifest.utterances) {
    if (!ids.count(u.language_id)) throw Error("utterance references undeclared language id " + u.language_id);
    if (u.path.empty()) throw Error("utterance of " + u.language_id + " has an empty path");
  }
}

CorpusManifest ParseManifest(std::string_view text, const std::filesystem::path& base_dir) {
  CorpusManifest m;
  m.base_dir = base_dir;
  const auto lines = text::Split(text, '\n');
  if (lines.empty() || text::Trim(lines[0]) != kManifestHeader) {
    throw ParseError("expected header '" + std::string(kManifestHeader) + "'", 1);
  }
  std::unordered_set<std::string> ids;
  bool seen_rate = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::Split(line, '\t');
    if (f[0] == "R") {
      long long rate = 0;
      if (f.size() != 2 || !text::ParseInt(f[1], rate) || rate <= 0) {
        throw ParseError("sample-rate line must be 'R<TAB>positive integer'", lineno);
      }
      if (seen_rate) throw ParseError("duplicate sample-rate line", lineno);
      if (!m.languages.empty() || !m.utterances.empty()) {
        throw ParseError("sample-rate line must precede language lines", lineno);
      }
      seen_rate = true;
      m.sample_rate = static_cast<int>(rate);
    } else if (f[0] == "L") {
      if (f.size() != 6) throw ParseError("language line needs 6 tab-separated fields", lineno);
      if (!m.utterances.empty()) throw ParseError("language line after utterance lines", lineno);
      LanguageRecord l;
      l.id = std::string(f[1]);
      l.name = std::string(f[2]);
      if (!text::ParseDouble(f[3], l.lat)) throw ParseError("bad latitude '" + std::string(f[3]) + "'", lineno);
      if (!text::ParseDouble(f[4], l.lon)) throw ParseError("bad longitude '" + std::string(f[4]) + "'", lineno);
      if (!f[5].empty()) {
        for (std::string_view entry : text::Split(f[5], ';')) {
          const auto eq = entry.find('=');
          if (eq == std::string_view::npos || eq == 0) {
            throw ParseError("classification entry '" + std::string(entry) + "' is not source=path", lineno);
          }
          const std::string source(entry.substr(0, eq));
          if (l.classifications.count(source)) {
            throw ParseError("duplicate classification source '" + source + "'", lineno);
          }
          try {
            l.classifications[source] = ParseClassification(entry.substr(eq + 1));
          } catch (const ParseError& e) {
            throw ParseError(source + " classification of " + l.id + ": " + e.what(), lineno);
          }
        }
      }
      ValidateLanguage(l, lineno);
      if (!ids.insert(l.id).second) throw ParseError("duplicate language id " + l.id, lineno);
      m.languages.push_back(std::move(l));
    } else if (f[0] == "U") {
      if (f.size() != 4) throw ParseError("utterance line needs 4 tab-separated fields", lineno);
      UtteranceEntry u;
      u.language_id = std::string(f[1]);
      if (!ids.count(u.language_id)) {
        throw ParseError("utterance references undeclared language id " + u.language_id, lineno);
      }
      u.path = std::string(f[2]);
      if (u.path.empty()) throw ParseError("empty audio path", lineno);
      if (f[3] == "train") {
        u.split = Split::kTrain;
      } else if (f[3] == "test") {
        u.split = Split::kTest;
      } else {
        throw ParseError("split must be 'train' or 'test', got '" + std::string(f[3]) + "'", lineno);
      }
      m.utterances.push_back(std::move(u));
    } else {
      throw ParseError("unknown record type '" + std::string(f[0]) + "'", lineno);
    }
  }
  return m;
}

CorpusManifest LoadManifest(const std::filesystem::path& path) {
  const std::string text = text::ReadFile(path);
  try {
    return ParseManifest(text, path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line(), e.column());
  }
}

std::string FormatManifest(const CorpusManifest& m) {
  std::string out(kManifestHeader);
  out += "\nR\t" + std::to_string(m.sample_rate) + "\n";
  for (const auto& l : m.languages) {
    out += "L\t" + l.id + "\t" + l.name + "\t" + text::FormatRoundTrip(l.lat) + "\t" +
           text::FormatRoundTrip(l.lon) + "\t";
    bool first = true;
    for (const auto& [source, path] : l.classifications) {
      if (!first) out += ';';
      first = false;
      out += source + "=" + JoinClassification(path);
    }
    out += '\n';
  }
  for (const auto& u : m.utterances) {
    out += "U\t" + u.language_id + "\t" + u.path + "\t" + std::string(ToString(u.split)) + "\n";
  }
  return out;
}

void WriteManifest(const std::filesystem::path& path, const CorpusManifest& manifest) {
  text::WriteFile(path, FormatManifest(manifest));
}

CorpusManifest SplitCorpus(const CorpusManifest& manifest, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw RangeError("train fraction must lie strictly between 0 and 1");
  }
  CorpusManifest out = manifest;
  std::unordered_map<std::string, std::vector<std::size_t>> by_language;
  for (std::size_t i = 0; i < out.utterances.size(); ++i) {
    by_language[out.utterances[i].language_id].push_back(i);
  }
  Rng rng(MixSeed(seed, 0x51ULL));
  for (const auto& l : out.languages) {
    auto& idx = by_language[l.id];
    const auto n = static_cast<long long>(idx.size());
    if (n < 2) {
      throw Error("language " + l.id + " has " + std::to_string(n) +
                  " utterance(s); at least 2 are needed for a train/test split");
    }
    const long long n_train =
        std::clamp(static_cast<long long>(std::llround(train_fraction * static_cast<double>(n))), 1LL, n - 1);
    rng.Shuffle(idx);
    for (long long j = 0; j < n; ++j) {
      out.utterances[idx[static_cast<std::size_t>(j)]].split = j < n_train ? Split::kTrain : Split::kTest;
    }
  }
  return out;
}

std::map<std::string, std::set<std::string>> ParsePhonemeInventories(std::string_view text) {
  std::map<std::string, std::set<std::string>> out;
  const auto lines = text::Split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::Split(line, '\t');
    const std::string id(f[0]);
    if (!IsLanguageId(id)) throw ParseError("bad language id '" + id + "'", i + 1);
    std::set<std::string> phonemes;
    for (std::size_t j = 1; j < f.size(); ++j) {
      if (f[j].empty()) continue;
      phonemes.emplace(f[j]);
    }
    if (phonemes.empty()) throw ParseError("empty phoneme inventory for " + id, i + 1);
    if (!out.emplace(id, std::move(phonemes)).second) throw ParseError("duplicate inventory for " + id, i + 1);
  }
  return out;
}

std::map<std::string, std::set<std::string>> LoadPhonemeInventories(const std::filesystem::path& path) {
  try {
    return ParsePhonemeInventories(text::ReadFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line(), e.column());
  }
}

void AttachPhonemes(CorpusManifest& manifest, const std::map<std::string, std::set<std::string>>& inventories) {
  for (const auto& [id, phonemes] : inventories) {
    bool found = false;
    for (auto& l : manifest.languages) {
      if (l.id == id) {
        l.phonemes = phonemes;
        found = true;
      }
    }
    if (!found) throw Error("phoneme inventory for undeclared language id " + id);
  }
}

// Synthetic corpus -----------------------------------------------------------

namespace {

constexpr double kKmPerDegree = kEarthRadiusKm * std::numbers::pi / 180.0;

// Formant ranges swept along the layout, low end first.
constexpr double kFormantLo[3] = {300.0, 1000.0, 2600.0};
constexpr double kFormantHi[3] = {900.0, 2400.0, 4200.0};
constexpr double kFormantAmp[3] = {0.30, 0.20, 0.12};

std::string SyntheticId(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "SYN%03d", index);
  return buf;
}

std::string Padded(int value, int width) {
  std::string s = std::to_string(value);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

void CheckOptions(const SyntheticOptions& o) {
  if (o.n_languages < 2) throw RangeError("synthetic corpus needs at least 2 languages");
  if (o.n_languages > 1000) throw RangeError("synthetic corpus supports at most 1000 languages");
  if (o.utterances_per_language < 4) throw RangeError("synthetic corpus needs at least 4 utterances per language");
  if (o.sample_rate < 8000) throw RangeError("synthetic sample rate must be at least 8000 Hz");
  if (!(o.utterance_seconds >= 0.1)) throw RangeError("synthetic utterances must last at least 0.1 s");
  if (o.family_size < 1) throw RangeError("family size must be positive");
  if (!o.layout.positions_km.empty() && static_cast<int>(o.layout.positions_km.size()) != o.n_languages) {
    throw InvalidArgument("geo layout has " + std::to_string(o.layout.positions_km.size()) + " positions for " +
                          std::to_string(o.n_languages) + " languages");
  }
}

}  // namespace

GeoLayout GeoLayout::EvenlySpaced(int n_languages, double spacing_km) {
  GeoLayout g;
  g.positions_km.reserve(static_cast<std::size_t>(n_languages));
  for (int i = 0; i < n_languages; ++i) g.positions_km.push_back(spacing_km * i);
  const double span_deg = spacing_km * std::max(0, n_languages - 1) / kKmPerDegree;
  g.start_lat = -span_deg / 2.0;
  return g;
}

GeoLayout GeoLayout::Default(int n_languages) {
  const double spacing = n_languages > 1 ? std::min(150.0, 18000.0 / (n_languages - 1)) : 150.0;
  return EvenlySpaced(n_languages, spacing);
}

std::vector<DialectParams> SyntheticDialects(const GeoLayout& layout) {
  const auto& pos = layout.positions_km;
  if (pos.empty()) return {};
  const auto [lo, hi] = std::minmax_element(pos.begin(), pos.end());
  const double span = *hi - *lo;
  std::vector<DialectParams> out;
  out.reserve(pos.size());
  for (double p : pos) {
    const double u = span > 0.0 ? (p - *lo) / span : 0.0;
    DialectParams d{};
    for (int k = 0; k < 3; ++k) {
      d.formants_hz[k] = kFormantLo[k] + (kFormantHi[k] - kFormantLo[k]) * u;
      d.amplitudes[k] = kFormantAmp[k];
    }
    out.push_back(d);
  }
  return out;
}

std::vector<double> SynthesizeUtterance(const DialectParams& dialect, const SyntheticOptions& options,
                                        int language_index, int utterance_index) {
  Rng rng(MixSeed(MixSeed(options.seed, static_cast<std::uint64_t>(language_index)),
                  static_cast<std::uint64_t>(utterance_index)));
  const double sr = options.sample_rate;
  const double seconds = options.utterance_seconds * rng.Uniform(0.8, 1.2);
  const auto n = static_cast<std::size_t>(seconds * sr);
  const double gain = rng.Uniform(0.5, 1.0);
  double freq[3], amp[3], phase[3];
  for (int k = 0; k < 3; ++k) {
    freq[k] = dialect.formants_hz[k] * (1.0 + 0.01 * rng.Normal());
    amp[k] = dialect.amplitudes[k] * rng.Uniform(0.8, 1.2);
    phase[k] = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  }
  const double env_rate = rng.Uniform(3.0, 6.0);
  const double env_phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<double> out(n);
  double pink = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += amp[k] * std::sin(2.0 * std::numbers::pi * freq[k] * t + phase[k]);
    const double env = 0.7 + 0.3 * std::sin(2.0 * std::numbers::pi * env_rate * t + env_phase);
    // one-pole low-passed white noise
    pink = 0.95 * pink + 0.01 * rng.Normal();
    out[i] = gain * env * s + pink;
  }
  return out;
}

SyntheticCorpus BuildSyntheticCorpus(const SyntheticOptions& options) {
  CheckOptions(options);
  const GeoLayout layout = options.layout.positions_km.empty() ? GeoLayout::Default(options.n_languages)
                                                                : options.layout;
  const auto dialects = SyntheticDialects(layout);
  SyntheticCorpus corpus;
  CorpusManifest& m = corpus.manifest;
  m.sample_rate = options.sample_rate;
  for (int i = 0; i < options.n_languages; ++i) {
    LanguageRecord l;
    l.id = SyntheticId(i);
    l.name = "Synthetic " + std::to_string(i);
    l.lat = layout.start_lat + layout.positions_km[static_cast<std::size_t>(i)] / kKmPerDegree;
    l.lon = layout.longitude;
    if (!(l.lat >= -90.0 && l.lat <= 90.0)) {
      throw RangeError("geo layout places " + l.id + " at latitude " + text::FormatRoundTrip(l.lat));
    }
    const int family = i / options.family_size + 1;
    const int member = i % options.family_size;
    const std::string fam = "Family " + std::to_string(family);
    const std::string branch = "Branch " + std::to_string(family) + "." + std::to_string(member / 2 + 1);
    l.classifications[std::string(kEthnologue)] = {fam, branch};
    l.classifications[std::string(kWikipedia)] = {fam};
    l.classifications[std::string(kGlottolog)] = {fam, branch, "Sub " + std::to_string(family) + "." +
                                                                   std::to_string(member + 1)};
    m.languages.push_back(std::move(l));
  }
  for (int i = 0; i < options.n_languages; ++i) {
    for (int u = 0; u < options.utterances_per_language; ++u) {
      UtteranceEntry e;
      e.language_id = m.languages[static_cast<std::size_t>(i)].id;
      e.path = "wav/" + e.language_id + "_" + Padded(u, 3) + ".wav";
      m.utterances.push_back(e);
      corpus.audio.push_back(SynthesizeUtterance(dialects[static_cast<std::size_t>(i)], options, i, u));
    }
  }
  m = SplitCorpus(m, options.train_fraction, options.seed);
  return corpus;
}

CorpusManifest GenerateSyntheticCorpus(const SyntheticOptions& options, const std::filesystem::path& out_dir) {
  SyntheticCorpus corpus = BuildSyntheticCorpus(options);
  corpus.manifest.base_dir = out_dir;
  for (std::size_t i = 0; i < corpus.audio.size(); ++i) {
    WriteWav(out_dir / corpus.manifest.utterances[i].path, corpus.audio[i], options.sample_rate);
  }
  WriteManifest(out_dir / "manifest.txt", corpus.manifest);
  return corpus.manifest;
}

}  // namespace atlas
