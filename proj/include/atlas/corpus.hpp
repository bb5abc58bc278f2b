#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace atlas {

inline constexpr std::string_view kManifestHeader = "lingua-atlas-manifest v1";
inline constexpr int kDefaultSampleRate = 16000;

/// Tree sources recognised by the family-tree module.
inline constexpr std::string_view kEthnologue = "ethnologue";
inline constexpr std::string_view kWikipedia = "wikipedia";
inline constexpr std::string_view kGlottolog = "glottolog";

bool IsTreeSource(std::string_view name);
bool IsLanguageId(std::string_view id);

using ClassificationPath = std::vector<std::string>;

struct LanguageRecord {
  std::string id;
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
  /// Tree source name -> label path, root family first.
  std::map<std::string, ClassificationPath> classifications;
  std::optional<std::set<std::string>> phonemes;
};

enum class Split { kTrain, kTest };

std::string_view ToString(Split split);

struct UtteranceEntry {
  std::string language_id;
  /// Relative to the manifest's directory unless absolute.
  std::string path;
  Split split = Split::kTrain;
};

struct CorpusManifest {
  std::vector<LanguageRecord> languages;
  std::vector<UtteranceEntry> utterances;
  int sample_rate = kDefaultSampleRate;
  /// Directory relative utterance paths resolve against; not serialised.
  std::filesystem::path base_dir;

  const LanguageRecord* FindLanguage(std::string_view id) const;
  std::filesystem::path ResolveAudio(const UtteranceEntry& u) const;
  /// Language ids in lexicographic order.
  std::vector<std::string> SortedIds() const;
};

/// Throws atlas::Error (ParseError carries the line) on any violated invariant.
void ValidateManifest(const CorpusManifest& manifest);

CorpusManifest ParseManifest(std::string_view text, const std::filesystem::path& base_dir = {});
CorpusManifest LoadManifest(const std::filesystem::path& path);

/// Canonical text form; ParseManifest(FormatManifest(m)) == m.
std::string FormatManifest(const CorpusManifest& manifest);
void WriteManifest(const std::filesystem::path& path, const CorpusManifest& manifest);

/// Per-language stratified train/test assignment, deterministic in `seed`.
/// Each language keeps round(train_fraction * n) train utterances, clamped so
/// both splits are non-empty.
CorpusManifest SplitCorpus(const CorpusManifest& manifest, double train_fraction, std::uint64_t seed);

/// Phoneme inventory file: `id<TAB>phoneme<TAB>phoneme...` per line.
std::map<std::string, std::set<std::string>> ParsePhonemeInventories(std::string_view text);
std::map<std::string, std::set<std::string>> LoadPhonemeInventories(const std::filesystem::path& path);
void AttachPhonemes(CorpusManifest& manifest, const std::map<std::string, std::set<std::string>>& inventories);

// Synthetic corpus -----------------------------------------------------------

/// Planted geography: every language sits on one meridian, `positions_km`
/// measured as arc length north of `start_lat`.
struct GeoLayout {
  double longitude = 0.0;
  double start_lat = -10.0;
  std::vector<double> positions_km;

  static GeoLayout EvenlySpaced(int n_languages, double spacing_km);
  /// Default used by the generator: 150 km spacing, compressed to fit the meridian.
  static GeoLayout Default(int n_languages);
};

struct SyntheticOptions {
  int n_languages = 10;
  int utterances_per_language = 20;
  std::uint64_t seed = 0;
  GeoLayout layout;  // empty positions -> GeoLayout::Default
  int sample_rate = kDefaultSampleRate;
  double utterance_seconds = 0.5;
  double train_fraction = 0.9;
  /// Consecutive languages along the meridian share a family in blocks of this size.
  int family_size = 3;
};

/// Acoustic parameters that define one synthetic language.
struct DialectParams {
  double formants_hz[3];
  double amplitudes[3];
};

/// Parameters are an affine function of position along the layout, so
/// parameter distance is proportional to planted geographic distance.
std::vector<DialectParams> SyntheticDialects(const GeoLayout& layout);

/// Audio for one utterance; a pure function of its arguments.
std::vector<double> SynthesizeUtterance(const DialectParams& dialect, const SyntheticOptions& options,
                                        int language_index, int utterance_index);

/// Writes wav/<ID>_<NNN>.wav files and manifest.txt under `out_dir`;
/// returns the manifest (already split with options.train_fraction).
CorpusManifest GenerateSyntheticCorpus(const SyntheticOptions& options, const std::filesystem::path& out_dir);

/// In-memory variant without file output: manifest plus audio per utterance.
struct SyntheticCorpus {
  CorpusManifest manifest;
  std::vector<std::vector<double>> audio;  // parallel to manifest.utterances
};
SyntheticCorpus BuildSyntheticCorpus(const SyntheticOptions& options);

}  // namespace atlas
