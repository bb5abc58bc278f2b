#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace atlas {

inline constexpr int kMelBins = 80;
inline constexpr double kPowerFloor = 1e-10;
inline constexpr int kDefaultMcdOrder = 24;
/// 10 * sqrt(2) / ln(10): converts cepstral Euclidean distance to dB.
inline constexpr double kMcdScale = 6.141851463713754;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct MelConfig {
  double window_seconds = 0.025;
  double hop_seconds = 0.010;
  int fft_size = 1024;
  double fmin_hz = 20.0;
  double fmax_hz = 7600.0;
};

/// T x 80 natural-log mel energies.
struct MelSpectrogram {
  RowMatrix frames;
  double frame_shift = 0.0;
  std::optional<std::string> language_id;

  Eigen::Index num_frames() const { return frames.rows(); }
};

/// T x (order + 1) mel-cepstral coefficients c0..c_order.
struct MelCepstrum {
  RowMatrix frames;
  int order = 0;
};

double HzToMel(double hz);
double MelToHz(double mel);

/// Triangular HTK-style bank: weights computed on the mel axis, one row per
/// filter over fft_size / 2 + 1 bins.
class MelFilterbank {
 public:
  MelFilterbank(int sample_rate, int fft_size, double fmin_hz, double fmax_hz, int n_filters = kMelBins);

  const RowMatrix& weights() const { return weights_; }
  /// Centre frequency of each filter in Hz.
  const std::vector<double>& centers_hz() const { return centers_hz_; }

 private:
  RowMatrix weights_;
  std::vector<double> centers_hz_;
};

/// Frame count for `num_samples` with the given window and hop (in samples).
Eigen::Index NumFrames(std::size_t num_samples, std::size_t window, std::size_t hop);

/// Log-mel front end with its FFT plan and filterbank prepared once.
class MelExtractor {
 public:
  MelExtractor(int sample_rate, const MelConfig& config = {});
  ~MelExtractor();
  MelExtractor(const MelExtractor&) = delete;
  MelExtractor& operator=(const MelExtractor&) = delete;

  MelSpectrogram Compute(std::span<const double> audio) const;

  int sample_rate() const { return sample_rate_; }
  std::size_t window_samples() const { return window_; }
  std::size_t hop_samples() const { return hop_; }
  const MelFilterbank& filterbank() const { return filterbank_; }

 private:
  struct Plan;

  int sample_rate_;
  MelConfig config_;
  std::size_t window_;
  std::size_t hop_;
  std::vector<double> hann_;
  MelFilterbank filterbank_;
  Plan* plan_;
};

MelSpectrogram ComputeMelSpectrogram(std::span<const double> audio, int sample_rate, const MelConfig& config = {});

/// Orthonormal DCT-II of every frame, truncated to coefficients 0..order.
MelCepstrum ComputeMelCepstrum(const MelSpectrogram& spec, int order = kDefaultMcdOrder);

/// DTW-aligned mel-cepstral distortion in dB. c0 is excluded from the local
/// cost. Among minimum-cost paths the shortest is taken, which keeps the
/// result exactly symmetric in its arguments.
double MelCepstralDistortion(const MelCepstrum& a, const MelCepstrum& b);

struct DtwAlignment {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> path;
  double total_cost = 0.0;
};

/// Alignment used by MelCepstralDistortion, exposed for inspection.
DtwAlignment AlignCepstra(const MelCepstrum& a, const MelCepstrum& b);

// Feature cache -------------------------------------------------------------

inline constexpr std::string_view kMelCacheHeader = "lingua-atlas-mel v1";

/// Header line, "<T> <bins> <frame_shift>" line, then row-major float32 LE.
std::string SerializeMelSpectrogram(const MelSpectrogram& spec);
MelSpectrogram DeserializeMelSpectrogram(std::string_view bytes);
void WriteMelSpectrogram(const std::filesystem::path& path, const MelSpectrogram& spec);
MelSpectrogram ReadMelSpectrogram(const std::filesystem::path& path);

}  // namespace atlas
