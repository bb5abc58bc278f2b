#include "atlas/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "atlas/error.hpp"
#include "atlas/text_io.hpp"

namespace atlas {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(int sample_rate, int fft_size, double fmin_hz, double fmax_hz, int n_filters) {
  if (sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  if (fft_size < 2) throw InvalidArgument("fft size must be at least 2");
  if (n_filters < 1) throw InvalidArgument("filterbank needs at least one filter");
  if (!(fmin_hz >= 0.0 && fmin_hz < fmax_hz)) throw RangeError("mel band edges must satisfy 0 <= fmin < fmax");
  if (fmax_hz > sample_rate / 2.0) throw RangeError("fmax exceeds the Nyquist frequency");
  const double mel_lo = HzToMel(fmin_hz);
  const double mel_hi = HzToMel(fmax_hz);
  const double step = (mel_hi - mel_lo) / (n_filters + 1);
  const int n_bins = fft_size / 2 + 1;
  weights_ = RowMatrix::Zero(n_filters, n_bins);
  centers_hz_.resize(static_cast<std::size_t>(n_filters));
  for (int m = 0; m < n_filters; ++m) {
    const double left = mel_lo + step * m;
    const double center = left + step;
    const double right = center + step;
    centers_hz_[static_cast<std::size_t>(m)] = MelToHz(center);
    for (int b = 0; b < n_bins; ++b) {
      const double mel = HzToMel(static_cast<double>(b) * sample_rate / fft_size);
      double w = 0.0;
      if (mel > left && mel <= center) {
        w = (mel - left) / step;
      } else if (mel > center && mel < right) {
        w = (right - mel) / step;
      }
      weights_(m, b) = w;
    }
  }
}

Eigen::Index NumFrames(std::size_t num_samples, std::size_t window, std::size_t hop) {
  if (num_samples < window) return 0;
  return static_cast<Eigen::Index>(1 + (num_samples - window) / hop);
}

struct MelExtractor::Plan {
  fftw_plan plan = nullptr;
};

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

}  // namespace

MelExtractor::MelExtractor(int sample_rate, const MelConfig& config)
    : sample_rate_(sample_rate),
      config_(config),
      window_(static_cast<std::size_t>(std::llround(config.window_seconds * sample_rate))),
      hop_(static_cast<std::size_t>(std::llround(config.hop_seconds * sample_rate))),
      filterbank_(sample_rate, config.fft_size, config.fmin_hz, config.fmax_hz),
      plan_(nullptr) {
  if (window_ < 2) throw RangeError("analysis window must span at least 2 samples");
  if (hop_ < 1) throw RangeError("hop must span at least 1 sample");
  if (static_cast<std::size_t>(config.fft_size) < window_) throw RangeError("fft size is smaller than the window");
  hann_.resize(window_);
  for (std::size_t n = 0; n < window_; ++n) {
    hann_[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(window_));
  }
  const int n = config.fft_size;
  std::vector<double> in(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  auto plan = std::make_unique<Plan>();
  {
    std::lock_guard lock(PlannerMutex());
    plan->plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!plan->plan) throw Error("FFTW failed to create a plan");
  plan_ = plan.release();
}

MelExtractor::~MelExtractor() {
  if (plan_) {
    std::lock_guard lock(PlannerMutex());
    fftw_destroy_plan(plan_->plan);
  }
  delete plan_;
}

MelSpectrogram MelExtractor::Compute(std::span<const double> audio) const {
  const Eigen::Index frames = NumFrames(audio.size(), window_, hop_);
  if (frames < 1) {
    throw RangeError("audio has " + std::to_string(audio.size()) + " samples, shorter than one " +
                     std::to_string(window_) + "-sample window");
  }
  const int n_fft = config_.fft_size;
  const int n_bins = n_fft / 2 + 1;
  std::vector<double> in(static_cast<std::size_t>(n_fft), 0.0);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n_bins));
  Eigen::VectorXd power(n_bins);
  MelSpectrogram spec;
  spec.frame_shift = static_cast<double>(hop_) / sample_rate_;
  spec.frames.resize(frames, kMelBins);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const std::size_t offset = static_cast<std::size_t>(t) * hop_;
    for (std::size_t n = 0; n < window_; ++n) in[n] = audio[offset + n] * hann_[n];
    fftw_execute_dft_r2c(plan_->plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    for (int b = 0; b < n_bins; ++b) power(b) = std::norm(out[static_cast<std::size_t>(b)]);
    const Eigen::VectorXd mel = filterbank_.weights() * power;
    for (int m = 0; m < kMelBins; ++m) spec.frames(t, m) = std::log(std::max(mel(m), kPowerFloor));
  }
  return spec;
}

MelSpectrogram ComputeMelSpectrogram(std::span<const double> audio, int sample_rate, const MelConfig& config) {
  return MelExtractor(sample_rate, config).Compute(audio);
}

MelCepstrum ComputeMelCepstrum(const MelSpectrogram& spec, int order) {
  const auto n = spec.frames.cols();
  if (n != kMelBins) throw InvalidArgument("mel spectrogram must have 80 bins");
  if (order < 1 || order >= n) throw RangeError("cepstral order must lie in [1, 79]");
  RowMatrix basis(order + 1, n);
  for (int k = 0; k <= order; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (Eigen::Index i = 0; i < n; ++i) {
      basis(k, i) = scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
    }
  }
  MelCepstrum cep;
  cep.order = order;
  // Frame by frame so each row's result does not depend on its neighbours.
  cep.frames.resize(spec.frames.rows(), order + 1);
  for (Eigen::Index t = 0; t < spec.frames.rows(); ++t) {
    for (int k = 0; k <= order; ++k) cep.frames(t, k) = basis.row(k).dot(spec.frames.row(t));
  }
  return cep;
}

DtwAlignment AlignCepstra(const MelCepstrum& a, const MelCepstrum& b) {
  if (a.order != b.order || a.frames.cols() != b.frames.cols()) {
    throw InvalidArgument("cepstral orders differ (" + std::to_string(a.order) + " vs " + std::to_string(b.order) + ")");
  }
  const Eigen::Index ta = a.frames.rows();
  const Eigen::Index tb = b.frames.rows();
  if (ta < 1 || tb < 1) throw InvalidArgument("cepstra must have at least one frame");
  const Eigen::Index d = a.frames.cols() - 1;

  RowMatrix local(ta, tb);
  for (Eigen::Index i = 0; i < ta; ++i) {
    for (Eigen::Index j = 0; j < tb; ++j) {
      double ss = 0.0;
      for (Eigen::Index c = 1; c <= d; ++c) {
        const double diff = a.frames(i, c) - b.frames(j, c);
        ss += diff * diff;
      }
      local(i, j) = std::sqrt(ss);
    }
  }

  // Cumulative (cost, path length), ordered lexicographically.
  RowMatrix cost(ta, tb);
  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> length(ta, tb);
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> from(ta, tb);  // 0 diag, 1 up, 2 left
  for (Eigen::Index i = 0; i < ta; ++i) {
    for (Eigen::Index j = 0; j < tb; ++j) {
      if (i == 0 && j == 0) {
        cost(i, j) = local(i, j);
        length(i, j) = 1;
        from(i, j) = -1;
        continue;
      }
      int best = -1;
      double best_cost = 0.0;
      Eigen::Index best_len = 0;
      const auto consider = [&](int dir, Eigen::Index pi, Eigen::Index pj) {
        if (pi < 0 || pj < 0) return;
        const double c = cost(pi, pj);
        const Eigen::Index l = length(pi, pj);
        if (best < 0 || c < best_cost || (c == best_cost && l < best_len)) {
          best = dir;
          best_cost = c;
          best_len = l;
        }
      };
      consider(0, i - 1, j - 1);
      consider(1, i - 1, j);
      consider(2, i, j - 1);
      cost(i, j) = local(i, j) + best_cost;
      length(i, j) = best_len + 1;
      from(i, j) = best;
    }
  }

  DtwAlignment out;
  out.total_cost = cost(ta - 1, tb - 1);
  Eigen::Index i = ta - 1, j = tb - 1;
  while (true) {
    out.path.emplace_back(i, j);
    const int dir = from(i, j);
    if (dir < 0) break;
    if (dir != 2) --i;
    if (dir != 1) --j;
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

double MelCepstralDistortion(const MelCepstrum& a, const MelCepstrum& b) {
  const DtwAlignment align = AlignCepstra(a, b);
  return kMcdScale * align.total_cost / static_cast<double>(align.path.size());
}

std::string SerializeMelSpectrogram(const MelSpectrogram& spec) {
  std::string out(kMelCacheHeader);
  out += '\n';
  out += std::to_string(spec.frames.rows()) + " " + std::to_string(spec.frames.cols()) + " " +
         text::FormatRoundTrip(spec.frame_shift) + "\n";
  out.reserve(out.size() + static_cast<std::size_t>(spec.frames.size()) * 4);
  for (Eigen::Index t = 0; t < spec.frames.rows(); ++t) {
    for (Eigen::Index m = 0; m < spec.frames.cols(); ++m) {
      text::AppendFloat32LE(out, static_cast<float>(spec.frames(t, m)));
    }
  }
  return out;
}

MelSpectrogram DeserializeMelSpectrogram(std::string_view bytes) {
  const auto nl1 = bytes.find('\n');
  if (nl1 == std::string_view::npos || bytes.substr(0, nl1) != kMelCacheHeader) {
    throw ParseError("not a mel feature file", 1);
  }
  const auto nl2 = bytes.find('\n', nl1 + 1);
  if (nl2 == std::string_view::npos) throw ParseError("missing dimension line", 2);
  const auto dims = text::Split(bytes.substr(nl1 + 1, nl2 - nl1 - 1), ' ');
  long long rows = 0, cols = 0;
  double shift = 0.0;
  if (dims.size() != 3 || !text::ParseInt(dims[0], rows) || !text::ParseInt(dims[1], cols) ||
      !text::ParseDouble(dims[2], shift) || rows < 1 || cols != kMelBins) {
    throw ParseError("bad dimension line", 2);
  }
  const std::string_view payload = bytes.substr(nl2 + 1);
  if (payload.size() != static_cast<std::size_t>(rows * cols * 4)) {
    throw ParseError("payload holds " + std::to_string(payload.size()) + " bytes, expected " +
                         std::to_string(rows * cols * 4),
                     3);
  }
  MelSpectrogram spec;
  spec.frame_shift = shift;
  spec.frames.resize(rows, cols);
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (Eigen::Index t = 0; t < rows; ++t) {
    for (Eigen::Index m = 0; m < cols; ++m, p += 4) spec.frames(t, m) = text::ReadFloat32LE(p);
  }
  return spec;
}

void WriteMelSpectrogram(const std::filesystem::path& path, const MelSpectrogram& spec) {
  text::WriteFile(path, SerializeMelSpectrogram(spec));
}

MelSpectrogram ReadMelSpectrogram(const std::filesystem::path& path) {
  try {
    return DeserializeMelSpectrogram(text::ReadFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line(), e.column());
  }
}

}  // namespace atlas
