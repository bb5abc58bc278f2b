#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace atlas {

/// Mono audio with samples scaled to [-1, 1).
struct Audio {
  std::vector<double> samples;
  int sample_rate = 0;
};

/// Reads a RIFF/WAVE file holding mono 16-bit PCM. Other encodings are rejected.
Audio ReadWav(const std::filesystem::path& path);

/// Writes mono 16-bit PCM; samples are clipped to [-1, 1] and rounded.
void WriteWav(const std::filesystem::path& path, std::span<const double> samples, int sample_rate);

}  // namespace atlas
