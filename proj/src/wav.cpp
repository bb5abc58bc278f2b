#include "atlas/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "atlas/error.hpp"
#include "atlas/text_io.hpp"

namespace atlas {
namespace {

std::uint32_t ReadU32(const std::string& b, std::size_t pos) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[pos])) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(b[pos + 1])) << 8) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(b[pos + 2])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(b[pos + 3])) << 24);
}

std::uint16_t ReadU16(const std::string& b, std::size_t pos) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[pos]) |
                                    (static_cast<unsigned char>(b[pos + 1]) << 8));
}

void PutU32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void PutU16(std::string& b, std::uint16_t v) {
  b.push_back(static_cast<char>(v & 0xffu));
  b.push_back(static_cast<char>(v >> 8));
}

}  // namespace

Audio ReadWav(const std::filesystem::path& path) {
  const std::string bytes = text::ReadFile(path);
  const std::string where = path.string() + ": ";
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    throw Error(where + "not a RIFF/WAVE file");
  }
  Audio audio;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t size = ReadU32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw Error(where + "truncated chunk '" + id + "'");
    if (id == "fmt ") {
      if (size < 16) throw Error(where + "fmt chunk too small");
      const std::uint16_t format = ReadU16(bytes, body);
      const std::uint16_t channels = ReadU16(bytes, body + 2);
      const std::uint32_t rate = ReadU32(bytes, body + 4);
      const std::uint16_t bits = ReadU16(bytes, body + 14);
      if (format != 1) throw Error(where + "only PCM encoding is supported");
      if (channels != 1) throw Error(where + "expected mono audio, got " + std::to_string(channels) + " channels");
      if (bits != 16) throw Error(where + "expected 16-bit samples, got " + std::to_string(bits));
      if (rate == 0) throw Error(where + "zero sample rate");
      audio.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error(where + "data chunk before fmt chunk");
      const std::size_t n = size / 2;
      audio.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = static_cast<std::int16_t>(ReadU16(bytes, body + 2 * i));
        audio.samples[i] = static_cast<double>(v) / 32768.0;
      }
      return audio;
    }
    pos = body + size + (size & 1u);
  }
  throw Error(where + "no data chunk");
}

void WriteWav(const std::filesystem::path& path, std::span<const double> samples, int sample_rate) {
  if (sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::string b;
  b.reserve(44 + data_bytes);
  b += "RIFF";
  PutU32(b, 36 + data_bytes);
  b += "WAVEfmt ";
  PutU32(b, 16);
  PutU16(b, 1);
  PutU16(b, 1);
  PutU32(b, static_cast<std::uint32_t>(sample_rate));
  PutU32(b, static_cast<std::uint32_t>(sample_rate) * 2);
  PutU16(b, 2);
  PutU16(b, 16);
  b += "data";
  PutU32(b, data_bytes);
  for (double s : samples) {
    const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32767.0);
    PutU16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  text::WriteFile(path, b);
}

}  // namespace atlas
