#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace atlas::text {

/// Splits on a single delimiter, keeping empty fields.
std::vector<std::string_view> Split(std::string_view s, char delim);

std::string_view Trim(std::string_view s);

/// Shortest decimal representation that parses back to the same double.
std::string FormatRoundTrip(double value);

/// printf-style "%.6g".
std::string FormatSig6(double value);

/// Strict parsers: the whole field must be consumed.
bool ParseDouble(std::string_view s, double& out);
bool ParseInt(std::string_view s, long long& out);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

/// FNV-1a 64-bit, rendered as 16 hex digits.
std::string Fingerprint(std::string_view bytes);

void AppendFloat32LE(std::string& out, float value);
float ReadFloat32LE(const unsigned char* p);

}  // namespace atlas::text
