#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace jspec {

// write to a sibling temp file, then rename over the target
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// "1", "-2.5", "i", "-i", "0+1i", "3-2.5i", "2i"
std::complex<double> parse_complex(std::string_view text);
std::string format_complex(std::complex<double> z);

}  // namespace jspec
