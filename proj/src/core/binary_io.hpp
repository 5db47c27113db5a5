#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <string_view>

#include "params.hpp"

namespace pfpm {

// Little-endian primitives over std::iostreams. Readers throw Format errors on
// short reads so truncated files never yield partial values.
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
std::uint32_t read_u32(std::istream& in, const std::string& what);
std::uint64_t read_u64(std::istream& in, const std::string& what);
void read_exact(std::istream& in, std::span<char> buf, const std::string& what);

std::ifstream open_input(const std::string& path);
std::ofstream open_output(const std::string& path);
std::uint64_t file_size(const std::string& path);

using Magic = std::array<char, 8>;

inline constexpr Magic kDictMagic = {'P', 'F', 'P', 'M', 'D', 'I', 'C', 'T'};
inline constexpr Magic kParseMagic = {'P', 'F', 'P', 'M', 'P', 'R', 'S', 'E'};
inline constexpr Magic kBwtMagic = {'P', 'F', 'P', 'M', 'B', 'W', 'T', '\0'};
inline constexpr Magic kSaMagic = {'P', 'F', 'P', 'M', 'S', 'A', '\0', '\0'};
inline constexpr std::uint32_t kFormatVersion = 1;

// Fields shared by dictionary, parse and BWT headers.
struct ArtifactHeader {
  ParseParams params;
  DatasetId dataset_id = 0;
};

void write_artifact_header(std::ostream& out, const Magic& magic,
                           const ArtifactHeader& header);
ArtifactHeader read_artifact_header(std::istream& in, const Magic& magic,
                                    const std::string& path);

}  // namespace pfpm
