#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "params.hpp"

namespace pfpm {

enum class InputFormat { Fasta, Plain };

// One small dataset: an ordered list of non-empty strings over {A,C,G,T,X}.
struct SequenceCollection {
  DatasetId dataset_id = 0;
  std::vector<std::string> sequences;
  std::string source_name;

  std::uint64_t total_length() const;
};

// Drops FASTA headers and newlines, uppercases acgt and maps every other byte
// to X. One sequence per FASTA record or per plain-text line.
SequenceCollection normalize(std::istream& in, InputFormat format,
                             std::string source_name = {});
SequenceCollection normalize(std::string_view raw, InputFormat format,
                             std::string source_name = {});

std::uint8_t normalize_byte(std::uint8_t c) noexcept;

// Container: u64 count, then per sequence u64 length + raw bytes.
void write_collection(const SequenceCollection& coll, const std::string& path);
SequenceCollection read_collection(const std::string& path, DatasetId dataset_id = 0);

}  // namespace pfpm
