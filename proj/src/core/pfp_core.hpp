#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dict_store.hpp"
#include "params.hpp"
#include "text_normalize.hpp"

namespace pfpm {

// Sorted, duplicate-free set of w-byte trigger strings stored back to back.
class TriggerSet {
 public:
  TriggerSet() = default;
  explicit TriggerSet(std::uint32_t w) : w_(w) {}

  // Sorts and deduplicates.
  static TriggerSet from_strings(std::uint32_t w, std::vector<std::string> records);

  std::uint32_t width() const noexcept { return w_; }
  std::size_t size() const noexcept { return w_ == 0 ? 0 : data_.size() / w_; }
  bool empty() const noexcept { return data_.empty(); }
  std::string_view operator[](std::size_t i) const {
    return std::string_view(data_).substr(i * w_, w_);
  }
  bool contains(std::string_view record) const;

  // Appends a record that must sort after the current last record.
  void push_back(std::string_view record);

  friend bool operator==(const TriggerSet&, const TriggerSet&) = default;

 private:
  std::uint32_t w_ = 0;
  std::string data_;
};

// File: u64 count, then count fixed-width records, sorted, no duplicates.
void write_trigger_set(const TriggerSet& set, const std::string& path);
TriggerSet read_trigger_set(const std::string& path, std::uint32_t expected_w = 0);

// Streaming reader for the census. The record width is inferred from the file
// size (0 for an empty set).
class TriggerReader {
 public:
  explicit TriggerReader(const std::string& path);

  std::uint32_t width() const noexcept { return w_; }
  std::uint64_t count() const noexcept { return count_; }
  bool next(std::string& record);

 private:
  std::string path_;
  std::ifstream in_;
  std::uint32_t w_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t read_ = 0;
  std::string previous_;
};

// Distinct windows of the padded sequences (each string followed by w copies
// of 0x2) whose hash is 0 mod p.
TriggerSet collect_triggers(const SequenceCollection& coll, const ParseParams& params);

// Phrase identifiers per string. string_starts has string_count() + 1 entries.
struct Parse {
  DatasetId dataset_id = 0;
  std::vector<PhraseId> phrase_ids;
  std::vector<std::uint64_t> string_starts{0};

  std::size_t string_count() const noexcept { return string_starts.size() - 1; }
  std::span<const PhraseId> string_phrases(std::size_t i) const {
    return std::span<const PhraseId>(phrase_ids)
        .subspan(string_starts[i], string_starts[i + 1] - string_starts[i]);
  }
};

struct ParseResult {
  Dictionary dict;
  Parse parse;
};

// Splits one string into phrases. The padded string s 0x2^w is cut at every
// active trigger window starting in [0, |s|) and at the terminal window
// 0x2^w; the first phrase is prefixed by 0x2^w, the wrapped terminal trigger,
// so every padded character is non-final in exactly one phrase. A window is
// active when its hash is 0 mod p and, if `allowed` is given, it belongs to
// `allowed`.
std::vector<std::string> split_phrases(std::string_view seq, const ParseParams& params,
                                       const TriggerSet* allowed = nullptr);

ParseResult parse_collection(const SequenceCollection& coll, const ParseParams& params,
                             const TriggerSet* allowed = nullptr);

// Re-expands a parse into the padded strings it came from.
std::vector<std::string> reconstruct_padded(const Dictionary& dict, const Parse& parse);

void write_parse(const Parse& parse, const ParseParams& params, const std::string& path);
Parse read_parse(const std::string& path, ParseParams* params_out = nullptr);

}  // namespace pfpm
