#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "dict_store.hpp"

namespace pfpm {

// Lookup tables over the concatenated dictionary: a phrase sample every
// `stride` characters, phrase ends, occurrence counts and owning datasets.
class MergeTables {
 public:
  MergeTables(std::uint32_t w, std::uint64_t stride);

  // Feeds the concatenated dictionary one symbol at a time, without the final
  // 0x0. Phrases end at each 0x1 and belong to `dataset`.
  void push_symbol(std::uint8_t symbol, DatasetId dataset);
  void push_occ(std::uint64_t occ);

  struct Entry {
    bool valid = false;
    std::uint64_t occ = 0;
    DatasetId dataset = 0;
    PhraseId phrase = 0;
  };

  PhraseId lookup(std::uint64_t offset) const;
  Entry query(std::uint64_t offset) const;

  std::uint64_t stride() const noexcept { return stride_; }
  std::size_t phrase_count() const noexcept { return phrase_end_.size(); }
  std::uint64_t size() const noexcept { return size_; }
  const std::vector<PhraseId>& sample_phrase() const noexcept { return sample_phrase_; }
  const std::vector<std::uint64_t>& phrase_end() const noexcept { return phrase_end_; }
  const std::vector<std::uint64_t>& phrase_occ() const noexcept { return phrase_occ_; }
  const std::vector<DatasetId>& phrase_ds() const noexcept { return phrase_ds_; }
  std::uint64_t memory_bytes() const noexcept;
  void reserve(std::uint64_t symbols, std::uint64_t phrases);

 private:
  std::uint32_t w_;
  std::uint64_t stride_;
  std::uint64_t size_ = 0;
  std::vector<PhraseId> sample_phrase_;
  std::vector<std::uint64_t> phrase_end_;
  std::vector<std::uint64_t> phrase_occ_;
  std::vector<DatasetId> phrase_ds_;
};

// Tables for dicts[0..k), with dataset ids equal to list positions.
MergeTables build_merge_tables(const std::vector<Dictionary>& dicts, std::uint64_t stride);

// Streams the offsets of the concatenated dictionary in suffix order by
// merging the per-dataset SA files with a min-heap. Ties go to the lower
// dataset index.
class SadMergeCursor {
 public:
  SadMergeCursor(const PackedDictionary& dict, const std::vector<std::string>& sa_paths,
                 const std::vector<std::uint64_t>& bases, std::size_t buffer_entries = 8192);

  bool next(std::uint64_t& offset, std::size_t& dataset);
  std::uint64_t memory_bytes() const noexcept;

 private:
  struct Head {
    std::uint64_t offset;
    std::size_t dataset;
  };
  struct Later {
    const PackedDictionary* dict;
    bool operator()(const Head& a, const Head& b) const noexcept;
  };

  void refill(std::size_t dataset);

  const PackedDictionary& dict_;
  std::vector<SaReader> readers_;
  std::vector<std::uint64_t> bases_;
  std::vector<std::uint64_t> emitted_;
  std::priority_queue<Head, std::vector<Head>, Later> heap_;
};

struct MergeOptions {
  std::uint64_t stride = 50;
  std::size_t buffer_bytes = 1 << 20;
  std::size_t sa_buffer_entries = 8192;
};

struct MergeStats {
  std::uint64_t output_length = 0;
  std::uint64_t sad_entries = 0;
  std::uint64_t valid_entries = 0;
  std::uint64_t terminal_ties = 0;
  std::vector<std::uint64_t> lengths;   // per old BWT
  std::vector<std::uint64_t> consumed;  // characters copied from each old BWT
  std::uint64_t table_bytes = 0;
  std::uint64_t packed_bytes = 0;
  std::uint64_t buffer_bytes = 0;
  std::uint64_t cursor_bytes = 0;

  std::uint64_t instrumented_bytes() const noexcept {
    return table_bytes + packed_bytes + buffer_bytes + cursor_bytes;
  }
};

// Merges per-dataset BWTs given, for each dataset in merge order, its
// dictionary, dictionary SA and BWT file. Writes the merged BWT to out_path.
MergeStats merge_bwts(const std::vector<std::string>& dict_paths,
                      const std::vector<std::string>& sa_paths,
                      const std::vector<std::string>& bwt_paths, const std::string& out_path,
                      const MergeOptions& options = {});

// Byte comparison of two BWT files. Returns the first differing position, or
// -1 when they are equal (lengths included).
std::int64_t compare_bwt_files(const std::string& a, const std::string& b);

}  // namespace pfpm
