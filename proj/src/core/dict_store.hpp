#pragma once

#include <compare>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "params.hpp"

namespace pfpm {

// Offset of a suffix inside a (possibly concatenated) dictionary.
struct DictSuffix {
  std::uint64_t offset = 0;
};

// Sorted distinct phrases of one dataset with their parse occurrence counts.
// Stored as the concatenation phrase 0x1 phrase 0x1 ... 0x0; d_size() counts
// the phrase bytes and their terminators but not the final 0x0. A dictionary
// produced by concat_dicts() additionally records the owner of every phrase.
class Dictionary {
 public:
  Dictionary() : text_(1, '\0'), starts_(1, 0) {}

  // Phrases must be strictly ascending; occurrence counts must be >= 1.
  static Dictionary from_phrases(const ParseParams& params, DatasetId dataset,
                                 const std::vector<std::string>& phrases,
                                 std::vector<std::uint64_t> occ);

  const ParseParams& params() const noexcept { return params_; }
  DatasetId dataset_id() const noexcept { return dataset_; }
  bool is_concatenation() const noexcept { return !owners_.empty(); }

  std::size_t phrase_count() const noexcept { return occ_.size(); }
  std::uint64_t d_size() const noexcept { return text_.size() - 1; }
  // d_size() + 1 bytes, ending with 0x0.
  std::string_view text() const noexcept { return text_; }

  std::string_view phrase(PhraseId id) const {
    return std::string_view(text_).substr(starts_[id], starts_[id + 1] - starts_[id] - 1);
  }
  std::uint64_t phrase_start(PhraseId id) const { return starts_[id]; }
  // One past the phrase terminator.
  std::uint64_t phrase_end(PhraseId id) const { return starts_[id + 1]; }
  std::uint64_t occ(PhraseId id) const { return occ_[id]; }
  std::span<const std::uint64_t> occurrences() const noexcept { return occ_; }
  DatasetId phrase_dataset(PhraseId id) const {
    return owners_.empty() ? dataset_ : owners_[id];
  }
  PhraseId phrase_at(std::uint64_t offset) const;

  // Sum over phrases of occ * (len - w): the padded length of the source text.
  std::uint64_t text_length() const;

  // Checks the storage invariants (and sortedness for single datasets).
  void validate() const;

  friend Dictionary concat_dicts(std::span<const Dictionary> dicts);

 private:
  ParseParams params_;
  DatasetId dataset_ = 0;
  std::string text_;
  std::vector<std::uint64_t> starts_;  // phrase_count + 1 entries
  std::vector<std::uint64_t> occ_;
  std::vector<DatasetId> owners_;      // only for concatenations
};

// Concatenates dictionaries in the given order. Parameters must match.
Dictionary concat_dicts(std::span<const Dictionary> dicts);

// Compares the phrase suffixes starting at a and b up to and including their
// 0x1 terminators. Suffixes with identical bytes compare equal.
std::weak_ordering compare_suffixes(const Dictionary& dict, DictSuffix a, DictSuffix b);

// Dictionary text at 3 bits per symbol (codes in storage order). Symbol i sits
// at stream bits [3i, 3i+3) counted from the most significant bit of word 0.
class PackedDictionary {
 public:
  static constexpr unsigned kBlockSymbols = 20;

  PackedDictionary() : words_(1, 0) {}
  explicit PackedDictionary(std::string_view symbols);

  void append(std::uint8_t symbol);
  void append(std::string_view symbols);
  void reserve(std::uint64_t symbols);

  std::uint64_t size() const noexcept { return size_; }
  std::uint8_t code_at(std::uint64_t i) const noexcept {
    const std::uint64_t bit = 3 * i;
    return static_cast<std::uint8_t>((window64(bit) >> 61) & 7u);
  }
  std::uint8_t at(std::uint64_t i) const;
  std::string unpack() const;

  // Block comparison, 20 symbols per step.
  std::weak_ordering compare(DictSuffix a, DictSuffix b) const noexcept;
  // Reference path decoding one symbol at a time.
  std::weak_ordering compare_per_symbol(DictSuffix a, DictSuffix b) const noexcept;

  std::uint64_t memory_bytes() const noexcept {
    return words_.capacity() * sizeof(std::uint64_t);
  }

  // Serialized as ceil(3 * size / 8) bytes, most significant bit first.
  void write(std::ostream& out) const;
  static PackedDictionary read(std::istream& in, std::uint64_t symbols,
                               const std::string& what);
  static std::uint64_t byte_length(std::uint64_t symbols) {
    return (3 * symbols + 7) / 8;
  }

 private:
  // 64 stream bits starting at `bit`, first bit in the most significant place.
  std::uint64_t window64(std::uint64_t bit) const noexcept {
    const std::uint64_t q = bit >> 6;
    const unsigned r = static_cast<unsigned>(bit & 63);
    const std::uint64_t hi = words_[q] << r;
    return r == 0 ? hi : hi | (words_[q + 1] >> (64 - r));
  }
  std::uint64_t block(std::uint64_t symbol) const noexcept {
    return window64(3 * symbol) >> 4;
  }

  std::vector<std::uint64_t> words_;  // always one spare zero word at the end
  std::uint64_t size_ = 0;
};

PackedDictionary pack(const Dictionary& dict);

// Suffix array of the dictionary text (all d_size offsets), sorted by
// compare_suffixes with ties broken by offset.
std::vector<std::uint64_t> build_dict_sa(const Dictionary& dict);

// --- persistence -----------------------------------------------------------

struct DictionaryFileInfo {
  ParseParams params;
  DatasetId dataset_id = 0;
  bool packed = false;
  std::uint64_t phrase_count = 0;
  std::uint64_t d_size = 0;
};

void write_dictionary(const Dictionary& dict, const std::string& path, bool packed);
Dictionary read_dictionary(const std::string& path);

// Sequential reader used by the merge so that plain dictionaries never need to
// be held unpacked in memory.
class DictionaryReader {
 public:
  explicit DictionaryReader(const std::string& path);

  const DictionaryFileInfo& info() const noexcept { return info_; }
  // Streams the d_size + 1 symbols (terminators and final 0x0 included).
  template <class Fn>
  void for_each_symbol(Fn&& fn);
  // Must be called after for_each_symbol.
  std::uint64_t next_occ();

 private:
  std::string path_;
  std::ifstream in_;
  DictionaryFileInfo info_;
  std::uint64_t occ_read_ = 0;
};

void write_sa(const std::vector<std::uint64_t>& sa, std::uint64_t d_size,
              const std::string& path);
std::vector<std::uint64_t> read_sa(const std::string& path);

// Buffered forward reader of an SA file.
class SaReader {
 public:
  explicit SaReader(const std::string& path, std::size_t buffer_entries = 8192);

  std::uint64_t d_size() const noexcept { return d_size_; }
  bool next(std::uint64_t& offset);
  std::uint64_t buffer_bytes() const noexcept { return buffer_.capacity() * 8; }

 private:
  std::string path_;
  std::ifstream in_;
  std::uint64_t d_size_ = 0;
  std::uint64_t remaining_ = 0;
  std::vector<char> buffer_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

}  // namespace pfpm

#include "dict_store_inl.hpp"
