#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "binary_io.hpp"
#include "dict_store.hpp"
#include "pfp_core.hpp"

namespace pfpm {

// Classification of one SAD entry. `group` is the SAD index of the first entry
// whose phrase suffix equals this one; uniqueness is decided per group.
struct SuffixClass {
  bool valid = false;
  bool unique = false;
  PhraseId phrase = 0;
  std::uint64_t occ = 0;
  std::uint8_t prec = 0;
  std::uint64_t group = 0;
};

// A suffix is valid when it starts after the first character of its phrase
// and at least w characters precede the phrase terminator.
bool is_valid_suffix(const Dictionary& dict, std::uint64_t offset, PhraseId phrase);

std::vector<SuffixClass> classify_all(const Dictionary& dict, std::span<const std::uint64_t> sad);
SuffixClass classify(const Dictionary& dict, std::span<const std::uint64_t> sad,
                     std::size_t index);

// Random-access byte destination for a BWT under construction.
class BwtSink {
 public:
  virtual ~BwtSink() = default;
  virtual void write_at(std::uint64_t pos, std::string_view bytes) = 0;
  virtual void fill_at(std::uint64_t pos, std::uint8_t c, std::uint64_t count);
};

class MemoryBwtSink final : public BwtSink {
 public:
  explicit MemoryBwtSink(std::uint64_t length) : bytes_(length, '\0') {}
  void write_at(std::uint64_t pos, std::string_view bytes) override;
  void fill_at(std::uint64_t pos, std::uint8_t c, std::uint64_t count) override;
  const std::string& bytes() const noexcept { return bytes_; }
  std::string release() { return std::move(bytes_); }

 private:
  std::string bytes_;
};

// BWT file: artifact header, u64 length, then raw bytes.
class FileBwtSink final : public BwtSink {
 public:
  FileBwtSink(const std::string& path, const ArtifactHeader& header, std::uint64_t length);
  void write_at(std::uint64_t pos, std::string_view bytes) override;
  void finish();

 private:
  std::string path_;
  std::fstream out_;
  std::uint64_t length_;
  std::uint64_t payload_start_;
};

struct Gap {
  std::uint64_t start = 0;
  std::uint64_t width = 0;
  std::uint64_t sad_begin = 0;  // SAD range of the non-unique suffix group
  std::uint64_t sad_end = 0;
};

struct EasyFillResult {
  std::vector<Gap> gaps;
  std::uint64_t length = 0;
  std::uint64_t easy_chars = 0;
};

// Writes the characters preceding valid suffixes that are always preceded by
// the same character and records a gap for every other suffix group.
EasyFillResult easy_fill(const Dictionary& dict, std::span<const std::uint64_t> sad,
                         std::span<const SuffixClass> classes, BwtSink& sink);

inline constexpr PhraseId kNoPhrase = 0xFFFFFFFFu;

// For every parse suffix preceded by a phrase, in suffix order, the id of the
// preceding phrase. String ends act as separators ranked by string index and
// below every phrase.
std::vector<PhraseId> parse_bwt(const Parse& parse, const Dictionary& dict);

// Fills every gap with the characters preceding its suffix, ordered by the
// rank of the parse suffix that follows each phrase occurrence.
void hard_fill(std::span<const Gap> gaps, std::span<const PhraseId> pbwt,
               const Dictionary& dict, std::span<const SuffixClass> classes,
               BwtSink& sink);

struct BwtBuildStats {
  std::uint64_t length = 0;
  std::uint64_t easy_chars = 0;
  std::uint64_t hard_chars = 0;
  std::uint64_t gaps = 0;
  std::uint64_t phrases = 0;
  std::uint64_t parse_length = 0;
  std::uint64_t d_size = 0;
};

// Full per-dataset construction from a dictionary and its parse. `sad` may be
// passed when already available.
BwtBuildStats build_bwt(const Dictionary& dict, const Parse& parse, BwtSink& sink,
                        std::span<const std::uint64_t> sad = {});
BwtBuildStats build_bwt(const SequenceCollection& coll, const ParseParams& params,
                        const TriggerSet* allowed, BwtSink& sink);
std::string build_bwt_string(const SequenceCollection& coll, const ParseParams& params,
                             const TriggerSet* allowed = nullptr,
                             BwtBuildStats* stats = nullptr);

// --- BWT files ----------------------------------------------------------------------

void write_bwt(const std::string& path, const ArtifactHeader& header, std::string_view bytes);
std::string read_bwt(const std::string& path, ArtifactHeader* header = nullptr);

class BwtReader {
 public:
  explicit BwtReader(const std::string& path);

  const ArtifactHeader& header() const noexcept { return header_; }
  std::uint64_t length() const noexcept { return length_; }
  std::uint64_t consumed() const noexcept { return consumed_; }
  std::uint64_t remaining() const noexcept { return length_ - consumed_; }
  // Reads exactly n bytes; fails if fewer remain.
  void read(std::span<char> out);

 private:
  std::string path_;
  std::ifstream in_;
  ArtifactHeader header_;
  std::uint64_t length_ = 0;
  std::uint64_t consumed_ = 0;
};

}  // namespace pfpm
