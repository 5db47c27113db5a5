#include "bwt_build.hpp"

#include <algorithm>

#include "alphabet.hpp"
#include "error.hpp"
#include "suffix_sort.hpp"

namespace pfpm {

bool is_valid_suffix(const Dictionary& dict, std::uint64_t offset, PhraseId phrase) {
  const std::uint64_t start = dict.phrase_start(phrase);
  const std::uint64_t terminator = dict.phrase_end(phrase) - 1;
  return offset > start && terminator - offset >= dict.params().w;
}

namespace {

SuffixClass entry_class(const Dictionary& dict, std::uint64_t offset) {
  SuffixClass c;
  c.phrase = dict.phrase_at(offset);
  c.occ = dict.occ(c.phrase);
  c.valid = is_valid_suffix(dict, offset, c.phrase);
  if (c.valid) c.prec = static_cast<std::uint8_t>(dict.text()[offset - 1]);
  return c;
}

bool same_suffix(const Dictionary& dict, std::uint64_t a, std::uint64_t b) {
  return compare_suffixes(dict, {a}, {b}) == std::weak_ordering::equivalent;
}

}  // namespace

std::vector<SuffixClass> classify_all(const Dictionary& dict,
                                      std::span<const std::uint64_t> sad) {
  std::vector<SuffixClass> out(sad.size());
  for (std::size_t i = 0; i < sad.size(); ++i) {
    out[i] = entry_class(dict, sad[i]);
    out[i].group = i;
  }
  std::size_t i = 0;
  while (i < sad.size()) {
    std::size_t j = i + 1;
    if (out[i].valid) {
      while (j < sad.size() && out[j].valid && same_suffix(dict, sad[i], sad[j])) ++j;
      bool unique = true;
      for (std::size_t k = i + 1; k < j; ++k) unique &= out[k].prec == out[i].prec;
      for (std::size_t k = i; k < j; ++k) {
        out[k].group = i;
        out[k].unique = unique;
      }
    }
    i = j;
  }
  return out;
}

SuffixClass classify(const Dictionary& dict, std::span<const std::uint64_t> sad,
                     std::size_t index) {
  if (index >= sad.size()) fail(ErrorKind::InvalidArgument, "SAD index out of range");
  SuffixClass c = entry_class(dict, sad[index]);
  c.group = index;
  if (!c.valid) return c;
  std::size_t lo = index;
  while (lo > 0 && same_suffix(dict, sad[lo - 1], sad[index])) --lo;
  std::size_t hi = index + 1;
  while (hi < sad.size() && same_suffix(dict, sad[hi], sad[index])) ++hi;
  c.group = lo;
  c.unique = true;
  for (std::size_t k = lo; k < hi; ++k)
    c.unique &= static_cast<std::uint8_t>(dict.text()[sad[k] - 1]) == c.prec;
  return c;
}

// --- sinks ------------------------------------------------------------------------------

void BwtSink::fill_at(std::uint64_t pos, std::uint8_t c, std::uint64_t count) {
  constexpr std::uint64_t kChunk = 1 << 16;
  const std::string chunk(static_cast<std::size_t>(std::min(count, kChunk)), static_cast<char>(c));
  while (count > 0) {
    const std::uint64_t n = std::min<std::uint64_t>(count, chunk.size());
    write_at(pos, std::string_view(chunk).substr(0, n));
    pos += n;
    count -= n;
  }
}

void MemoryBwtSink::write_at(std::uint64_t pos, std::string_view bytes) {
  if (pos + bytes.size() > bytes_.size())
    fail(ErrorKind::Invariant, "BWT write beyond the expected length");
  std::copy(bytes.begin(), bytes.end(), bytes_.begin() + static_cast<std::ptrdiff_t>(pos));
}

void MemoryBwtSink::fill_at(std::uint64_t pos, std::uint8_t c, std::uint64_t count) {
  if (pos + count > bytes_.size())
    fail(ErrorKind::Invariant, "BWT write beyond the expected length");
  std::fill_n(bytes_.begin() + static_cast<std::ptrdiff_t>(pos), count, static_cast<char>(c));
}

FileBwtSink::FileBwtSink(const std::string& path, const ArtifactHeader& header,
                         std::uint64_t length)
    : path_(path), length_(length) {
  {
    auto init = open_output(path);
    write_artifact_header(init, kBwtMagic, header);
    write_u32(init, 0);
    write_u64(init, length);
    if (!init) fail(ErrorKind::Io, "failed writing '" + path + "'");
  }
  payload_start_ = file_size(path);
  out_.open(path, std::ios::binary | std::ios::in | std::ios::out);
  if (!out_) fail(ErrorKind::Io, "cannot reopen '" + path + "'");
}

void FileBwtSink::write_at(std::uint64_t pos, std::string_view bytes) {
  if (pos + bytes.size() > length_)
    fail(ErrorKind::Invariant, "BWT write beyond the expected length");
  out_.seekp(static_cast<std::streamoff>(payload_start_ + pos));
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out_) fail(ErrorKind::Io, "failed writing '" + path_ + "'");
}

void FileBwtSink::finish() {
  out_.flush();
  out_.close();
  if (file_size(path_) != payload_start_ + length_)
    fail(ErrorKind::Invariant, "BWT file '" + path_ + "' was not completely written");
}

// --- construction ---------------------------------------------------------------------

EasyFillResult easy_fill(const Dictionary& dict, std::span<const std::uint64_t> sad,
                         std::span<const SuffixClass> classes, BwtSink& sink) {
  if (classes.size() != sad.size())
    fail(ErrorKind::InvalidArgument, "classification does not match the SAD");
  EasyFillResult res;
  const std::uint64_t length = dict.text_length();
  std::uint64_t pos = 0;
  std::size_t i = 0;
  while (i < sad.size()) {
    if (!classes[i].valid) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < sad.size() && classes[j].valid && classes[j].group == classes[i].group) ++j;
    std::uint64_t width = 0;
    for (std::size_t k = i; k < j; ++k) width += classes[k].occ;
    if (pos + width > length)
      fail(ErrorKind::Invariant, "easy fill ran past the BWT length; occurrence counts are corrupt");
    if (classes[i].unique) {
      sink.fill_at(pos, classes[i].prec, width);
      res.easy_chars += width;
    } else {
      res.gaps.push_back({pos, width, i, j});
    }
    pos += width;
    i = j;
  }
  if (pos != length)
    fail(ErrorKind::Invariant, "easy fill covered " + std::to_string(pos) +
                                   " positions, expected " + std::to_string(length));
  res.length = pos;
  return res;
}

std::vector<PhraseId> parse_bwt(const Parse& parse, const Dictionary& dict) {
  const std::uint64_t strings = parse.string_count();
  const std::uint64_t phrases = dict.phrase_count();
  if (parse.phrase_ids.empty()) fail(ErrorKind::InvalidArgument, "empty parse");
  if (strings + phrases + 1 >= 0xFFFFFFFFull)
    fail(ErrorKind::Limit, "parse alphabet too large");
  // Symbols: 0 sentinel, 1 + s for the end of string s, 1 + strings + id.
  const auto id_base = static_cast<std::uint32_t>(1 + strings);
  std::vector<std::uint32_t> text;
  text.reserve(parse.phrase_ids.size() + strings + 1);
  for (std::uint64_t s = 0; s < strings; ++s) {
    for (PhraseId id : parse.string_phrases(s)) {
      if (id >= phrases) fail(ErrorKind::Format, "parse references a missing phrase");
      text.push_back(id_base + id);
    }
    text.push_back(static_cast<std::uint32_t>(1 + s));
  }
  text.push_back(0);
  const auto sa = suffix_array(text, id_base + static_cast<std::uint32_t>(phrases));
  std::vector<PhraseId> out;
  out.reserve(parse.phrase_ids.size());
  for (std::size_t r = 1; r < sa.size(); ++r) {
    const std::uint64_t pos = sa[r];
    if (pos == 0 || text[pos - 1] < id_base) continue;  // string start
    out.push_back(text[pos - 1] - id_base);
  }
  return out;
}

void hard_fill(std::span<const Gap> gaps, std::span<const PhraseId> pbwt,
               const Dictionary& dict, std::span<const SuffixClass> classes,
               BwtSink& sink) {
  const std::size_t phrases = dict.phrase_count();
  std::vector<std::uint64_t> start(phrases + 1, 0);
  for (PhraseId id : pbwt) {
    if (id >= phrases) fail(ErrorKind::InvalidArgument, "parse BWT references a missing phrase");
    ++start[id + 1];
  }
  for (std::size_t i = 0; i < phrases; ++i) start[i + 1] += start[i];
  std::vector<std::uint64_t> ranks(pbwt.size());
  {
    std::vector<std::uint64_t> next(start.begin(), start.end() - 1);
    for (std::uint64_t r = 0; r < pbwt.size(); ++r) ranks[next[pbwt[r]]++] = r;
  }

  std::vector<std::pair<std::uint64_t, std::uint8_t>> items;
  std::string chars;
  for (const Gap& gap : gaps) {
    items.clear();
    for (std::uint64_t e = gap.sad_begin; e < gap.sad_end; ++e) {
      const PhraseId beta = classes[e].phrase;
      for (std::uint64_t k = start[beta]; k < start[beta + 1]; ++k)
        items.emplace_back(ranks[k], classes[e].prec);
    }
    if (items.size() != gap.width)
      fail(ErrorKind::Invariant, "gap at " + std::to_string(gap.start) + " expects " +
                                     std::to_string(gap.width) + " characters, gathered " +
                                     std::to_string(items.size()));
    std::sort(items.begin(), items.end());
    chars.resize(items.size());
    for (std::size_t k = 0; k < items.size(); ++k) chars[k] = static_cast<char>(items[k].second);
    sink.write_at(gap.start, chars);
  }
}

BwtBuildStats build_bwt(const Dictionary& dict, const Parse& parse, BwtSink& sink,
                        std::span<const std::uint64_t> sad) {
  std::vector<std::uint64_t> own_sad;
  if (sad.empty()) {
    own_sad = build_dict_sa(dict);
    sad = own_sad;
  }
  const auto classes = classify_all(dict, sad);
  const auto easy = easy_fill(dict, sad, classes, sink);
  const auto pbwt = parse_bwt(parse, dict);
  hard_fill(easy.gaps, pbwt, dict, classes, sink);

  BwtBuildStats stats;
  stats.length = easy.length;
  stats.easy_chars = easy.easy_chars;
  stats.hard_chars = easy.length - easy.easy_chars;
  stats.gaps = easy.gaps.size();
  stats.phrases = dict.phrase_count();
  stats.parse_length = parse.phrase_ids.size();
  stats.d_size = dict.d_size();
  return stats;
}

BwtBuildStats build_bwt(const SequenceCollection& coll, const ParseParams& params,
                        const TriggerSet* allowed, BwtSink& sink) {
  const auto parsed = parse_collection(coll, params, allowed);
  return build_bwt(parsed.dict, parsed.parse, sink);
}

std::string build_bwt_string(const SequenceCollection& coll, const ParseParams& params,
                             const TriggerSet* allowed, BwtBuildStats* stats) {
  const auto parsed = parse_collection(coll, params, allowed);
  MemoryBwtSink sink(parsed.dict.text_length());
  const auto s = build_bwt(parsed.dict, parsed.parse, sink);
  if (stats != nullptr) *stats = s;
  return sink.release();
}

// --- files -----------------------------------------------------------------------------

void write_bwt(const std::string& path, const ArtifactHeader& header, std::string_view bytes) {
  auto out = open_output(path);
  write_artifact_header(out, kBwtMagic, header);
  write_u32(out, 0);
  write_u64(out, bytes.size());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

std::string read_bwt(const std::string& path, ArtifactHeader* header) {
  BwtReader reader(path);
  std::string bytes(reader.length(), '\0');
  reader.read(bytes);
  if (header != nullptr) *header = reader.header();
  return bytes;
}

BwtReader::BwtReader(const std::string& path) : path_(path), in_(open_input(path)) {
  header_ = read_artifact_header(in_, kBwtMagic, path);
  read_u32(in_, path + " reserved");
  length_ = read_u64(in_, path + " length");
  if (file_size(path) != 56 + length_)
    fail(ErrorKind::Format, "BWT file '" + path + "' length does not match its header");
}

void BwtReader::read(std::span<char> out) {
  if (out.size() > remaining())
    fail(ErrorKind::Invariant, "BWT '" + path_ + "' exhausted: requested " +
                                   std::to_string(out.size()) + " bytes with " +
                                   std::to_string(remaining()) + " remaining");
  read_exact(in_, out, path_ + " payload");
  consumed_ += out.size();
}

}  // namespace pfpm
