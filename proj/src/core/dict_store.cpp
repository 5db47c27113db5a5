#include "dict_store.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "alphabet.hpp"
#include "binary_io.hpp"
#include "error.hpp"
#include "suffix_sort.hpp"

namespace pfpm {

// --- Dictionary --------------------------------------------------------------

Dictionary Dictionary::from_phrases(const ParseParams& params, DatasetId dataset,
                                    const std::vector<std::string>& phrases,
                                    std::vector<std::uint64_t> occ) {
  if (phrases.size() != occ.size())
    fail(ErrorKind::InvalidArgument, "phrase and occurrence counts differ");
  if (phrases.size() >= std::numeric_limits<PhraseId>::max())
    fail(ErrorKind::Limit, "too many distinct phrases");
  Dictionary d;
  d.params_ = params;
  d.dataset_ = dataset;
  d.text_.clear();
  std::uint64_t total = 1;
  for (const auto& p : phrases) total += p.size() + 1;
  d.text_.reserve(total);
  d.starts_.clear();
  d.starts_.reserve(phrases.size() + 1);
  for (const auto& p : phrases) {
    d.starts_.push_back(d.text_.size());
    d.text_ += p;
    d.text_.push_back(static_cast<char>(kEndOfPhrase));
  }
  d.starts_.push_back(d.text_.size());
  d.text_.push_back(static_cast<char>(kEndOfDict));
  d.occ_ = std::move(occ);
  d.validate();
  return d;
}

PhraseId Dictionary::phrase_at(std::uint64_t offset) const {
  if (offset >= d_size()) fail(ErrorKind::InvalidArgument, "dictionary offset out of range");
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
  return static_cast<PhraseId>(it - starts_.begin() - 1);
}

std::uint64_t Dictionary::text_length() const {
  std::uint64_t total = 0;
  for (PhraseId i = 0; i < phrase_count(); ++i) {
    const auto len = phrase(i).size();
    if (len <= params_.w)
      fail(ErrorKind::Invariant, "phrase " + std::to_string(i) + " is not longer than w");
    total += occ_[i] * (len - params_.w);
  }
  return total;
}

void Dictionary::validate() const {
  if (starts_.size() != occ_.size() + 1)
    fail(ErrorKind::Invariant, "dictionary phrase table is inconsistent");
  if (!owners_.empty() && owners_.size() != occ_.size())
    fail(ErrorKind::Invariant, "dictionary owner table is inconsistent");
  if (text_.empty() || static_cast<std::uint8_t>(text_.back()) != kEndOfDict)
    fail(ErrorKind::Invariant, "dictionary text must end with 0x0");
  for (PhraseId i = 0; i < phrase_count(); ++i) {
    if (occ_[i] == 0)
      fail(ErrorKind::Invariant, "phrase " + std::to_string(i) + " has zero occurrences");
    const auto ph = phrase(i);
    if (ph.empty()) fail(ErrorKind::Invariant, "empty phrase in dictionary");
    if (static_cast<std::uint8_t>(text_[starts_[i + 1] - 1]) != kEndOfPhrase)
      fail(ErrorKind::Invariant, "phrase " + std::to_string(i) + " lacks its terminator");
    for (char c : ph) {
      const auto u = static_cast<std::uint8_t>(c);
      if (u != kSeparator && !is_text_symbol(u))
        fail(ErrorKind::Invariant, "phrase byte outside the storage alphabet");
    }
    if (owners_.empty() && i > 0 && !(phrase(i - 1) < ph))
      fail(ErrorKind::Invariant, "dictionary phrases are not strictly ascending");
  }
}

Dictionary concat_dicts(std::span<const Dictionary> dicts) {
  if (dicts.empty()) fail(ErrorKind::InvalidArgument, "no dictionaries to concatenate");
  Dictionary out;
  out.params_ = dicts.front().params_;
  out.dataset_ = dicts.front().dataset_;
  out.text_.clear();
  out.starts_.clear();
  std::uint64_t total = 1;
  std::size_t phrases = 0;
  for (const auto& d : dicts) {
    require_same_params(out.params_, d.params_, "concatenated dictionary");
    total += d.d_size();
    phrases += d.phrase_count();
  }
  if (phrases >= std::numeric_limits<PhraseId>::max())
    fail(ErrorKind::Limit, "too many phrases in concatenation");
  out.text_.reserve(total);
  out.starts_.reserve(phrases + 1);
  out.occ_.reserve(phrases);
  out.owners_.reserve(phrases);
  for (const auto& d : dicts) {
    const std::uint64_t base = out.text_.size();
    out.text_.append(d.text_, 0, d.d_size());
    for (PhraseId i = 0; i < d.phrase_count(); ++i) {
      out.starts_.push_back(base + d.starts_[i]);
      out.occ_.push_back(d.occ_[i]);
      out.owners_.push_back(d.phrase_dataset(i));
    }
  }
  out.starts_.push_back(out.text_.size());
  out.text_.push_back(static_cast<char>(kEndOfDict));
  // A concatenation of a single plain dictionary keeps no owner table.
  if (dicts.size() == 1 && !dicts.front().is_concatenation()) out.owners_.clear();
  return out;
}

std::weak_ordering compare_suffixes(const Dictionary& dict, DictSuffix a, DictSuffix b) {
  const auto text = dict.text();
  if (a.offset >= dict.d_size() || b.offset >= dict.d_size())
    fail(ErrorKind::InvalidArgument, "suffix offset out of range");
  for (std::uint64_t i = 0;; ++i) {
    const auto ca = static_cast<std::uint8_t>(text[a.offset + i]);
    const auto cb = static_cast<std::uint8_t>(text[b.offset + i]);
    if (ca != cb) return ca < cb ? std::weak_ordering::less : std::weak_ordering::greater;
    if (ca <= kEndOfPhrase) return std::weak_ordering::equivalent;
  }
}

// --- PackedDictionary ----------------------------------------------------------

namespace {

constexpr std::uint64_t repeat_field(std::uint64_t v) {
  std::uint64_t r = 0;
  for (unsigned i = 0; i < PackedDictionary::kBlockSymbols; ++i) r |= v << (3 * i);
  return r;
}

constexpr std::uint64_t kBlockMask = (std::uint64_t{1} << 60) - 1;
constexpr std::uint64_t kMid = repeat_field(2);   // bit 1 of every field
constexpr std::uint64_t kHigh = repeat_field(4);  // bit 2 of every field

// Marks (at bit 2 of the field) every symbol whose code is 0 or 1, i.e. the
// phrase terminator or the end of the dictionary.
constexpr std::uint64_t stop_fields(std::uint64_t block) {
  return ~(block | ((block & kMid) << 1)) & kHigh;
}

std::weak_ordering to_weak(std::uint8_t a, std::uint8_t b) {
  if (a == b) return std::weak_ordering::equivalent;
  return a < b ? std::weak_ordering::less : std::weak_ordering::greater;
}

}  // namespace

PackedDictionary::PackedDictionary(std::string_view symbols) : words_(1, 0) {
  reserve(symbols.size());
  append(symbols);
}

void PackedDictionary::reserve(std::uint64_t symbols) {
  words_.reserve((3 * symbols + 63) / 64 + 1);
}

void PackedDictionary::append(std::uint8_t symbol) {
  const std::uint8_t code = storage_code(symbol);
  if (code == kInvalidCode)
    fail(ErrorKind::InvalidArgument, "symbol outside the storage alphabet");
  const std::uint64_t bit = 3 * size_;
  const std::uint64_t q = bit >> 6;
  const unsigned r = static_cast<unsigned>(bit & 63);
  // words_ keeps a spare zero word, so q and q + 1 are addressable.
  if (r <= 61) {
    words_[q] |= std::uint64_t{code} << (61 - r);
  } else {
    const unsigned spill = r - 61;  // bits landing in the next word
    words_[q] |= std::uint64_t{code} >> spill;
    words_[q + 1] |= std::uint64_t{code} << (64 - spill);
  }
  ++size_;
  const std::uint64_t needed = (3 * size_ + 63) / 64 + 1;
  while (words_.size() < needed) words_.push_back(0);
}

void PackedDictionary::append(std::string_view symbols) {
  for (char c : symbols) append(static_cast<std::uint8_t>(c));
}

std::uint8_t PackedDictionary::at(std::uint64_t i) const {
  if (i >= size_) fail(ErrorKind::InvalidArgument, "packed index out of range");
  return storage_symbol(code_at(i));
}

std::string PackedDictionary::unpack() const {
  std::string out(size_, '\0');
  for (std::uint64_t i = 0; i < size_; ++i)
    out[i] = static_cast<char>(storage_symbol(code_at(i)));
  return out;
}

std::weak_ordering PackedDictionary::compare(DictSuffix a, DictSuffix b) const noexcept {
  std::uint64_t i = a.offset;
  std::uint64_t j = b.offset;
  for (;;) {
    const std::uint64_t x = block(i);
    const std::uint64_t y = block(j);
    const std::uint64_t stops = stop_fields(x);
    const std::uint64_t diff = x ^ y;
    if (diff == 0) {
      if (stops != 0) return std::weak_ordering::equivalent;
      i += kBlockSymbols;
      j += kBlockSymbols;
      continue;
    }
    const unsigned sym = static_cast<unsigned>(std::countl_zero(diff << 4)) / 3;
    const std::uint64_t before =
        sym == 0 ? 0 : kBlockMask & ~((std::uint64_t{1} << (60 - 3 * sym)) - 1);
    if ((stops & before) != 0) return std::weak_ordering::equivalent;
    const unsigned shift = 57 - 3 * sym;
    return to_weak(static_cast<std::uint8_t>((x >> shift) & 7u),
                   static_cast<std::uint8_t>((y >> shift) & 7u));
  }
}

std::weak_ordering PackedDictionary::compare_per_symbol(DictSuffix a,
                                                        DictSuffix b) const noexcept {
  for (std::uint64_t k = 0;; ++k) {
    const auto ca = code_at(a.offset + k);
    const auto cb = code_at(b.offset + k);
    if (ca != cb) return to_weak(ca, cb);
    if (ca <= 1) return std::weak_ordering::equivalent;
  }
}

void PackedDictionary::write(std::ostream& out) const {
  const std::uint64_t bytes = byte_length(size_);
  std::vector<char> buf;
  buf.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(bytes, 1 << 16)));
  for (std::uint64_t k = 0; k < bytes; ++k) {
    const std::uint64_t word = words_[k / 8];
    buf.push_back(static_cast<char>((word >> (56 - 8 * (k % 8))) & 0xFF));
    if (buf.size() == buf.capacity()) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

PackedDictionary PackedDictionary::read(std::istream& in, std::uint64_t symbols,
                                        const std::string& what) {
  PackedDictionary p;
  const std::uint64_t bytes = byte_length(symbols);
  p.words_.assign((3 * symbols + 63) / 64 + 1, 0);
  std::vector<char> buf(static_cast<std::size_t>(bytes));
  read_exact(in, buf, what);
  for (std::uint64_t k = 0; k < bytes; ++k)
    p.words_[k / 8] |= std::uint64_t{static_cast<std::uint8_t>(buf[k])}
                       << (56 - 8 * (k % 8));
  p.size_ = symbols;
  // Clear any stray bits beyond the last symbol.
  const std::uint64_t used_bits = 3 * symbols;
  const std::uint64_t last = used_bits >> 6;
  const unsigned rem = static_cast<unsigned>(used_bits & 63);
  if (rem != 0) p.words_[last] &= ~((std::uint64_t{1} << (64 - rem)) - 1);
  for (std::uint64_t w = rem == 0 ? last : last + 1; w < p.words_.size(); ++w)
    p.words_[w] = 0;
  return p;
}

PackedDictionary pack(const Dictionary& dict) { return PackedDictionary(dict.text()); }

// --- dictionary suffix array ------------------------------------------------------

std::vector<std::uint64_t> build_dict_sa(const Dictionary& dict) {
  // Each terminator becomes its own symbol ranked by position so that equal
  // phrase suffixes tie-break by offset; the final 0x0 is the SA-IS sentinel.
  const auto text = dict.text();
  const std::uint64_t n = text.size();
  const auto phrases = static_cast<std::uint32_t>(dict.phrase_count());
  const std::uint32_t letter_base = 1 + phrases;
  std::vector<std::uint32_t> codes(n);
  std::uint32_t terminator = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::uint8_t>(text[i]);
    if (c == kEndOfDict) {
      codes[i] = 0;
    } else if (c == kEndOfPhrase) {
      codes[i] = 1 + terminator++;
    } else {
      codes[i] = letter_base + storage_code(c) - 2;
    }
  }
  auto sa = suffix_array(codes, letter_base + 6);
  sa.erase(sa.begin());
  return sa;
}

// --- persistence -----------------------------------------------------------------

namespace {

constexpr std::uint32_t kPackedFlag = 1;

DictionaryFileInfo read_dict_info(std::istream& in, const std::string& path) {
  const auto header = read_artifact_header(in, kDictMagic, path);
  DictionaryFileInfo info;
  info.params = header.params;
  info.dataset_id = header.dataset_id;
  const auto flags = read_u32(in, path + " flags");
  info.packed = (flags & kPackedFlag) != 0;
  info.phrase_count = read_u64(in, path + " phrase count");
  info.d_size = read_u64(in, path + " dSize");
  const std::uint64_t body = info.packed ? PackedDictionary::byte_length(info.d_size + 1)
                                         : info.d_size + 1;
  const std::uint64_t expected = 8 + 4 + 4 + 8 + 8 + 8 + 4 + 4 + 8 + 8 + body +
                                 8 * info.phrase_count;
  if (file_size(path) != expected)
    fail(ErrorKind::Format, "'" + path + "' size does not match its header");
  return info;
}

}  // namespace

void write_dictionary(const Dictionary& dict, const std::string& path, bool packed) {
  auto out = open_output(path);
  write_artifact_header(out, kDictMagic, {dict.params(), dict.dataset_id()});
  write_u32(out, packed ? kPackedFlag : 0);
  write_u64(out, dict.phrase_count());
  write_u64(out, dict.d_size());
  if (packed) {
    pack(dict).write(out);
  } else {
    out.write(dict.text().data(), static_cast<std::streamsize>(dict.text().size()));
  }
  for (auto o : dict.occurrences()) write_u64(out, o);
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

Dictionary read_dictionary(const std::string& path) {
  DictionaryReader reader(path);
  const auto& info = reader.info();
  std::vector<std::string> phrases;
  phrases.reserve(info.phrase_count);
  std::string current;
  bool ended = false;
  reader.for_each_symbol([&](std::uint8_t c) {
    if (ended) fail(ErrorKind::Format, "'" + path + "' has symbols after 0x0");
    if (c == kEndOfPhrase) {
      phrases.push_back(std::move(current));
      current.clear();
    } else if (c == kEndOfDict) {
      ended = true;
    } else {
      current.push_back(static_cast<char>(c));
    }
  });
  if (!ended || !current.empty() || phrases.size() != info.phrase_count)
    fail(ErrorKind::Format, "'" + path + "' dictionary text is malformed");
  std::vector<std::uint64_t> occ(info.phrase_count);
  for (auto& o : occ) o = reader.next_occ();
  try {
    return Dictionary::from_phrases(info.params, info.dataset_id, phrases, std::move(occ));
  } catch (const Error& e) {
    fail(ErrorKind::Format, "'" + path + "': " + e.what());
  }
}

DictionaryReader::DictionaryReader(const std::string& path)
    : path_(path), in_(open_input(path)), info_(read_dict_info(in_, path)) {}

std::uint64_t DictionaryReader::next_occ() {
  if (occ_read_ >= info_.phrase_count)
    fail(ErrorKind::Format, "'" + path_ + "': read past the occurrence table");
  ++occ_read_;
  return read_u64(in_, path_ + " occurrence table");
}

void write_sa(const std::vector<std::uint64_t>& sa, std::uint64_t d_size,
              const std::string& path) {
  if (sa.size() != d_size) fail(ErrorKind::InvalidArgument, "SA length differs from dSize");
  auto out = open_output(path);
  out.write(kSaMagic.data(), kSaMagic.size());
  write_u64(out, d_size);
  for (auto v : sa) write_u64(out, v);
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

std::vector<std::uint64_t> read_sa(const std::string& path) {
  SaReader reader(path);
  std::vector<std::uint64_t> sa;
  sa.reserve(reader.d_size());
  std::uint64_t v = 0;
  while (reader.next(v)) sa.push_back(v);
  return sa;
}

SaReader::SaReader(const std::string& path, std::size_t buffer_entries)
    : path_(path), in_(open_input(path)), buffer_(std::max<std::size_t>(buffer_entries, 1) * 8) {
  Magic got{};
  read_exact(in_, got, path + " magic");
  if (got != kSaMagic) fail(ErrorKind::Format, "'" + path + "' is not an SA file");
  d_size_ = read_u64(in_, path + " dSize");
  remaining_ = d_size_;
  const auto size = file_size(path);
  if (size < 16 + 8 * d_size_)
    fail(ErrorKind::Format, "truncated SA file '" + path + "'");
  if (size > 16 + 8 * d_size_)
    fail(ErrorKind::Format, "SA file '" + path + "' has trailing bytes");
}

bool SaReader::next(std::uint64_t& offset) {
  if (pos_ == end_) {
    if (remaining_ == 0) return false;
    const auto n = static_cast<std::size_t>(
        std::min<std::uint64_t>(remaining_, buffer_.size() / 8));
    read_exact(in_, std::span<char>(buffer_.data(), n * 8), path_ + " entries");
    pos_ = 0;
    end_ = n * 8;
    remaining_ -= n;
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(buffer_[pos_ + i]);
  pos_ += 8;
  if (v >= d_size_) fail(ErrorKind::Format, "'" + path_ + "' has an offset beyond dSize");
  offset = v;
  return true;
}

}  // namespace pfpm
