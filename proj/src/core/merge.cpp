#include "merge.hpp"

#include <algorithm>

#include "alphabet.hpp"
#include "binary_io.hpp"
#include "bwt_build.hpp"
#include "error.hpp"

namespace pfpm {

// --- tables ---------------------------------------------------------------------------

MergeTables::MergeTables(std::uint32_t w, std::uint64_t stride) : w_(w), stride_(stride) {
  if (stride == 0) fail(ErrorKind::InvalidArgument, "sample stride must be positive");
}

void MergeTables::reserve(std::uint64_t symbols, std::uint64_t phrases) {
  sample_phrase_.reserve(symbols / stride_ + 1);
  phrase_end_.reserve(phrases);
  phrase_occ_.reserve(phrases);
  phrase_ds_.reserve(phrases);
}

void MergeTables::push_symbol(std::uint8_t symbol, DatasetId dataset) {
  if (size_ % stride_ == 0) sample_phrase_.push_back(static_cast<PhraseId>(phrase_end_.size()));
  ++size_;
  if (symbol == kEndOfPhrase) {
    phrase_end_.push_back(size_);
    phrase_ds_.push_back(dataset);
  }
}

void MergeTables::push_occ(std::uint64_t occ) {
  if (phrase_occ_.size() >= phrase_end_.size())
    fail(ErrorKind::Format, "more occurrence counts than phrases");
  phrase_occ_.push_back(occ);
}

PhraseId MergeTables::lookup(std::uint64_t offset) const {
  if (offset >= size_) fail(ErrorKind::InvalidArgument, "dictionary offset out of range");
  PhraseId i = sample_phrase_[offset / stride_];
  while (phrase_end_[i] <= offset) ++i;
  return i;
}

MergeTables::Entry MergeTables::query(std::uint64_t offset) const {
  Entry e;
  e.phrase = lookup(offset);
  const std::uint64_t start = e.phrase == 0 ? 0 : phrase_end_[e.phrase - 1];
  const std::uint64_t terminator = phrase_end_[e.phrase] - 1;
  e.valid = offset > start && terminator - offset >= w_;
  e.occ = phrase_occ_[e.phrase];
  e.dataset = phrase_ds_[e.phrase];
  return e;
}

std::uint64_t MergeTables::memory_bytes() const noexcept {
  return sample_phrase_.capacity() * sizeof(PhraseId) +
         phrase_end_.capacity() * sizeof(std::uint64_t) +
         phrase_occ_.capacity() * sizeof(std::uint64_t) +
         phrase_ds_.capacity() * sizeof(DatasetId);
}

MergeTables build_merge_tables(const std::vector<Dictionary>& dicts, std::uint64_t stride) {
  if (dicts.empty()) fail(ErrorKind::InvalidArgument, "no dictionaries");
  MergeTables t(dicts.front().params().w, stride);
  for (std::size_t j = 0; j < dicts.size(); ++j) {
    require_same_params(dicts.front().params(), dicts[j].params(), "merge table dictionary");
    for (char c : dicts[j].text().substr(0, dicts[j].d_size()))
      t.push_symbol(static_cast<std::uint8_t>(c), static_cast<DatasetId>(j));
  }
  for (const auto& d : dicts)
    for (auto o : d.occurrences()) t.push_occ(o);
  return t;
}

// --- SAD cursor -------------------------------------------------------------------------

bool SadMergeCursor::Later::operator()(const Head& a, const Head& b) const noexcept {
  const auto c = dict->compare({a.offset}, {b.offset});
  if (c != std::weak_ordering::equivalent) return c == std::weak_ordering::greater;
  return a.dataset > b.dataset;
}

SadMergeCursor::SadMergeCursor(const PackedDictionary& dict,
                               const std::vector<std::string>& sa_paths,
                               const std::vector<std::uint64_t>& bases,
                               std::size_t buffer_entries)
    : dict_(dict), bases_(bases), emitted_(sa_paths.size(), 0), heap_(Later{&dict}) {
  if (bases.size() != sa_paths.size())
    fail(ErrorKind::InvalidArgument, "one base offset per SA file is required");
  readers_.reserve(sa_paths.size());
  for (const auto& p : sa_paths) readers_.emplace_back(p, buffer_entries);
  for (std::size_t j = 0; j < readers_.size(); ++j) refill(j);
}

void SadMergeCursor::refill(std::size_t dataset) {
  std::uint64_t local = 0;
  if (!readers_[dataset].next(local)) return;
  ++emitted_[dataset];
  heap_.push({bases_[dataset] + local, dataset});
}

bool SadMergeCursor::next(std::uint64_t& offset, std::size_t& dataset) {
  if (heap_.empty()) return false;
  const Head h = heap_.top();
  heap_.pop();
  offset = h.offset;
  dataset = h.dataset;
  refill(h.dataset);
  return true;
}

std::uint64_t SadMergeCursor::memory_bytes() const noexcept {
  std::uint64_t bytes = readers_.size() * (sizeof(SaReader) + sizeof(Head) + 16);
  for (const auto& r : readers_) bytes += r.buffer_bytes();
  return bytes;
}

// --- merge ----------------------------------------------------------------------------------

namespace {

std::string dataset_label(std::size_t j, const std::string& path) {
  return "dataset " + std::to_string(j) + " ('" + path + "')";
}

}  // namespace

MergeStats merge_bwts(const std::vector<std::string>& dict_paths,
                      const std::vector<std::string>& sa_paths,
                      const std::vector<std::string>& bwt_paths, const std::string& out_path,
                      const MergeOptions& options) {
  const std::size_t k = dict_paths.size();
  if (k == 0) fail(ErrorKind::InvalidArgument, "nothing to merge");
  if (sa_paths.size() != k || bwt_paths.size() != k)
    fail(ErrorKind::InvalidArgument, "merge needs one dictionary, SA and BWT per dataset");
  if (options.buffer_bytes == 0) fail(ErrorKind::InvalidArgument, "copy buffer must be non-empty");

  // Validate every header before doing any work.
  std::vector<DictionaryReader> dicts;
  std::vector<BwtReader> bwts;
  dicts.reserve(k);
  bwts.reserve(k);
  std::uint64_t total_symbols = 1;
  std::uint64_t total_phrases = 0;
  std::vector<std::uint64_t> bases;
  for (std::size_t j = 0; j < k; ++j) {
    dicts.emplace_back(dict_paths[j]);
    bwts.emplace_back(bwt_paths[j]);
    const auto& info = dicts[j].info();
    require_same_params(dicts[0].info().params, info.params, dict_paths[j].c_str());
    require_same_params(dicts[0].info().params, bwts[j].header().params, bwt_paths[j].c_str());
    if (bwts[j].header().dataset_id != info.dataset_id)
      fail(ErrorKind::InvalidArgument, "BWT '" + bwt_paths[j] + "' belongs to dataset " +
                                           std::to_string(bwts[j].header().dataset_id) +
                                           " but its dictionary to dataset " +
                                           std::to_string(info.dataset_id));
    SaReader probe(sa_paths[j], 1);
    if (probe.d_size() != info.d_size)
      fail(ErrorKind::Format, "SA '" + sa_paths[j] + "' does not match dictionary '" +
                                  dict_paths[j] + "'");
    bases.push_back(total_symbols - 1);
    total_symbols += info.d_size;
    total_phrases += info.phrase_count;
  }
  const std::uint32_t w = dicts[0].info().params.w;

  MergeStats stats;
  PackedDictionary packed;
  packed.reserve(total_symbols);
  MergeTables tables(w, options.stride);
  tables.reserve(total_symbols, total_phrases);
  for (std::size_t j = 0; j < k; ++j) {
    std::uint64_t phrase_len = 0;
    std::vector<std::uint64_t> lens;
    dicts[j].for_each_symbol([&](std::uint8_t c) {
      if (c == kEndOfDict) return;
      packed.append(c);
      tables.push_symbol(c, static_cast<DatasetId>(j));
      if (c == kEndOfPhrase) {
        lens.push_back(phrase_len);
        phrase_len = 0;
      } else {
        ++phrase_len;
      }
    });
    std::uint64_t text_length = 0;
    for (auto len : lens) {
      const std::uint64_t occ = dicts[j].next_occ();
      tables.push_occ(occ);
      text_length += occ * (len - w);
    }
    if (text_length != bwts[j].length())
      fail(ErrorKind::Format, "BWT '" + bwt_paths[j] + "' has length " +
                                  std::to_string(bwts[j].length()) + " but its dictionary covers " +
                                  std::to_string(text_length) + " characters");
    stats.lengths.push_back(bwts[j].length());
    stats.output_length += bwts[j].length();
  }
  packed.append(kEndOfDict);
  dicts.clear();
  dicts.shrink_to_fit();

  SadMergeCursor cursor(packed, sa_paths, bases, options.sa_buffer_entries);
  std::vector<char> buffer(options.buffer_bytes);
  stats.consumed.assign(k, 0);
  stats.table_bytes = tables.memory_bytes();
  stats.packed_bytes = packed.memory_bytes();
  stats.buffer_bytes = buffer.size();
  stats.cursor_bytes = cursor.memory_bytes();

  const ArtifactHeader header{bwts[0].header().params, kMergedDataset};
  auto out = open_output(out_path);
  write_artifact_header(out, kBwtMagic, header);
  write_u32(out, 0);
  write_u64(out, stats.output_length);

  bool have_prev = false;
  std::uint64_t prev_offset = 0;
  std::size_t prev_dataset = 0;
  std::uint64_t offset = 0;
  std::size_t cursor_dataset = 0;
  while (cursor.next(offset, cursor_dataset)) {
    ++stats.sad_entries;
    const auto e = tables.query(offset);
    if (!e.valid) continue;
    ++stats.valid_entries;
    const std::size_t ds = e.dataset;
    if (ds != cursor_dataset)
      fail(ErrorKind::Invariant, "SA entry of dataset " + std::to_string(cursor_dataset) +
                                     " points into a phrase of dataset " + std::to_string(ds));
    if (have_prev && prev_dataset != ds &&
        packed.compare({prev_offset}, {offset}) == std::weak_ordering::equivalent) {
      // Equal suffixes ending in the padding belong to different string ends.
      const std::uint64_t last = tables.phrase_end()[e.phrase] - 2;
      if (packed.code_at(last) != storage_code(kSeparator))
        fail(ErrorKind::Invariant,
             "valid phrase suffix shared by datasets " + std::to_string(prev_dataset) + " and " +
                 std::to_string(ds) + "; trigger restriction or parameters are inconsistent");
      ++stats.terminal_ties;
    }
    have_prev = true;
    prev_offset = offset;
    prev_dataset = ds;

    if (e.occ > bwts[ds].remaining())
      fail(ErrorKind::Invariant, dataset_label(ds, bwt_paths[ds]) + " BWT exhausted after " +
                                     std::to_string(stats.consumed[ds]) + " characters");
    std::uint64_t left = e.occ;
    while (left > 0) {
      const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(left, buffer.size()));
      bwts[ds].read(std::span<char>(buffer.data(), n));
      out.write(buffer.data(), static_cast<std::streamsize>(n));
      left -= n;
    }
    stats.consumed[ds] += e.occ;
  }
  for (std::size_t j = 0; j < k; ++j)
    if (stats.consumed[j] != stats.lengths[j])
      fail(ErrorKind::Invariant, dataset_label(j, bwt_paths[j]) + " BWT consumed " +
                                     std::to_string(stats.consumed[j]) + " of " +
                                     std::to_string(stats.lengths[j]) + " characters");
  out.close();
  if (!out) fail(ErrorKind::Io, "failed writing '" + out_path + "'");
  return stats;
}

std::int64_t compare_bwt_files(const std::string& a, const std::string& b) {
  BwtReader ra(a);
  BwtReader rb(b);
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<char> ba(kChunk);
  std::vector<char> bb(kChunk);
  std::uint64_t pos = 0;
  const std::uint64_t common = std::min(ra.length(), rb.length());
  while (pos < common) {
    const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(common - pos, kChunk));
    ra.read(std::span<char>(ba.data(), n));
    rb.read(std::span<char>(bb.data(), n));
    const auto mm = std::mismatch(ba.begin(), ba.begin() + static_cast<std::ptrdiff_t>(n), bb.begin());
    if (mm.first != ba.begin() + static_cast<std::ptrdiff_t>(n))
      return static_cast<std::int64_t>(pos + static_cast<std::uint64_t>(mm.first - ba.begin()));
    pos += n;
  }
  return ra.length() == rb.length() ? -1 : static_cast<std::int64_t>(common);
}

}  // namespace pfpm
