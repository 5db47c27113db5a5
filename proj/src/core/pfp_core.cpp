#include "pfp_core.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "alphabet.hpp"
#include "binary_io.hpp"
#include "error.hpp"
#include "karp_rabin.hpp"

namespace pfpm {

// --- TriggerSet ------------------------------------------------------------------

TriggerSet TriggerSet::from_strings(std::uint32_t w, std::vector<std::string> records) {
  std::sort(records.begin(), records.end());
  records.erase(std::unique(records.begin(), records.end()), records.end());
  TriggerSet set(w);
  set.data_.reserve(records.size() * w);
  for (const auto& r : records) set.push_back(r);
  return set;
}

bool TriggerSet::contains(std::string_view record) const {
  if (record.size() != w_ || empty()) return false;
  std::size_t lo = 0;
  std::size_t hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto cmp = (*this)[mid].compare(record);
    if (cmp == 0) return true;
    if (cmp < 0) lo = mid + 1; else hi = mid;
  }
  return false;
}

void TriggerSet::push_back(std::string_view record) {
  if (record.size() != w_)
    fail(ErrorKind::InvalidArgument, "trigger record has the wrong width");
  if (!empty() && !((*this)[size() - 1] < record))
    fail(ErrorKind::InvalidArgument, "trigger records must be strictly ascending");
  data_.append(record);
}

void write_trigger_set(const TriggerSet& set, const std::string& path) {
  auto out = open_output(path);
  write_u64(out, set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out.write(set[i].data(), set.width());
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

TriggerSet read_trigger_set(const std::string& path, std::uint32_t expected_w) {
  TriggerReader reader(path);
  if (expected_w != 0 && reader.count() > 0 && reader.width() != expected_w)
    fail(ErrorKind::ParamMismatch, "'" + path + "' holds triggers of width " +
                                       std::to_string(reader.width()) + ", expected " +
                                       std::to_string(expected_w));
  TriggerSet set(reader.count() > 0 ? reader.width() : expected_w);
  std::string rec;
  while (reader.next(rec)) set.push_back(rec);
  return set;
}

TriggerReader::TriggerReader(const std::string& path) : path_(path), in_(open_input(path)) {
  const auto size = file_size(path);
  count_ = read_u64(in_, path + " trigger count");
  if (count_ == 0) {
    if (size != 8) fail(ErrorKind::Format, "'" + path + "' has trailing bytes");
    return;
  }
  const std::uint64_t body = size - 8;
  if (body % count_ != 0 || body / count_ == 0 || body / count_ > 0xFFFFFFFFu)
    fail(ErrorKind::Format, "'" + path + "' size is not a multiple of its record count");
  w_ = static_cast<std::uint32_t>(body / count_);
}

bool TriggerReader::next(std::string& record) {
  if (read_ == count_) return false;
  record.resize(w_);
  read_exact(in_, record, path_ + " trigger record");
  if (read_ > 0 && !(previous_ < record))
    fail(ErrorKind::Format, "'" + path_ + "' records are not strictly ascending");
  previous_ = record;
  ++read_;
  return true;
}

// --- parsing ---------------------------------------------------------------------------

namespace {

std::string padded(std::string_view seq, std::uint32_t w) {
  std::string p;
  p.reserve(seq.size() + w);
  p.append(seq);
  p.append(w, static_cast<char>(kSeparator));
  return p;
}

std::span<const std::uint8_t> bytes_of(std::string_view s, std::size_t pos, std::size_t n) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()) + pos, n};
}

class TriggerFilter {
 public:
  TriggerFilter(const ParseParams& params, const TriggerSet* allowed)
      : allowed_(allowed != nullptr) {
    if (allowed == nullptr) return;
    if (!allowed->empty() && allowed->width() != params.w)
      fail(ErrorKind::ParamMismatch, "allowed trigger set width " +
                                         std::to_string(allowed->width()) +
                                         " differs from w = " + std::to_string(params.w));
    set_.reserve(allowed->size());
    for (std::size_t i = 0; i < allowed->size(); ++i) set_.insert((*allowed)[i]);
  }

  bool active(std::string_view window) const {
    return !allowed_ || set_.contains(window);
  }

 private:
  bool allowed_;
  std::unordered_set<std::string_view> set_;
};

// Positions in [0, |seq|) of active windows of the padded string, followed by
// the terminal position |seq|.
std::vector<std::uint64_t> cut_points(std::string_view pad, std::uint64_t n,
                                      const KarpRabin& kr, std::uint32_t w,
                                      const TriggerFilter& filter) {
  std::vector<std::uint64_t> cuts;
  std::uint64_t h = kr.from_scratch(bytes_of(pad, 0, w));
  for (std::uint64_t i = 0; i < n; ++i) {
    if (kr.is_trigger(h) && filter.active(pad.substr(i, w))) cuts.push_back(i);
    h = kr.roll(h, static_cast<std::uint8_t>(pad[i]), static_cast<std::uint8_t>(pad[i + w]));
  }
  cuts.push_back(n);
  return cuts;
}

template <class Fn>
void for_each_phrase(std::string_view seq, const ParseParams& params, const KarpRabin& kr,
                     const TriggerFilter& filter, Fn&& fn) {
  if (seq.empty()) fail(ErrorKind::InvalidArgument, "cannot parse an empty string");
  const std::uint32_t w = params.w;
  const std::string pad = padded(seq, w);
  const auto cuts = cut_points(pad, seq.size(), kr, w, filter);
  std::string first(w, static_cast<char>(kSeparator));
  first.append(pad, 0, cuts[0] + w);
  fn(std::string_view(first));
  for (std::size_t k = 1; k < cuts.size(); ++k)
    fn(std::string_view(pad).substr(cuts[k - 1], cuts[k] - cuts[k - 1] + w));
}

}  // namespace

TriggerSet collect_triggers(const SequenceCollection& coll, const ParseParams& params) {
  params.validate();
  const KarpRabin kr(params);
  const std::uint32_t w = params.w;
  std::unordered_set<std::string> found;
  for (const auto& seq : coll.sequences) {
    if (seq.empty()) fail(ErrorKind::InvalidArgument, "empty sequence in collection");
    const std::string pad = padded(seq, w);
    std::uint64_t h = kr.from_scratch(bytes_of(pad, 0, w));
    for (std::uint64_t i = 0;; ++i) {
      if (kr.is_trigger(h)) found.emplace(pad, i, w);
      if (i == seq.size()) break;
      h = kr.roll(h, static_cast<std::uint8_t>(pad[i]), static_cast<std::uint8_t>(pad[i + w]));
    }
  }
  return TriggerSet::from_strings(w, {found.begin(), found.end()});
}

std::vector<std::string> split_phrases(std::string_view seq, const ParseParams& params,
                                       const TriggerSet* allowed) {
  params.validate();
  const KarpRabin kr(params);
  const TriggerFilter filter(params, allowed);
  std::vector<std::string> out;
  for_each_phrase(seq, params, kr, filter,
                  [&](std::string_view phrase) { out.emplace_back(phrase); });
  return out;
}

ParseResult parse_collection(const SequenceCollection& coll, const ParseParams& params,
                             const TriggerSet* allowed) {
  params.validate();
  if (coll.sequences.empty())
    fail(ErrorKind::InvalidArgument, "cannot parse an empty collection");
  const KarpRabin kr(params);
  const TriggerFilter filter(params, allowed);

  std::unordered_map<std::string, PhraseId> ids;
  std::vector<std::uint64_t> occ;
  Parse parse;
  parse.dataset_id = coll.dataset_id;
  for (const auto& seq : coll.sequences) {
    for_each_phrase(seq, params, kr, filter, [&](std::string_view phrase) {
      auto [it, inserted] = ids.try_emplace(std::string(phrase), static_cast<PhraseId>(occ.size()));
      if (inserted) {
        if (occ.size() >= std::numeric_limits<PhraseId>::max() - 1)
          fail(ErrorKind::Limit, "too many distinct phrases");
        occ.push_back(0);
      }
      ++occ[it->second];
      parse.phrase_ids.push_back(it->second);
    });
    parse.string_starts.push_back(parse.phrase_ids.size());
  }

  // Renumber phrases by lexicographic rank.
  std::vector<std::pair<std::string_view, PhraseId>> order;
  order.reserve(ids.size());
  for (const auto& [phrase, id] : ids) order.emplace_back(phrase, id);
  std::sort(order.begin(), order.end());
  std::vector<PhraseId> rank(order.size());
  std::vector<std::string> phrases;
  std::vector<std::uint64_t> sorted_occ;
  phrases.reserve(order.size());
  sorted_occ.reserve(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[order[r].second] = static_cast<PhraseId>(r);
    phrases.emplace_back(order[r].first);
    sorted_occ.push_back(occ[order[r].second]);
  }
  for (auto& id : parse.phrase_ids) id = rank[id];

  if (parse.phrase_ids.size() == coll.sequences.size())
    spdlog::warn("dataset {}: every string parsed into a single phrase; merging "
                 "stays correct but saves no memory",
                 coll.dataset_id);

  return {Dictionary::from_phrases(params, coll.dataset_id, phrases, std::move(sorted_occ)),
          std::move(parse)};
}

std::vector<std::string> reconstruct_padded(const Dictionary& dict, const Parse& parse) {
  const std::uint32_t w = dict.params().w;
  std::vector<std::string> out;
  out.reserve(parse.string_count());
  for (std::size_t s = 0; s < parse.string_count(); ++s) {
    const auto ids = parse.string_phrases(s);
    if (ids.empty()) fail(ErrorKind::Invariant, "string with no phrases");
    std::string text;
    std::string_view prev;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const auto ph = dict.phrase(ids[k]);
      if (ph.size() <= w) fail(ErrorKind::Invariant, "phrase shorter than w + 1");
      if (k == 0) {
        if (ph.substr(0, w) != std::string(w, static_cast<char>(kSeparator)))
          fail(ErrorKind::Invariant, "first phrase does not start with the wrapped terminal");
      } else if (prev.substr(prev.size() - w) != ph.substr(0, w)) {
        fail(ErrorKind::Invariant, "consecutive phrases do not overlap by w");
      }
      text.append(ph.substr(w));
      prev = ph;
    }
    out.push_back(std::move(text));
  }
  return out;
}

void write_parse(const Parse& parse, const ParseParams& params, const std::string& path) {
  auto out = open_output(path);
  write_artifact_header(out, kParseMagic, {params, parse.dataset_id});
  write_u64(out, parse.string_count());
  write_u64(out, parse.phrase_ids.size());
  for (auto s : parse.string_starts) write_u64(out, s);
  for (auto id : parse.phrase_ids) write_u32(out, id);
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

Parse read_parse(const std::string& path, ParseParams* params_out) {
  auto in = open_input(path);
  const auto header = read_artifact_header(in, kParseMagic, path);
  Parse parse;
  parse.dataset_id = header.dataset_id;
  const auto strings = read_u64(in, path + " string count");
  const auto total = read_u64(in, path + " phrase count");
  const std::uint64_t expected = 44 + 16 + 8 * (strings + 1) + 4 * total;
  if (strings > file_size(path) || file_size(path) != expected)
    fail(ErrorKind::Format, "'" + path + "' size does not match its header");
  parse.string_starts.resize(strings + 1);
  for (auto& s : parse.string_starts) s = read_u64(in, path + " string offsets");
  if (parse.string_starts.front() != 0 || parse.string_starts.back() != total ||
      !std::is_sorted(parse.string_starts.begin(), parse.string_starts.end()))
    fail(ErrorKind::Format, "'" + path + "' string offsets are malformed");
  parse.phrase_ids.resize(total);
  for (auto& id : parse.phrase_ids) id = read_u32(in, path + " phrase ids");
  if (params_out != nullptr) *params_out = header.params;
  return parse;
}

}  // namespace pfpm
