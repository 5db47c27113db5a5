#include "trigger_exchange.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>

#include <spdlog/spdlog.h>

#include "alphabet.hpp"
#include "bwt_build.hpp"
#include "error.hpp"

namespace pfpm {

namespace {

// K-way merge of sorted record streams. `emit` receives each distinct record
// with the list of sources holding it.
template <class Source, class Emit>
void multiway(std::vector<Source>& sources, Emit&& emit) {
  std::vector<std::optional<std::string>> head(sources.size());
  std::string rec;
  for (std::size_t j = 0; j < sources.size(); ++j)
    if (sources[j].next(rec)) head[j] = rec;
  std::vector<std::size_t> owners;
  for (;;) {
    const std::string* least = nullptr;
    for (const auto& h : head)
      if (h && (least == nullptr || *h < *least)) least = &*h;
    if (least == nullptr) return;
    const std::string current = *least;
    owners.clear();
    for (std::size_t j = 0; j < sources.size(); ++j) {
      if (head[j] && *head[j] == current) {
        owners.push_back(j);
        if (sources[j].next(rec)) head[j] = rec; else head[j].reset();
      }
    }
    emit(current, owners);
  }
}

class SetSource {
 public:
  explicit SetSource(const TriggerSet& set) : set_(&set) {}
  bool next(std::string& rec) {
    if (i_ == set_->size()) return false;
    rec = (*set_)[i_++];
    return true;
  }

 private:
  const TriggerSet* set_;
  std::size_t i_ = 0;
};

std::uint32_t common_width(const std::vector<std::uint32_t>& widths) {
  std::uint32_t w = 0;
  for (auto x : widths) {
    if (x == 0) continue;
    if (w != 0 && x != w)
      fail(ErrorKind::ParamMismatch, "trigger sets have different widths");
    w = x;
  }
  return w;
}

}  // namespace

TriggerCensus census(std::vector<TriggerSet> per_dataset) {
  if (per_dataset.size() < 2)
    fail(ErrorKind::InvalidArgument, "the census needs at least two datasets");
  std::vector<std::uint32_t> widths;
  for (const auto& s : per_dataset) widths.push_back(s.empty() ? 0 : s.width());
  const std::uint32_t w = common_width(widths);

  TriggerCensus out;
  out.shared = TriggerSet(w);
  out.exclusive.assign(per_dataset.size(), TriggerSet(w));
  std::vector<SetSource> sources;
  for (const auto& s : per_dataset) sources.emplace_back(s);
  multiway(sources, [&](const std::string& rec, const std::vector<std::size_t>& owners) {
    if (owners.size() > 1) out.shared.push_back(rec);
    else out.exclusive[owners.front()].push_back(rec);
  });
  out.per_dataset = std::move(per_dataset);
  return out;
}

std::string exclusive_trigger_path(const std::string& dir, std::size_t dataset) {
  return (std::filesystem::path(dir) / ("exclusive_" + std::to_string(dataset) + ".trg"))
      .string();
}

CensusSummary census_files(const std::vector<std::string>& inputs,
                           const std::string& out_shared, const std::string& exclusive_dir) {
  if (inputs.size() < 2) fail(ErrorKind::InvalidArgument, "the census needs at least two datasets");
  std::vector<TriggerReader> readers;
  readers.reserve(inputs.size());
  std::vector<std::uint32_t> widths;
  for (const auto& path : inputs) {
    readers.emplace_back(path);
    widths.push_back(readers.back().width());
  }
  CensusSummary summary;
  summary.w = common_width(widths);
  summary.total.assign(inputs.size(), 0);
  summary.exclusive.assign(inputs.size(), 0);

  std::error_code ec;
  std::filesystem::create_directories(exclusive_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create '" + exclusive_dir + "': " + ec.message());

  // Counts are patched in once the merge is done.
  auto shared_out = open_output(out_shared);
  write_u64(shared_out, 0);
  std::vector<std::ofstream> excl_out;
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    summary.exclusive_paths.push_back(exclusive_trigger_path(exclusive_dir, j));
    excl_out.push_back(open_output(summary.exclusive_paths.back()));
    write_u64(excl_out.back(), 0);
  }
  multiway(readers, [&](const std::string& rec, const std::vector<std::size_t>& owners) {
    for (auto j : owners) ++summary.total[j];
    if (owners.size() > 1) {
      shared_out.write(rec.data(), static_cast<std::streamsize>(rec.size()));
      ++summary.shared;
    } else {
      excl_out[owners.front()].write(rec.data(), static_cast<std::streamsize>(rec.size()));
      ++summary.exclusive[owners.front()];
    }
  });
  auto finish = [](std::ofstream& out, std::uint64_t count, const std::string& path) {
    out.seekp(0);
    write_u64(out, count);
    out.close();
    if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
  };
  finish(shared_out, summary.shared, out_shared);
  for (std::size_t j = 0; j < inputs.size(); ++j)
    finish(excl_out[j], summary.exclusive[j], summary.exclusive_paths[j]);
  return summary;
}

RestrictedParse restricted_parse_all(const std::vector<SequenceCollection>& colls,
                                     const ParseParams& params) {
  params.validate();
  std::vector<TriggerSet> sets;
  sets.reserve(colls.size());
  for (const auto& c : colls) sets.push_back(collect_triggers(c, params));
  RestrictedParse out;
  out.census = census(std::move(sets));
  for (std::size_t j = 0; j < colls.size(); ++j) {
    SequenceCollection c = colls[j];
    c.dataset_id = static_cast<DatasetId>(j);
    if (out.census.exclusive[j].empty())
      spdlog::warn("dataset {} has no exclusive triggers; every string becomes one phrase", j);
    out.parses.push_back(parse_collection(c, params, &out.census.exclusive[j]));
  }
  return out;
}

ExclusivityReport check_exclusivity(const std::vector<Dictionary>& dicts) {
  ExclusivityReport report;
  const Dictionary all = concat_dicts(dicts);
  const auto sad = build_dict_sa(all);
  const auto text = all.text();
  const std::uint32_t w = all.params().w;

  std::optional<std::uint64_t> prev;
  PhraseId prev_phrase = 0;
  for (std::uint64_t off : sad) {
    const PhraseId ph = all.phrase_at(off);
    if (!is_valid_suffix(all, off, ph)) continue;
    ++report.valid_suffixes;
    if (prev && compare_suffixes(all, {*prev}, {off}) == std::weak_ordering::equivalent &&
        all.phrase_dataset(prev_phrase) != all.phrase_dataset(ph)) {
      const bool terminal =
          static_cast<std::uint8_t>(text[all.phrase_end(ph) - 2]) == kSeparator;
      if (terminal) {
        ++report.terminal_shared;
      } else if (report.violations++ == 0) {
        const std::uint64_t end = all.phrase_end(ph) - 1;
        report.first_violation = std::string(text.substr(off, std::min<std::uint64_t>(end - off, 4 * w)));
      }
    }
    prev = off;
    prev_phrase = ph;
  }
  return report;
}

}  // namespace pfpm
