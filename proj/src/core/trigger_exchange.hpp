#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pfp_core.hpp"

namespace pfpm {

struct TriggerCensus {
  std::vector<TriggerSet> per_dataset;
  TriggerSet shared;
  std::vector<TriggerSet> exclusive;  // triggers seen in exactly one dataset
};

// Partitions the union of the per-dataset trigger sets into shared triggers
// (seen in two or more datasets) and per-dataset exclusive ones.
TriggerCensus census(std::vector<TriggerSet> per_dataset);

struct CensusSummary {
  std::uint32_t w = 0;
  std::uint64_t shared = 0;
  std::vector<std::uint64_t> total;      // per dataset
  std::vector<std::uint64_t> exclusive;  // per dataset
  std::vector<std::string> exclusive_paths;
};

// Streaming census over sorted trigger files. Exclusive sets are written to
// `exclusive_dir`/exclusive_<j>.trg.
CensusSummary census_files(const std::vector<std::string>& inputs,
                           const std::string& out_shared, const std::string& exclusive_dir);

std::string exclusive_trigger_path(const std::string& dir, std::size_t dataset);

struct RestrictedParse {
  TriggerCensus census;
  std::vector<ParseResult> parses;  // dataset j has dataset id j
};

// Collects triggers per dataset, runs the census and parses every dataset with
// its exclusive triggers only.
RestrictedParse restricted_parse_all(const std::vector<SequenceCollection>& colls,
                                     const ParseParams& params);

struct ExclusivityReport {
  std::uint64_t valid_suffixes = 0;
  std::uint64_t terminal_shared = 0;  // equal suffixes ending in the string padding
  std::uint64_t violations = 0;
  std::string first_violation;
};

// Exhaustive check that no valid phrase suffix occurs in the dictionaries of
// two datasets. Suffixes ending in the 0x2^w padding belong to distinct string
// ends and are counted separately instead of being reported.
ExclusivityReport check_exclusivity(const std::vector<Dictionary>& dicts);

}  // namespace pfpm
