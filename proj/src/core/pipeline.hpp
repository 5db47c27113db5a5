#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "merge.hpp"
#include "params.hpp"
#include "text_normalize.hpp"

namespace pfpm {

struct PipelineConfig {
  std::vector<std::string> inputs;       // one small dataset per file, in merge order
  std::optional<InputFormat> format;     // default: by file extension
  std::string work_dir;
  ParseParams params;
  std::uint64_t stride = 50;
  bool packed = true;
  bool verify = false;
  std::uint64_t oracle_max_length = 1'000'000;
  unsigned jobs = 1;
  bool force = false;  // rebuild artifacts cached with other parameters
};

// Reads a config file: {"inputs": [...], "work_dir": ..., "w": .., "p": ..,
// "stride": .., "packed": .., "verify": .., "jobs": .., "format": "fasta"|"plain"}.
PipelineConfig load_pipeline_config(const std::string& path);

struct StageReport {
  std::string name;
  std::int64_t dataset = -1;  // -1 for whole-run stages
  bool skipped = false;
  double seconds = 0;
};

struct StageMemory {
  std::string name;
  std::uint64_t peak_rss_kb = 0;
  bool reset_supported = false;  // peak is per stage only if the kernel allows resets
};

struct PipelineResult {
  std::string manifest_path;
  std::string merged_path;
  std::vector<StageReport> stages;
  std::vector<StageMemory> memory;
  std::optional<bool> verified;
  nlohmann::json manifest;
};

PipelineResult run_pipeline(const PipelineConfig& config);

InputFormat guess_format(const std::string& path);

// 64-bit FNV-1a of a file's content, as 16 hex digits.
std::string content_hash(const std::string& path);

// Peak resident set size in KiB (VmHWM), and a best-effort reset of it.
std::uint64_t peak_rss_kb();
bool reset_peak_rss();

}  // namespace pfpm
