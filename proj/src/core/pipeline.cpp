#include "pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "binary_io.hpp"
#include "bwt_build.hpp"
#include "error.hpp"
#include "oracle.hpp"
#include "pfp_core.hpp"
#include "trigger_exchange.hpp"
#include "version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pfpm {

InputFormat guess_format(const std::string& path) {
  auto ext = fs::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".fa" || ext == ".fasta" || ext == ".fna" || ext == ".fas") return InputFormat::Fasta;
  return InputFormat::Plain;
}

std::string content_hash(const std::string& path) {
  auto in = open_input(path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto n = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < n; ++i) {
      h ^= static_cast<std::uint8_t>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

std::uint64_t peak_rss_kb() {
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) return std::stoull(line.substr(6));
  }
  return 0;
}

bool reset_peak_rss() {
  std::ofstream clear("/proc/self/clear_refs");
  if (!clear) return false;
  clear << "5";
  clear.flush();
  return static_cast<bool>(clear);
}

PipelineConfig load_pipeline_config(const std::string& path) {
  auto in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, "config '" + path + "': " + e.what());
  }
  PipelineConfig c;
  try {
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
      return fs::path(p).is_absolute() ? p : (base / p).lexically_normal().string();
    };
    for (const auto& in_path : j.at("inputs")) c.inputs.push_back(resolve(in_path.get<std::string>()));
    c.work_dir = resolve(j.at("work_dir").get<std::string>());
    c.params.w = j.value("w", c.params.w);
    c.params.p = j.value("p", c.params.p);
    c.params.hash_base = j.value("hash_base", c.params.hash_base);
    c.params.hash_mod = j.value("hash_mod", c.params.hash_mod);
    c.stride = j.value("stride", c.stride);
    c.packed = j.value("packed", c.packed);
    c.verify = j.value("verify", c.verify);
    c.jobs = j.value("jobs", c.jobs);
    c.oracle_max_length = j.value("oracle_max_length", c.oracle_max_length);
    if (j.contains("format")) {
      const auto f = j["format"].get<std::string>();
      if (f == "fasta") c.format = InputFormat::Fasta;
      else if (f == "plain") c.format = InputFormat::Plain;
      else if (f != "auto") fail(ErrorKind::InvalidArgument, "unknown format '" + f + "'");
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, "config '" + path + "': " + e.what());
  }
  return c;
}

namespace {

struct Paths {
  fs::path dir;
  std::string seq(std::size_t j) const { return file("seq_" + std::to_string(j) + ".bin"); }
  std::string triggers(std::size_t j) const { return file("triggers_" + std::to_string(j) + ".trg"); }
  std::string shared() const { return file("shared.trg"); }
  std::string exclusive_dir() const { return file("exclusive"); }
  std::string exclusive(std::size_t j) const { return exclusive_trigger_path(exclusive_dir(), j); }
  std::string dict(std::size_t j) const { return file("dict_" + std::to_string(j) + ".dict"); }
  std::string parse(std::size_t j) const { return file("parse_" + std::to_string(j) + ".parse"); }
  std::string sa(std::size_t j) const { return file("sa_" + std::to_string(j) + ".sa"); }
  std::string bwt(std::size_t j) const { return file("bwt_" + std::to_string(j) + ".bwt"); }
  std::string merged() const { return file("merged.bwt"); }
  std::string manifest() const { return file("manifest.json"); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

json params_json(const ParseParams& p) {
  return {{"w", p.w}, {"p", p.p}, {"hash_base", p.hash_base}, {"hash_mod", p.hash_mod}};
}

std::string params_text(const ParseParams& p) {
  return "w=" + std::to_string(p.w) + " p=" + std::to_string(p.p) +
         " base=" + std::to_string(p.hash_base) + " mod=" + std::to_string(p.hash_mod);
}

// Refuses to reuse a work directory whose artifacts carry other parameters.
void check_cached_params(const PipelineConfig& cfg, const Paths& paths) {
  auto check = [&](const std::string& path, const Magic& magic) {
    if (!fs::exists(path)) return;
    auto in = open_input(path);
    const auto header = read_artifact_header(in, magic, path);
    if (header.params != cfg.params)
      fail(ErrorKind::ParamMismatch, "cached artifact '" + path + "' was built with " +
                                         params_text(header.params) + " but the run uses " +
                                         params_text(cfg.params) + "; use --force to rebuild");
  };
  for (std::size_t j = 0; j < cfg.inputs.size(); ++j) {
    check(paths.dict(j), kDictMagic);
    check(paths.parse(j), kParseMagic);
    check(paths.bwt(j), kBwtMagic);
    if (fs::exists(paths.triggers(j))) {
      TriggerReader r(paths.triggers(j));
      if (r.count() > 0 && r.width() != cfg.params.w)
        fail(ErrorKind::ParamMismatch, "cached trigger file '" + paths.triggers(j) +
                                           "' has w=" + std::to_string(r.width()) +
                                           " but the run uses w=" + std::to_string(cfg.params.w) +
                                           "; use --force to rebuild");
    }
  }
  check(paths.merged(), kBwtMagic);
}

class StageRunner {
 public:
  StageRunner(const PipelineConfig& cfg, json previous)
      : cfg_(cfg), previous_(std::move(previous)) {}

  // Runs `fn` unless the recorded inputs, config and outputs are unchanged.
  template <class Fn>
  void run(const std::string& name, std::int64_t dataset, const std::vector<std::string>& inputs,
           const std::vector<std::string>& outputs, const json& config, Fn&& fn) {
    try {
      run_stage(name, dataset, inputs, outputs, config, fn);
    } catch (const Error& e) {
      fail(e.kind(), "stage " + name +
                         (dataset < 0 ? std::string() : " (dataset " + std::to_string(dataset) + ")") +
                         ": " + e.what());
    }
  }

  json stages() const { return stages_; }
  std::vector<StageReport> reports() const { return reports_; }

 private:
  template <class Fn>
  void run_stage(const std::string& name, std::int64_t dataset,
                 const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                 const json& config, Fn& fn) {
    const std::string key = dataset < 0 ? name : name + ":" + std::to_string(dataset);
    const auto start = std::chrono::steady_clock::now();
    json record = {{"config", config}, {"inputs", hashes(inputs)}};
    bool skipped = false;
    if (!cfg_.force && previous_.contains("stages") && previous_["stages"].contains(key)) {
      const json& prev = previous_["stages"][key];
      skipped = prev.value("config", json()) == record["config"] &&
                prev.value("inputs", json()) == record["inputs"] &&
                outputs_match(prev.value("outputs", json::object()), outputs);
    }
    if (!skipped) fn();
    record["outputs"] = hashes(outputs);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::lock_guard lock(mutex_);
    stages_[key] = record;
    reports_.push_back({name, dataset, skipped, seconds});
    spdlog::info("{} {}", skipped ? "skipped" : "ran", key);
  }

  static json hashes(const std::vector<std::string>& files) {
    json out = json::object();
    for (const auto& f : files) out[fs::path(f).filename().string()] = content_hash(f);
    return out;
  }

  static bool outputs_match(const json& prev, const std::vector<std::string>& outputs) {
    if (prev.size() != outputs.size()) return false;
    for (const auto& f : outputs) {
      const auto name = fs::path(f).filename().string();
      if (!fs::exists(f) || !prev.contains(name) || prev[name] != content_hash(f)) return false;
    }
    return true;
  }

  const PipelineConfig& cfg_;
  json previous_;
  std::mutex mutex_;
  json stages_ = json::object();
  std::vector<StageReport> reports_;
};

// Runs fn(j) for every dataset on up to `jobs` threads; rethrows the first failure.
template <class Fn>
void for_each_dataset(std::size_t count, unsigned jobs, Fn&& fn) {
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(jobs, count));
  if (threads == 1) {
    for (std::size_t j = 0; j < count; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t j; (j = next++) < count;) {
        try {
          fn(j);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

class MemoryProbe {
 public:
  explicit MemoryProbe(std::vector<StageMemory>& out, std::string name)
      : out_(out), name_(std::move(name)), reset_(reset_peak_rss()) {}
  ~MemoryProbe() { out_.push_back({name_, peak_rss_kb(), reset_}); }

 private:
  std::vector<StageMemory>& out_;
  std::string name_;
  bool reset_;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.params.validate();
  if (cfg.inputs.size() < 2) fail(ErrorKind::InvalidArgument, "the pipeline needs at least two datasets");
  if (cfg.work_dir.empty()) fail(ErrorKind::InvalidArgument, "no working directory given");
  if (cfg.stride == 0) fail(ErrorKind::InvalidArgument, "sample stride must be positive");
  std::error_code ec;
  fs::create_directories(cfg.work_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create '" + cfg.work_dir + "': " + ec.message());

  const Paths paths{fs::path(cfg.work_dir)};
  const std::size_t k = cfg.inputs.size();
  if (!cfg.force) check_cached_params(cfg, paths);

  json previous;
  if (fs::exists(paths.manifest())) {
    std::ifstream in(paths.manifest());
    previous = json::parse(in, nullptr, false);
    if (previous.is_discarded()) previous = json();
  }

  PipelineResult result;
  StageRunner runner(cfg, previous);
  const json pconf = params_json(cfg.params);

  {
    MemoryProbe probe(result.memory, "normalize");
    for_each_dataset(k, cfg.jobs, [&](std::size_t j) {
      const InputFormat fmt = cfg.format.value_or(guess_format(cfg.inputs[j]));
      const json conf = {{"format", fmt == InputFormat::Fasta ? "fasta" : "plain"}};
      runner.run("normalize", static_cast<std::int64_t>(j), {cfg.inputs[j]}, {paths.seq(j)}, conf, [&] {
        auto in = open_input(cfg.inputs[j]);
        auto coll = normalize(in, fmt, cfg.inputs[j]);
        write_collection(coll, paths.seq(j));
      });
    });
  }
  {
    MemoryProbe probe(result.memory, "triggers");
    for_each_dataset(k, cfg.jobs, [&](std::size_t j) {
      runner.run("triggers", static_cast<std::int64_t>(j), {paths.seq(j)}, {paths.triggers(j)}, pconf, [&] {
        const auto coll = read_collection(paths.seq(j), static_cast<DatasetId>(j));
        write_trigger_set(collect_triggers(coll, cfg.params), paths.triggers(j));
      });
    });
  }
  json census_json;
  {
    MemoryProbe probe(result.memory, "census");
    std::vector<std::string> ins;
    std::vector<std::string> outs{paths.shared()};
    for (std::size_t j = 0; j < k; ++j) {
      ins.push_back(paths.triggers(j));
      outs.push_back(paths.exclusive(j));
    }
    runner.run("census", -1, ins, outs, pconf,
               [&] { census_files(ins, paths.shared(), paths.exclusive_dir()); });
    census_json["shared"] = TriggerReader(paths.shared()).count();
    census_json["exclusive"] = json::array();
    census_json["total"] = json::array();
    for (std::size_t j = 0; j < k; ++j) {
      const auto excl = TriggerReader(paths.exclusive(j)).count();
      const auto total = TriggerReader(paths.triggers(j)).count();
      census_json["exclusive"].push_back(excl);
      census_json["total"].push_back(total);
      if (excl == 0)
        spdlog::warn("dataset {} has no exclusive triggers; every string becomes one phrase", j);
    }
  }
  {
    MemoryProbe probe(result.memory, "parse");
    for_each_dataset(k, cfg.jobs, [&](std::size_t j) {
      json conf = pconf;
      conf["packed"] = cfg.packed;
      runner.run("parse", static_cast<std::int64_t>(j), {paths.seq(j), paths.exclusive(j)},
                 {paths.dict(j), paths.parse(j), paths.sa(j)}, conf, [&] {
                   const auto coll = read_collection(paths.seq(j), static_cast<DatasetId>(j));
                   const auto allowed = read_trigger_set(paths.exclusive(j), cfg.params.w);
                   const auto res = parse_collection(coll, cfg.params, &allowed);
                   write_dictionary(res.dict, paths.dict(j), cfg.packed);
                   write_parse(res.parse, cfg.params, paths.parse(j));
                   write_sa(build_dict_sa(res.dict), res.dict.d_size(), paths.sa(j));
                 });
    });
  }
  {
    MemoryProbe probe(result.memory, "bwt");
    for_each_dataset(k, cfg.jobs, [&](std::size_t j) {
      runner.run("bwt", static_cast<std::int64_t>(j), {paths.dict(j), paths.parse(j), paths.sa(j)},
                 {paths.bwt(j)}, pconf, [&] {
                   const auto dict = read_dictionary(paths.dict(j));
                   ParseParams pp;
                   const auto parse = read_parse(paths.parse(j), &pp);
                   require_same_params(dict.params(), pp, "parse");
                   const auto sa = read_sa(paths.sa(j));
                   FileBwtSink sink(paths.bwt(j), {dict.params(), dict.dataset_id()},
                                    dict.text_length());
                   build_bwt(dict, parse, sink, sa);
                   sink.finish();
                 });
    });
  }
  json merge_json;
  {
    MemoryProbe probe(result.memory, "merge");
    std::vector<std::string> dicts, sas, bwts, ins;
    for (std::size_t j = 0; j < k; ++j) {
      dicts.push_back(paths.dict(j));
      sas.push_back(paths.sa(j));
      bwts.push_back(paths.bwt(j));
      ins.insert(ins.end(), {paths.dict(j), paths.sa(j), paths.bwt(j)});
    }
    json conf = pconf;
    conf["stride"] = cfg.stride;
    runner.run("merge", -1, ins, {paths.merged()}, conf, [&] {
      MergeOptions opt;
      opt.stride = cfg.stride;
      const auto stats = merge_bwts(dicts, sas, bwts, paths.merged(), opt);
      merge_json = {{"length", stats.output_length},
                    {"valid_entries", stats.valid_entries},
                    {"sad_entries", stats.sad_entries},
                    {"instrumented_bytes", stats.instrumented_bytes()}};
    });
  }
  if (cfg.verify) {
    MemoryProbe probe(result.memory, "verify");
    const auto start = std::chrono::steady_clock::now();
    std::vector<SequenceCollection> colls;
    for (std::size_t j = 0; j < k; ++j)
      colls.push_back(read_collection(paths.seq(j), static_cast<DatasetId>(j)));
    try {
      const auto expected = oracle::naive_multi_bwt(colls, cfg.params.w, cfg.oracle_max_length);
      result.verified = read_bwt(paths.merged()) == expected;
    } catch (const Error& e) {
      fail(e.kind(), std::string("stage verify: ") + e.what());
    }
    result.stages.push_back({"verify", -1, false,
                             std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
  }

  auto reports = runner.reports();
  reports.insert(reports.end(), result.stages.begin(), result.stages.end());
  result.stages = std::move(reports);

  json manifest;
  manifest["tool_version"] = kVersion;
  manifest["params"] = pconf;
  manifest["stride"] = cfg.stride;
  manifest["packed"] = cfg.packed;
  manifest["datasets"] = json::array();
  json stage_hashes = json::object();
  for (std::size_t j = 0; j < k; ++j) {
    manifest["datasets"].push_back({{"id", j},
                                    {"input", cfg.inputs[j]},
                                    {"sequences", paths.seq(j)},
                                    {"triggers", paths.triggers(j)},
                                    {"exclusive_triggers", paths.exclusive(j)},
                                    {"dict", paths.dict(j)},
                                    {"parse", paths.parse(j)},
                                    {"sa", paths.sa(j)},
                                    {"bwt", paths.bwt(j)}});
  }
  const json stages = runner.stages();
  for (const auto& [key, rec] : stages.items())
    for (const auto& [name, hash] : rec["outputs"].items()) stage_hashes[name] = hash;
  manifest["merged"] = paths.merged();
  manifest["stage_hashes"] = stage_hashes;
  manifest["stages"] = stages;
  manifest["census"] = census_json;
  if (!merge_json.is_null()) manifest["merge"] = merge_json;
  else if (previous.contains("merge")) manifest["merge"] = previous["merge"];
  json mem = json::array();
  for (const auto& m : result.memory)
    mem.push_back({{"stage", m.name}, {"peak_rss_kb", m.peak_rss_kb}, {"per_stage", m.reset_supported}});
  manifest["peak_memory"] = mem;
  if (result.verified) manifest["verified"] = *result.verified;

  {
    const std::string tmp = paths.manifest() + ".tmp";
    std::ofstream out(tmp);
    out << manifest.dump(2) << '\n';
    out.close();
    if (!out) fail(ErrorKind::Io, "failed writing '" + tmp + "'");
    fs::rename(tmp, paths.manifest());
  }
  result.manifest = std::move(manifest);
  result.manifest_path = paths.manifest();
  result.merged_path = paths.merged();
  return result;
}

}  // namespace pfpm
