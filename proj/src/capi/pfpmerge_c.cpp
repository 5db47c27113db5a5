#include "pfpmerge/pfpmerge.h"

#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include <spdlog/spdlog.h>

#include "bwt_build.hpp"
#include "dict_store.hpp"
#include "error.hpp"
#include "karp_rabin.hpp"
#include "merge.hpp"
#include "oracle.hpp"
#include "pfp_core.hpp"
#include "pipeline.hpp"
#include "text_normalize.hpp"
#include "trigger_exchange.hpp"
#include "version.hpp"

struct pfpm_collection {
  pfpm::SequenceCollection coll;
};

struct pfpm_dictionary {
  pfpm::Dictionary dict;
};

struct pfpm_pipeline {
  pfpm::PipelineConfig config;
  std::string manifest;
  std::string report;
  int verified = -1;
  bool ran = false;
};

namespace {

thread_local std::string g_last_error;

pfpm_status to_status(pfpm::ErrorKind kind) {
  switch (kind) {
    case pfpm::ErrorKind::InvalidArgument: return PFPM_ERR_INVALID_ARGUMENT;
    case pfpm::ErrorKind::Io: return PFPM_ERR_IO;
    case pfpm::ErrorKind::Format: return PFPM_ERR_FORMAT;
    case pfpm::ErrorKind::ParamMismatch: return PFPM_ERR_PARAM_MISMATCH;
    case pfpm::ErrorKind::Invariant: return PFPM_ERR_INVARIANT;
    case pfpm::ErrorKind::Limit: return PFPM_ERR_LIMIT;
  }
  return PFPM_ERR_INTERNAL;
}

template <class Fn>
pfpm_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return PFPM_OK;
  } catch (const pfpm::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PFPM_ERR_LIMIT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PFPM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PFPM_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* ptr, const char* name) {
  if (ptr == nullptr) pfpm::fail(pfpm::ErrorKind::InvalidArgument, std::string(name) + " is NULL");
}

pfpm::ParseParams to_params(const pfpm_params* p) {
  require(p, "params");
  pfpm::ParseParams out;
  out.w = p->w;
  out.p = p->p;
  out.hash_base = p->hash_base;
  out.hash_mod = p->hash_mod;
  out.validate();
  return out;
}

pfpm_params from_params(const pfpm::ParseParams& p) {
  return {p.w, p.p, p.hash_base, p.hash_mod};
}

std::vector<std::string> to_paths(const char* const* paths, std::size_t count, const char* name) {
  if (count > 0) require(paths, name);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    require(paths[i], name);
    out.emplace_back(paths[i]);
  }
  return out;
}

pfpm::InputFormat to_format(pfpm_format f, const std::string& path) {
  switch (f) {
    case PFPM_FORMAT_FASTA: return pfpm::InputFormat::Fasta;
    case PFPM_FORMAT_PLAIN: return pfpm::InputFormat::Plain;
    case PFPM_FORMAT_AUTO: return pfpm::guess_format(path);
  }
  pfpm::fail(pfpm::ErrorKind::InvalidArgument, "unknown input format");
}

void fill_stats(const pfpm::BwtBuildStats& s, pfpm_bwt_stats* out) {
  if (out == nullptr) return;
  *out = {s.length, s.easy_chars, s.hard_chars, s.gaps, s.phrases, s.parse_length, s.d_size};
}

std::optional<pfpm::TriggerSet> load_allowed(const char* path, std::uint32_t w) {
  if (path == nullptr) return std::nullopt;
  return pfpm::read_trigger_set(path, w);
}

}  // namespace

extern "C" {

const char* pfpm_version(void) { return pfpm::kVersion; }

const char* pfpm_status_string(pfpm_status status) {
  switch (status) {
    case PFPM_OK: return "ok";
    case PFPM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PFPM_ERR_IO: return "i/o error";
    case PFPM_ERR_FORMAT: return "format error";
    case PFPM_ERR_PARAM_MISMATCH: return "parameter mismatch";
    case PFPM_ERR_INVARIANT: return "invariant violated";
    case PFPM_ERR_LIMIT: return "limit exceeded";
    case PFPM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pfpm_last_error(void) { return g_last_error.c_str(); }

void pfpm_set_log_level(pfpm_log_level level) {
  switch (level) {
    case PFPM_LOG_ERROR: spdlog::set_level(spdlog::level::err); break;
    case PFPM_LOG_WARN: spdlog::set_level(spdlog::level::warn); break;
    case PFPM_LOG_INFO: spdlog::set_level(spdlog::level::info); break;
    case PFPM_LOG_DEBUG: spdlog::set_level(spdlog::level::debug); break;
  }
}

void pfpm_params_default(pfpm_params* params) {
  if (params != nullptr) *params = from_params(pfpm::ParseParams{});
}

pfpm_status pfpm_window_hash(const pfpm_params* params, const char* window, size_t length,
                             uint64_t* hash_out) {
  return guarded([&] {
    const auto p = to_params(params);
    require(window, "window");
    require(hash_out, "hash_out");
    if (length != p.w) pfpm::fail(pfpm::ErrorKind::InvalidArgument, "window length differs from w");
    const pfpm::KarpRabin kr(p);
    *hash_out = kr.from_scratch({reinterpret_cast<const std::uint8_t*>(window), length});
  });
}

pfpm_status pfpm_normalize_file(const char* in_path, pfpm_format format, const char* out_path,
                                uint64_t* sequences_out) {
  return guarded([&] {
    require(in_path, "in_path");
    require(out_path, "out_path");
    auto in = pfpm::open_input(in_path);
    const auto coll = pfpm::normalize(in, to_format(format, in_path), in_path);
    pfpm::write_collection(coll, out_path);
    if (sequences_out != nullptr) *sequences_out = coll.sequences.size();
  });
}

pfpm_status pfpm_collect_triggers_file(const char* seq_path, const pfpm_params* params,
                                       const char* out_path, uint64_t* count_out) {
  return guarded([&] {
    const auto p = to_params(params);
    require(seq_path, "seq_path");
    require(out_path, "out_path");
    const auto set = pfpm::collect_triggers(pfpm::read_collection(seq_path), p);
    pfpm::write_trigger_set(set, out_path);
    if (count_out != nullptr) *count_out = set.size();
  });
}

pfpm_status pfpm_census_files(const char* const* trigger_paths, size_t count,
                              const char* out_shared, const char* out_exclusive_dir,
                              uint64_t* shared_out, uint64_t* exclusive_out, uint64_t* total_out) {
  return guarded([&] {
    require(out_shared, "out_shared");
    require(out_exclusive_dir, "out_exclusive_dir");
    const auto s = pfpm::census_files(to_paths(trigger_paths, count, "trigger_paths"), out_shared,
                                      out_exclusive_dir);
    if (shared_out != nullptr) *shared_out = s.shared;
    for (std::size_t j = 0; j < count; ++j) {
      if (exclusive_out != nullptr) exclusive_out[j] = s.exclusive[j];
      if (total_out != nullptr) total_out[j] = s.total[j];
    }
  });
}

pfpm_status pfpm_parse_file(const char* seq_path, const pfpm_params* params,
                            const char* allowed_path, uint32_t dataset_id, int packed,
                            const char* out_dict, const char* out_parse, const char* out_sa) {
  return guarded([&] {
    const auto p = to_params(params);
    require(seq_path, "seq_path");
    require(out_dict, "out_dict");
    require(out_parse, "out_parse");
    const auto coll = pfpm::read_collection(seq_path, dataset_id);
    const auto allowed = load_allowed(allowed_path, p.w);
    const auto res = pfpm::parse_collection(coll, p, allowed ? &*allowed : nullptr);
    pfpm::write_dictionary(res.dict, out_dict, packed != 0);
    pfpm::write_parse(res.parse, p, out_parse);
    if (out_sa != nullptr) pfpm::write_sa(pfpm::build_dict_sa(res.dict), res.dict.d_size(), out_sa);
  });
}

pfpm_status pfpm_build_sa_file(const char* dict_path, const char* out_sa) {
  return guarded([&] {
    require(dict_path, "dict_path");
    require(out_sa, "out_sa");
    const auto dict = pfpm::read_dictionary(dict_path);
    pfpm::write_sa(pfpm::build_dict_sa(dict), dict.d_size(), out_sa);
  });
}

pfpm_status pfpm_build_bwt_file(const char* seq_path, const pfpm_params* params,
                                const char* allowed_path, uint32_t dataset_id, const char* out_bwt,
                                const char* out_dict, int packed, const char* out_sa,
                                pfpm_bwt_stats* stats) {
  return guarded([&] {
    const auto p = to_params(params);
    require(seq_path, "seq_path");
    require(out_bwt, "out_bwt");
    const auto coll = pfpm::read_collection(seq_path, dataset_id);
    const auto allowed = load_allowed(allowed_path, p.w);
    const auto res = pfpm::parse_collection(coll, p, allowed ? &*allowed : nullptr);
    const auto sa = pfpm::build_dict_sa(res.dict);
    pfpm::FileBwtSink sink(out_bwt, {p, dataset_id}, res.dict.text_length());
    const auto s = pfpm::build_bwt(res.dict, res.parse, sink, sa);
    sink.finish();
    if (out_dict != nullptr) pfpm::write_dictionary(res.dict, out_dict, packed != 0);
    if (out_sa != nullptr) pfpm::write_sa(sa, res.dict.d_size(), out_sa);
    fill_stats(s, stats);
  });
}

pfpm_status pfpm_build_bwt_from_parse(const char* dict_path, const char* parse_path,
                                      const char* sa_path, const char* out_bwt,
                                      pfpm_bwt_stats* stats) {
  return guarded([&] {
    require(dict_path, "dict_path");
    require(parse_path, "parse_path");
    require(out_bwt, "out_bwt");
    const auto dict = pfpm::read_dictionary(dict_path);
    pfpm::ParseParams pp;
    const auto parse = pfpm::read_parse(parse_path, &pp);
    pfpm::require_same_params(dict.params(), pp, parse_path);
    if (parse.dataset_id != dict.dataset_id())
      pfpm::fail(pfpm::ErrorKind::InvalidArgument, "parse and dictionary belong to different datasets");
    std::vector<std::uint64_t> sa;
    if (sa_path != nullptr) {
      sa = pfpm::read_sa(sa_path);
      if (sa.size() != dict.d_size())
        pfpm::fail(pfpm::ErrorKind::Format, "SA does not match the dictionary");
    }
    pfpm::FileBwtSink sink(out_bwt, {dict.params(), dict.dataset_id()}, dict.text_length());
    const auto s = pfpm::build_bwt(dict, parse, sink, sa);
    sink.finish();
    fill_stats(s, stats);
  });
}

void pfpm_merge_options_default(pfpm_merge_options* options) {
  if (options == nullptr) return;
  const pfpm::MergeOptions d;
  options->stride = d.stride;
  options->buffer_bytes = d.buffer_bytes;
}

pfpm_status pfpm_merge_files(const char* const* dict_paths, const char* const* sa_paths,
                             const char* const* bwt_paths, size_t count, const char* out_path,
                             const pfpm_merge_options* options, pfpm_merge_stats* stats) {
  return guarded([&] {
    require(out_path, "out_path");
    pfpm::MergeOptions opt;
    if (options != nullptr) {
      opt.stride = options->stride;
      opt.buffer_bytes = options->buffer_bytes;
    }
    const auto s = pfpm::merge_bwts(to_paths(dict_paths, count, "dict_paths"),
                                    to_paths(sa_paths, count, "sa_paths"),
                                    to_paths(bwt_paths, count, "bwt_paths"), out_path, opt);
    if (stats != nullptr)
      *stats = {s.output_length, s.sad_entries,  s.valid_entries, s.terminal_ties,
                s.table_bytes,   s.packed_bytes, s.buffer_bytes,  s.cursor_bytes};
  });
}

pfpm_status pfpm_verify_files(const char* bwt_path, const char* against_path, int* equal_out,
                              int64_t* first_diff_out) {
  return guarded([&] {
    require(bwt_path, "bwt_path");
    require(against_path, "against_path");
    const auto diff = pfpm::compare_bwt_files(bwt_path, against_path);
    if (equal_out != nullptr) *equal_out = diff < 0 ? 1 : 0;
    if (first_diff_out != nullptr) *first_diff_out = diff;
  });
}

pfpm_status pfpm_oracle_bwt_files(const char* const* seq_paths, size_t count, uint32_t w,
                                  uint64_t max_length, const char* out_path) {
  return guarded([&] {
    require(out_path, "out_path");
    const auto paths = to_paths(seq_paths, count, "seq_paths");
    std::vector<pfpm::SequenceCollection> colls;
    for (std::size_t j = 0; j < paths.size(); ++j)
      colls.push_back(pfpm::read_collection(paths[j], static_cast<pfpm::DatasetId>(j)));
    const auto bwt = pfpm::oracle::naive_multi_bwt(
        colls, w, max_length == 0 ? pfpm::oracle::kDefaultMaxLength : max_length);
    pfpm::ParseParams p;
    p.w = w;
    pfpm::write_bwt(out_path, {p, pfpm::kMergedDataset}, bwt);
  });
}

pfpm_status pfpm_read_bwt(const char* path, char* buffer, size_t capacity, uint64_t* length_out) {
  return guarded([&] {
    require(path, "path");
    pfpm::BwtReader reader(path);
    if (length_out != nullptr) *length_out = reader.length();
    if (buffer == nullptr) return;
    if (capacity < reader.length())
      pfpm::fail(pfpm::ErrorKind::InvalidArgument, "buffer too small for the BWT");
    reader.read(std::span<char>(buffer, reader.length()));
  });
}

pfpm_status pfpm_collection_from_text(const char* data, size_t length, pfpm_format format,
                                      pfpm_collection** out) {
  return guarded([&] {
    require(out, "out");
    if (length > 0) require(data, "data");
    if (format == PFPM_FORMAT_AUTO)
      pfpm::fail(pfpm::ErrorKind::InvalidArgument, "in-memory text needs an explicit format");
    auto h = std::make_unique<pfpm_collection>();
    h->coll = pfpm::normalize(std::string_view(data == nullptr ? "" : data, length),
                              to_format(format, ""), "memory");
    *out = h.release();
  });
}

pfpm_status pfpm_collection_load(const char* seq_path, pfpm_collection** out) {
  return guarded([&] {
    require(seq_path, "seq_path");
    require(out, "out");
    auto h = std::make_unique<pfpm_collection>();
    h->coll = pfpm::read_collection(seq_path);
    *out = h.release();
  });
}

pfpm_status pfpm_collection_save(const pfpm_collection* coll, const char* path) {
  return guarded([&] {
    require(coll, "coll");
    require(path, "path");
    pfpm::write_collection(coll->coll, path);
  });
}

size_t pfpm_collection_size(const pfpm_collection* coll) {
  return coll == nullptr ? 0 : coll->coll.sequences.size();
}

pfpm_status pfpm_collection_sequence(const pfpm_collection* coll, size_t index, const char** data,
                                     size_t* length) {
  return guarded([&] {
    require(coll, "coll");
    require(data, "data");
    require(length, "length");
    if (index >= coll->coll.sequences.size())
      pfpm::fail(pfpm::ErrorKind::InvalidArgument, "sequence index out of range");
    *data = coll->coll.sequences[index].data();
    *length = coll->coll.sequences[index].size();
  });
}

void pfpm_collection_free(pfpm_collection* coll) { delete coll; }

pfpm_status pfpm_dictionary_load(const char* path, pfpm_dictionary** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto h = std::make_unique<pfpm_dictionary>();
    h->dict = pfpm::read_dictionary(path);
    *out = h.release();
  });
}

size_t pfpm_dictionary_phrase_count(const pfpm_dictionary* dict) {
  return dict == nullptr ? 0 : dict->dict.phrase_count();
}

uint64_t pfpm_dictionary_d_size(const pfpm_dictionary* dict) {
  return dict == nullptr ? 0 : dict->dict.d_size();
}

uint32_t pfpm_dictionary_dataset(const pfpm_dictionary* dict) {
  return dict == nullptr ? 0 : dict->dict.dataset_id();
}

void pfpm_dictionary_params(const pfpm_dictionary* dict, pfpm_params* params) {
  if (dict != nullptr && params != nullptr) *params = from_params(dict->dict.params());
}

pfpm_status pfpm_dictionary_phrase(const pfpm_dictionary* dict, size_t index, const char** data,
                                   size_t* length, uint64_t* occ) {
  return guarded([&] {
    require(dict, "dict");
    if (index >= dict->dict.phrase_count())
      pfpm::fail(pfpm::ErrorKind::InvalidArgument, "phrase index out of range");
    const auto id = static_cast<pfpm::PhraseId>(index);
    const auto ph = dict->dict.phrase(id);
    if (data != nullptr) *data = ph.data();
    if (length != nullptr) *length = ph.size();
    if (occ != nullptr) *occ = dict->dict.occ(id);
  });
}

void pfpm_dictionary_free(pfpm_dictionary* dict) { delete dict; }

pfpm_status pfpm_pipeline_create(const char* work_dir, pfpm_pipeline** out) {
  return guarded([&] {
    require(work_dir, "work_dir");
    require(out, "out");
    auto h = std::make_unique<pfpm_pipeline>();
    h->config.work_dir = work_dir;
    *out = h.release();
  });
}

pfpm_status pfpm_pipeline_load_config(const char* config_path, pfpm_pipeline** out) {
  return guarded([&] {
    require(config_path, "config_path");
    require(out, "out");
    auto h = std::make_unique<pfpm_pipeline>();
    h->config = pfpm::load_pipeline_config(config_path);
    *out = h.release();
  });
}

pfpm_status pfpm_pipeline_add_input(pfpm_pipeline* pipe, const char* path) {
  return guarded([&] {
    require(pipe, "pipe");
    require(path, "path");
    pipe->config.inputs.emplace_back(path);
  });
}

pfpm_status pfpm_pipeline_set_params(pfpm_pipeline* pipe, const pfpm_params* params) {
  return guarded([&] {
    require(pipe, "pipe");
    pipe->config.params = to_params(params);
  });
}

pfpm_status pfpm_pipeline_set_format(pfpm_pipeline* pipe, pfpm_format format) {
  return guarded([&] {
    require(pipe, "pipe");
    switch (format) {
      case PFPM_FORMAT_AUTO: pipe->config.format.reset(); break;
      case PFPM_FORMAT_FASTA: pipe->config.format = pfpm::InputFormat::Fasta; break;
      case PFPM_FORMAT_PLAIN: pipe->config.format = pfpm::InputFormat::Plain; break;
      default: pfpm::fail(pfpm::ErrorKind::InvalidArgument, "unknown input format");
    }
  });
}

pfpm_status pfpm_pipeline_set_stride(pfpm_pipeline* pipe, uint64_t stride) {
  return guarded([&] {
    require(pipe, "pipe");
    if (stride == 0) pfpm::fail(pfpm::ErrorKind::InvalidArgument, "stride must be positive");
    pipe->config.stride = stride;
  });
}

pfpm_status pfpm_pipeline_set_packed(pfpm_pipeline* pipe, int packed) {
  return guarded([&] {
    require(pipe, "pipe");
    pipe->config.packed = packed != 0;
  });
}

pfpm_status pfpm_pipeline_set_verify(pfpm_pipeline* pipe, int verify) {
  return guarded([&] {
    require(pipe, "pipe");
    pipe->config.verify = verify != 0;
  });
}

pfpm_status pfpm_pipeline_set_jobs(pfpm_pipeline* pipe, unsigned jobs) {
  return guarded([&] {
    require(pipe, "pipe");
    pipe->config.jobs = jobs == 0 ? 1 : jobs;
  });
}

pfpm_status pfpm_pipeline_set_force(pfpm_pipeline* pipe, int force) {
  return guarded([&] {
    require(pipe, "pipe");
    pipe->config.force = force != 0;
  });
}

pfpm_status pfpm_pipeline_run(pfpm_pipeline* pipe) {
  return guarded([&] {
    require(pipe, "pipe");
    pipe->ran = false;
    const auto res = pfpm::run_pipeline(pipe->config);
    pipe->manifest = res.manifest.dump(2);
    std::ostringstream report;
    for (const auto& s : res.stages) {
      report << s.name;
      if (s.dataset >= 0) report << '[' << s.dataset << ']';
      report << (s.skipped ? " skipped" : " ran") << ' ' << s.seconds << "s\n";
    }
    for (const auto& m : res.memory)
      report << "peak " << m.name << ' ' << m.peak_rss_kb << " KiB"
             << (m.reset_supported ? "" : " (process peak)") << '\n';
    if (res.verified) report << "verify " << (*res.verified ? "passed" : "FAILED") << '\n';
    pipe->report = report.str();
    pipe->verified = res.verified ? (*res.verified ? 1 : 0) : -1;
    pipe->ran = true;
  });
}

const char* pfpm_pipeline_manifest(const pfpm_pipeline* pipe) {
  return pipe == nullptr || !pipe->ran ? nullptr : pipe->manifest.c_str();
}

const char* pfpm_pipeline_report(const pfpm_pipeline* pipe) {
  return pipe == nullptr || !pipe->ran ? nullptr : pipe->report.c_str();
}

int pfpm_pipeline_verified(const pfpm_pipeline* pipe) {
  return pipe == nullptr ? -1 : pipe->verified;
}

void pfpm_pipeline_free(pfpm_pipeline* pipe) { delete pipe; }

}  // extern "C"
