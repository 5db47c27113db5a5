// pfpmerge command line. Uses the public C API only.
#include <pfpmerge/pfpmerge.h>

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

constexpr int kExitMismatch = 8;

struct ParamOptions {
  pfpm_params params{};
  ParamOptions() { pfpm_params_default(&params); }

  void add(CLI::App* app, bool with_p = true) {
    app->add_option("--w", params.w, "window length")->capture_default_str();
    if (with_p) app->add_option("--p", params.p, "trigger modulus")->capture_default_str();
    app->add_option("--hash-base", params.hash_base, "rolling hash base")->capture_default_str();
    app->add_option("--hash-mod", params.hash_mod, "rolling hash modulus")->capture_default_str();
  }
};

pfpm_format parse_format(const std::string& name) {
  if (name == "fasta") return PFPM_FORMAT_FASTA;
  if (name == "plain") return PFPM_FORMAT_PLAIN;
  return PFPM_FORMAT_AUTO;
}

const char* opt_path(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

std::vector<const char*> c_paths(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

int report(pfpm_status st) {
  if (st == PFPM_OK) return 0;
  std::fprintf(stderr, "pfpmerge: %s: %s\n", pfpm_status_string(st), pfpm_last_error());
  return static_cast<int>(st);
}

void print_bwt_stats(const pfpm_bwt_stats& s) {
  const double frac = s.length == 0 ? 0.0 : static_cast<double>(s.easy_chars) / s.length;
  std::printf("length %llu, phrases %llu, parse %llu, dSize %llu, easy fill %.4f, gaps %llu\n",
              static_cast<unsigned long long>(s.length), static_cast<unsigned long long>(s.phrases),
              static_cast<unsigned long long>(s.parse_length),
              static_cast<unsigned long long>(s.d_size), frac,
              static_cast<unsigned long long>(s.gaps));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BWT construction by prefix-free parsing and merging of sub-collection BWTs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pfpm_version()));
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "log progress");
  app.add_flag("-q,--quiet", quiet, "log errors only");
  app.parse_complete_callback([&] {
    pfpm_set_log_level(quiet ? PFPM_LOG_ERROR : verbose ? PFPM_LOG_INFO : PFPM_LOG_WARN);
  });

  int rc = 0;

  // normalize
  std::string norm_format = "auto";
  std::string norm_in, norm_out;
  auto* norm = app.add_subcommand("normalize", "FASTA or plain text to a sequence container");
  norm->add_option("--format", norm_format)->check(CLI::IsMember({"auto", "fasta", "plain"}))->capture_default_str();
  norm->add_option("--in", norm_in)->required();
  norm->add_option("--out", norm_out)->required();
  norm->callback([&] {
    uint64_t n = 0;
    rc = report(pfpm_normalize_file(norm_in.c_str(), parse_format(norm_format), norm_out.c_str(), &n));
    if (rc == 0) std::printf("%llu sequences\n", static_cast<unsigned long long>(n));
  });

  // triggers
  ParamOptions trig_params;
  std::string trig_in, trig_out;
  auto* trig = app.add_subcommand("triggers", "collect the trigger strings of one dataset");
  trig_params.add(trig);
  trig->add_option("--in", trig_in)->required();
  trig->add_option("--out", trig_out)->required();
  trig->callback([&] {
    uint64_t n = 0;
    rc = report(pfpm_collect_triggers_file(trig_in.c_str(), &trig_params.params, trig_out.c_str(), &n));
    if (rc == 0) std::printf("%llu triggers\n", static_cast<unsigned long long>(n));
  });

  // census
  std::vector<std::string> cen_in;
  std::string cen_shared, cen_dir;
  auto* cen = app.add_subcommand("census", "split trigger sets into shared and exclusive triggers");
  cen->add_option("--in", cen_in)->required();
  cen->add_option("--out-shared", cen_shared)->required();
  cen->add_option("--out-exclusive-dir", cen_dir)->required();
  cen->callback([&] {
    const auto paths = c_paths(cen_in);
    std::vector<uint64_t> excl(paths.size()), total(paths.size());
    uint64_t shared = 0;
    rc = report(pfpm_census_files(paths.data(), paths.size(), cen_shared.c_str(), cen_dir.c_str(),
                                  &shared, excl.data(), total.data()));
    if (rc != 0) return;
    std::printf("shared %llu\n", static_cast<unsigned long long>(shared));
    for (std::size_t j = 0; j < paths.size(); ++j)
      std::printf("dataset %zu: %llu triggers, %llu exclusive\n", j,
                  static_cast<unsigned long long>(total[j]), static_cast<unsigned long long>(excl[j]));
  });

  // parse
  ParamOptions parse_params;
  std::string parse_in, parse_allowed, parse_dict, parse_out, parse_sa;
  uint32_t parse_ds = 0;
  bool parse_plain = false;
  auto* parse = app.add_subcommand("parse", "prefix-free parse of one dataset");
  parse_params.add(parse);
  parse->add_option("--in", parse_in)->required();
  parse->add_option("--allowed", parse_allowed, "restrict phrase breaks to these triggers");
  parse->add_option("--out-dict", parse_dict)->required();
  parse->add_option("--out-parse", parse_out)->required();
  parse->add_option("--out-sa", parse_sa, "also write the dictionary suffix array");
  parse->add_option("--dataset-id", parse_ds)->capture_default_str();
  parse->add_flag("--plain-dict", parse_plain, "store the dictionary unpacked");
  parse->callback([&] {
    rc = report(pfpm_parse_file(parse_in.c_str(), &parse_params.params, opt_path(parse_allowed),
                                parse_ds, parse_plain ? 0 : 1, parse_dict.c_str(), parse_out.c_str(),
                                opt_path(parse_sa)));
  });

  // bwt
  ParamOptions bwt_params;
  std::string bwt_in, bwt_allowed, bwt_out, bwt_dict_in, bwt_parse_in, bwt_sa_in, bwt_out_dict, bwt_out_sa;
  uint32_t bwt_ds = 0;
  bool bwt_plain = false;
  auto* bwt = app.add_subcommand("bwt", "build the BWT of one dataset");
  bwt_params.add(bwt);
  auto* bwt_in_opt = bwt->add_option("--in", bwt_in, "sequence container");
  bwt->add_option("--allowed", bwt_allowed, "restrict phrase breaks to these triggers");
  auto* bwt_dict_opt = bwt->add_option("--dict", bwt_dict_in, "build from a stored dictionary");
  auto* bwt_parse_opt = bwt->add_option("--parse", bwt_parse_in, "parse matching --dict");
  bwt->add_option("--sa", bwt_sa_in, "suffix array matching --dict");
  bwt->add_option("--out", bwt_out)->required();
  bwt->add_option("--out-dict", bwt_out_dict, "with --in: also write the dictionary");
  bwt->add_option("--out-sa", bwt_out_sa, "with --in: also write the dictionary suffix array");
  bwt->add_option("--dataset-id", bwt_ds)->capture_default_str();
  bwt->add_flag("--plain-dict", bwt_plain, "store the dictionary unpacked");
  bwt_in_opt->excludes(bwt_dict_opt);
  bwt_dict_opt->needs(bwt_parse_opt);
  bwt_parse_opt->needs(bwt_dict_opt);
  bwt->callback([&] {
    pfpm_bwt_stats stats{};
    if (!bwt_in.empty()) {
      rc = report(pfpm_build_bwt_file(bwt_in.c_str(), &bwt_params.params, opt_path(bwt_allowed), bwt_ds,
                                      bwt_out.c_str(), opt_path(bwt_out_dict), bwt_plain ? 0 : 1,
                                      opt_path(bwt_out_sa), &stats));
    } else if (!bwt_dict_in.empty()) {
      rc = report(pfpm_build_bwt_from_parse(bwt_dict_in.c_str(), bwt_parse_in.c_str(),
                                            opt_path(bwt_sa_in), bwt_out.c_str(), &stats));
    } else {
      std::fprintf(stderr, "pfpmerge bwt: give --in or --dict with --parse\n");
      rc = static_cast<int>(PFPM_ERR_INVALID_ARGUMENT);
      return;
    }
    if (rc == 0) print_bwt_stats(stats);
  });

  // merge
  std::vector<std::string> m_dict, m_sa, m_bwt;
  std::string m_out;
  pfpm_merge_options m_opt{};
  pfpm_merge_options_default(&m_opt);
  auto* merge = app.add_subcommand("merge", "merge per-dataset BWTs in the given order");
  merge->add_option("--dict", m_dict)->required();
  merge->add_option("--sa", m_sa)->required();
  merge->add_option("--bwt", m_bwt)->required();
  merge->add_option("--stride", m_opt.stride, "phrase sample stride")->capture_default_str()->check(CLI::PositiveNumber);
  merge->add_option("--buffer-bytes", m_opt.buffer_bytes, "copy buffer size")->capture_default_str()->check(CLI::PositiveNumber);
  merge->add_option("--out", m_out)->required();
  merge->callback([&] {
    if (m_dict.size() != m_sa.size() || m_dict.size() != m_bwt.size()) {
      std::fprintf(stderr, "pfpmerge merge: --dict, --sa and --bwt need the same number of paths\n");
      rc = static_cast<int>(PFPM_ERR_INVALID_ARGUMENT);
      return;
    }
    const auto d = c_paths(m_dict), s = c_paths(m_sa), b = c_paths(m_bwt);
    pfpm_merge_stats stats{};
    rc = report(pfpm_merge_files(d.data(), s.data(), b.data(), d.size(), m_out.c_str(), &m_opt, &stats));
    if (rc == 0)
      std::printf("merged %llu characters; tables %llu B, packed dictionary %llu B, buffer %llu B\n",
                  static_cast<unsigned long long>(stats.output_length),
                  static_cast<unsigned long long>(stats.table_bytes),
                  static_cast<unsigned long long>(stats.packed_bytes),
                  static_cast<unsigned long long>(stats.buffer_bytes));
  });

  // verify
  std::string v_merged, v_against;
  auto* verify = app.add_subcommand("verify", "byte comparison of two BWT files");
  verify->add_option("--merged", v_merged)->required();
  verify->add_option("--against", v_against)->required();
  verify->callback([&] {
    int equal = 0;
    int64_t diff = -1;
    rc = report(pfpm_verify_files(v_merged.c_str(), v_against.c_str(), &equal, &diff));
    if (rc != 0) return;
    if (equal) {
      std::printf("identical\n");
    } else {
      std::printf("differ at position %lld\n", static_cast<long long>(diff));
      rc = kExitMismatch;
    }
  });

  // oracle-bwt
  std::vector<std::string> o_in;
  std::string o_out;
  uint32_t o_w = 20;
  uint64_t o_max = 0;
  auto* oracle = app.add_subcommand("oracle-bwt", "reference BWT by direct suffix sorting (small inputs)");
  oracle->group("");  // development command, hidden from help
  oracle->add_option("--in", o_in)->required();
  oracle->add_option("--w", o_w)->capture_default_str();
  oracle->add_option("--max-length", o_max, "refuse larger inputs (0: 10^6)");
  oracle->add_option("--out", o_out)->required();
  oracle->callback([&] {
    const auto paths = c_paths(o_in);
    rc = report(pfpm_oracle_bwt_files(paths.data(), paths.size(), o_w, o_max, o_out.c_str()));
  });

  // pipeline
  ParamOptions pipe_params;
  std::vector<std::string> pipe_in;
  std::string pipe_dir, pipe_config, pipe_format = "auto";
  uint64_t pipe_stride = 50;
  unsigned pipe_jobs = 1;
  bool pipe_plain = false, pipe_verify = false, pipe_force = false;
  auto* pipe = app.add_subcommand("pipeline", "normalize, parse, build and merge in one run");
  pipe_params.add(pipe);
  auto* pipe_cfg_opt = pipe->add_option("--config", pipe_config, "JSON config file");
  auto* pipe_in_opt = pipe->add_option("--in", pipe_in, "one input file per dataset, in merge order");
  auto* pipe_dir_opt = pipe->add_option("--work-dir", pipe_dir, "artifact directory");
  pipe->add_option("--format", pipe_format)->check(CLI::IsMember({"auto", "fasta", "plain"}))->capture_default_str();
  pipe->add_option("--stride", pipe_stride)->capture_default_str()->check(CLI::PositiveNumber);
  pipe->add_option("--jobs", pipe_jobs, "per-dataset stages in parallel")->capture_default_str();
  pipe->add_flag("--plain-dict", pipe_plain, "store dictionaries unpacked");
  pipe->add_flag("--verify", pipe_verify, "check the merged BWT against the reference construction");
  pipe->add_flag("--force", pipe_force, "rebuild every stage");
  pipe_cfg_opt->excludes(pipe_in_opt);
  pipe_cfg_opt->excludes(pipe_dir_opt);
  pipe->callback([&] {
    pfpm_pipeline* p = nullptr;
    pfpm_status st = PFPM_OK;
    if (!pipe_config.empty()) {
      st = pfpm_pipeline_load_config(pipe_config.c_str(), &p);
      if (st == PFPM_OK && pipe_verify) st = pfpm_pipeline_set_verify(p, 1);
    } else {
      if (pipe_in.empty() || pipe_dir.empty()) {
        std::fprintf(stderr, "pfpmerge pipeline: give --config or --in with --work-dir\n");
        rc = static_cast<int>(PFPM_ERR_INVALID_ARGUMENT);
        return;
      }
      st = pfpm_pipeline_create(pipe_dir.c_str(), &p);
      for (const auto& in : pipe_in)
        if (st == PFPM_OK) st = pfpm_pipeline_add_input(p, in.c_str());
      if (st == PFPM_OK) st = pfpm_pipeline_set_params(p, &pipe_params.params);
      if (st == PFPM_OK) st = pfpm_pipeline_set_format(p, parse_format(pipe_format));
      if (st == PFPM_OK) st = pfpm_pipeline_set_stride(p, pipe_stride);
      if (st == PFPM_OK) st = pfpm_pipeline_set_packed(p, pipe_plain ? 0 : 1);
      if (st == PFPM_OK) st = pfpm_pipeline_set_verify(p, pipe_verify ? 1 : 0);
    }
    if (st == PFPM_OK && (pipe_config.empty() || pipe->count("--jobs") > 0))
      st = pfpm_pipeline_set_jobs(p, pipe_jobs);
    if (st == PFPM_OK && pipe_force) st = pfpm_pipeline_set_force(p, 1);
    if (st == PFPM_OK) st = pfpm_pipeline_run(p);
    rc = report(st);
    if (rc == 0) {
      std::fputs(pfpm_pipeline_report(p), stdout);
      if (pfpm_pipeline_verified(p) == 0) rc = kExitMismatch;
    }
    pfpm_pipeline_free(p);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return rc;
}
