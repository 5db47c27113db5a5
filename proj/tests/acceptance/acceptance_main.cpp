// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails.

#include <malloc.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <new>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "alphabet.hpp"
#include "bwt_build.hpp"
#include "dict_store.hpp"
#include "error.hpp"
#include "generators.hpp"
#include "karp_rabin.hpp"
#include "merge.hpp"
#include "oracle.hpp"
#include "pfp_core.hpp"
#include "trigger_exchange.hpp"

// --- heap accounting ---------------------------------------------------------

namespace {

std::atomic<std::int64_t> g_live{0};
std::atomic<std::int64_t> g_peak{0};

void note_alloc(void* p) {
  if (!p) return;
  const auto now = g_live.fetch_add(static_cast<std::int64_t>(malloc_usable_size(p))) +
                   static_cast<std::int64_t>(malloc_usable_size(p));
  auto peak = g_peak.load(std::memory_order_relaxed);
  while (now > peak && !g_peak.compare_exchange_weak(peak, now)) {
  }
}

void note_free(void* p) {
  if (p) g_live.fetch_sub(static_cast<std::int64_t>(malloc_usable_size(p)));
}

void* tracked_alloc(std::size_t n) {
  void* p = std::malloc(n == 0 ? 1 : n);
  if (!p) throw std::bad_alloc();
  note_alloc(p);
  return p;
}

void tracked_free(void* p) noexcept {
  note_free(p);
  std::free(p);
}

}  // namespace

void* operator new(std::size_t n) { return tracked_alloc(n); }
void* operator new[](std::size_t n) { return tracked_alloc(n); }
void operator delete(void* p) noexcept { tracked_free(p); }
void operator delete[](void* p) noexcept { tracked_free(p); }
void operator delete(void* p, std::size_t) noexcept { tracked_free(p); }
void operator delete[](void* p, std::size_t) noexcept { tracked_free(p); }

namespace {

using namespace pfpm;
using Clock = std::chrono::steady_clock;

// Heap peak above the level at construction.
class HeapWindow {
 public:
  HeapWindow() : base_(g_live.load()) { g_peak.store(base_); }
  std::int64_t peak() const { return g_peak.load() - base_; }

 private:
  std::int64_t base_;
};

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string failure;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) failure = what;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

ParseParams make_params(std::uint32_t w, std::uint64_t p) {
  ParseParams pp;
  pp.w = w;
  pp.p = p;
  return pp;
}

// --- instance suite ------------------------------------------------------------

struct Instance {
  ParseParams params;
  std::vector<SequenceCollection> colls;
};

constexpr std::size_t kInstances = 50;
constexpr std::uint64_t kMaxTotal = oracle::kDefaultMaxLength;

// Cycles through every (w, p) pair and every k in [2, 8]; resamples sizes until
// the padded total fits the oracle.
Instance make_instance(testing::Rng& rng, std::size_t index) {
  static constexpr std::array<std::uint32_t, 3> ws{4, 8, 20};
  static constexpr std::array<std::uint64_t, 4> ps{8, 16, 32, 64};
  Instance inst;
  inst.params = make_params(ws[index % 3], ps[(index / 3) % 4]);
  const std::size_t k = 2 + index % 7;
  for (;;) {
    inst.colls.clear();
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t strings = 5 + rng() % 46;
      const double rate = 0.01 + 0.09 * std::uniform_real_distribution<double>(0, 1)(rng);
      inst.colls.push_back(
          testing::mutated_dataset(rng, static_cast<DatasetId>(j), strings, 200, 5000, rate));
    }
    if (testing::padded_length(inst.colls, inst.params.w) <= kMaxTotal) return inst;
  }
}

struct SuiteTotals {
  std::size_t instances = 0;
  std::uint64_t characters = 0;
  std::uint64_t easy_chars = 0;
  std::uint64_t valid_suffixes = 0;
  std::uint64_t terminal_shared = 0;
  std::uint64_t merges = 0;
  std::uint64_t pairs = 0;
  std::uint64_t degenerate = 0;
  double seconds = 0;
};

std::weak_ordering bytewise(std::string_view text, std::uint64_t a, std::uint64_t b) {
  for (;; ++a, ++b) {
    const auto x = static_cast<std::uint8_t>(text[a]);
    const auto y = static_cast<std::uint8_t>(text[b]);
    if (x != y) return x < y ? std::weak_ordering::less : std::weak_ordering::greater;
    if (x == kEndOfPhrase) return std::weak_ordering::equivalent;
  }
}

void run_suite(Outcome& merge_c, Outcome& easy_c, Outcome& excl_c, Outcome& balance_c,
               Outcome& packed_c, SuiteTotals& totals) {
  testing::Rng rng(20240611);
  const auto start = Clock::now();
  for (std::size_t i = 0; i < kInstances; ++i) {
    const auto inst = make_instance(rng, i);
    const auto& pp = inst.params;
    const std::string tag = "instance " + std::to_string(i);
    testing::TempDir dir("accept");
    const auto rp = restricted_parse_all(inst.colls, pp);

    std::vector<Dictionary> dicts;
    std::vector<std::string> dict_paths, sa_paths, bwt_paths;
    for (std::size_t j = 0; j < inst.colls.size(); ++j) {
      const auto& res = rp.parses[j];
      if (res.dict.phrase_count() <= inst.colls[j].sequences.size()) ++totals.degenerate;
      const auto sad = build_dict_sa(res.dict);
      const auto classes = classify_all(res.dict, sad);
      MemoryBwtSink sink(res.dict.text_length());
      const auto easy = easy_fill(res.dict, sad, classes, sink);

      // Positions outside the gaps are final after the easy pass.
      const auto reference = oracle::naive_multi_bwt({inst.colls[j]}, pp.w);
      const auto& got = sink.bytes();
      std::uint64_t pos = 0, easy_seen = 0;
      bool easy_ok = got.size() == reference.size();
      auto compare_until = [&](std::uint64_t end) {
        for (; pos < end && easy_ok; ++pos, ++easy_seen) easy_ok = got[pos] == reference[pos];
      };
      for (const auto& g : easy.gaps) {
        compare_until(g.start);
        pos = g.start + g.width;
      }
      compare_until(got.size());
      easy_c.check(easy_ok && easy_seen == easy.easy_chars,
                   tag + " dataset " + std::to_string(j) + ": easy fill differs from the oracle");
      totals.easy_chars += easy.easy_chars;

      hard_fill(easy.gaps, parse_bwt(res.parse, res.dict), res.dict, classes, sink);
      merge_c.check(sink.bytes() == reference,
                    tag + " dataset " + std::to_string(j) + ": per-dataset BWT differs");

      const auto t = std::to_string(j);
      dict_paths.push_back(dir.file("dict" + t));
      sa_paths.push_back(dir.file("sa" + t));
      bwt_paths.push_back(dir.file("bwt" + t));
      write_dictionary(res.dict, dict_paths.back(), true);
      write_sa(sad, res.dict.d_size(), sa_paths.back());
      write_bwt(bwt_paths.back(), {pp, res.dict.dataset_id()}, sink.bytes());
      dicts.push_back(res.dict);
    }

    const auto report = check_exclusivity(dicts);
    excl_c.check(report.violations == 0, tag + ": " + report.first_violation);
    totals.valid_suffixes += report.valid_suffixes;
    totals.terminal_shared += report.terminal_shared;

    MergeOptions opt;
    opt.stride = 1 + rng() % 64;
    opt.buffer_bytes = 1 + rng() % 4096;
    const auto stats = merge_bwts(dict_paths, sa_paths, bwt_paths, dir.file("merged"), opt);
    ++totals.merges;
    std::uint64_t consumed = 0;
    for (auto c : stats.consumed) consumed += c;
    balance_c.check(stats.consumed == stats.lengths && consumed == stats.output_length,
                    tag + ": old BWTs not consumed exactly");

    SequenceCollection all;
    std::vector<std::string> allowed;
    for (std::size_t j = 0; j < inst.colls.size(); ++j) {
      for (const auto& s : inst.colls[j].sequences) all.sequences.push_back(s);
      for (std::size_t t = 0; t < rp.census.exclusive[j].size(); ++t)
        allowed.emplace_back(rp.census.exclusive[j][t]);
    }
    const auto union_allowed = TriggerSet::from_strings(pp.w, std::move(allowed));
    const auto merged = read_bwt(dir.file("merged"));
    merge_c.check(merged == build_bwt_string(all, pp, &union_allowed),
                  tag + ": merge differs from the union construction");
    merge_c.check(merged == oracle::naive_multi_bwt(inst.colls, pp.w),
                  tag + ": merge differs from the oracle");
    totals.characters += merged.size();

    const auto concat = concat_dicts(dicts);
    const auto packed = pack(concat);
    std::uniform_int_distribution<std::uint64_t> off(0, concat.d_size() - 1);
    bool packed_ok = true;
    for (int n = 0; n < 100000; ++n) {
      const std::uint64_t a = off(rng), b = off(rng);
      packed_ok = packed_ok && packed.compare({a}, {b}) == bytewise(concat.text(), a, b);
    }
    packed_c.check(packed_ok, tag + ": packed comparison differs from byte order");
    totals.pairs += 100000;
    ++totals.instances;
  }
  totals.seconds = seconds_since(start);
}

// --- parsing invariants --------------------------------------------------------

bool active(const KarpRabin& kr, std::string_view window, const TriggerSet* allowed) {
  const auto h = kr.from_scratch(
      {reinterpret_cast<const std::uint8_t*>(window.data()), window.size()});
  return kr.is_trigger(h) && (!allowed || allowed->contains(window));
}

void check_parsing(Outcome& out) {
  testing::Rng rng(77);
  static constexpr std::array<std::uint32_t, 3> ws{4, 8, 20};
  static constexpr std::array<std::uint64_t, 5> ps{1, 4, 8, 16, 64};
  const auto start = Clock::now();
  std::size_t strings = 0, phrases_seen = 0, restricted = 0;
  for (int batch = 0; batch < 100; ++batch) {
    const auto pp = make_params(ws[batch % 3], ps[(batch / 3) % 5]);
    const KarpRabin kr(pp);
    SequenceCollection coll;
    for (int s = 0; s < 10; ++s)
      coll.sequences.push_back(testing::random_dna(rng, 1 + rng() % 3000, batch % 7 == 0 ? "ACGTX" : "ACGT"));

    // Every other batch parses with a random half of its triggers.
    TriggerSet subset;
    const TriggerSet* allowed = nullptr;
    if (batch % 2 == 1) {
      const auto full = collect_triggers(coll, pp);
      std::vector<std::string> keep;
      for (std::size_t t = 0; t < full.size(); ++t)
        if (rng() % 2) keep.emplace_back(full[t]);
      subset = TriggerSet::from_strings(pp.w, std::move(keep));
      allowed = &subset;
      ++restricted;
    }
    const std::string tag = "batch " + std::to_string(batch);
    for (const auto& s : coll.sequences) {
      ++strings;
      const auto phrases = split_phrases(s, pp, allowed);
      phrases_seen += phrases.size();
      std::uint64_t covered = 0;
      std::string rebuilt = phrases[0].substr(pp.w);
      for (std::size_t i = 0; i < phrases.size(); ++i) {
        const auto& ph = phrases[i];
        out.check(ph.size() >= pp.w + 1 || phrases.size() == 1, tag + ": short phrase");
        covered += ph.size() - pp.w;
        if (i > 0) {
          out.check(phrases[i - 1].substr(phrases[i - 1].size() - pp.w) == ph.substr(0, pp.w),
                    tag + ": phrases do not overlap by w");
          rebuilt += ph.substr(pp.w);
        }
        // The first phrase's leading 0x2^w is not part of the string.
        const std::size_t first = i == 0 ? pp.w : 1;
        for (std::size_t o = first; o + pp.w < ph.size(); ++o)
          out.check(!active(kr, std::string_view(ph).substr(o, pp.w), allowed),
                    tag + ": active trigger inside a phrase");
      }
      const std::string padded = s + std::string(pp.w, static_cast<char>(kSeparator));
      out.check(covered == padded.size(), tag + ": coverage differs from the padded length");
      out.check(rebuilt == padded, tag + ": phrases do not re-expand to the string");
    }

    // Prefix-freeness of the valid suffixes of the batch dictionary.
    const auto res = parse_collection(coll, pp, allowed);
    std::vector<std::string> valid;
    for (PhraseId id = 0; id < res.dict.phrase_count(); ++id) {
      const auto ph = res.dict.phrase(id);
      for (std::size_t o = 1; o + pp.w <= ph.size(); ++o) valid.emplace_back(ph.substr(o));
    }
    std::sort(valid.begin(), valid.end());
    valid.erase(std::unique(valid.begin(), valid.end()), valid.end());
    for (std::size_t i = 0; i + 1 < valid.size(); ++i)
      out.check(valid[i + 1].compare(0, valid[i].size(), valid[i]) != 0,
                tag + ": valid suffix is a prefix of another");
  }
  out.check(strings >= 1000, "fewer than 1000 strings");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu strings, %zu phrases, %zu restricted batches, %.1fs",
                strings, phrases_seen, restricted, seconds_since(start));
  out.detail = buf;
}

// --- memory profile ------------------------------------------------------------

struct MemoryPoint {
  std::uint64_t text = 0;
  std::uint64_t d_size = 0;
  std::int64_t peak = 0;
  std::uint64_t instrumented = 0;
};

// `seeds` distinct strings per dataset, each repeated `copies` times. Copies
// add text without adding phrases.
MemoryPoint merge_memory(std::size_t seeds, std::size_t copies) {
  testing::Rng rng(99);
  const auto pp = make_params(8, 32);
  const auto root = testing::random_dna(rng, 4000);
  std::vector<SequenceCollection> colls(4);
  for (std::size_t j = 0; j < colls.size(); ++j) {
    colls[j].dataset_id = static_cast<DatasetId>(j);
    testing::Rng local(1000 + j);
    std::vector<std::string> distinct;
    for (std::size_t s = 0; s < seeds; ++s) distinct.push_back(testing::mutate(local, root, 0.08));
    for (std::size_t c = 0; c < copies; ++c)
      for (const auto& s : distinct) colls[j].sequences.push_back(s);
  }
  const auto rp = restricted_parse_all(colls, pp);
  testing::TempDir dir("acceptmem");
  const auto files = testing::write_all(rp.parses, dir, true);

  MergeOptions opt;
  opt.buffer_bytes = 16 << 10;
  opt.sa_buffer_entries = 512;
  MemoryPoint point;
  MergeStats stats;
  {
    HeapWindow heap;
    stats = merge_bwts(files.dicts, files.sas, files.bwts, dir.file("merged"), opt);
    point.peak = heap.peak();
  }
  point.text = stats.output_length;
  for (const auto& r : rp.parses) point.d_size += r.dict.d_size();
  point.instrumented = stats.instrumented_bytes();
  return point;
}

void check_memory(Outcome& out) {
  const auto start = Clock::now();
  std::vector<MemoryPoint> fixed;
  for (std::size_t copies : {1, 4, 16}) fixed.push_back(merge_memory(6, copies));
  const auto larger = merge_memory(24, 1);

  std::int64_t lo = fixed[0].peak, hi = fixed[0].peak;
  for (const auto& p : fixed) {
    lo = std::min(lo, p.peak);
    hi = std::max(hi, p.peak);
    out.check(p.d_size == fixed[0].d_size, "dictionary size changed with text length");
  }
  const double variation = static_cast<double>(hi - lo) / static_cast<double>(lo);
  out.check(fixed.back().text >= 15 * fixed.front().text, "text did not grow");
  out.check(variation < 0.10, "peak varies by 10% or more with text length");
  out.check(larger.d_size > fixed[0].d_size, "larger dictionary not larger");
  out.check(larger.peak > fixed[0].peak, "peak does not grow with dictionary size");

  // Everything beyond the instrumented structures is per-stream overhead:
  // file buffers and paths, independent of the input size.
  const std::int64_t stream_overhead = 256 << 10;
  for (const MemoryPoint* p : std::array<const MemoryPoint*, 4>{&fixed[0], &fixed[1], &fixed[2], &larger})
    out.check(p->peak <= static_cast<std::int64_t>(p->instrumented) + stream_overhead,
              "merge allocates beyond tables, packed dictionary, buffer and cursors");

  char buf[320];
  std::snprintf(buf, sizeof buf,
                "text %llu..%llu chars at dSize %llu: peak %lld..%lld B (%.1f%%); dSize %llu: "
                "peak %lld B; instrumented %llu/%llu B; %.1fs",
                static_cast<unsigned long long>(fixed.front().text),
                static_cast<unsigned long long>(fixed.back().text),
                static_cast<unsigned long long>(fixed[0].d_size), static_cast<long long>(lo),
                static_cast<long long>(hi), 100 * variation,
                static_cast<unsigned long long>(larger.d_size), static_cast<long long>(larger.peak),
                static_cast<unsigned long long>(fixed[0].instrumented),
                static_cast<unsigned long long>(larger.instrumented), seconds_since(start));
  out.detail = buf;
}

// --- hash consistency ----------------------------------------------------------

void check_hash(Outcome& out) {
  testing::Rng rng(5);
  const auto start = Clock::now();
  std::uint64_t windows = 0;
  for (std::uint32_t w : {4u, 8u, 20u, 32u}) {
    const auto pp = make_params(w, 16);
    const KarpRabin kr(pp);
    std::string text = testing::random_dna(rng, 250000 + w, "ACGTX");
    for (std::size_t i = 0; i < text.size(); i += 997) text[i] = static_cast<char>(kSeparator);
    const auto* data = reinterpret_cast<const std::uint8_t*>(text.data());
    std::uint64_t h = kr.from_scratch({data, w});
    bool ok = true;
    for (std::size_t i = 1; i + w <= text.size(); ++i) {
      h = kr.roll(h, data[i - 1], data[i + w - 1]);
      ok = ok && h == kr.from_scratch({data + i, w});
      ++windows;
    }
    out.check(ok, "rolled hash differs for w=" + std::to_string(w));
  }
  out.check(windows >= 1000000, "fewer than 10^6 windows");
  char buf[96];
  std::snprintf(buf, sizeof buf, "%llu windows, %.1fs", static_cast<unsigned long long>(windows),
                seconds_since(start));
  out.detail = buf;
}

void print(int n, const char* name, const Outcome& o) {
  std::printf("%s criterion %d %s: %s%s%s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(),
              o.pass ? "" : "; first failure: ", o.pass ? "" : o.failure.c_str());
  std::fflush(stdout);
}

void guarded(Outcome& o, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);

  Outcome merge_c, parse_c, easy_c, excl_c, balance_c, packed_c, memory_c, hash_c;
  SuiteTotals t;
  guarded(merge_c, [&] { run_suite(merge_c, easy_c, excl_c, balance_c, packed_c, t); });
  if (t.instances < kInstances) {
    for (auto* o : {&easy_c, &excl_c, &balance_c, &packed_c})
      o->check(false, "suite stopped after " + std::to_string(t.instances) + " instances");
  }
  guarded(parse_c, [&] { check_parsing(parse_c); });
  guarded(memory_c, [&] { check_memory(memory_c); });
  guarded(hash_c, [&] { check_hash(hash_c); });

  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu instances, %llu BWT characters, %llu degenerate datasets, %.1fs",
                t.instances, static_cast<unsigned long long>(t.characters),
                static_cast<unsigned long long>(t.degenerate), t.seconds);
  merge_c.detail = buf;
  // Every per-dataset BWT has the same total length as the merged one.
  std::snprintf(buf, sizeof buf, "easy fill wrote %.2f%% of %llu positions",
                t.characters ? 100.0 * static_cast<double>(t.easy_chars) / static_cast<double>(t.characters) : 0.0,
                static_cast<unsigned long long>(t.characters));
  easy_c.detail = buf;
  std::snprintf(buf, sizeof buf, "%llu valid suffixes, %llu shared string-end suffixes",
                static_cast<unsigned long long>(t.valid_suffixes),
                static_cast<unsigned long long>(t.terminal_shared));
  excl_c.detail = buf;
  std::snprintf(buf, sizeof buf, "%llu merges", static_cast<unsigned long long>(t.merges));
  balance_c.detail = buf;
  std::snprintf(buf, sizeof buf, "%llu pairs", static_cast<unsigned long long>(t.pairs));
  packed_c.detail = buf;

  print(1, "merge correctness", merge_c);
  print(2, "parsing invariants", parse_c);
  print(3, "easy-fill coverage", easy_c);
  print(4, "exclusivity", excl_c);
  print(5, "consumption balance", balance_c);
  print(6, "packed comparison", packed_c);
  print(7, "memory profile", memory_c);
  print(8, "hash consistency", hash_c);

  const bool all = merge_c.pass && parse_c.pass && easy_c.pass && excl_c.pass && balance_c.pass &&
                   packed_c.pass && memory_c.pass && hash_c.pass;
  return all ? 0 : 1;
}
