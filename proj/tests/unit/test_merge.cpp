#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include <spdlog/spdlog.h>

#include "bwt_build.hpp"
#include "error.hpp"
#include "generators.hpp"
#include "merge.hpp"
#include "oracle.hpp"
#include "trigger_exchange.hpp"

using namespace pfpm;

namespace {

ParseParams params(std::uint32_t w, std::uint64_t p) {
  ParseParams pp;
  pp.w = w;
  pp.p = p;
  return pp;
}

std::vector<Dictionary> random_dicts(testing::Rng& rng, std::size_t k) {
  std::vector<Dictionary> out;
  const auto pp = params(4, 8);
  for (std::size_t j = 0; j < k; ++j) {
    const auto c = testing::mutated_dataset(rng, static_cast<DatasetId>(j), 3, 200, 400, 0.05);
    auto parsed = parse_collection(c, pp);
    out.push_back(std::move(parsed.dict));
  }
  return out;
}

std::string payload(const std::string& path) { return read_bwt(path); }

}  // namespace

TEST_CASE("merge tables", "[merge]") {
  const auto pp = params(4, 8);
  const auto one = Dictionary::from_phrases(pp, 0, {"ACGTACGTA"}, {3});
  const auto t = build_merge_tables({one}, 50);
  REQUIRE(t.sample_phrase() == std::vector<PhraseId>{0});
  REQUIRE(t.phrase_end() == std::vector<std::uint64_t>{10});
  REQUIRE(t.phrase_occ() == std::vector<std::uint64_t>{3});

  testing::Rng rng(41);
  const auto dicts = random_dicts(rng, 3);
  const auto all = concat_dicts(dicts);
  for (std::uint64_t stride : {1u, 7u, 50u}) {
    const auto tables = build_merge_tables(dicts, stride);
    REQUIRE(tables.phrase_count() == all.phrase_count());
    if (stride == 1) REQUIRE(tables.sample_phrase().size() == all.d_size());
    for (std::uint64_t off = 0; off < all.d_size(); ++off) {
      const PhraseId ph = all.phrase_at(off);
      REQUIRE(tables.lookup(off) == ph);
      const auto e = tables.query(off);
      REQUIRE(e.valid == is_valid_suffix(all, off, ph));
      REQUIRE(e.occ == all.occ(ph));
      REQUIRE(e.dataset == all.phrase_dataset(ph));
    }
    REQUIRE(tables.lookup(0) == 0);
    for (std::size_t i = 0; i + 1 < tables.phrase_count(); ++i)
      REQUIRE(tables.lookup(tables.phrase_end()[i]) == i + 1);
  }
  // A suffix of exactly w characters before the terminator is valid.
  const auto e = t.query(10 - 1 - 4);
  REQUIRE(e.valid);
  REQUIRE_FALSE(t.query(0).valid);
  REQUIRE_FALSE(t.query(10 - 1 - 3).valid);
}

TEST_CASE("streamed SAD equals the SA of the concatenation", "[merge]") {
  testing::Rng rng(42);
  testing::TempDir dir("sad");
  for (std::size_t k : {1u, 4u}) {
    const auto dicts = random_dicts(rng, k);
    std::vector<std::string> paths;
    std::vector<std::uint64_t> bases;
    std::uint64_t base = 0;
    for (std::size_t j = 0; j < k; ++j) {
      paths.push_back(dir.file("sa" + std::to_string(j)));
      write_sa(build_dict_sa(dicts[j]), dicts[j].d_size(), paths.back());
      bases.push_back(base);
      base += dicts[j].d_size();
    }
    const auto all = concat_dicts(dicts);
    const auto packed = pack(all);
    SadMergeCursor cursor(packed, paths, bases, 3);
    std::vector<std::uint64_t> got;
    std::uint64_t off = 0;
    std::size_t ds = 0;
    while (cursor.next(off, ds)) got.push_back(off);
    REQUIRE(got == build_dict_sa(all));
  }
}

TEST_CASE("merging BWTs", "[merge]") {
  spdlog::set_level(spdlog::level::err);
  testing::Rng rng(43);
  testing::TempDir dir("merge");

  SECTION("one dataset is copied verbatim") {
    const auto c = testing::mutated_dataset(rng, 0, 4, 300, 500, 0.05);
    const auto m = testing::write_all({parse_collection(c, params(4, 8))}, dir, true);
    const auto stats = merge_bwts(m.dicts, m.sas, m.bwts, dir.file("out"));
    REQUIRE(payload(dir.file("out")) == payload(m.bwts[0]));
    REQUIRE(stats.consumed == stats.lengths);
  }
  SECTION("disjoint alphabets") {
    std::vector<SequenceCollection> colls(2);
    colls[0].sequences = {testing::random_dna(rng, 700, "AC"), testing::random_dna(rng, 300, "AC")};
    colls[1].sequences = {testing::random_dna(rng, 500, "GT")};
    const auto rp = restricted_parse_all(colls, params(4, 4));
    const auto m = testing::write_all(rp.parses, dir, false);
    merge_bwts(m.dicts, m.sas, m.bwts, dir.file("out"));
    REQUIRE(payload(dir.file("out")) == oracle::naive_multi_bwt(colls, 4));
  }
  SECTION("mutated datasets agree with both references") {
    const auto pp = params(8, 32);
    std::vector<SequenceCollection> colls;
    for (DatasetId j = 0; j < 4; ++j) colls.push_back(testing::mutated_dataset(rng, j, 5, 500, 1500, 0.05));
    const auto rp = restricted_parse_all(colls, pp);
    const auto m = testing::write_all(rp.parses, dir, true);
    MergeOptions opt;
    opt.buffer_bytes = 7;  // many partial copies
    const auto stats = merge_bwts(m.dicts, m.sas, m.bwts, dir.file("out"), opt);
    REQUIRE(stats.consumed == stats.lengths);

    SequenceCollection all;
    std::vector<std::string> allowed;
    for (std::size_t j = 0; j < colls.size(); ++j) {
      for (const auto& s : colls[j].sequences) all.sequences.push_back(s);
      for (std::size_t i = 0; i < rp.census.exclusive[j].size(); ++i)
        allowed.emplace_back(rp.census.exclusive[j][i]);
    }
    const auto union_allowed = TriggerSet::from_strings(pp.w, allowed);
    const auto merged = payload(dir.file("out"));
    REQUIRE(merged == build_bwt_string(all, pp, &union_allowed));
    REQUIRE(merged == oracle::naive_multi_bwt(colls, pp.w));
  }
}

TEST_CASE("merge failures", "[merge]") {
  spdlog::set_level(spdlog::level::err);
  testing::Rng rng(44);
  testing::TempDir dir("mergefail");
  const auto pp = params(4, 8);
  std::vector<SequenceCollection> colls;
  for (DatasetId j = 0; j < 2; ++j) colls.push_back(testing::mutated_dataset(rng, j, 3, 300, 400, 0.05));
  const auto rp = restricted_parse_all(colls, pp);
  const auto m = testing::write_all(rp.parses, dir, true);

  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
  };

  SECTION("parameter mismatch is caught before merging") {
    auto c = colls[1];
    const auto other = parse_collection(c, params(5, 8));
    const auto f = testing::write_artifacts(other, dir, 9, true);
    REQUIRE(kind_of([&] {
              merge_bwts({m.dicts[0], f.dict}, {m.sas[0], f.sa}, {m.bwts[0], f.bwt}, dir.file("out"));
            }) == ErrorKind::ParamMismatch);
    REQUIRE_FALSE(std::filesystem::exists(dir.file("out")));
  }
  SECTION("truncated SA") {
    std::filesystem::resize_file(m.sas[1], std::filesystem::file_size(m.sas[1]) - 8);
    REQUIRE(kind_of([&] { merge_bwts(m.dicts, m.sas, m.bwts, dir.file("out")); }) == ErrorKind::Format);
  }
  SECTION("BWT of the wrong length") {
    const auto bytes = payload(m.bwts[1]);
    write_bwt(m.bwts[1], {pp, 1}, bytes.substr(1));
    REQUIRE(kind_of([&] { merge_bwts(m.dicts, m.sas, m.bwts, dir.file("out")); }) == ErrorKind::Format);
  }
  SECTION("unrestricted parses of overlapping datasets") {
    std::vector<ParseResult> plain;
    for (DatasetId j = 0; j < 2; ++j) {
      auto c = colls[0];
      c.dataset_id = j;
      plain.push_back(parse_collection(c, pp));
    }
    testing::TempDir d2("mergeshared");
    const auto mm = testing::write_all(plain, d2, true);
    REQUIRE(kind_of([&] { merge_bwts(mm.dicts, mm.sas, mm.bwts, d2.file("out")); }) ==
            ErrorKind::Invariant);
  }
}

TEST_CASE("BWT file comparison", "[merge]") {
  testing::TempDir dir("cmp");
  const auto pp = params(4, 8);
  write_bwt(dir.file("a"), {pp, 0}, "ACGT");
  write_bwt(dir.file("b"), {pp, 1}, "ACGT");
  write_bwt(dir.file("c"), {pp, 0}, "ACTT");
  write_bwt(dir.file("d"), {pp, 0}, "ACG");
  REQUIRE(compare_bwt_files(dir.file("a"), dir.file("b")) == -1);
  REQUIRE(compare_bwt_files(dir.file("a"), dir.file("c")) == 2);
  REQUIRE(compare_bwt_files(dir.file("a"), dir.file("d")) == 3);
}
