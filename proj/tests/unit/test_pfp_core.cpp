#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "alphabet.hpp"
#include "error.hpp"
#include "generators.hpp"
#include "karp_rabin.hpp"
#include "oracle.hpp"
#include "pfp_core.hpp"

using namespace pfpm;

namespace {

std::span<const std::uint8_t> bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

ParseParams params(std::uint32_t w, std::uint64_t p) {
  ParseParams pp;
  pp.w = w;
  pp.p = p;
  return pp;
}

std::string padded(std::string_view s, std::uint32_t w) {
  return std::string(s) + std::string(w, static_cast<char>(kSeparator));
}

// Start offsets in the padded string of phrases 1.. (phrase 0 starts before it).
std::vector<std::uint64_t> cut_offsets(const std::vector<std::string>& phrases, std::uint32_t w) {
  std::vector<std::uint64_t> cuts;
  std::uint64_t pos = phrases[0].size() - 2 * w;
  for (std::size_t i = 1; i < phrases.size(); ++i) {
    cuts.push_back(pos);
    pos += phrases[i].size() - w;
  }
  return cuts;
}

}  // namespace

TEST_CASE("hash regression value", "[hash]") {
  const KarpRabin kr(params(4, 100));
  REQUIRE(kr.from_scratch(bytes("ACGT")) == 250589676u);
  REQUIRE(kr.from_scratch(bytes("ACGT")) == oracle::window_hash("ACGT", params(4, 100)));
}

TEST_CASE("rolling agrees with recomputation", "[hash]") {
  const auto pp = params(4, 100);
  const KarpRabin kr(pp);
  REQUIRE(kr.roll(kr.from_scratch(bytes("AAAA")), 'A', 'C') == kr.from_scratch(bytes("AAAC")));

  testing::Rng rng(5);
  for (std::uint32_t w : {2u, 8u, 20u, 31u}) {
    const KarpRabin k(params(w, 16));
    const auto text = testing::random_dna(rng, 5000, "ACGTX\x02");
    std::uint64_t h = k.from_scratch(bytes(std::string_view(text).substr(0, w)));
    for (std::size_t i = 1; i + w <= text.size(); ++i) {
      h = k.roll(h, static_cast<std::uint8_t>(text[i - 1]), static_cast<std::uint8_t>(text[i + w - 1]));
      REQUIRE(h == k.from_scratch(bytes(std::string_view(text).substr(i, w))));
    }
  }
  // Equal windows hash equally wherever they occur.
  const std::string t = "ACGTTACGTT";
  REQUIRE(kr.from_scratch(bytes(std::string_view(t).substr(0, 4))) ==
          kr.from_scratch(bytes(std::string_view(t).substr(5, 4))));
}

TEST_CASE("trigger collection", "[triggers]") {
  testing::Rng rng(9);
  SECTION("p = 1 makes every window a trigger") {
    SequenceCollection c;
    c.sequences = {"ACGTACGTAA"};
    const auto set = collect_triggers(c, params(4, 1));
    std::set<std::string> expected;
    const auto pad = padded(c.sequences[0], 4);
    for (std::size_t i = 0; i + 4 <= pad.size(); ++i) expected.insert(pad.substr(i, 4));
    REQUIRE(set.size() == expected.size());
    for (const auto& e : expected) REQUIRE(set.contains(e));
  }
  SECTION("matches an independent window scan") {
    for (int round = 0; round < 10; ++round) {
      const auto pp = params(4, 16);
      SequenceCollection c;
      c.sequences = {testing::random_dna(rng, 1000)};
      const auto set = collect_triggers(c, pp);
      std::set<std::string> expected;
      for (const auto& hit : oracle::naive_window_scan(padded(c.sequences[0], 4), pp))
        expected.insert(hit.window);
      REQUIRE(set.size() == expected.size());
      for (const auto& e : expected) REQUIRE(set.contains(e));
    }
  }
}

TEST_CASE("string without breaks is one phrase", "[parse]") {
  const auto pp = params(4, 16);
  SequenceCollection c;
  c.sequences = {"ACGTTGCA"};
  const TriggerSet none(4);
  const auto res = parse_collection(c, pp, &none);
  REQUIRE(res.dict.phrase_count() == 1);
  REQUIRE(res.parse.phrase_ids.size() == 1);
  REQUIRE(res.dict.phrase(0) == std::string(4, '\x02') + "ACGTTGCA" + std::string(4, '\x02'));
}

TEST_CASE("phrases between repeated triggers", "[parse]") {
  // With p = 1 every window is a hash trigger; the allowed set keeps only T.
  const auto pp = params(4, 1);
  const std::string t = "ACCA";
  const std::string s = t + "GGTT" + t + "TGTG" + t;
  const auto allowed = TriggerSet::from_strings(4, {t});
  const auto phrases = split_phrases(s, pp, &allowed);
  REQUIRE(phrases.size() == 4);
  REQUIRE(phrases[1] == t + "GGTT" + t);
  REQUIRE(phrases[2] == t + "TGTG" + t);
  REQUIRE(phrases[0] == std::string(4, '\x02') + t);
  REQUIRE(phrases[3] == t + std::string(4, '\x02'));
}

TEST_CASE("phrase lengths cover the padded text", "[parse]") {
  testing::Rng rng(21);
  const auto pp = params(4, 16);
  SequenceCollection c;
  c.sequences = {testing::random_dna(rng, 5000)};
  const auto res = parse_collection(c, pp);
  std::uint64_t sum = 0;
  for (PhraseId i = 0; i < res.dict.phrase_count(); ++i)
    sum += res.dict.occ(i) * (res.dict.phrase(i).size() - 4);
  REQUIRE(sum == 5004);
  REQUIRE(res.dict.text_length() == 5004);
  REQUIRE(reconstruct_padded(res.dict, res.parse) == std::vector<std::string>{padded(c.sequences[0], 4)});
}

TEST_CASE("restricted parsing refines nothing and loses nothing", "[parse]") {
  testing::Rng rng(33);
  for (int round = 0; round < 30; ++round) {
    const auto pp = params(4 + round % 3, 8);
    const auto s = testing::random_dna(rng, 300 + round * 20);
    SequenceCollection c;
    c.sequences = {s};
    auto full = collect_triggers(c, pp);
    std::vector<std::string> keep;
    for (std::size_t i = 0; i < full.size(); ++i)
      if (i % 2 == 0) keep.push_back(std::string(full[i]));
    const auto allowed = TriggerSet::from_strings(pp.w, keep);

    const auto unrestricted = split_phrases(s, pp);
    const auto restricted = split_phrases(s, pp, &allowed);
    const auto a = cut_offsets(unrestricted, pp.w);
    const auto b = cut_offsets(restricted, pp.w);
    for (auto cut : b) REQUIRE(std::find(a.begin(), a.end(), cut) != a.end());

    const auto res = parse_collection(c, pp, &allowed);
    REQUIRE(reconstruct_padded(res.dict, res.parse) == std::vector<std::string>{padded(s, pp.w)});
  }
}

TEST_CASE("trigger and parse files", "[parse][io]") {
  testing::TempDir dir("pfp");
  const auto set = TriggerSet::from_strings(4, {"TTTT", "ACGT", "ACGT", "AAAA"});
  REQUIRE(set.size() == 3);
  write_trigger_set(set, dir.file("t.trg"));
  REQUIRE(read_trigger_set(dir.file("t.trg")) == set);
  REQUIRE_THROWS_AS(read_trigger_set(dir.file("t.trg"), 5), Error);
  REQUIRE_THROWS_AS(TriggerSet(4).push_back("ACG"), Error);

  {
    std::ofstream out(dir.file("bad.trg"), std::ios::binary);
    const std::uint64_t n = 2;
    out.write(reinterpret_cast<const char*>(&n), 8);
    out << "TTTTAAAA";
  }
  REQUIRE_THROWS_AS(read_trigger_set(dir.file("bad.trg")), Error);

  testing::Rng rng(2);
  SequenceCollection c;
  c.sequences = {testing::random_dna(rng, 400), testing::random_dna(rng, 3)};
  const auto pp = params(6, 8);
  const auto res = parse_collection(c, pp);
  write_parse(res.parse, pp, dir.file("p.parse"));
  ParseParams back;
  const auto parse = read_parse(dir.file("p.parse"), &back);
  REQUIRE(back == pp);
  REQUIRE(parse.phrase_ids == res.parse.phrase_ids);
  REQUIRE(parse.string_starts == res.parse.string_starts);
}

TEST_CASE("allowed set width must match w", "[parse]") {
  SequenceCollection c;
  c.sequences = {"ACGTACGT"};
  const auto allowed = TriggerSet::from_strings(5, {"ACGTA"});
  REQUIRE_THROWS_AS(parse_collection(c, params(4, 2), &allowed), Error);
}
