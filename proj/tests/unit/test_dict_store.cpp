#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

#include "alphabet.hpp"
#include "dict_store.hpp"
#include "error.hpp"
#include "generators.hpp"

using namespace pfpm;

namespace {

ParseParams params(std::uint32_t w) {
  ParseParams pp;
  pp.w = w;
  pp.p = 8;
  return pp;
}

Dictionary random_dict(testing::Rng& rng, std::size_t count, DatasetId id, std::uint32_t w = 4) {
  std::set<std::string> phrases;
  std::uniform_int_distribution<std::size_t> len(w + 1, 3 * w + 10);
  while (phrases.size() < count) phrases.insert(testing::random_dna(rng, len(rng), "ACGTX\x02"));
  std::vector<std::uint64_t> occ(count);
  for (auto& o : occ) o = 1 + rng() % 5;
  return Dictionary::from_phrases(params(w), id, {phrases.begin(), phrases.end()}, occ);
}

// Reference order: bytes up to and including the first terminator.
std::weak_ordering bytewise(std::string_view text, std::uint64_t a, std::uint64_t b) {
  auto end_of = [&](std::uint64_t x) {
    while (static_cast<std::uint8_t>(text[x]) > kEndOfPhrase) ++x;
    return x + 1;
  };
  const auto sa = text.substr(a, end_of(a) - a);
  const auto sb = text.substr(b, end_of(b) - b);
  const int c = sa.compare(sb);
  return c < 0 ? std::weak_ordering::less
               : c > 0 ? std::weak_ordering::greater : std::weak_ordering::equivalent;
}

}  // namespace

TEST_CASE("concatenation", "[dict]") {
  testing::Rng rng(3);
  const auto a = random_dict(rng, 3, 0);
  const auto b = random_dict(rng, 5, 1);

  const std::vector<Dictionary> one{a};
  const auto single = concat_dicts(one);
  REQUIRE(single.text() == a.text());
  REQUIRE(single.phrase_count() == 3);

  const std::vector<Dictionary> two{a, b};
  const auto both = concat_dicts(two);
  REQUIRE(both.phrase_count() == 8);
  REQUIRE(both.d_size() == a.d_size() + b.d_size());
  for (PhraseId i = 0; i < 8; ++i) {
    REQUIRE(both.phrase_dataset(i) == (i < 3 ? 0u : 1u));
    REQUIRE(both.occ(i) == (i < 3 ? a.occ(i) : b.occ(i - 3)));
  }

  auto other = Dictionary::from_phrases(params(5), 2, {"ACGTAC"}, {1});
  const std::vector<Dictionary> bad{a, other};
  REQUIRE_THROWS_AS(concat_dicts(bad), Error);
}

TEST_CASE("suffix comparison basics", "[dict]") {
  const auto d = Dictionary::from_phrases(params(2), 0, {"ACG", "ACT"}, {1, 1});
  REQUIRE(compare_suffixes(d, {0}, {0}) == std::weak_ordering::equivalent);
  REQUIRE(compare_suffixes(d, {0}, {4}) == std::weak_ordering::less);
  const auto packed = pack(d);
  REQUIRE(packed.compare({0}, {4}) == std::weak_ordering::less);
  REQUIRE(packed.compare({4}, {0}) == std::weak_ordering::greater);
}

TEST_CASE("SA of a single phrase", "[dict]") {
  const auto d = Dictionary::from_phrases(params(2), 0, {"AC"}, {1});
  REQUIRE(d.d_size() == 3);
  REQUIRE(build_dict_sa(d) == std::vector<std::uint64_t>{2, 0, 1});
}

TEST_CASE("SA equals a comparison sort", "[dict]") {
  testing::Rng rng(17);
  for (int round = 0; round < 20; ++round) {
    const auto d = random_dict(rng, 50, 0);
    const auto sa = build_dict_sa(d);
    std::vector<std::uint64_t> expected(d.d_size());
    std::iota(expected.begin(), expected.end(), 0);
    std::stable_sort(expected.begin(), expected.end(), [&](auto a, auto b) {
      return bytewise(d.text(), a, b) == std::weak_ordering::less;
    });
    REQUIRE(sa == expected);
    for (std::size_t i = 1; i < sa.size(); ++i)
      REQUIRE(compare_suffixes(d, {sa[i - 1]}, {sa[i]}) != std::weak_ordering::greater);
  }
}

TEST_CASE("packing round trip", "[dict][packed]") {
  const std::string all{'\0', '\1', '\2', 'A', 'C', 'G', 'T', 'X'};
  for (std::size_t shift = 0; shift < 8; ++shift) {
    std::string s;
    for (std::size_t i = 0; i < 64 + shift; ++i) s.push_back(all[(i + shift) % 8]);
    PackedDictionary p(s);
    REQUIRE(p.size() == s.size());
    REQUIRE(p.unpack() == s);
    for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(p.at(i) == static_cast<std::uint8_t>(s[i]));
    std::stringstream buf;
    p.write(buf);
    REQUIRE(buf.str().size() == PackedDictionary::byte_length(s.size()));
    REQUIRE(PackedDictionary::read(buf, s.size(), "buf").unpack() == s);
  }
  REQUIRE_THROWS_AS(PackedDictionary("AB"), Error);
}

TEST_CASE("packed comparison equals byte order", "[dict][packed]") {
  testing::Rng rng(99);
  for (int round = 0; round < 5; ++round) {
    // Long shared prefixes make comparisons cross many 20-symbol blocks.
    std::set<std::string> phrases;
    const auto base = testing::random_dna(rng, 120, "ACGTX");
    while (phrases.size() < 60) {
      auto s = base.substr(0, rng() % 120) + testing::random_dna(rng, 1 + rng() % 30, "ACGTX\x02");
      phrases.insert(s);
    }
    const auto d = Dictionary::from_phrases(params(4), 0, {phrases.begin(), phrases.end()},
                                            std::vector<std::uint64_t>(phrases.size(), 1));
    const auto p = pack(d);
    REQUIRE(p.unpack() == d.text());
    std::uniform_int_distribution<std::uint64_t> off(0, d.d_size() - 1);
    for (int i = 0; i < 20000; ++i) {
      const auto a = off(rng);
      const auto b = rng() % 4 == 0 ? a : off(rng);
      const auto expected = bytewise(d.text(), a, b);
      REQUIRE(p.compare({a}, {b}) == expected);
      REQUIRE(p.compare_per_symbol({a}, {b}) == expected);
      REQUIRE(compare_suffixes(d, {a}, {b}) == expected);
    }
    for (int i = 0; i < 2000; ++i) {
      const auto a = off(rng), b = off(rng), c = off(rng);
      if (p.compare({a}, {b}) != std::weak_ordering::greater &&
          p.compare({b}, {c}) != std::weak_ordering::greater)
        REQUIRE(p.compare({a}, {c}) != std::weak_ordering::greater);
      REQUIRE((p.compare({a}, {b}) == std::weak_ordering::less) ==
              (p.compare({b}, {a}) == std::weak_ordering::greater));
    }
  }
}

TEST_CASE("dictionary files", "[dict][io]") {
  testing::TempDir dir("dict");
  testing::Rng rng(4);
  const auto d = random_dict(rng, 40, 7);
  for (bool packed : {false, true}) {
    const auto path = dir.file(packed ? "p.dict" : "u.dict");
    write_dictionary(d, path, packed);
    const auto back = read_dictionary(path);
    REQUIRE(back.text() == d.text());
    REQUIRE(back.dataset_id() == 7);
    REQUIRE(back.params() == d.params());
    REQUIRE(std::vector<std::uint64_t>(back.occurrences().begin(), back.occurrences().end()) ==
            std::vector<std::uint64_t>(d.occurrences().begin(), d.occurrences().end()));

    DictionaryReader reader(path);
    REQUIRE(reader.info().packed == packed);
    std::string streamed;
    reader.for_each_symbol([&](std::uint8_t c) { streamed.push_back(static_cast<char>(c)); });
    REQUIRE(streamed == d.text());
    for (PhraseId i = 0; i < d.phrase_count(); ++i) REQUIRE(reader.next_occ() == d.occ(i));
  }

  const auto sa = build_dict_sa(d);
  write_sa(sa, d.d_size(), dir.file("d.sa"));
  REQUIRE(read_sa(dir.file("d.sa")) == sa);
  std::filesystem::resize_file(dir.file("d.sa"), 16 + 8 * (sa.size() - 1));
  REQUIRE_THROWS_AS(SaReader(dir.file("d.sa")), Error);

  std::filesystem::resize_file(dir.file("u.dict"), 60);
  REQUIRE_THROWS_AS(read_dictionary(dir.file("u.dict")), Error);
}
