#include "oracle.hpp"

#include <algorithm>
#include <numeric>

#include "alphabet.hpp"
#include "error.hpp"

namespace pfpm::oracle {

namespace {

struct OracleText {
  std::vector<std::uint32_t> symbols;  // ranked alphabet, see rank_of
  std::vector<std::uint8_t> bytes;     // storage byte, 0 for separators
  std::vector<bool> string_start;
};

std::uint32_t letter_index(std::uint8_t c) {
  switch (c) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    case 'X': return 4;
    default: fail(ErrorKind::InvalidArgument, "oracle input outside {A,C,G,T,X}");
  }
}

// 0x2 -> 0, separator of string g -> 1 + g, letters -> 1 + G + index.
OracleText build_text(const std::vector<SequenceCollection>& datasets, std::uint32_t w,
                      std::uint64_t max_length) {
  if (w == 0) fail(ErrorKind::InvalidArgument, "w must be positive");
  std::uint64_t strings = 0;
  std::uint64_t padded = 0;
  for (const auto& d : datasets) {
    strings += d.sequences.size();
    for (const auto& s : d.sequences) padded += s.size() + w;
  }
  if (strings == 0) fail(ErrorKind::InvalidArgument, "oracle input is empty");
  if (padded > max_length)
    fail(ErrorKind::Limit, "oracle refuses " + std::to_string(padded) +
                               " characters (limit " + std::to_string(max_length) + ")");
  OracleText t;
  t.symbols.reserve(padded + strings);
  t.bytes.reserve(padded + strings);
  t.string_start.reserve(padded + strings);
  const auto letters = static_cast<std::uint32_t>(1 + strings);
  std::uint32_t g = 0;
  for (const auto& d : datasets) {
    for (const auto& s : d.sequences) {
      bool first = true;
      for (char ch : s) {
        const auto c = static_cast<std::uint8_t>(ch);
        t.symbols.push_back(letters + letter_index(c));
        t.bytes.push_back(c);
        t.string_start.push_back(first);
        first = false;
      }
      for (std::uint32_t i = 0; i < w; ++i) {
        t.symbols.push_back(0);
        t.bytes.push_back(kSeparator);
        t.string_start.push_back(first);
        first = false;
      }
      t.symbols.push_back(1 + g);
      t.bytes.push_back(0);
      t.string_start.push_back(false);
      ++g;
    }
  }
  return t;
}

bool is_separator(const OracleText& t, std::size_t i) { return t.bytes[i] == 0; }

std::string emit(const OracleText& t, const std::vector<std::uint64_t>& order) {
  std::string bwt;
  bwt.reserve(order.size());
  for (auto i : order) {
    if (is_separator(t, i)) continue;
    bwt.push_back(static_cast<char>(t.string_start[i] ? kSeparator : t.bytes[i - 1]));
  }
  return bwt;
}

// Stable counting sort of idx by key[idx[k]].
void counting_sort(std::vector<std::uint64_t>& idx, const std::vector<std::uint64_t>& key,
                   std::uint64_t key_range, std::vector<std::uint64_t>& scratch) {
  std::vector<std::uint64_t> count(key_range + 1, 0);
  for (auto i : idx) ++count[key[i] + 1];
  for (std::uint64_t r = 1; r <= key_range; ++r) count[r] += count[r - 1];
  scratch.resize(idx.size());
  for (auto i : idx) scratch[count[key[i]]++] = i;
  idx.swap(scratch);
}

}  // namespace

std::string naive_multi_bwt(const std::vector<SequenceCollection>& datasets, std::uint32_t w,
                            std::uint64_t max_length) {
  const OracleText t = build_text(datasets, w, max_length);
  const std::size_t n = t.symbols.size();

  // Prefix doubling: rank[i] orders suffixes by their first 2^h symbols.
  std::vector<std::uint64_t> rank(t.symbols.begin(), t.symbols.end());
  std::uint64_t range = *std::max_element(rank.begin(), rank.end()) + 1;
  std::vector<std::uint64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> second(n);
  std::vector<std::uint64_t> scratch;
  std::vector<std::uint64_t> next(n);
  for (std::uint64_t h = 1;; h *= 2) {
    for (std::size_t i = 0; i < n; ++i) second[i] = i + h < n ? rank[i + h] + 1 : 0;
    std::iota(order.begin(), order.end(), 0);
    counting_sort(order, second, range + 1, scratch);
    counting_sort(order, rank, range, scratch);
    next[order[0]] = 0;
    for (std::size_t k = 1; k < n; ++k) {
      const auto a = order[k - 1];
      const auto b = order[k];
      const bool same = rank[a] == rank[b] && second[a] == second[b];
      next[b] = next[a] + (same ? 0 : 1);
    }
    rank.swap(next);
    range = rank[order[n - 1]] + 1;
    if (range == n) break;
  }
  return emit(t, order);
}

std::string quadratic_multi_bwt(const std::vector<SequenceCollection>& datasets,
                                std::uint32_t w) {
  const OracleText t = build_text(datasets, w, 20'000);
  std::vector<std::uint64_t> order(t.symbols.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& s = t.symbols;
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    // Every suffix ends at a unique separator, so comparisons end before the text does.
    while (s[a] == s[b]) {
      ++a;
      ++b;
    }
    return s[a] < s[b];
  });
  return emit(t, order);
}

std::uint64_t window_hash(std::string_view window, const ParseParams& params) {
  using u128 = unsigned __int128;
  const std::uint64_t m = params.hash_mod;
  std::uint64_t sum = 0;
  std::uint64_t power = 1 % m;
  for (std::size_t i = window.size(); i-- > 0;) {
    const auto c = static_cast<std::uint8_t>(window[i]);
    sum = static_cast<std::uint64_t>((static_cast<u128>(c) * power + sum) % m);
    power = static_cast<std::uint64_t>(static_cast<u128>(power) * params.hash_base % m);
  }
  return sum;
}

std::vector<WindowHit> naive_window_scan(std::string_view text, const ParseParams& params) {
  std::vector<WindowHit> hits;
  if (text.size() < params.w) return hits;
  for (std::uint64_t i = 0; i + params.w <= text.size(); ++i) {
    const auto win = text.substr(i, params.w);
    if (window_hash(win, params) % params.p == 0) hits.push_back({i, std::string(win)});
  }
  return hits;
}

}  // namespace pfpm::oracle
