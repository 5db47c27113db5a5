#include "suffix_sort.hpp"

#include <algorithm>
#include <limits>

#include "error.hpp"

namespace pfpm {

namespace {

template <class Index>
class InducedSorter {
 public:
  InducedSorter(const std::uint32_t* s, Index n, std::uint32_t k, Index* sa)
      : s_(s), n_(n), k_(k), sa_(sa), type_(static_cast<std::size_t>(n)),
        bucket_(k) {}

  void run() {
    if (n_ == 1) {
      sa_[0] = 0;
      return;
    }
    classify();

    // Stage 1: sort LMS substrings.
    buckets(true);
    std::fill(sa_, sa_ + n_, Index(-1));
    for (Index i = 1; i < n_; ++i)
      if (is_lms(i)) sa_[--bucket_[s_[i]]] = i;
    induce();

    Index n1 = 0;
    for (Index i = 0; i < n_; ++i)
      if (is_lms(sa_[i])) sa_[n1++] = sa_[i];

    // Name LMS substrings; equal substrings share a name.
    std::fill(sa_ + n1, sa_ + n_, Index(-1));
    Index names = 0;
    Index prev = -1;
    for (Index i = 0; i < n1; ++i) {
      const Index pos = sa_[i];
      bool differs = prev < 0;
      for (Index d = 0; !differs; ++d) {
        if (s_[pos + d] != s_[prev + d] || type_[pos + d] != type_[prev + d]) {
          differs = true;
        } else if (d > 0 && (is_lms(pos + d) || is_lms(prev + d))) {
          break;
        }
      }
      if (differs) {
        ++names;
        prev = pos;
      }
      sa_[n1 + pos / 2] = names - 1;
    }
    for (Index i = n_ - 1, j = n_ - 1; i >= n1; --i)
      if (sa_[i] >= 0) sa_[j--] = sa_[i];

    // Stage 2: sort the reduced string.
    std::vector<std::uint32_t> reduced(static_cast<std::size_t>(n1));
    for (Index i = 0; i < n1; ++i)
      reduced[i] = static_cast<std::uint32_t>(sa_[n_ - n1 + i]);
    if (names < n1) {
      InducedSorter<Index>(reduced.data(), n1, static_cast<std::uint32_t>(names),
                           sa_)
          .run();
    } else {
      for (Index i = 0; i < n1; ++i) sa_[reduced[i]] = i;
    }

    // Stage 3: induce the full order from the sorted LMS suffixes.
    for (Index i = 1, j = 0; i < n_; ++i)
      if (is_lms(i)) reduced[j++] = static_cast<std::uint32_t>(i);
    for (Index i = 0; i < n1; ++i) sa_[i] = reduced[sa_[i]];
    std::fill(sa_ + n1, sa_ + n_, Index(-1));
    buckets(true);
    for (Index i = n1 - 1; i >= 0; --i) {
      const Index j = sa_[i];
      sa_[i] = -1;
      sa_[--bucket_[s_[j]]] = j;
    }
    induce();
  }

 private:
  void classify() {
    type_[n_ - 1] = true;
    for (Index i = n_ - 2; i >= 0; --i)
      type_[i] = s_[i] < s_[i + 1] || (s_[i] == s_[i + 1] && type_[i + 1]);
  }

  bool is_lms(Index i) const { return i > 0 && type_[i] && !type_[i - 1]; }

  void buckets(bool ends) {
    std::fill(bucket_.begin(), bucket_.end(), Index(0));
    for (Index i = 0; i < n_; ++i) ++bucket_[s_[i]];
    Index sum = 0;
    for (std::uint32_t c = 0; c < k_; ++c) {
      sum += bucket_[c];
      bucket_[c] = ends ? sum : sum - bucket_[c];
    }
  }

  void induce() {
    buckets(false);
    for (Index i = 0; i < n_; ++i) {
      if (sa_[i] <= 0) continue;
      const Index j = sa_[i] - 1;
      if (!type_[j]) sa_[bucket_[s_[j]]++] = j;
    }
    buckets(true);
    for (Index i = n_ - 1; i >= 0; --i) {
      if (sa_[i] <= 0) continue;
      const Index j = sa_[i] - 1;
      if (type_[j]) sa_[--bucket_[s_[j]]] = j;
    }
  }

  const std::uint32_t* s_;
  Index n_;
  std::uint32_t k_;
  Index* sa_;
  std::vector<bool> type_;  // true: S-type
  std::vector<Index> bucket_;
};

template <class Index>
std::vector<std::uint64_t> run_sais(std::span<const std::uint32_t> text,
                                    std::uint32_t alphabet_size) {
  const auto n = static_cast<Index>(text.size());
  std::vector<Index> sa(text.size());
  InducedSorter<Index>(text.data(), n, alphabet_size, sa.data()).run();
  return {sa.begin(), sa.end()};
}

}  // namespace

std::vector<std::uint64_t> suffix_array(std::span<const std::uint32_t> text,
                                        std::uint32_t alphabet_size) {
  if (text.empty()) return {};
  if (text.back() != 0)
    fail(ErrorKind::InvalidArgument, "suffix array text must end with symbol 0");
  if (text.size() >= std::numeric_limits<std::uint32_t>::max())
    fail(ErrorKind::Limit, "suffix array input exceeds 2^32 symbols");
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    if (text[i] == 0)
      fail(ErrorKind::InvalidArgument, "suffix array sentinel 0 must be unique");
    if (text[i] >= alphabet_size)
      fail(ErrorKind::InvalidArgument, "suffix array symbol outside alphabet");
  }
  if (text.size() < static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    return run_sais<std::int32_t>(text, alphabet_size);
  return run_sais<std::int64_t>(text, alphabet_size);
}

}  // namespace pfpm
