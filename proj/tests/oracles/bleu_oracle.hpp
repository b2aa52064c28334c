#pragma once

// Brute-force corpus BLEU used as an independent check of ansigen::bleu_corpus.
// Counts n-grams by direct enumeration (no hashing), then applies clipping,
// add-one smoothing for n >= 2, the geometric mean and the brevity penalty.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

inline bool same_gram(const Tokens& a, std::size_t i, const Tokens& b, std::size_t j, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    if (a[i + k] != b[j + k]) return false;
  }
  return true;
}

inline std::size_t count_gram(const Tokens& haystack, const Tokens& gram_src, std::size_t at, std::size_t n) {
  std::size_t c = 0;
  if (haystack.size() < n) return 0;
  for (std::size_t j = 0; j + n <= haystack.size(); ++j) {
    if (same_gram(haystack, j, gram_src, at, n)) ++c;
  }
  return c;
}

inline double bleu(const std::vector<std::pair<Tokens, Tokens>>& corpus) {
  double matches[4] = {0, 0, 0, 0};
  double totals[4] = {0, 0, 0, 0};
  double ref_len = 0;
  double hyp_len = 0;
  for (const auto& [ref, hyp] : corpus) {
    ref_len += static_cast<double>(ref.size());
    hyp_len += static_cast<double>(hyp.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      if (hyp.size() < n) continue;
      totals[n - 1] += static_cast<double>(hyp.size() - n + 1);
      for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
        // only the first occurrence of each distinct gram contributes
        bool seen_before = false;
        for (std::size_t k = 0; k < i; ++k) {
          if (same_gram(hyp, k, hyp, i, n)) {
            seen_before = true;
            break;
          }
        }
        if (seen_before) continue;
        const std::size_t in_hyp = count_gram(hyp, hyp, i, n);
        const std::size_t in_ref = count_gram(ref, hyp, i, n);
        matches[n - 1] += static_cast<double>(in_hyp < in_ref ? in_hyp : in_ref);
      }
    }
  }
  if (hyp_len == 0 || totals[0] == 0 || matches[0] == 0) return 0.0;
  double log_sum = std::log(matches[0] / totals[0]);
  for (int n = 1; n < 4; ++n) log_sum += std::log((matches[n] + 1.0) / (totals[n] + 1.0));
  const double bp = hyp_len < ref_len ? std::exp(1.0 - ref_len / hyp_len) : 1.0;
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

}  // namespace oracle
