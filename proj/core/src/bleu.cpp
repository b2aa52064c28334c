#include <cmath>
#include <string_view>
#include <unordered_map>

#include "ansigen/metrics.hpp"

namespace ansigen {
namespace {

bool is_split_punct(char c) {
  switch (c) {
    case ':': case '-': case ',': case '{': case '}': case '[': case ']': case '"': case '\'':
      return true;
    default:
      return false;
  }
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string gram_key(const Tokens& tokens, std::size_t at, std::size_t n) {
  std::string key;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) key.push_back('\x1f');
    key += tokens[at + k];
  }
  return key;
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  };
  for (char c : text) {
    if (is_ws(c)) {
      flush();
    } else if (is_split_punct(c)) {
      flush();
      out.emplace_back(1, c);
    } else {
      current.push_back(c);
    }
  }
  flush();
  return out;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int n = 0; n < kBleuOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hypothesis_length += other.hypothesis_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats bleu_stats(const Tokens& reference, const Tokens& hypothesis) {
  BleuStats s;
  s.hypothesis_length = hypothesis.size();
  s.reference_length = reference.size();
  for (std::size_t n = 1; n <= kBleuOrder; ++n) {
    if (hypothesis.size() < n) continue;
    s.totals[n - 1] = hypothesis.size() - n + 1;
    std::unordered_map<std::string, std::int64_t> ref_counts;
    for (std::size_t i = 0; i + n <= reference.size(); ++i) ++ref_counts[gram_key(reference, i, n)];
    std::uint64_t matched = 0;
    for (std::size_t i = 0; i + n <= hypothesis.size(); ++i) {
      auto it = ref_counts.find(gram_key(hypothesis, i, n));
      if (it != ref_counts.end() && it->second > 0) {
        --it->second;  // clipping: each reference occurrence matches once
        ++matched;
      }
    }
    s.matches[n - 1] = matched;
  }
  return s;
}

double bleu_score(const BleuStats& stats) {
  if (stats.hypothesis_length == 0 || stats.totals[0] == 0 || stats.matches[0] == 0) return 0.0;
  double log_precision = std::log(static_cast<double>(stats.matches[0]) / static_cast<double>(stats.totals[0]));
  for (int n = 1; n < kBleuOrder; ++n) {
    log_precision += std::log((static_cast<double>(stats.matches[n]) + 1.0) / (static_cast<double>(stats.totals[n]) + 1.0));
  }
  const double hyp = static_cast<double>(stats.hypothesis_length);
  const double ref = static_cast<double>(stats.reference_length);
  const double brevity = hyp < ref ? std::exp(1.0 - ref / hyp) : 1.0;
  return 100.0 * brevity * std::exp(log_precision / kBleuOrder);
}

double bleu_corpus(std::span<const std::pair<Tokens, Tokens>> pairs) {
  if (pairs.empty()) throw EmptyCorpus("BLEU needs at least one (reference, hypothesis) pair");
  BleuStats total;
  for (const auto& [ref, hyp] : pairs) total += bleu_stats(ref, hyp);
  return bleu_score(total);
}

}  // namespace ansigen
