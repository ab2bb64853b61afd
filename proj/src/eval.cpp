#include "monost/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "monost/error.hpp"

namespace monost {

namespace {

using NGramCounts = std::map<std::vector<std::string_view>, std::int64_t>;

NGramCounts count_ngrams(const Sentence& s, std::size_t n) {
  NGramCounts counts;
  if (s.size() < n) return counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    std::vector<std::string_view> key(s.begin() + static_cast<std::ptrdiff_t>(i),
                                      s.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[std::move(key)];
  }
  return counts;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

BleuReport corpus_bleu(const std::vector<Sentence>& hypotheses, const std::vector<Sentence>& references) {
  if (hypotheses.size() != references.size())
    throw InvalidArgument("BLEU needs one reference per hypothesis (" + std::to_string(hypotheses.size()) + " vs " +
                          std::to_string(references.size()) + ")");
  if (hypotheses.empty()) throw InvalidArgument("BLEU of an empty corpus is undefined");

  BleuReport r;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto& hyp = hypotheses[s];
    const auto& ref = references[s];
    r.hyp_len += static_cast<std::int64_t>(hyp.size());
    r.ref_len += static_cast<std::int64_t>(ref.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto h = count_ngrams(hyp, n);
      const auto g = count_ngrams(ref, n);
      for (const auto& [key, c] : h) {
        const auto it = g.find(key);
        if (it != g.end()) r.matches[n - 1] += std::min(c, it->second);
      }
      if (hyp.size() >= n) r.totals[n - 1] += static_cast<std::int64_t>(hyp.size() - n + 1);
    }
  }

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 0; n < 4; ++n) {
    r.precisions[n] = r.totals[n] > 0 ? static_cast<double>(r.matches[n]) / static_cast<double>(r.totals[n]) : 0.0;
    if (r.precisions[n] <= 0.0)
      zero = true;
    else
      log_sum += std::log(r.precisions[n]);
  }
  if (r.hyp_len == 0)
    r.brevity_penalty = 0.0;
  else if (r.hyp_len < r.ref_len)
    r.brevity_penalty = std::exp(1.0 - static_cast<double>(r.ref_len) / static_cast<double>(r.hyp_len));
  r.bleu = zero ? 0.0 : 100.0 * r.brevity_penalty * std::exp(log_sum / 4.0);
  return r;
}

std::string format_bleu(const BleuReport& report, const std::string& prefix) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << prefix << "bleu\t" << report.bleu << '\n';
  for (std::size_t n = 0; n < 4; ++n) out << prefix << "p" << n + 1 << '\t' << report.precisions[n] << '\n';
  out << prefix << "brevity_penalty\t" << report.brevity_penalty << '\n';
  out << prefix << "hyp_len\t" << report.hyp_len << '\n';
  out << prefix << "ref_len\t" << report.ref_len << '\n';
  return out.str();
}

double precision_at_k(const RankedLexicon& induced, const Lexicon& gold, std::size_t k) {
  if (k < 1) throw InvalidArgument("precision_at_k needs k >= 1");
  if (gold.empty()) throw InvalidArgument("gold lexicon is empty");
  std::unordered_map<std::string, const RankedEntry*> by_source;
  for (const auto& e : induced) by_source.emplace(e.source, &e);
  std::map<std::string, std::unordered_set<std::string>> gold_sets;
  for (const auto& [s, t] : gold) gold_sets[s].insert(t);

  std::size_t hits = 0;
  for (const auto& [src, targets] : gold_sets) {
    const auto it = by_source.find(src);
    if (it == by_source.end()) continue;
    const auto& cands = it->second->candidates;
    const std::size_t m = std::min(k, cands.size());
    for (std::size_t i = 0; i < m; ++i)
      if (targets.contains(cands[i].first)) {
        ++hits;
        break;
      }
  }
  return static_cast<double>(hits) / static_cast<double>(gold_sets.size());
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidArgument("spearman needs equal-length inputs");
  if (a.size() < 2) throw InvalidArgument("spearman needs at least two points");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw NumericError("spearman correlation undefined for constant input");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace monost
