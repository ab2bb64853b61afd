#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "monost/corpus.hpp"

namespace monost {

struct BleuReport {
  double bleu = 0.0;                   // in [0, 100]
  std::array<double, 4> precisions{};  // modified n-gram precisions, n = 1..4
  std::array<std::int64_t, 4> matches{};
  std::array<std::int64_t, 4> totals{};
  double brevity_penalty = 1.0;
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;
};

// Corpus-level BLEU-4 against a single reference per hypothesis, without
// smoothing: any zero precision gives 0.
BleuReport corpus_bleu(const std::vector<Sentence>& hypotheses, const std::vector<Sentence>& references);

// key<TAB>value lines.
std::string format_bleu(const BleuReport& report, const std::string& prefix = "");

// Fraction of gold source words that have one of their gold translations
// among the first k induced candidates. Source words missing from `induced`
// count as misses.
double precision_at_k(const RankedLexicon& induced, const Lexicon& gold, std::size_t k);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace monost
