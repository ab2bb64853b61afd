#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "monost/corpus.hpp"

namespace monost {

using LmId = std::int32_t;

inline constexpr int kMaxLmOrder = 7;

// One order of an n-gram table: entries sorted lexicographically by their
// id tuple, stored column-wise.
struct NGramTable {
  int n = 0;
  std::vector<LmId> keys;      // size() * n ids
  std::vector<float> log10p;   // conditional log10 probability of the last word
  std::vector<float> backoff;  // log10 back-off weight when used as a context

  std::size_t size() const { return log10p.size(); }
  std::span<const LmId> key(std::size_t i) const { return {keys.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)}; }
  // Index of an exact match, or npos.
  std::size_t find(std::span<const LmId> ngram) const;
  // [first, last) of entries whose first prefix.size() ids equal `prefix`.
  std::pair<std::size_t, std::size_t> prefix_range(std::span<const LmId> prefix) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Back-off n-gram language model. Scores are log10 probabilities, as in the
// ARPA format; callers wanting natural logs multiply by ln(10).
class NGramLM {
 public:
  NGramLM() = default;
  NGramLM(std::vector<std::string> vocab, std::vector<NGramTable> tables);

  int order() const { return static_cast<int>(tables_.size()); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const NGramTable& table(int n) const { return tables_.at(static_cast<std::size_t>(n - 1)); }

  // Unknown tokens map to <unk>.
  LmId id(std::string_view token) const;
  LmId unk_id() const { return unk_; }
  LmId bos_id() const { return bos_; }
  LmId eos_id() const { return eos_; }

  // log10 p(token | history), longest-match back-off. Only the last
  // order()-1 history tokens are used.
  double score(std::span<const std::string> history, std::string_view token) const;
  double score_ids(std::span<const LmId> history, LmId token) const;

  // log10 probability of a full sentence including </s>, conditioned on <s>.
  double sentence_log10(std::span<const std::string> sentence) const;

  // Up to k likely next words (never <s>), best first, drawn from explicitly
  // stored continuations of the longest matching contexts.
  std::vector<LmId> continuations(std::span<const LmId> history, std::size_t k) const;

  // Discount used for each order when the model was trained (empty if loaded).
  const std::vector<double>& discounts() const { return discounts_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  friend NGramLM train_lm(const Corpus& corpus, int order);

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, LmId> index_;
  std::vector<NGramTable> tables_;
  std::vector<LmId> unigram_rank_;  // ids by descending unigram probability, <s> excluded
  std::vector<double> discounts_;
  std::vector<std::string> warnings_;
  LmId unk_ = 0, bos_ = 1, eos_ = 2;
};

// Interpolated Kneser-Ney with a single discount D = n1 / (n1 + 2 n2) per
// order, computed from (continuation-)count-of-counts. Sentences are padded
// with <s> and </s>. When n1 or n2 is zero the discount falls back to 0.75
// and a warning is recorded.
NGramLM train_lm(const Corpus& corpus, int order = 5);

// Per-token perplexity (including </s>) over the sentences of `corpus`.
double perplexity(const NGramLM& lm, const Corpus& corpus);
double perplexity(const NGramLM& lm, const std::vector<Sentence>& sentences);

// Unigram model over the reserved tokens only, for decoding with an LM
// weight of zero where scores are never read.
NGramLM null_lm();

void save_arpa(const NGramLM& lm, const std::filesystem::path& path);
NGramLM load_arpa(const std::filesystem::path& path);

}  // namespace monost
