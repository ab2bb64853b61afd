#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "monost/corpus.hpp"
#include "monost/lm.hpp"
#include "monost/random.hpp"

namespace monost {

// Corruption channel used to simulate word-by-word translation errors.
struct NoiseSpec {
  double p_drop = 0.1;
  double p_insert = 0.1;
  std::size_t insert_vocab_topk = 50;
  int perm_window = 3;
  std::uint64_t seed = 0;
};

void validate(const NoiseSpec& spec);

// In order: local permutation (each position i gets key i + U[0, perm_window)
// and tokens are stably sorted by key), deletion with p_drop, then insertion
// after each remaining position with p_insert of a word drawn uniformly from
// `insert_vocab` (only its first insert_vocab_topk entries are used).
Sentence corrupt(const Sentence& sentence, const NoiseSpec& spec, std::span<const std::string> insert_vocab);
Sentence corrupt(const Sentence& sentence, const NoiseSpec& spec, std::span<const std::string> insert_vocab, Rng& rng);

struct DenoisePair {
  Sentence noisy;
  Sentence clean;
};

// Corrupts every sentence in corpus order; inserted words come from the
// corpus's most frequent tokens.
std::vector<DenoisePair> make_denoise_pairs(const Corpus& corpus, const NoiseSpec& spec);

// TSV "noisy<TAB>clean".
void write_denoise_pairs(const std::vector<DenoisePair>& pairs, const std::filesystem::path& path);
std::vector<DenoisePair> read_denoise_pairs(const std::filesystem::path& path);

struct DenoiseConfig {
  std::size_t beam_size = 10;
  double max_edits_per_token = 0.5;
  double cost_delete = 4.0;
  double cost_insert = 4.0;
  double cost_swap = 1.0;
  std::size_t insert_candidates = 5;  // LM continuations tried per insertion
};

void validate(const DenoiseConfig& cfg);

struct DenoiseResult {
  Sentence tokens;
  double objective = 0.0;           // ln P_LM(tokens) - edit penalties
  double identity_objective = 0.0;  // ln P_LM(input)
  int edits = 0;
};

// Noisy-channel post-editor: beam search over edit programs (per input
// position keep, delete, swap with the next word, or insert an LM
// continuation before it) maximising natural-log LM probability of the output
// (with <s> and </s>) minus edit penalties, with at most
// ceil(max_edits_per_token * n) non-keep edits. Never returns a result worse
// than the unedited input.
DenoiseResult denoise_search(const Sentence& sentence, const NGramLM& lm, const DenoiseConfig& cfg);

Sentence denoise(const Sentence& sentence, const NGramLM& lm, const DenoiseConfig& cfg);

// ln P_LM(sentence) including </s>.
double lm_log_prob(const Sentence& sentence, const NGramLM& lm);

}  // namespace monost
