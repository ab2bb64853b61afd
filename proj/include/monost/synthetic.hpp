#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monost/corpus.hpp"

namespace monost {

// Parameters of a synthetic monolingual language used as a stand-in for a
// natural text corpus. Words get Zipfian base frequencies and random latent
// "left" and "right" vectors; the next word is drawn from a log-bilinear
// bigram distribution
//
//   p(v | u) ∝ base(v) · exp(sharpness · <left(u), right(v)>),
//
// which gives every word a distinctive but smoothly varying context profile.
struct SyntheticLanguageSpec {
  int vocab_size = 4000;
  int latent_dim = 24;
  double zipf_exponent = 1.0;
  double zipf_offset = 2.7;
  double sharpness = 24.0;
  double mean_sentence_length = 14.0;
  int min_sentence_length = 3;
  std::uint64_t seed = 1;
};

class SyntheticLanguage {
 public:
  explicit SyntheticLanguage(const SyntheticLanguageSpec& spec);

  const SyntheticLanguageSpec& spec() const { return spec_; }
  const std::vector<std::string>& words() const { return words_; }

  // Samples sentences until at least `num_tokens` tokens were produced.
  std::vector<Sentence> sample(std::int64_t num_tokens, std::uint64_t seed) const;

  std::vector<Sentence> sample_sentences(std::size_t num_sentences, std::uint64_t seed) const;

  // Exact transition probability p(next | prev); prev = -1 is sentence start.
  double transition(int prev, int next) const;

 private:
  Sentence sample_one(Rng& rng) const;
  int draw_next(int prev, Rng& rng) const;

  SyntheticLanguageSpec spec_;
  std::vector<std::string> words_;
  // Row r holds the cumulative distribution of the word following word r-1;
  // row 0 is the sentence-start distribution.
  std::vector<float> cdf_;
};

// Pronounceable, unique pseudo-word for index i.
std::string pseudo_word(std::size_t i);

}  // namespace monost
