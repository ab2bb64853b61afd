#include "monost/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "monost/error.hpp"

namespace monost {

namespace {

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};
constexpr std::size_t kSyllables = std::size(kOnsets) * std::size(kVowels);

}  // namespace

std::string pseudo_word(std::size_t i) {
  std::string w;
  do {
    const std::size_t s = i % kSyllables;
    w += kOnsets[s / std::size(kVowels)];
    w += kVowels[s % std::size(kVowels)];
    i /= kSyllables;
  } while (i > 0);
  return w;
}

SyntheticLanguage::SyntheticLanguage(const SyntheticLanguageSpec& spec) : spec_(spec) {
  if (spec.vocab_size < 2) throw InvalidArgument("synthetic vocabulary needs at least 2 words");
  if (spec.latent_dim < 1) throw InvalidArgument("latent_dim must be positive");
  if (spec.mean_sentence_length < 1.0) throw InvalidArgument("mean_sentence_length must be >= 1");

  const auto n = static_cast<std::size_t>(spec.vocab_size);
  const auto k = static_cast<std::size_t>(spec.latent_dim);
  words_.reserve(n);
  // Offset keeps the shortest names away from two-letter collisions with
  // hand-written test corpora.
  for (std::size_t i = 0; i < n; ++i) words_.push_back(pseudo_word(i + kSyllables));

  Rng rng(derive_seed(spec.seed, 0x51));
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  std::vector<double> left((n + 1) * k), right(n * k);
  for (auto& x : left) x = gaussian(rng) * scale;
  for (auto& x : right) x = gaussian(rng) * scale;

  std::vector<double> log_base(n);
  for (std::size_t v = 0; v < n; ++v)
    log_base[v] = -spec.zipf_exponent * std::log(static_cast<double>(v) + spec.zipf_offset);

  cdf_.assign((n + 1) * n, 0.0f);
  std::vector<double> logits(n);
  for (std::size_t r = 0; r <= n; ++r) {
    const double* a = &left[r * k];
    double hi = -1e300;
    for (std::size_t v = 0; v < n; ++v) {
      const double* b = &right[v * k];
      double dot = 0.0;
      for (std::size_t j = 0; j < k; ++j) dot += a[j] * b[j];
      logits[v] = log_base[v] + spec.sharpness * dot;
      hi = std::max(hi, logits[v]);
    }
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v) total += std::exp(logits[v] - hi);
    double acc = 0.0;
    float* row = &cdf_[r * n];
    for (std::size_t v = 0; v < n; ++v) {
      acc += std::exp(logits[v] - hi) / total;
      row[v] = static_cast<float>(acc);
    }
    row[n - 1] = 1.0f;
  }
}

double SyntheticLanguage::transition(int prev, int next) const {
  const auto n = static_cast<std::size_t>(spec_.vocab_size);
  const float* row = &cdf_[static_cast<std::size_t>(prev + 1) * n];
  const auto v = static_cast<std::size_t>(next);
  return v == 0 ? row[0] : static_cast<double>(row[v]) - static_cast<double>(row[v - 1]);
}

int SyntheticLanguage::draw_next(int prev, Rng& rng) const {
  const auto n = static_cast<std::size_t>(spec_.vocab_size);
  const float* row = &cdf_[static_cast<std::size_t>(prev + 1) * n];
  const auto u = static_cast<float>(uniform01(rng));
  const float* it = std::upper_bound(row, row + n, u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - row, static_cast<std::ptrdiff_t>(n) - 1));
}

Sentence SyntheticLanguage::sample_one(Rng& rng) const {
  // Length beyond the minimum is geometric.
  const double extra_mean = std::max(0.0, spec_.mean_sentence_length - spec_.min_sentence_length);
  const double p_stop = 1.0 / (extra_mean + 1.0);
  Sentence s;
  int prev = -1;
  while (true) {
    const int next = draw_next(prev, rng);
    s.push_back(words_[static_cast<std::size_t>(next)]);
    prev = next;
    if (static_cast<int>(s.size()) >= spec_.min_sentence_length && uniform01(rng) < p_stop) break;
  }
  return s;
}

std::vector<Sentence> SyntheticLanguage::sample(std::int64_t num_tokens, std::uint64_t seed) const {
  Rng rng(derive_seed(seed, 0x52));
  std::vector<Sentence> out;
  std::int64_t produced = 0;
  while (produced < num_tokens) {
    out.push_back(sample_one(rng));
    produced += static_cast<std::int64_t>(out.back().size());
  }
  return out;
}

std::vector<Sentence> SyntheticLanguage::sample_sentences(std::size_t num_sentences,
                                                          std::uint64_t seed) const {
  Rng rng(derive_seed(seed, 0x52));
  std::vector<Sentence> out;
  out.reserve(num_sentences);
  for (std::size_t i = 0; i < num_sentences; ++i) out.push_back(sample_one(rng));
  return out;
}

}  // namespace monost
