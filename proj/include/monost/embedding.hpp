#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "monost/corpus.hpp"

namespace monost {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Vocabulary plus one dense vector per entry. Row order is the vocabulary
// order, which for trained spaces is frequency-descending; "top n" always
// means the first n rows.
class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;
  EmbeddingSpace(std::vector<std::string> vocab, Matrix vectors);

  const std::vector<std::string>& vocab() const { return vocab_; }
  const Matrix& vectors() const { return vectors_; }
  std::size_t size() const { return vocab_.size(); }
  int dim() const { return static_cast<int>(vectors_.cols()); }

  std::optional<std::size_t> index(std::string_view token) const;
  const std::string& token(std::size_t i) const { return vocab_.at(i); }
  Vector vector(std::size_t i) const { return vectors_.row(static_cast<Eigen::Index>(i)).transpose(); }

  // Same space with vectors replaced; vocabulary is kept.
  EmbeddingSpace with_vectors(Matrix vectors) const;

  // First n entries.
  EmbeddingSpace head(std::size_t n) const;

 private:
  std::vector<std::string> vocab_;
  Matrix vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct SkipGramConfig {
  int dim = 100;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  double subsample = 1e-4;  // frequent-word downsampling threshold; 0 disables
  std::uint64_t seed = 1;
  double jitter_sigma = 0.0;  // applied after training when > 0
  int threads = 1;
};

void validate(const SkipGramConfig& cfg);

struct SkipGramStats {
  // Negative-sampling loss on a fixed sample of (center, context, negatives)
  // tuples, measured after each epoch.
  std::vector<double> epoch_loss;
};

// Skip-gram with negative sampling; negatives are drawn from unigram^(3/4).
// With threads == 1 the result is a deterministic function of (corpus, cfg).
// With more threads, rows are updated without synchronization.
EmbeddingSpace train_skipgram(const Corpus& corpus, const SkipGramConfig& cfg,
                              SkipGramStats* stats = nullptr);

// Adds i.i.d. N(0, sigma^2) noise to every coordinate.
EmbeddingSpace jitter(const EmbeddingSpace& space, double sigma, std::uint64_t seed);

enum class NormalizeStep { kUnit, kCenter };

// Parses "unit,center,unit" style step lists.
std::vector<NormalizeStep> parse_normalize_steps(std::string_view spec);

EmbeddingSpace normalize(const EmbeddingSpace& space, std::span<const NormalizeStep> steps);

// The [unit, center, unit] preprocessing expected by the aligner.
EmbeddingSpace normalize_for_alignment(const EmbeddingSpace& space);

// Text format: "|V| d" header, then "token v1 ... vd" per line.
void save_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path);
EmbeddingSpace load_embeddings(const std::filesystem::path& path);

// Rows scaled to unit L2 norm; zero rows are left as zero.
Matrix unit_rows(const Matrix& m);

}  // namespace monost
