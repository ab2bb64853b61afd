#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "monost/corpus.hpp"
#include "monost/embedding.hpp"

namespace monost {

// Linear map from the source embedding space into the target space:
// a source vector x is mapped to W x.
struct MappingMatrix {
  Matrix W;
  bool orthogonal = true;

  int dim() const { return static_cast<int>(W.rows()); }
  Vector apply(const Vector& x) const { return W * x; }
  // Maps every row of `rows` (one vector per row).
  Matrix apply_rows(const Matrix& rows) const { return rows * W.transpose(); }
  // max |(W^T W - I)_ij|
  double orthogonality_error() const;
};

// "d d" header then d rows of d reals.
void save_mapping(const MappingMatrix& mapping, const std::filesystem::path& path);
MappingMatrix load_mapping(const std::filesystem::path& path);

// Index pairs (source row, target row). Dictionaries built by bidirectional
// induction may repeat a source index; those carry weights.
struct SeedDictionary {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> weights;  // empty, or one weight per pair

  bool weighted() const { return !weights.empty(); }
  std::size_t size() const { return pairs.size(); }
};

void validate(const SeedDictionary& dict, std::size_t src_size, std::size_t tgt_size);

// Dictionary from token pairs; pairs with a token missing from either space are skipped.
SeedDictionary dictionary_from_lexicon(const Lexicon& lexicon, const EmbeddingSpace& src,
                                       const EmbeddingSpace& tgt);

enum class InitMethod { kUnsupervised, kIdentity, kGivenDictionary };
enum class RetrievalMethod { kNearestNeighbor, kCsls };

InitMethod parse_init_method(const std::string& name);
RetrievalMethod parse_retrieval_method(const std::string& name);
std::string to_string(RetrievalMethod method);

struct AlignConfig {
  InitMethod init = InitMethod::kUnsupervised;
  std::size_t vocab_cutoff = 4000;
  // Unsupervised only: vocabulary sizes for the similarity-signature init.
  // With more than one, each init self-learns over its own vocabulary, the
  // mapping with the highest objective on the smallest vocabulary wins and is
  // refined over vocab_cutoff words without dropout. Empty means {vocab_cutoff}.
  std::vector<std::size_t> init_cutoffs;
  int csls_k = 10;
  double stochastic_keep = 0.1;        // initial keep probability of dictionary dropout
  double stochastic_multiplier = 2.0;  // keep probability growth on stall
  int stochastic_interval = 50;        // iterations without improvement that count as a stall
  double convergence_tol = 1e-6;
  int max_iters = 1000;
  std::uint64_t seed = 1;
  SeedDictionary given;  // used with InitMethod::kGivenDictionary
};

void validate(const AlignConfig& cfg);

// Orthogonal W minimising sum_i w_i ||W x_i - y_i||^2, from the SVD of the
// weighted cross-covariance sum_i w_i y_i x_i^T.
MappingMatrix procrustes(const EmbeddingSpace& src, const EmbeddingSpace& tgt, const SeedDictionary& dict);

// Fully unsupervised initial dictionary. Each of the `cutoff` most frequent
// words is described by the sorted row of the square root of its space's
// similarity matrix; rows are matched across spaces with CSLS in both
// directions. Inputs are expected to be normalized for alignment.
SeedDictionary unsupervised_init(const EmbeddingSpace& src, const EmbeddingSpace& tgt, std::size_t cutoff,
                                 int csls_k = 10);

struct SelfLearnResult {
  MappingMatrix mapping;
  SeedDictionary dictionary;
  double objective = 0.0;          // mean CSLS of the dictionary induced by `mapping`
  double initial_objective = 0.0;  // same quantity for the initial dictionary's mapping
  int iterations = 0;
  bool converged = false;  // false when max_iters stopped the loop
  std::size_t init_cutoff = 0;  // signature vocabulary of the winning run (unsupervised init)
};

// Alternates Procrustes with CSLS dictionary re-induction over the top
// vocab_cutoff words of each space, using stochastic dictionary dropout whose
// keep probability grows on stalls. Both spaces must be normalized.
SelfLearnResult self_learn(const EmbeddingSpace& src, const EmbeddingSpace& tgt, const AlignConfig& cfg);

struct Candidate {
  std::size_t index;  // row in the target space
  double score;       // cosine for nn, CSLS for csls
  double cosine;
};

// Nearest-neighbour / CSLS retrieval of target words for mapped source
// vectors. Precomputes r_src(y), the mean cosine between each target vector
// and its csls_k nearest mapped source vectors.
class Retriever {
 public:
  Retriever(const EmbeddingSpace& src, const EmbeddingSpace& tgt, MappingMatrix mapping, int csls_k = 10);

  // Ranks target words for an unmapped source vector.
  std::vector<Candidate> translate(const Vector& src_vec, RetrievalMethod method, std::size_t k) const;

  // Ranks target words for a vector that is already in the target space.
  std::vector<Candidate> rank_mapped(const Vector& mapped, RetrievalMethod method, std::size_t k) const;

  const EmbeddingSpace& target() const { return tgt_; }
  const MappingMatrix& mapping() const { return mapping_; }
  const Vector& source_hubness() const { return r_src_; }

 private:
  EmbeddingSpace tgt_;
  Matrix tgt_unit_;
  MappingMatrix mapping_;
  Vector r_src_;
  int csls_k_;
};

// One-shot form of Retriever::translate.
std::vector<Candidate> translate_word(const MappingMatrix& mapping, const Vector& src_vec,
                                      const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                                      RetrievalMethod method, std::size_t k, int csls_k = 10);

// Top-k candidates for each of the first `top_n` source words.
RankedLexicon induce_lexicon(const Retriever& retriever, const EmbeddingSpace& src, std::size_t top_n,
                             RetrievalMethod method, std::size_t k);

// TSV "source<TAB>target<TAB>score", one line per candidate.
void write_ranked_lexicon(const RankedLexicon& lexicon, const std::filesystem::path& path);

// Mean of the k largest entries of each row.
Vector topk_row_mean(const Matrix& m, int k);

}  // namespace monost
