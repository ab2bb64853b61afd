#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "monost/random.hpp"

namespace monost {

inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";

using Sentence = std::vector<std::string>;
using TokenId = std::int32_t;

// A tokenized monolingual corpus. Sentences are stored as ids into a dense
// vocabulary ordered by descending count; ties keep first-occurrence order,
// so reloading the same file always yields the same ids.
class Corpus {
 public:
  Corpus() = default;

  static Corpus from_sentences(const std::vector<Sentence>& sentences);

  const std::vector<std::vector<TokenId>>& sentences() const { return sentences_; }
  Sentence sentence(std::size_t i) const;
  std::vector<Sentence> text() const;

  // id -> token, frequency-descending.
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  std::optional<TokenId> id(std::string_view token) const;
  const std::string& token(TokenId id) const { return vocab_.at(static_cast<std::size_t>(id)); }

  std::int64_t count(TokenId id) const { return counts_.at(static_cast<std::size_t>(id)); }
  std::int64_t count(std::string_view token) const;
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t total_tokens() const { return total_; }
  std::size_t num_sentences() const { return sentences_.size(); }

  // The k most frequent tokens, most frequent first.
  std::vector<std::string> most_frequent(std::size_t k) const;

 private:
  std::vector<std::vector<TokenId>> sentences_;
  std::vector<std::string> vocab_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, TokenId> index_;
  std::int64_t total_ = 0;
};

struct LoadOptions {
  bool lowercase = false;
  std::int64_t min_count = 5;
};

// Whitespace-tokenized, one sentence per line. Blank lines are skipped.
// Tokens seen fewer than min_count times become <unk>.
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});

// Applies the min_count rule to already tokenized sentences.
Corpus build_corpus(std::vector<Sentence> sentences, const LoadOptions& options = {});

std::vector<Sentence> read_sentences(const std::filesystem::path& path, bool lowercase = false);
void write_sentences(const std::vector<Sentence>& sentences, const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::vector<std::string> split_whitespace(std::string_view line);
std::string join_tokens(const Sentence& tokens);

using Lexicon = std::vector<std::pair<std::string, std::string>>;

// Candidate translations per source word, best first, with their scores.
struct RankedEntry {
  std::string source;
  std::vector<std::pair<std::string, double>> candidates;
};
using RankedLexicon = std::vector<RankedEntry>;

void write_lexicon(const Lexicon& lexicon, const std::filesystem::path& path);
Lexicon read_lexicon(const std::filesystem::path& path);

// A token renaming used to build a synthetic "foreign" language with a known
// dictionary. An empty token_map means "derive a random bijection from seed".
struct CipherSpec {
  std::uint64_t seed = 0;
  std::map<std::string, std::string> token_map;
};

struct CipherResult {
  Corpus corpus;
  Lexicon lexicon;  // (source token, ciphered token), in vocabulary order
};

// Random bijection from the corpus vocabulary onto fresh opaque names.
// Reserved tokens (<unk>, <s>, </s>) map to themselves.
CipherSpec make_cipher_spec(const Corpus& corpus, std::uint64_t seed);

CipherResult make_cipher_corpus(const Corpus& corpus, const CipherSpec& spec);

// Error model for unsupervised word segmentation: a token may be split into
// "tok#0 tok#1" or two adjacent tokens may be glued into "a+b".
struct SegmentationNoiseSpec {
  double p_split = 0.0;
  double p_merge = 0.0;
  std::uint64_t seed = 0;
};

void validate(const SegmentationNoiseSpec& spec);

Corpus apply_segmentation_noise(const Corpus& corpus, const SegmentationNoiseSpec& spec);

// Sentence-level form of the segmentation channel; consumes randomness from
// `rng` so callers can thread one stream through many sentences.
Sentence segment_sentence(const Sentence& tokens, double p_split, double p_merge, Rng& rng);

}  // namespace monost
