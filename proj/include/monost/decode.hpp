#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "monost/align.hpp"
#include "monost/embedding.hpp"
#include "monost/lm.hpp"

namespace monost {

struct DecoderConfig {
  double lambda_lm = 0.1;
  std::size_t beam_size = 10;
  std::size_t candidates_per_step = 20;
  RetrievalMethod method = RetrievalMethod::kNearestNeighbor;
};

void validate(const DecoderConfig& cfg);

// Source-side vectors of one utterance, one per word-like segment. Labels are
// informational (the segment's surface form, when known).
struct UtteranceInput {
  std::vector<Vector> segments;
  std::vector<std::string> labels;
};

// Per-position translation score
//   log((f + 1) / 2) + lambda_lm * log p(w_t | h)
// with natural logs; f = -1 gives -infinity.
double step_score(double cosine, double ln_lm_prob, double lambda_lm);

// Full form: f = cos(W w_s, vec(w_t)) and p from the language model given
// history h (tokens before w_t, starting with <s> for sentence-initial words).
double step_score(const Vector& source_vec, const std::string& target_token, std::span<const std::string> history,
                  const NGramLM& lm, const EmbeddingSpace& tgt, const MappingMatrix& mapping, double lambda_lm);

struct Hypothesis {
  std::vector<std::size_t> tokens;  // rows of the target space
  double score = 0.0;
};

struct DecodeResult {
  Sentence tokens;
  double score = 0.0;
};

// Context-aware word-by-word translation: the beam is extended at every
// position with the top candidates_per_step target words of the mapped
// segment and rescored with step_score. Output length equals input length.
class BeamDecoder {
 public:
  BeamDecoder(const Retriever& retriever, const NGramLM& lm, DecoderConfig cfg);

  DecodeResult translate(const UtteranceInput& input) const;

  // Score of a fixed target sequence under the same model.
  double score_sequence(const UtteranceInput& input, const Sentence& tokens) const;

 private:
  const Retriever& retriever_;
  const NGramLM& lm_;
  DecoderConfig cfg_;
  std::vector<LmId> target_to_lm_;
};

DecodeResult beam_translate(const UtteranceInput& input, const Retriever& retriever, const NGramLM& lm,
                            const DecoderConfig& cfg);

// Batch format: per utterance a "n d" header followed by n lines
// "label v1 ... vd" (the embedding text format, one block per utterance).
void write_utterances(const std::vector<UtteranceInput>& utterances, const std::filesystem::path& path);
std::vector<UtteranceInput> read_utterances(const std::filesystem::path& path);

}  // namespace monost
