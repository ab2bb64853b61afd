#include "monost/decode.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>

#include "monost/error.hpp"

namespace monost {

namespace {

constexpr double kLn10 = std::numbers::ln10;

struct Extension {
  std::size_t parent;
  std::size_t token;
  double score;
};

}  // namespace

void validate(const DecoderConfig& cfg) {
  if (cfg.lambda_lm < 0.0) throw InvalidArgument("lambda_lm must be >= 0");
  if (cfg.beam_size < 1) throw InvalidArgument("beam_size must be >= 1");
  if (cfg.candidates_per_step < 1) throw InvalidArgument("candidates_per_step must be >= 1");
}

double step_score(double cosine, double ln_lm_prob, double lambda_lm) {
  const double f = std::clamp(cosine, -1.0, 1.0);
  if (f <= -1.0) return -std::numeric_limits<double>::infinity();
  const double lm_term = lambda_lm == 0.0 ? 0.0 : lambda_lm * ln_lm_prob;
  return std::log((f + 1.0) / 2.0) + lm_term;
}

double step_score(const Vector& source_vec, const std::string& target_token, std::span<const std::string> history,
                  const NGramLM& lm, const EmbeddingSpace& tgt, const MappingMatrix& mapping, double lambda_lm) {
  const auto idx = tgt.index(target_token);
  if (!idx) throw InvalidArgument("target token not in embedding space: " + target_token);
  const Vector mapped = mapping.apply(source_vec);
  const Vector y = tgt.vector(*idx);
  const double denom = mapped.norm() * y.norm();
  const double f = denom > 0.0 ? mapped.dot(y) / denom : 0.0;
  return step_score(f, lm.score(history, target_token) * kLn10, lambda_lm);
}

BeamDecoder::BeamDecoder(const Retriever& retriever, const NGramLM& lm, DecoderConfig cfg)
    : retriever_(retriever), lm_(lm), cfg_(cfg) {
  validate(cfg_);
  const auto& vocab = retriever_.target().vocab();
  target_to_lm_.reserve(vocab.size());
  for (const auto& tok : vocab) target_to_lm_.push_back(lm_.id(tok));
}

DecodeResult BeamDecoder::translate(const UtteranceInput& input) const {
  if (input.segments.empty()) throw InvalidArgument("cannot translate an empty utterance");
  const auto& vocab = retriever_.target().vocab();

  std::vector<Hypothesis> beam{Hypothesis{}};
  std::vector<LmId> history;
  for (const Vector& seg : input.segments) {
    const auto cands = retriever_.translate(seg, cfg_.method, cfg_.candidates_per_step);
    std::vector<Extension> ext;
    ext.reserve(beam.size() * cands.size());
    for (std::size_t h = 0; h < beam.size(); ++h) {
      double lm_cached = 0.0;
      if (cfg_.lambda_lm != 0.0) {
        history.assign(1, lm_.bos_id());
        for (std::size_t t : beam[h].tokens) history.push_back(target_to_lm_[t]);
      }
      for (const auto& c : cands) {
        if (cfg_.lambda_lm != 0.0) lm_cached = lm_.score_ids(history, target_to_lm_[c.index]) * kLn10;
        ext.push_back({h, c.index, beam[h].score + step_score(c.cosine, lm_cached, cfg_.lambda_lm)});
      }
    }
    // Pruned (-inf) extensions survive only if nothing else does, so the
    // output always has one token per segment.
    const bool any_finite = std::any_of(ext.begin(), ext.end(), [](const Extension& e) { return std::isfinite(e.score); });
    if (any_finite) std::erase_if(ext, [](const Extension& e) { return !std::isfinite(e.score); });

    auto seq_less = [&](const Extension& a, const Extension& b) {
      const auto& ta = beam[a.parent].tokens;
      const auto& tb = beam[b.parent].tokens;
      for (std::size_t i = 0; i < ta.size(); ++i)
        if (ta[i] != tb[i]) return vocab[ta[i]] < vocab[tb[i]];
      return vocab[a.token] < vocab[b.token];
    };
    const std::size_t keep = std::min(cfg_.beam_size, ext.size());
    std::partial_sort(ext.begin(), ext.begin() + static_cast<std::ptrdiff_t>(keep), ext.end(),
                      [&](const Extension& a, const Extension& b) {
                        if (a.score != b.score) return a.score > b.score;
                        return seq_less(a, b);
                      });
    std::vector<Hypothesis> next;
    next.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      Hypothesis hyp;
      hyp.tokens = beam[ext[i].parent].tokens;
      hyp.tokens.push_back(ext[i].token);
      hyp.score = ext[i].score;
      next.push_back(std::move(hyp));
    }
    beam = std::move(next);
  }

  DecodeResult out;
  out.score = beam.front().score;
  for (std::size_t t : beam.front().tokens) out.tokens.push_back(vocab[t]);
  return out;
}

double BeamDecoder::score_sequence(const UtteranceInput& input, const Sentence& tokens) const {
  if (tokens.size() != input.segments.size()) throw InvalidArgument("sequence length must match segment count");
  const Matrix& tgt = retriever_.target().vectors();
  std::vector<LmId> history{lm_.bos_id()};
  double total = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto idx = retriever_.target().index(tokens[i]);
    if (!idx) throw InvalidArgument("token not in target space: " + tokens[i]);
    const Vector mapped = retriever_.mapping().apply(input.segments[i]);
    const Vector y = tgt.row(static_cast<Eigen::Index>(*idx)).transpose();
    const double denom = mapped.norm() * y.norm();
    const double f = denom > 0 ? mapped.dot(y) / denom : 0.0;
    const LmId w = target_to_lm_[*idx];
    const double ln_p = cfg_.lambda_lm != 0.0 ? lm_.score_ids(history, w) * kLn10 : 0.0;
    total += step_score(f, ln_p, cfg_.lambda_lm);
    history.push_back(w);
  }
  return total;
}

DecodeResult beam_translate(const UtteranceInput& input, const Retriever& retriever, const NGramLM& lm,
                            const DecoderConfig& cfg) {
  return BeamDecoder(retriever, lm, cfg).translate(input);
}

void write_utterances(const std::vector<UtteranceInput>& utterances, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write utterances: " + path.string());
  out << std::setprecision(9);
  for (const auto& u : utterances) {
    const Eigen::Index d = u.segments.empty() ? 0 : u.segments.front().size();
    out << u.segments.size() << ' ' << d << '\n';
    for (std::size_t i = 0; i < u.segments.size(); ++i) {
      out << (i < u.labels.size() && !u.labels[i].empty() ? u.labels[i] : "seg" + std::to_string(i));
      for (Eigen::Index j = 0; j < u.segments[i].size(); ++j) out << ' ' << u.segments[i](j);
      out << '\n';
    }
  }
  if (!out) throw IoError("error while writing utterances: " + path.string());
}

std::vector<UtteranceInput> read_utterances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read utterances: " + path.string());
  std::vector<UtteranceInput> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto header = split_whitespace(line);
    if (header.empty()) continue;
    if (header.size() != 2) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 'n d' header");
    const auto n = std::stoull(header[0]);
    const auto d = std::stoll(header[1]);
    UtteranceInput u;
    for (unsigned long long i = 0; i < n; ++i) {
      if (!std::getline(in, line)) throw FormatError(path.string() + ": truncated utterance record");
      ++lineno;
      auto fields = split_whitespace(line);
      if (static_cast<long long>(fields.size()) != d + 1)
        throw FormatError(path.string() + ":" + std::to_string(lineno) + ": dimension mismatch");
      Vector v(d);
      for (long long j = 0; j < d; ++j) v(j) = std::stod(fields[static_cast<std::size_t>(j + 1)]);
      u.labels.push_back(fields[0]);
      u.segments.push_back(std::move(v));
    }
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace monost
