#include "monost/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>

#include "monost/error.hpp"

namespace monost {

namespace {

constexpr double kLn10 = std::numbers::ln10;

struct EditHyp {
  std::vector<LmId> out;
  double lm = 0.0;  // natural log
  double penalty = 0.0;
  int edits = 0;

  double objective() const { return lm - penalty; }
};

}  // namespace

void validate(const NoiseSpec& spec) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(spec.p_drop) || !prob(spec.p_insert)) throw InvalidArgument("noise probabilities must lie in [0, 1]");
  if (spec.perm_window < 1) throw InvalidArgument("perm_window must be >= 1");
}

Sentence corrupt(const Sentence& sentence, const NoiseSpec& spec, std::span<const std::string> insert_vocab, Rng& rng) {
  validate(spec);
  const std::size_t n = sentence.size();

  std::vector<double> keys(n);
  for (std::size_t i = 0; i < n; ++i)
    keys[i] = static_cast<double>(i) + uniform01(rng) * static_cast<double>(spec.perm_window);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

  Sentence kept;
  kept.reserve(n);
  for (std::size_t i : order)
    if (!(uniform01(rng) < spec.p_drop)) kept.push_back(sentence[i]);

  const std::size_t pool = std::min(spec.insert_vocab_topk, insert_vocab.size());
  Sentence out;
  out.reserve(kept.size() * 2);
  for (const auto& tok : kept) {
    out.push_back(tok);
    if (pool > 0 && uniform01(rng) < spec.p_insert) out.push_back(insert_vocab[uniform_index(rng, pool)]);
  }
  return out;
}

Sentence corrupt(const Sentence& sentence, const NoiseSpec& spec, std::span<const std::string> insert_vocab) {
  Rng rng(derive_seed(spec.seed, 0xD0));
  return corrupt(sentence, spec, insert_vocab, rng);
}

std::vector<DenoisePair> make_denoise_pairs(const Corpus& corpus, const NoiseSpec& spec) {
  validate(spec);
  const auto vocab = corpus.most_frequent(spec.insert_vocab_topk);
  Rng rng(derive_seed(spec.seed, 0xD1));
  std::vector<DenoisePair> pairs;
  pairs.reserve(corpus.num_sentences());
  for (std::size_t i = 0; i < corpus.num_sentences(); ++i) {
    Sentence clean = corpus.sentence(i);
    Sentence noisy = corrupt(clean, spec, vocab, rng);
    pairs.push_back({std::move(noisy), std::move(clean)});
  }
  return pairs;
}

void write_denoise_pairs(const std::vector<DenoisePair>& pairs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write pair file: " + path.string());
  for (const auto& p : pairs) out << join_tokens(p.noisy) << '\t' << join_tokens(p.clean) << '\n';
  if (!out) throw IoError("error while writing pair file: " + path.string());
}

std::vector<DenoisePair> read_denoise_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read pair file: " + path.string());
  std::vector<DenoisePair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected noisy<TAB>clean");
    pairs.push_back({split_whitespace(line.substr(0, tab)), split_whitespace(line.substr(tab + 1))});
  }
  return pairs;
}

void validate(const DenoiseConfig& cfg) {
  if (cfg.beam_size < 1) throw InvalidArgument("denoise beam_size must be >= 1");
  if (cfg.max_edits_per_token < 0.0) throw InvalidArgument("max_edits_per_token must be >= 0");
  if (cfg.cost_delete < 0.0 || cfg.cost_insert < 0.0 || cfg.cost_swap < 0.0)
    throw InvalidArgument("edit penalties must be >= 0");
}

double lm_log_prob(const Sentence& sentence, const NGramLM& lm) { return lm.sentence_log10(sentence) * kLn10; }

DenoiseResult denoise_search(const Sentence& sentence, const NGramLM& lm, const DenoiseConfig& cfg) {
  validate(cfg);
  DenoiseResult identity;
  identity.tokens = sentence;
  identity.identity_objective = identity.objective = lm_log_prob(sentence, lm);
  if (sentence.empty()) return identity;

  const std::size_t n = sentence.size();
  const int max_edits = static_cast<int>(std::ceil(cfg.max_edits_per_token * static_cast<double>(n) - 1e-12));
  if (max_edits <= 0) return identity;

  std::vector<LmId> input(n);
  for (std::size_t i = 0; i < n; ++i) input[i] = lm.id(sentence[i]);

  std::vector<LmId> hist;
  auto ln_p = [&](const std::vector<LmId>& out, LmId w) {
    // History = last order-1 ids of (<s>, out...).
    const std::size_t keep = static_cast<std::size_t>(lm.order() - 1);
    hist.clear();
    if (out.size() < keep) hist.push_back(lm.bos_id());
    const std::size_t ctx = std::min(out.size(), keep);
    hist.insert(hist.end(), out.end() - static_cast<std::ptrdiff_t>(ctx), out.end());
    return lm.score_ids(hist, w) * kLn10;
  };
  auto emit = [&](EditHyp h, std::initializer_list<LmId> words) {
    for (LmId w : words) {
      h.lm += ln_p(h.out, w);
      h.out.push_back(w);
    }
    return h;
  };

  auto prune = [&](std::vector<EditHyp>& beam) {
    std::sort(beam.begin(), beam.end(), [](const EditHyp& a, const EditHyp& b) {
      if (a.objective() != b.objective()) return a.objective() > b.objective();
      if (a.out != b.out) return a.out < b.out;
      return a.edits < b.edits;
    });
    std::vector<EditHyp> kept;
    for (auto& h : beam) {
      if (kept.size() >= cfg.beam_size) break;
      if (!kept.empty() && std::any_of(kept.begin(), kept.end(), [&](const EditHyp& k) { return k.out == h.out; }))
        continue;
      kept.push_back(std::move(h));
    }
    beam = std::move(kept);
  };

  // beams[i]: hypotheses that have consumed the first i input words.
  std::vector<std::vector<EditHyp>> beams(n + 1);
  beams[0].push_back(EditHyp{});
  for (std::size_t i = 0; i < n; ++i) {
    prune(beams[i]);
    for (const EditHyp& h : beams[i]) {
      beams[i + 1].push_back(emit(h, {input[i]}));
      if (h.edits >= max_edits) continue;

      EditHyp del = h;
      del.penalty += cfg.cost_delete;
      ++del.edits;
      beams[i + 1].push_back(std::move(del));

      if (i + 1 < n) {
        EditHyp sw = emit(h, {input[i + 1], input[i]});
        sw.penalty += cfg.cost_swap;
        ++sw.edits;
        beams[i + 2].push_back(std::move(sw));
      }

      if (cfg.insert_candidates > 0) {
        hist.assign(1, lm.bos_id());
        hist.insert(hist.end(), h.out.begin(), h.out.end());
        for (LmId y : lm.continuations(hist, cfg.insert_candidates)) {
          if (y == lm.eos_id()) continue;
          EditHyp ins = emit(h, {y, input[i]});
          ins.penalty += cfg.cost_insert;
          ++ins.edits;
          beams[i + 1].push_back(std::move(ins));
        }
      }
    }
    beams[i].clear();
  }

  DenoiseResult best = identity;
  for (const EditHyp& h : beams[n]) {
    const double obj = h.lm + ln_p(h.out, lm.eos_id()) - h.penalty;
    if (obj > best.objective) {
      best.objective = obj;
      best.edits = h.edits;
      best.tokens.clear();
      for (LmId w : h.out) best.tokens.push_back(lm.vocab()[static_cast<std::size_t>(w)]);
    }
  }
  // Unknown input words come back as <unk> from the id mapping; restore their
  // surface form when the edit program kept them in place.
  if (best.edits == 0) best.tokens = sentence;
  best.identity_objective = identity.objective;
  return best;
}

Sentence denoise(const Sentence& sentence, const NGramLM& lm, const DenoiseConfig& cfg) {
  return denoise_search(sentence, lm, cfg).tokens;
}

}  // namespace monost
