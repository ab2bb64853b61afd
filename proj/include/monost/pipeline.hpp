#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "monost/align.hpp"
#include "monost/corpus.hpp"
#include "monost/decode.hpp"
#include "monost/denoise.hpp"
#include "monost/diagnostics.hpp"
#include "monost/embedding.hpp"
#include "monost/eval.hpp"
#include "monost/synthetic.hpp"

namespace monost {

enum class Stage { kWordByWord, kLm, kDenoise };

// "wordbyword", "+lm", "+denoise" (the leading '+' is optional when parsing).
Stage parse_stage(const std::string& name);
std::string to_string(Stage stage);

struct ExperimentConfig {
  // Source-side surrogate corpus (plain text; segmentation noise is applied
  // before embedding training) and target-language monolingual corpus.
  std::filesystem::path source_corpus;
  std::filesystem::path target_corpus;
  // LM training text; empty means target_corpus.
  std::filesystem::path lm_corpus;
  // Pre-built ARPA model used instead of training one.
  std::filesystem::path lm_path;
  // Optional: clean target text turned into (noisy, clean) pairs.
  std::filesystem::path denoise_corpus;
  // Test sentences in the source language and their target references.
  std::filesystem::path test_source;
  std::filesystem::path test_reference;
  // Optional gold (source, target) lexicon for P@k.
  std::filesystem::path gold_lexicon;
  std::filesystem::path output_dir;

  LoadOptions load;
  // Segmentation errors applied to the source corpus and the test utterances.
  double p_split = 0.0;
  double p_merge = 0.0;
  // Per-instance N(0, sigma^2) noise added to every test segment vector.
  double segment_jitter = 0.0;
  std::size_t max_test_sentences = 0;  // 0 = all

  SkipGramConfig embedding;
  AlignConfig align;
  std::size_t eigsim_top_n = 1000;
  int eigsim_k = 10;
  std::size_t lexicon_top_n = 2000;
  RetrievalMethod lexicon_method = RetrievalMethod::kCsls;

  int lm_order = 5;
  DecoderConfig decode;
  DenoiseConfig denoise;
  NoiseSpec denoise_noise;

  std::vector<Stage> stages{Stage::kWordByWord, Stage::kLm, Stage::kDenoise};
  // Every component seed is derived from this one.
  std::uint64_t seed = 1;
};

void validate(const ExperimentConfig& cfg);

// Reads the [data], [source], [embedding], [align], [diagnostics], [lm],
// [decode], [denoise] and [experiment] sections; unknown keys are errors.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Writes every key load_experiment_config understands, with current values.
std::string format_experiment_config(const ExperimentConfig& cfg);

struct StageResult {
  Stage stage;
  std::filesystem::path output;
  BleuReport bleu;
};

struct ExperimentReport {
  SpectralReport spectral;
  int align_iterations = 0;
  bool align_converged = false;
  double align_objective = 0.0;
  std::size_t align_init_cutoff = 0;
  std::optional<double> p_at_1;
  std::optional<double> p_at_5;
  std::size_t test_sentences = 0;
  std::vector<StageResult> stages;

  const StageResult* find(Stage stage) const;
};

// key<TAB>value lines; contains no timings, so equal seeds give equal text.
std::string format_report(const ExperimentReport& report);

// Trains both embedding spaces, aligns them, compares their spectra, decodes
// the test set once per requested stage and scores each output against the
// references. Artifacts go under output_dir:
//   embeddings/{source,target}.vec   mapping/{mapping.txt,lexicon.tsv,spectral.txt}
//   lm/lm.arpa   translations/{test.utt,reference.txt,<stage>.txt}   report.txt
// The directory is locked for the duration of the run. Errors name the stage.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

struct LmSweepEntry {
  std::filesystem::path lm_corpus;
  double perplexity = 0.0;  // on the test references
  BleuReport bleu;
};

// Runs the +lm stage once per LM corpus with everything else fixed. Outputs
// go under output_dir/sweep/. An empty list is an error.
std::vector<LmSweepEntry> run_lm_corpus_sweep(const ExperimentConfig& cfg,
                                              const std::vector<std::filesystem::path>& lm_corpora);

std::string format_sweep_report(const std::vector<LmSweepEntry>& entries);

// Synthetic test-bed: two disjoint halves of one corpus, the target half
// renamed through a random cipher, held-out test sentences with ciphered
// references and the gold cipher lexicon.
struct BenchmarkSpec {
  SyntheticLanguageSpec language;
  std::int64_t tokens_per_half = 1'000'000;
  std::size_t test_sentences = 500;
  // Segmentation noise written into the generated experiment config.
  double p_split = 0.1;
  double p_merge = 0.1;
  // Alignment vocabularies of the generated config. Split and merge fragments
  // crowd the frequency list, and which signature vocabulary still yields a
  // usable init varies from draw to draw, so several are tried.
  std::size_t vocab_cutoff = 4000;
  std::vector<std::size_t> init_cutoffs{500, 1000, 2000};
  // The benchmark LM's per-token cross-entropy is well above 4 nats, so with
  // the library default deleting any average word raises the objective and
  // the denoiser truncates. 8 was picked on a held-out draw (seed 1000).
  double denoise_cost_delete = 8.0;
  std::uint64_t seed = 1;
};

struct BenchmarkFiles {
  std::filesystem::path source, target, test_source, test_reference, gold_lexicon, config;
};

// With `input` set, its sentences are used instead of sampling the synthetic
// language: the last test_sentences lines become the test set and the rest is
// split into a first and second half.
BenchmarkFiles write_cipher_benchmark(const BenchmarkSpec& spec, const std::filesystem::path& dir,
                                      const std::optional<std::filesystem::path>& input = std::nullopt);

}  // namespace monost
