#include "monost/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "monost/align.hpp"
#include "monost/corpus.hpp"
#include "monost/decode.hpp"
#include "monost/denoise.hpp"
#include "monost/diagnostics.hpp"
#include "monost/embedding.hpp"
#include "monost/error.hpp"
#include "monost/eval.hpp"
#include "monost/lm.hpp"
#include "monost/pipeline.hpp"
#include "monost/synthetic.hpp"

namespace monost::cli {

namespace fs = std::filesystem;

namespace {

// Semantic usage problems found after parsing (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class KeyValue {
 public:
  explicit KeyValue(std::ostream& out) : out_(out) { out_ << std::setprecision(10); }
  template <class T>
  void operator()(const std::string& key, const T& value) {
    out_ << key << '\t' << value << '\n';
  }

 private:
  std::ostream& out_;
};

struct Common {
  std::uint64_t seed = 1;
  int threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
  cmd->add_option("--threads", c.threads, "Worker threads (1 keeps results bit-reproducible)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

EmbeddingSpace load_normalized(const fs::path& p) { return normalize_for_alignment(load_embeddings(p)); }

// ---- synth ----------------------------------------------------------------
struct SynthArgs {
  Common common;
  fs::path out;
  std::optional<fs::path> input;
  std::int64_t tokens = 1'000'000;
  std::size_t test = 500;
  SyntheticLanguageSpec lang;
  BenchmarkSpec bench;
};

int do_synth(const SynthArgs& a, KeyValue& kv) {
  BenchmarkSpec spec = a.bench;
  spec.language = a.lang;
  spec.language.seed = a.common.seed;
  spec.tokens_per_half = a.tokens;
  spec.test_sentences = a.test;
  spec.seed = a.common.seed;
  const auto files = write_cipher_benchmark(spec, a.out, a.input);
  kv("source", files.source.string());
  kv("target", files.target.string());
  kv("test_source", files.test_source.string());
  kv("test_reference", files.test_reference.string());
  kv("gold_lexicon", files.gold_lexicon.string());
  kv("config", files.config.string());
  return 0;
}

// ---- train-embed ----------------------------------------------------------
struct EmbedArgs {
  Common common;
  fs::path corpus, out;
  SkipGramConfig sg;
  std::int64_t min_count = 5;
  double p_split = 0.0, p_merge = 0.0;
};

int do_train_embed(const EmbedArgs& a, KeyValue& kv) {
  LoadOptions lo;
  lo.min_count = a.min_count;
  auto sentences = read_sentences(a.corpus);
  if (a.p_split > 0.0 || a.p_merge > 0.0) {
    Rng rng(derive_seed(a.common.seed, 0x5E6));
    for (auto& s : sentences) s = segment_sentence(s, a.p_split, a.p_merge, rng);
  }
  const Corpus corpus = build_corpus(std::move(sentences), lo);
  SkipGramConfig sg = a.sg;
  sg.seed = a.common.seed;
  sg.threads = a.common.threads;
  SkipGramStats stats;
  const EmbeddingSpace space = train_skipgram(corpus, sg, &stats);
  save_embeddings(space, a.out);
  kv("vocab_size", space.size());
  kv("dim", space.dim());
  kv("tokens", corpus.total_tokens());
  for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e) kv("loss.epoch" + std::to_string(e + 1), stats.epoch_loss[e]);
  kv("output", a.out.string());
  return 0;
}

// ---- align ----------------------------------------------------------------
struct AlignArgs {
  Common common;
  fs::path src, tgt, out;
  std::optional<fs::path> lexicon_out, gold, dictionary;
  std::string init = "unsupervised";
  std::string method = "csls";
  std::size_t top_n = 2000;
  AlignConfig ac;
};

int do_align(const AlignArgs& a, KeyValue& kv) {
  const EmbeddingSpace src = load_normalized(a.src);
  const EmbeddingSpace tgt = load_normalized(a.tgt);
  AlignConfig ac = a.ac;
  ac.seed = a.common.seed;
  ac.init = parse_init_method(a.init);
  if (ac.init == InitMethod::kGivenDictionary) {
    if (!a.dictionary) throw UsageError("--init given requires --dictionary");
    ac.given = dictionary_from_lexicon(read_lexicon(*a.dictionary), src, tgt);
  }
  const SelfLearnResult res = self_learn(src, tgt, ac);
  save_mapping(res.mapping, a.out);
  kv("iterations", res.iterations);
  kv("converged", res.converged ? 1 : 0);
  kv("objective", res.objective);
  kv("initial_objective", res.initial_objective);
  if (res.init_cutoff > 0) kv("init_cutoff", res.init_cutoff);
  kv("dictionary_size", res.dictionary.size());

  const RetrievalMethod method = parse_retrieval_method(a.method);
  if (a.lexicon_out || a.gold) {
    const Retriever retriever(src, tgt, res.mapping, ac.csls_k);
    const RankedLexicon lex = induce_lexicon(retriever, src, a.top_n, method, 5);
    if (a.lexicon_out) write_ranked_lexicon(lex, *a.lexicon_out);
    if (a.gold) {
      std::map<std::string, bool> induced;
      for (const auto& e : lex) induced[e.source] = true;
      Lexicon gold;
      for (auto& g : read_lexicon(*a.gold))
        if (induced.contains(g.first)) gold.push_back(std::move(g));
      kv("gold_entries", gold.size());
      if (!gold.empty()) {
        kv("p_at_1", precision_at_k(lex, gold, 1));
        kv("p_at_5", precision_at_k(lex, gold, 5));
      }
    }
  }
  kv("output", a.out.string());
  return 0;
}

// ---- eigsim ---------------------------------------------------------------
struct EigsimArgs {
  Common common;
  fs::path a, b;
  std::optional<fs::path> out;
  std::size_t top_n = 1000;
  int k = 10;
};

int do_eigsim(const EigsimArgs& a, KeyValue& kv) {
  const EmbeddingSpace x = load_embeddings(a.a);
  const EmbeddingSpace y = load_embeddings(a.b);
  const std::size_t n = std::min({a.top_n, x.size(), y.size()});
  const SpectralReport r = eigenvector_similarity(x, y, n, a.k);
  if (a.out) write_spectral_report(r, *a.out);
  kv("similarity", r.similarity);
  kv("k_star", r.k_star);
  kv("top_n", n);
  return 0;
}

// ---- train-lm -------------------------------------------------------------
struct LmArgs {
  Common common;
  fs::path corpus, out;
  std::optional<fs::path> eval;
  int order = 5;
  std::int64_t min_count = 5;
};

int do_train_lm(const LmArgs& a, KeyValue& kv) {
  LoadOptions lo;
  lo.min_count = a.min_count;
  const NGramLM lm = train_lm(load_corpus(a.corpus, lo), a.order);
  save_arpa(lm, a.out);
  for (const auto& w : lm.warnings()) spdlog::warn("{}", w);
  kv("order", lm.order());
  kv("vocab_size", lm.vocab().size());
  for (int n = 1; n <= lm.order(); ++n) kv("ngram." + std::to_string(n), lm.table(n).size());
  for (std::size_t n = 0; n < lm.discounts().size(); ++n) kv("discount." + std::to_string(n + 1), lm.discounts()[n]);
  if (a.eval) kv("perplexity", perplexity(lm, read_sentences(*a.eval)));
  kv("output", a.out.string());
  return 0;
}

// ---- translate ------------------------------------------------------------
struct TranslateArgs {
  Common common;
  fs::path src, tgt, mapping, out;
  std::optional<fs::path> utterances, text, lm, reference;
  DecoderConfig dc;
  std::string method = "nn";
  int csls_k = 10;
};

int do_translate(const TranslateArgs& a, KeyValue& kv) {
  if (a.utterances.has_value() == a.text.has_value()) throw UsageError("give exactly one of --input or --text");
  if (!a.lm && a.dc.lambda_lm != 0.0) throw UsageError("--lm is required unless --lambda-lm 0");
  const EmbeddingSpace src = load_normalized(a.src);
  const EmbeddingSpace tgt = load_normalized(a.tgt);
  const MappingMatrix mapping = load_mapping(a.mapping);

  std::vector<UtteranceInput> inputs;
  if (a.utterances) {
    inputs = read_utterances(*a.utterances);
  } else {
    const auto unk = src.index(kUnkToken);
    for (const auto& s : read_sentences(*a.text)) {
      UtteranceInput u;
      for (const auto& w : s) {
        auto idx = src.index(w);
        if (!idx) idx = unk;
        u.segments.push_back(idx ? src.vector(*idx) : Vector::Zero(src.dim()));
        u.labels.push_back(w);
      }
      inputs.push_back(std::move(u));
    }
  }

  const NGramLM lm = a.lm ? load_arpa(*a.lm) : null_lm();
  DecoderConfig dc = a.dc;
  dc.method = parse_retrieval_method(a.method);
  const Retriever retriever(src, tgt, mapping, a.csls_k);
  const BeamDecoder decoder(retriever, lm, dc);
  std::vector<Sentence> hyps;
  hyps.reserve(inputs.size());
  for (const auto& u : inputs) hyps.push_back(u.segments.empty() ? Sentence{} : decoder.translate(u).tokens);
  write_sentences(hyps, a.out);
  kv("sentences", hyps.size());
  if (a.reference) kv("bleu", corpus_bleu(hyps, read_sentences(*a.reference)).bleu);
  kv("output", a.out.string());
  return 0;
}

// ---- denoise --------------------------------------------------------------
struct DenoiseArgs {
  Common common;
  fs::path input, out;
  std::optional<fs::path> lm, pairs, reference;
  bool corrupt_only = false;
  DenoiseConfig cfg;
  NoiseSpec noise;
  std::int64_t min_count = 1;
};

int do_denoise(const DenoiseArgs& a, KeyValue& kv) {
  const auto sentences = read_sentences(a.input);
  std::vector<Sentence> result;
  result.reserve(sentences.size());
  if (a.corrupt_only) {
    NoiseSpec spec = a.noise;
    spec.seed = a.common.seed;
    LoadOptions lo;
    lo.min_count = a.min_count;
    const Corpus corpus = build_corpus(sentences, lo);
    const auto pairs = make_denoise_pairs(corpus, spec);
    for (const auto& p : pairs) result.push_back(p.noisy);
    if (a.pairs) write_denoise_pairs(pairs, *a.pairs);
  } else {
    if (!a.lm) throw UsageError("--lm is required unless --corrupt is given");
    const NGramLM lm = load_arpa(*a.lm);
    int edits = 0;
    for (const auto& s : sentences) {
      const DenoiseResult r = denoise_search(s, lm, a.cfg);
      edits += r.edits;
      result.push_back(r.tokens);
    }
    kv("edits", edits);
  }
  write_sentences(result, a.out);
  kv("sentences", result.size());
  if (a.reference) {
    const auto ref = read_sentences(*a.reference);
    kv("bleu.input", corpus_bleu(sentences, ref).bleu);
    kv("bleu.output", corpus_bleu(result, ref).bleu);
  }
  kv("output", a.out.string());
  return 0;
}

// ---- bleu -----------------------------------------------------------------
struct BleuArgs {
  fs::path hyp, ref;
};

int do_bleu(const BleuArgs& a, std::ostream& out) {
  out << format_bleu(corpus_bleu(read_sentences(a.hyp), read_sentences(a.ref)));
  return 0;
}

// ---- run ------------------------------------------------------------------
struct RunArgs {
  fs::path config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<fs::path> out;
  std::optional<std::string> stages;
  std::vector<fs::path> lm_corpora;
};

int do_run(const RunArgs& a, std::ostream& out) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.threads) cfg.embedding.threads = *a.threads;
  if (a.out) cfg.output_dir = *a.out;
  if (a.stages) {
    cfg.stages.clear();
    std::stringstream ss(*a.stages);
    std::string s;
    while (std::getline(ss, s, ',')) cfg.stages.push_back(parse_stage(s));
  }
  if (!a.lm_corpora.empty()) {
    out << format_sweep_report(run_lm_corpus_sweep(cfg, a.lm_corpora));
    return 0;
  }
  out << format_report(run_experiment(cfg));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unsupervised word-by-word translation toolkit", "monost"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  // synth
  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write a cipher benchmark (corpora, test set, gold lexicon, config)");
  add_common(c_synth, synth.common);
  c_synth->add_option("--out", synth.out, "Output directory")->required();
  c_synth->add_option("--input", synth.input, "Split this corpus instead of sampling the synthetic language");
  c_synth->add_option("--tokens", synth.tokens, "Tokens per corpus half")->capture_default_str();
  c_synth->add_option("--test", synth.test, "Held-out test sentences")->capture_default_str();
  c_synth->add_option("--vocab", synth.lang.vocab_size, "Synthetic vocabulary size")->capture_default_str();
  c_synth->add_option("--sharpness", synth.lang.sharpness, "Transition sharpness")->capture_default_str();
  c_synth->add_option("--latent-dim", synth.lang.latent_dim, "Latent dimension of the generator")->capture_default_str();
  c_synth->add_option("--zipf", synth.lang.zipf_exponent, "Zipf exponent of base frequencies")->capture_default_str();
  c_synth->add_option("--p-split", synth.bench.p_split, "Segmentation split probability for the config")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  c_synth->add_option("--p-merge", synth.bench.p_merge, "Segmentation merge probability for the config")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  c_synth->add_option("--cutoff", synth.bench.vocab_cutoff, "Alignment vocabulary cutoff for the config")
      ->capture_default_str();
  c_synth->add_option("--init-cutoffs", synth.bench.init_cutoffs, "Unsupervised init vocabularies for the config")
      ->delimiter(',')
      ->capture_default_str();
  c_synth->add_option("--denoise-cost-delete", synth.bench.denoise_cost_delete,
                      "Denoiser deletion penalty for the config (nats)")
      ->capture_default_str()->check(CLI::NonNegativeNumber);

  // train-embed
  EmbedArgs embed;
  auto* c_embed = app.add_subcommand("train-embed", "Train skip-gram embeddings");
  add_common(c_embed, embed.common);
  c_embed->add_option("--corpus", embed.corpus, "Tokenized corpus, one sentence per line")->required()->check(CLI::ExistingFile);
  c_embed->add_option("--out", embed.out, "Output embeddings (text format)")->required();
  c_embed->add_option("--dim", embed.sg.dim, "Vector dimension")->capture_default_str();
  c_embed->add_option("--window", embed.sg.window, "Context window")->capture_default_str();
  c_embed->add_option("--negatives", embed.sg.negatives, "Negative samples")->capture_default_str();
  c_embed->add_option("--epochs", embed.sg.epochs, "Epochs")->capture_default_str();
  c_embed->add_option("--lr", embed.sg.learning_rate, "Initial learning rate")->capture_default_str();
  c_embed->add_option("--subsample", embed.sg.subsample, "Frequent-word subsampling threshold")->capture_default_str();
  c_embed->add_option("--jitter", embed.sg.jitter_sigma, "Gaussian noise added to the trained vectors")->capture_default_str();
  c_embed->add_option("--min-count", embed.min_count, "Rarer tokens become <unk>")->capture_default_str();
  c_embed->add_option("--p-split", embed.p_split, "Segmentation noise: split probability")->capture_default_str();
  c_embed->add_option("--p-merge", embed.p_merge, "Segmentation noise: merge probability")->capture_default_str();

  // align
  AlignArgs align;
  auto* c_align = app.add_subcommand("align", "Learn an orthogonal mapping without supervision");
  add_common(c_align, align.common);
  c_align->add_option("--src", align.src, "Source embeddings")->required()->check(CLI::ExistingFile);
  c_align->add_option("--tgt", align.tgt, "Target embeddings")->required()->check(CLI::ExistingFile);
  c_align->add_option("--out", align.out, "Output mapping matrix")->required();
  c_align->add_option("--lexicon-out", align.lexicon_out, "Write the induced ranked lexicon (TSV)");
  c_align->add_option("--gold", align.gold, "Gold lexicon for P@1/P@5")->check(CLI::ExistingFile);
  c_align->add_option("--init", align.init, "unsupervised, identity or given")->capture_default_str();
  c_align->add_option("--dictionary", align.dictionary, "Seed lexicon for --init given")->check(CLI::ExistingFile);
  c_align->add_option("--method", align.method, "Lexicon retrieval: nn or csls")
      ->check(CLI::IsMember({"nn", "csls"}))
      ->capture_default_str();
  c_align->add_option("--top-n", align.top_n, "Source words in the induced lexicon")->capture_default_str();
  c_align->add_option("--cutoff", align.ac.vocab_cutoff, "Vocabulary cutoff for self-learning")->capture_default_str();
  c_align->add_option("--init-cutoffs", align.ac.init_cutoffs,
                      "Signature vocabularies tried for the unsupervised init (default: the cutoff)")
      ->delimiter(',');
  c_align->add_option("--csls-k", align.ac.csls_k, "CSLS neighbourhood size")->capture_default_str();
  c_align->add_option("--max-iters", align.ac.max_iters, "Self-learning iteration limit")->capture_default_str();
  c_align->add_option("--keep", align.ac.stochastic_keep, "Initial dictionary keep probability")->capture_default_str();

  // eigsim
  EigsimArgs eig;
  auto* c_eig = app.add_subcommand("eigsim", "Eigenvector similarity of two embedding spaces");
  add_common(c_eig, eig.common);
  c_eig->add_option("--a", eig.a, "First embedding space")->required()->check(CLI::ExistingFile);
  c_eig->add_option("--b", eig.b, "Second embedding space")->required()->check(CLI::ExistingFile);
  c_eig->add_option("--top-n", eig.top_n, "Most frequent words per graph")->capture_default_str();
  c_eig->add_option("--k", eig.k, "Neighbours per node")->capture_default_str();
  c_eig->add_option("--out", eig.out, "Write the full spectral report");

  // train-lm
  LmArgs lma;
  auto* c_lm = app.add_subcommand("train-lm", "Train an interpolated Kneser-Ney n-gram model (ARPA output)");
  add_common(c_lm, lma.common);
  c_lm->add_option("--corpus", lma.corpus, "Training text")->required()->check(CLI::ExistingFile);
  c_lm->add_option("--out", lma.out, "Output ARPA file")->required();
  c_lm->add_option("--order", lma.order, "N-gram order")->check(CLI::Range(1, kMaxLmOrder))->capture_default_str();
  c_lm->add_option("--min-count", lma.min_count, "Rarer tokens become <unk>")->capture_default_str();
  c_lm->add_option("--eval", lma.eval, "Report perplexity on this text")->check(CLI::ExistingFile);

  // translate
  TranslateArgs tr;
  auto* c_tr = app.add_subcommand("translate", "Word-by-word translation with optional LM rescoring");
  add_common(c_tr, tr.common);
  c_tr->add_option("--src", tr.src, "Source embeddings")->required()->check(CLI::ExistingFile);
  c_tr->add_option("--tgt", tr.tgt, "Target embeddings")->required()->check(CLI::ExistingFile);
  c_tr->add_option("--mapping", tr.mapping, "Mapping matrix from align")->required()->check(CLI::ExistingFile);
  c_tr->add_option("--input", tr.utterances, "Utterance vectors (segment format)")->check(CLI::ExistingFile);
  c_tr->add_option("--text", tr.text, "Source sentences; words are looked up in --src")->check(CLI::ExistingFile);
  c_tr->add_option("--lm", tr.lm, "ARPA language model")->check(CLI::ExistingFile);
  c_tr->add_option("--out", tr.out, "Output translations")->required();
  c_tr->add_option("--reference", tr.reference, "Reference translations; prints BLEU")->check(CLI::ExistingFile);
  c_tr->add_option("--lambda-lm", tr.dc.lambda_lm, "LM weight")->capture_default_str();
  c_tr->add_option("--beam", tr.dc.beam_size, "Beam size")->check(CLI::PositiveNumber)->capture_default_str();
  c_tr->add_option("--candidates", tr.dc.candidates_per_step, "Candidates per position")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_tr->add_option("--method", tr.method, "Retrieval: nn or csls")->check(CLI::IsMember({"nn", "csls"}))->capture_default_str();
  c_tr->add_option("--csls-k", tr.csls_k, "CSLS neighbourhood size")->capture_default_str();

  // denoise
  DenoiseArgs dn;
  auto* c_dn = app.add_subcommand("denoise", "LM-guided post-editing, or noise injection with --corrupt");
  add_common(c_dn, dn.common);
  c_dn->add_option("--input", dn.input, "Sentences to process")->required()->check(CLI::ExistingFile);
  c_dn->add_option("--out", dn.out, "Output sentences")->required();
  c_dn->add_option("--lm", dn.lm, "ARPA language model")->check(CLI::ExistingFile);
  c_dn->add_option("--reference", dn.reference, "Clean references; prints BLEU before and after")->check(CLI::ExistingFile);
  c_dn->add_flag("--corrupt", dn.corrupt_only, "Inject noise instead of removing it");
  c_dn->add_option("--pairs", dn.pairs, "With --corrupt: also write noisy<TAB>clean pairs");
  c_dn->add_option("--beam", dn.cfg.beam_size, "Beam size")->check(CLI::PositiveNumber)->capture_default_str();
  c_dn->add_option("--max-edits", dn.cfg.max_edits_per_token, "Edit budget per input token")->capture_default_str();
  c_dn->add_option("--cost-delete", dn.cfg.cost_delete, "Deletion penalty (nats)")->capture_default_str();
  c_dn->add_option("--cost-insert", dn.cfg.cost_insert, "Insertion penalty (nats)")->capture_default_str();
  c_dn->add_option("--cost-swap", dn.cfg.cost_swap, "Swap penalty (nats)")->capture_default_str();
  c_dn->add_option("--insert-candidates", dn.cfg.insert_candidates, "LM continuations tried per insertion")
      ->capture_default_str();
  c_dn->add_option("--p-drop", dn.noise.p_drop, "With --corrupt: deletion probability")->capture_default_str();
  c_dn->add_option("--p-insert", dn.noise.p_insert, "With --corrupt: insertion probability")->capture_default_str();
  c_dn->add_option("--perm-window", dn.noise.perm_window, "With --corrupt: permutation window")->capture_default_str();
  c_dn->add_option("--insert-topk", dn.noise.insert_vocab_topk, "With --corrupt: inserted words come from this many most frequent")
      ->capture_default_str();

  // bleu
  BleuArgs bl;
  auto* c_bleu = app.add_subcommand("bleu", "Corpus BLEU-4 of hypotheses against single references");
  c_bleu->add_option("--hyp", bl.hyp, "Hypotheses")->required()->check(CLI::ExistingFile);
  c_bleu->add_option("--ref", bl.ref, "References")->required()->check(CLI::ExistingFile);

  // run
  RunArgs ra;
  auto* c_run = app.add_subcommand("run", "Run an experiment from a config file");
  c_run->add_option("--config", ra.config, "Experiment configuration")->required()->check(CLI::ExistingFile);
  c_run->add_option("--seed", ra.seed, "Override [experiment] seed");
  c_run->add_option("--threads", ra.threads, "Override [embedding] threads")->check(CLI::PositiveNumber);
  c_run->add_option("--out", ra.out, "Override [data] output_dir");
  c_run->add_option("--stages", ra.stages, "Override [experiment] stages, comma separated");
  c_run->add_option("--lm-corpora", ra.lm_corpora, "Run the LM corpus sweep over these texts instead")
      ->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("monost", sink);
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::from_str(log_level));
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);
  struct Restore {
    std::shared_ptr<spdlog::logger> p;
    ~Restore() { spdlog::set_default_logger(p); }
  } restore{previous};

  KeyValue kv(out);
  try {
    if (*c_synth) return do_synth(synth, kv);
    if (*c_embed) return do_train_embed(embed, kv);
    if (*c_align) return do_align(align, kv);
    if (*c_eig) return do_eigsim(eig, kv);
    if (*c_lm) return do_train_lm(lma, kv);
    if (*c_tr) return do_translate(tr, kv);
    if (*c_dn) return do_denoise(dn, kv);
    if (*c_bleu) return do_bleu(bl, out);
    if (*c_run) return do_run(ra, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace monost::cli
