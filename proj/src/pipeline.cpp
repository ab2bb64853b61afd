#include "monost/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

#include <spdlog/spdlog.h>

#include "monost/config.hpp"
#include "monost/error.hpp"
#include "monost/lm.hpp"

namespace monost {

namespace fs = std::filesystem;

namespace {

// Seed streams derived from ExperimentConfig::seed.
enum : std::uint64_t {
  kSeedSourceEmbedding = 1,
  kSeedTargetEmbedding = 2,
  kSeedAlign = 3,
  kSeedSourceSegmentation = 4,
  kSeedTestSet = 5,
  kSeedDenoisePairs = 6,
};

class DirLock {
 public:
  explicit DirLock(fs::path path) : path_(std::move(path)) {
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f) throw IoError("experiment directory is in use (remove " + path_.string() + " if no run is active)");
    std::fprintf(f, "%ld\n", static_cast<long>(::getpid()));
    std::fclose(f);
  }
  ~DirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  fs::path path_;
};

template <class F>
auto run_stage(const std::string& name, F&& body) {
  spdlog::info("stage {}", name);
  try {
    return body();
  } catch (const std::exception& e) {
    throw Error("stage '" + name + "' failed: " + e.what());
  }
}

std::string stage_file(Stage s) {
  switch (s) {
    case Stage::kWordByWord:
      return "wordbyword.txt";
    case Stage::kLm:
      return "lm.txt";
    case Stage::kDenoise:
      return "denoise.txt";
  }
  return "unknown.txt";
}

bool has_stage(const ExperimentConfig& cfg, Stage s) {
  return std::find(cfg.stages.begin(), cfg.stages.end(), s) != cfg.stages.end();
}

// Everything the decoding stages share.
struct Prepared {
  EmbeddingSpace source;  // normalized
  EmbeddingSpace target;  // normalized
  SelfLearnResult alignment;
  SpectralReport spectral;
  std::optional<double> p_at_1, p_at_5;
  std::vector<UtteranceInput> utterances;
  std::vector<Sentence> references;
};

Prepared prepare(const ExperimentConfig& cfg, const fs::path& dir) {
  Prepared p;
  fs::create_directories(dir / "embeddings");
  fs::create_directories(dir / "mapping");
  fs::create_directories(dir / "translations");

  run_stage("embeddings", [&] {
    auto raw = read_sentences(cfg.source_corpus, cfg.load.lowercase);
    if (cfg.p_split > 0.0 || cfg.p_merge > 0.0) {
      Rng rng(derive_seed(cfg.seed, kSeedSourceSegmentation));
      for (auto& s : raw) s = segment_sentence(s, cfg.p_split, cfg.p_merge, rng);
    }
    const Corpus src_corpus = build_corpus(std::move(raw), cfg.load);
    const Corpus tgt_corpus = load_corpus(cfg.target_corpus, cfg.load);

    SkipGramConfig sg = cfg.embedding;
    sg.seed = derive_seed(cfg.seed, kSeedSourceEmbedding);
    const EmbeddingSpace src = train_skipgram(src_corpus, sg);
    sg.seed = derive_seed(cfg.seed, kSeedTargetEmbedding);
    sg.jitter_sigma = 0.0;
    const EmbeddingSpace tgt = train_skipgram(tgt_corpus, sg);
    save_embeddings(src, dir / "embeddings" / "source.vec");
    save_embeddings(tgt, dir / "embeddings" / "target.vec");
    p.source = normalize_for_alignment(src);
    p.target = normalize_for_alignment(tgt);
  });

  run_stage("diagnostics", [&] {
    const std::size_t n = std::min({cfg.eigsim_top_n, p.source.size(), p.target.size()});
    p.spectral = eigenvector_similarity(p.source, p.target, n, cfg.eigsim_k);
    write_spectral_report(p.spectral, dir / "mapping" / "spectral.txt");
  });

  run_stage("align", [&] {
    AlignConfig ac = cfg.align;
    ac.seed = derive_seed(cfg.seed, kSeedAlign);
    p.alignment = self_learn(p.source, p.target, ac);
    save_mapping(p.alignment.mapping, dir / "mapping" / "mapping.txt");

    const Retriever retriever(p.source, p.target, p.alignment.mapping, cfg.align.csls_k);
    const RankedLexicon lexicon = induce_lexicon(retriever, p.source, cfg.lexicon_top_n, cfg.lexicon_method, 5);
    write_ranked_lexicon(lexicon, dir / "mapping" / "lexicon.tsv");
    if (!cfg.gold_lexicon.empty()) {
      std::set<std::string> induced;
      for (const auto& e : lexicon) induced.insert(e.source);
      Lexicon gold;
      for (auto& entry : read_lexicon(cfg.gold_lexicon))
        if (induced.contains(entry.first)) gold.push_back(std::move(entry));
      if (!gold.empty()) {
        p.p_at_1 = precision_at_k(lexicon, gold, 1);
        p.p_at_5 = precision_at_k(lexicon, gold, 5);
      }
    }
  });

  run_stage("test set", [&] {
    auto sources = read_sentences(cfg.test_source, cfg.load.lowercase);
    p.references = read_sentences(cfg.test_reference, cfg.load.lowercase);
    if (sources.size() != p.references.size())
      throw InvalidArgument("test_source has " + std::to_string(sources.size()) + " sentences but test_reference has " +
                            std::to_string(p.references.size()));
    if (cfg.max_test_sentences > 0 && sources.size() > cfg.max_test_sentences) {
      sources.resize(cfg.max_test_sentences);
      p.references.resize(cfg.max_test_sentences);
    }
    if (sources.empty()) throw InvalidArgument("test set is empty");

    Rng rng(derive_seed(cfg.seed, kSeedTestSet));
    const auto unk = p.source.index(kUnkToken);
    const auto d = static_cast<Eigen::Index>(p.source.dim());
    for (const auto& sentence : sources) {
      UtteranceInput u;
      for (auto& seg : segment_sentence(sentence, cfg.p_split, cfg.p_merge, rng)) {
        auto idx = p.source.index(seg);
        if (!idx) idx = unk;
        Vector v = idx ? p.source.vector(*idx) : Vector::Zero(d);
        if (cfg.segment_jitter > 0.0)
          for (Eigen::Index j = 0; j < d; ++j) v(j) += cfg.segment_jitter * gaussian(rng);
        u.segments.push_back(std::move(v));
        u.labels.push_back(std::move(seg));
      }
      p.utterances.push_back(std::move(u));
    }
    write_utterances(p.utterances, dir / "translations" / "test.utt");
    write_sentences(p.references, dir / "translations" / "reference.txt");
  });
  return p;
}

NGramLM obtain_lm(const ExperimentConfig& cfg, const fs::path& lm_text, const fs::path& out_arpa) {
  if (!cfg.lm_path.empty() && lm_text.empty()) return load_arpa(cfg.lm_path);
  const fs::path text = lm_text.empty() ? (cfg.lm_corpus.empty() ? cfg.target_corpus : cfg.lm_corpus) : lm_text;
  NGramLM lm = train_lm(load_corpus(text, cfg.load), cfg.lm_order);
  for (const auto& w : lm.warnings()) spdlog::warn("lm: {}", w);
  fs::create_directories(out_arpa.parent_path());
  save_arpa(lm, out_arpa);
  return lm;
}

std::vector<Sentence> decode_all(const Prepared& p, const NGramLM& lm, const DecoderConfig& dc,
                                 const MappingMatrix& mapping, int csls_k) {
  const Retriever retriever(p.source, p.target, mapping, csls_k);
  const BeamDecoder decoder(retriever, lm, dc);
  std::vector<Sentence> out;
  out.reserve(p.utterances.size());
  for (const auto& u : p.utterances) out.push_back(u.segments.empty() ? Sentence{} : decoder.translate(u).tokens);
  return out;
}

void write_lines(const std::string& text, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("error while writing " + path.string());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      const auto b = cur.find_first_not_of(" \t");
      const auto e = cur.find_last_not_of(" \t");
      if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

std::string join_list(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

Stage parse_stage(const std::string& name) {
  std::string n = name;
  if (!n.empty() && n.front() == '+') n.erase(0, 1);
  if (n == "wordbyword") return Stage::kWordByWord;
  if (n == "lm") return Stage::kLm;
  if (n == "denoise") return Stage::kDenoise;
  throw InvalidArgument("unknown stage: " + name + " (expected wordbyword, +lm or +denoise)");
}

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::kWordByWord:
      return "wordbyword";
    case Stage::kLm:
      return "+lm";
    case Stage::kDenoise:
      return "+denoise";
  }
  return "?";
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.stages.empty()) throw InvalidArgument("at least one stage is required");
  for (std::size_t i = 0; i < cfg.stages.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (cfg.stages[i] == cfg.stages[j]) throw InvalidArgument("stage listed twice: " + to_string(cfg.stages[i]));
  if (has_stage(cfg, Stage::kDenoise)) {
    if (!has_stage(cfg, Stage::kLm) && cfg.lm_path.empty())
      throw InvalidArgument("+denoise needs the +lm stage or an explicit lm_path");
    if (!has_stage(cfg, Stage::kLm) && !has_stage(cfg, Stage::kWordByWord))
      throw InvalidArgument("+denoise needs a decoding stage (wordbyword or +lm)");
  }
  for (const auto* p : {&cfg.source_corpus, &cfg.target_corpus, &cfg.test_source, &cfg.test_reference})
    if (p->empty()) throw InvalidArgument("source, target, test_source and test_reference paths are required");
  if (cfg.output_dir.empty()) throw InvalidArgument("output_dir is required");
  for (const auto* p : {&cfg.source_corpus, &cfg.target_corpus, &cfg.test_source, &cfg.test_reference,
                        &cfg.lm_corpus, &cfg.lm_path, &cfg.denoise_corpus, &cfg.gold_lexicon})
    if (!p->empty() && !fs::exists(*p)) throw IoError("file not found: " + p->string());
  if (cfg.p_split < 0 || cfg.p_split > 1 || cfg.p_merge < 0 || cfg.p_merge > 1)
    throw InvalidArgument("p_split and p_merge must lie in [0, 1]");
  if (cfg.segment_jitter < 0) throw InvalidArgument("segment_jitter must be >= 0");
  if (cfg.lm_order < 1 || cfg.lm_order > kMaxLmOrder)
    throw InvalidArgument("lm order must be in [1, " + std::to_string(kMaxLmOrder) + "]");
  validate(cfg.embedding);
  validate(cfg.align);
  validate(cfg.decode);
  validate(cfg.denoise);
  validate(cfg.denoise_noise);
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  ConfigReader r = ConfigReader::load(path);
  ExperimentConfig c;

  c.source_corpus = r.get_path("data", "source");
  c.target_corpus = r.get_path("data", "target");
  c.lm_corpus = r.get_path("data", "lm_corpus");
  c.lm_path = r.get_path("data", "lm_path");
  c.denoise_corpus = r.get_path("data", "denoise_corpus");
  c.test_source = r.get_path("data", "test_source");
  c.test_reference = r.get_path("data", "test_reference");
  c.gold_lexicon = r.get_path("data", "gold_lexicon");
  c.output_dir = r.get_path("data", "output_dir");
  c.load.min_count = r.get_int("data", "min_count", c.load.min_count);
  c.load.lowercase = r.get_bool("data", "lowercase", c.load.lowercase);

  c.p_split = r.get_double("source", "p_split", c.p_split);
  c.p_merge = r.get_double("source", "p_merge", c.p_merge);
  c.segment_jitter = r.get_double("source", "segment_jitter", c.segment_jitter);
  c.max_test_sentences = r.get_uint("source", "max_test_sentences", c.max_test_sentences);

  auto& e = c.embedding;
  e.dim = static_cast<int>(r.get_int("embedding", "dim", e.dim));
  e.window = static_cast<int>(r.get_int("embedding", "window", e.window));
  e.negatives = static_cast<int>(r.get_int("embedding", "negatives", e.negatives));
  e.epochs = static_cast<int>(r.get_int("embedding", "epochs", e.epochs));
  e.learning_rate = r.get_double("embedding", "learning_rate", e.learning_rate);
  e.subsample = r.get_double("embedding", "subsample", e.subsample);
  e.jitter_sigma = r.get_double("embedding", "jitter_sigma", e.jitter_sigma);
  e.threads = static_cast<int>(r.get_int("embedding", "threads", e.threads));

  auto& a = c.align;
  a.init = parse_init_method(r.get_string("align", "init", "unsupervised"));
  a.vocab_cutoff = r.get_uint("align", "vocab_cutoff", a.vocab_cutoff);
  if (auto list = r.get_optional("align", "init_cutoffs")) {
    a.init_cutoffs.clear();
    for (const auto& item : split_list(*list)) {
      std::size_t v = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc{} || ptr != item.data() + item.size())
        throw FormatError("[align] init_cutoffs: not a non-negative integer: '" + item + "'");
      a.init_cutoffs.push_back(v);
    }
  }
  a.csls_k = static_cast<int>(r.get_int("align", "csls_k", a.csls_k));
  a.stochastic_keep = r.get_double("align", "stochastic_keep", a.stochastic_keep);
  a.stochastic_multiplier = r.get_double("align", "stochastic_multiplier", a.stochastic_multiplier);
  a.stochastic_interval = static_cast<int>(r.get_int("align", "stochastic_interval", a.stochastic_interval));
  a.convergence_tol = r.get_double("align", "convergence_tol", a.convergence_tol);
  a.max_iters = static_cast<int>(r.get_int("align", "max_iters", a.max_iters));
  if (a.init == InitMethod::kGivenDictionary)
    throw InvalidArgument("init = given is only available through the align command");

  c.eigsim_top_n = r.get_uint("diagnostics", "top_n", c.eigsim_top_n);
  c.eigsim_k = static_cast<int>(r.get_int("diagnostics", "k", c.eigsim_k));
  c.lexicon_top_n = r.get_uint("diagnostics", "lexicon_top_n", c.lexicon_top_n);
  c.lexicon_method = parse_retrieval_method(r.get_string("diagnostics", "lexicon_method", "csls"));

  c.lm_order = static_cast<int>(r.get_int("lm", "order", c.lm_order));

  auto& d = c.decode;
  d.lambda_lm = r.get_double("decode", "lambda_lm", d.lambda_lm);
  d.beam_size = r.get_uint("decode", "beam_size", d.beam_size);
  d.candidates_per_step = r.get_uint("decode", "candidates", d.candidates_per_step);
  d.method = parse_retrieval_method(r.get_string("decode", "method", to_string(d.method)));

  auto& dn = c.denoise;
  dn.beam_size = r.get_uint("denoise", "beam_size", dn.beam_size);
  dn.max_edits_per_token = r.get_double("denoise", "max_edits_per_token", dn.max_edits_per_token);
  dn.cost_delete = r.get_double("denoise", "cost_delete", dn.cost_delete);
  dn.cost_insert = r.get_double("denoise", "cost_insert", dn.cost_insert);
  dn.cost_swap = r.get_double("denoise", "cost_swap", dn.cost_swap);
  dn.insert_candidates = r.get_uint("denoise", "insert_candidates", dn.insert_candidates);
  auto& nz = c.denoise_noise;
  nz.p_drop = r.get_double("denoise", "p_drop", nz.p_drop);
  nz.p_insert = r.get_double("denoise", "p_insert", nz.p_insert);
  nz.insert_vocab_topk = r.get_uint("denoise", "insert_vocab_topk", nz.insert_vocab_topk);
  nz.perm_window = static_cast<int>(r.get_int("denoise", "perm_window", nz.perm_window));

  if (auto stages = r.get_optional("experiment", "stages")) {
    c.stages.clear();
    for (const auto& s : split_list(*stages)) c.stages.push_back(parse_stage(s));
  }
  c.seed = r.get_uint("experiment", "seed", c.seed);
  r.finish();
  return c;
}

std::string format_experiment_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o.precision(10);
  auto path = [](const fs::path& p) { return p.string(); };
  o << "[data]\n"
    << "source = " << path(c.source_corpus) << "\n"
    << "target = " << path(c.target_corpus) << "\n"
    << "lm_corpus = " << path(c.lm_corpus) << "\n"
    << "lm_path = " << path(c.lm_path) << "\n"
    << "denoise_corpus = " << path(c.denoise_corpus) << "\n"
    << "test_source = " << path(c.test_source) << "\n"
    << "test_reference = " << path(c.test_reference) << "\n"
    << "gold_lexicon = " << path(c.gold_lexicon) << "\n"
    << "output_dir = " << path(c.output_dir) << "\n"
    << "min_count = " << c.load.min_count << "\n"
    << "lowercase = " << (c.load.lowercase ? "true" : "false") << "\n\n";
  o << "[source]\n"
    << "p_split = " << c.p_split << "\n"
    << "p_merge = " << c.p_merge << "\n"
    << "segment_jitter = " << c.segment_jitter << "\n"
    << "max_test_sentences = " << c.max_test_sentences << "\n\n";
  const auto& e = c.embedding;
  o << "[embedding]\n"
    << "dim = " << e.dim << "\nwindow = " << e.window << "\nnegatives = " << e.negatives << "\nepochs = " << e.epochs
    << "\nlearning_rate = " << e.learning_rate << "\nsubsample = " << e.subsample
    << "\njitter_sigma = " << e.jitter_sigma << "\nthreads = " << e.threads << "\n\n";
  const auto& a = c.align;
  o << "[align]\n"
    << "init = " << (a.init == InitMethod::kIdentity ? "identity" : "unsupervised") << "\nvocab_cutoff = " << a.vocab_cutoff
    << "\ninit_cutoffs = " << join_list(a.init_cutoffs)
    << "\ncsls_k = " << a.csls_k << "\nstochastic_keep = " << a.stochastic_keep
    << "\nstochastic_multiplier = " << a.stochastic_multiplier << "\nstochastic_interval = " << a.stochastic_interval
    << "\nconvergence_tol = " << a.convergence_tol << "\nmax_iters = " << a.max_iters << "\n\n";
  o << "[diagnostics]\n"
    << "top_n = " << c.eigsim_top_n << "\nk = " << c.eigsim_k << "\nlexicon_top_n = " << c.lexicon_top_n
    << "\nlexicon_method = " << to_string(c.lexicon_method) << "\n\n";
  o << "[lm]\norder = " << c.lm_order << "\n\n";
  const auto& d = c.decode;
  o << "[decode]\n"
    << "lambda_lm = " << d.lambda_lm << "\nbeam_size = " << d.beam_size << "\ncandidates = " << d.candidates_per_step
    << "\nmethod = " << to_string(d.method) << "\n\n";
  const auto& dn = c.denoise;
  const auto& nz = c.denoise_noise;
  o << "[denoise]\n"
    << "beam_size = " << dn.beam_size << "\nmax_edits_per_token = " << dn.max_edits_per_token
    << "\ncost_delete = " << dn.cost_delete << "\ncost_insert = " << dn.cost_insert << "\ncost_swap = " << dn.cost_swap
    << "\ninsert_candidates = " << dn.insert_candidates << "\np_drop = " << nz.p_drop << "\np_insert = " << nz.p_insert
    << "\ninsert_vocab_topk = " << nz.insert_vocab_topk << "\nperm_window = " << nz.perm_window << "\n\n";
  o << "[experiment]\nstages = ";
  for (std::size_t i = 0; i < c.stages.size(); ++i) o << (i ? ", " : "") << to_string(c.stages[i]);
  o << "\nseed = " << c.seed << "\n";
  return o.str();
}

const StageResult* ExperimentReport::find(Stage stage) const {
  for (const auto& s : stages)
    if (s.stage == stage) return &s;
  return nullptr;
}

std::string format_report(const ExperimentReport& r) {
  std::ostringstream o;
  o.precision(6);
  o << std::fixed;
  o << "eigsim.similarity\t" << r.spectral.similarity << "\n";
  o << "eigsim.k_star\t" << r.spectral.k_star << "\n";
  o << "align.iterations\t" << r.align_iterations << "\n";
  o << "align.converged\t" << (r.align_converged ? 1 : 0) << "\n";
  o << "align.objective\t" << r.align_objective << "\n";
  o << "align.init_cutoff\t" << r.align_init_cutoff << "\n";
  if (r.p_at_1) o << "lexicon.p_at_1\t" << *r.p_at_1 << "\n";
  if (r.p_at_5) o << "lexicon.p_at_5\t" << *r.p_at_5 << "\n";
  o << "test.sentences\t" << r.test_sentences << "\n";
  for (const auto& s : r.stages) o << format_bleu(s.bleu, "stage." + to_string(s.stage) + ".");
  return o.str();
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  DirLock lock(dir / ".lock");

  const Prepared p = prepare(cfg, dir);
  ExperimentReport report;
  report.spectral = p.spectral;
  report.align_iterations = p.alignment.iterations;
  report.align_converged = p.alignment.converged;
  report.align_objective = p.alignment.objective;
  report.align_init_cutoff = p.alignment.init_cutoff;
  report.p_at_1 = p.p_at_1;
  report.p_at_5 = p.p_at_5;
  report.test_sentences = p.references.size();

  const bool need_lm = has_stage(cfg, Stage::kLm) || has_stage(cfg, Stage::kDenoise);
  const NGramLM lm = need_lm ? run_stage("lm", [&] { return obtain_lm(cfg, {}, dir / "lm" / "lm.arpa"); })
                             : null_lm();

  if (!cfg.denoise_corpus.empty()) {
    run_stage("denoise pairs", [&] {
      NoiseSpec spec = cfg.denoise_noise;
      spec.seed = derive_seed(cfg.seed, kSeedDenoisePairs);
      fs::create_directories(dir / "denoise");
      write_denoise_pairs(make_denoise_pairs(load_corpus(cfg.denoise_corpus, cfg.load), spec),
                          dir / "denoise" / "pairs.tsv");
    });
  }

  std::map<Stage, std::vector<Sentence>> outputs;
  auto finish_stage = [&](Stage s, std::vector<Sentence> hyps) {
    StageResult res;
    res.stage = s;
    res.output = dir / "translations" / stage_file(s);
    write_sentences(hyps, res.output);
    res.bleu = corpus_bleu(hyps, p.references);
    spdlog::info("{} BLEU {:.2f}", to_string(s), res.bleu.bleu);
    report.stages.push_back(res);
    outputs[s] = std::move(hyps);
  };

  // Stages run in pipeline order regardless of how they were listed.
  if (has_stage(cfg, Stage::kWordByWord)) {
    run_stage("wordbyword", [&] {
      DecoderConfig dc = cfg.decode;
      dc.beam_size = 1;
      dc.lambda_lm = 0.0;
      finish_stage(Stage::kWordByWord, decode_all(p, lm, dc, p.alignment.mapping, cfg.align.csls_k));
    });
  }
  if (has_stage(cfg, Stage::kLm)) {
    run_stage("+lm", [&] {
      finish_stage(Stage::kLm, decode_all(p, lm, cfg.decode, p.alignment.mapping, cfg.align.csls_k));
    });
  }
  if (has_stage(cfg, Stage::kDenoise)) {
    run_stage("+denoise", [&] {
      const auto& input = outputs.contains(Stage::kLm) ? outputs.at(Stage::kLm) : outputs.at(Stage::kWordByWord);
      std::vector<Sentence> hyps;
      hyps.reserve(input.size());
      for (const auto& s : input) hyps.push_back(denoise(s, lm, cfg.denoise));
      finish_stage(Stage::kDenoise, std::move(hyps));
    });
  }

  write_lines(format_report(report), dir / "report.txt");
  return report;
}

std::vector<LmSweepEntry> run_lm_corpus_sweep(const ExperimentConfig& cfg, const std::vector<fs::path>& lm_corpora) {
  if (lm_corpora.empty()) throw InvalidArgument("LM sweep needs at least one LM corpus");
  validate(cfg);
  for (const auto& c : lm_corpora)
    if (!fs::exists(c)) throw IoError("file not found: " + c.string());
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir / "sweep");
  DirLock lock(dir / ".lock");

  const Prepared p = prepare(cfg, dir);
  std::vector<LmSweepEntry> entries;
  for (std::size_t i = 0; i < lm_corpora.size(); ++i) {
    const std::string tag = "lm_" + std::to_string(i);
    run_stage("+lm[" + std::to_string(i) + "]", [&] {
      const NGramLM lm = obtain_lm(cfg, lm_corpora[i], dir / "sweep" / (tag + ".arpa"));
      auto hyps = decode_all(p, lm, cfg.decode, p.alignment.mapping, cfg.align.csls_k);
      write_sentences(hyps, dir / "sweep" / (tag + ".txt"));
      LmSweepEntry e;
      e.lm_corpus = lm_corpora[i];
      e.perplexity = perplexity(lm, p.references);
      e.bleu = corpus_bleu(hyps, p.references);
      entries.push_back(std::move(e));
    });
  }
  write_lines(format_sweep_report(entries), dir / "sweep" / "report.txt");
  return entries;
}

std::string format_sweep_report(const std::vector<LmSweepEntry>& entries) {
  std::ostringstream o;
  o.precision(6);
  o << std::fixed;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string pre = "lm." + std::to_string(i) + ".";
    o << pre << "corpus\t" << entries[i].lm_corpus.string() << "\n";
    o << pre << "perplexity\t" << entries[i].perplexity << "\n";
    o << pre << "bleu\t" << entries[i].bleu.bleu << "\n";
  }
  return o.str();
}

BenchmarkFiles write_cipher_benchmark(const BenchmarkSpec& spec, const fs::path& dir,
                                      const std::optional<fs::path>& input) {
  if (spec.tokens_per_half <= 0) throw InvalidArgument("tokens_per_half must be positive");
  fs::create_directories(dir);

  std::vector<Sentence> half_a, half_b, test;
  if (input) {
    auto all = read_sentences(*input);
    if (all.size() < spec.test_sentences + 2)
      throw InvalidArgument("input corpus has too few sentences for the requested test set");
    test.assign(all.end() - static_cast<std::ptrdiff_t>(spec.test_sentences), all.end());
    all.resize(all.size() - spec.test_sentences);
    const std::size_t mid = all.size() / 2;
    half_a.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(mid));
    half_b.assign(all.begin() + static_cast<std::ptrdiff_t>(mid), all.end());
  } else {
    const SyntheticLanguage lang(spec.language);
    half_a = lang.sample(spec.tokens_per_half, derive_seed(spec.seed, 1));
    half_b = lang.sample(spec.tokens_per_half, derive_seed(spec.seed, 2));
    test = lang.sample_sentences(spec.test_sentences, derive_seed(spec.seed, 3));
  }

  std::vector<Sentence> all = half_a;
  all.insert(all.end(), half_b.begin(), half_b.end());
  all.insert(all.end(), test.begin(), test.end());
  const Corpus union_corpus = Corpus::from_sentences(all);
  const CipherSpec cipher = make_cipher_spec(union_corpus, derive_seed(spec.seed, 4));
  auto encode = [&](std::vector<Sentence> sents) {
    for (auto& s : sents)
      for (auto& w : s) w = cipher.token_map.at(w);
    return sents;
  };

  BenchmarkFiles f;
  f.source = dir / "source.txt";
  f.target = dir / "target.txt";
  f.test_source = dir / "test.src.txt";
  f.test_reference = dir / "test.ref.txt";
  f.gold_lexicon = dir / "gold.tsv";
  f.config = dir / "experiment.cfg";
  write_sentences(half_a, f.source);
  write_sentences(encode(half_b), f.target);
  write_sentences(test, f.test_source);
  write_sentences(encode(test), f.test_reference);
  Lexicon gold;
  gold.reserve(union_corpus.vocab_size());
  for (const auto& w : union_corpus.vocab()) gold.emplace_back(w, cipher.token_map.at(w));
  write_lexicon(gold, f.gold_lexicon);

  ExperimentConfig cfg;
  cfg.source_corpus = "source.txt";
  cfg.target_corpus = "target.txt";
  cfg.test_source = "test.src.txt";
  cfg.test_reference = "test.ref.txt";
  cfg.gold_lexicon = "gold.tsv";
  cfg.output_dir = "run";
  cfg.p_split = spec.p_split;
  cfg.p_merge = spec.p_merge;
  cfg.align.vocab_cutoff = spec.vocab_cutoff;
  cfg.align.init_cutoffs = spec.init_cutoffs;
  cfg.denoise.cost_delete = spec.denoise_cost_delete;
  cfg.seed = spec.seed;
  write_lines(format_experiment_config(cfg), f.config);
  return f;
}

}  // namespace monost
