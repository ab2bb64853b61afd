// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "monost/align.hpp"
#include "monost/decode.hpp"
#include "monost/denoise.hpp"
#include "monost/diagnostics.hpp"
#include "monost/embedding.hpp"
#include "monost/error.hpp"
#include "monost/eval.hpp"
#include "monost/lm.hpp"
#include "monost/pipeline.hpp"
#include "monost/synthetic.hpp"

namespace fs = std::filesystem;
using namespace monost;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v, int digits = 4) {
  std::ostringstream o;
  o.precision(digits);
  o << v;
  return o.str();
}

Matrix random_orthogonal(int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = gaussian(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  for (int i = 0; i < d; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return q;
}

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gaussian(rng);
  return m;
}

std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
  return v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Context {
  fs::path work;
  fs::path data;
  fs::path cli;
  int seeds = 5;
};

// ---- 1
Verdict procrustes_exactness(const Context&) {
  constexpr int d = 100, n = 2000;
  Rng rng(11);
  const Matrix x = gaussian_matrix(n, d, rng);
  const Matrix r = random_orthogonal(d, 12);
  const EmbeddingSpace src(numbered("s", n), x);
  const EmbeddingSpace tgt(numbered("t", n), x * r.transpose());
  SeedDictionary dict;
  for (int i = 0; i < n; ++i) dict.pairs.emplace_back(i, i);
  const Stopwatch sw;
  const MappingMatrix m = procrustes(src, tgt, dict);
  const double secs = sw.seconds();
  const double err = (m.W - r).cwiseAbs().maxCoeff();
  return {err < 1e-6 && secs < 1.0, "max|W-R| " + num(err) + ", " + num(secs, 3) + " s"};
}

// ---- 2 and 3 share the noise-free benchmark.
struct CleanBenchmark {
  fs::path dir;
  BenchmarkFiles files;
  ExperimentReport report;
  double seconds = 0.0;
};

const CleanBenchmark& clean_benchmark(const Context& ctx) {
  static std::optional<CleanBenchmark> cached;
  if (cached) return *cached;
  CleanBenchmark b;
  b.dir = ctx.work / "cipher_clean";
  fs::remove_all(b.dir);
  BenchmarkSpec spec;
  spec.p_split = spec.p_merge = 0.0;
  const Stopwatch sw;
  b.files = write_cipher_benchmark(spec, b.dir);
  ExperimentConfig cfg = load_experiment_config(b.files.config);
  cfg.embedding.threads = 1;
  cfg.stages = {Stage::kWordByWord};
  b.report = run_experiment(cfg);
  b.seconds = sw.seconds();
  cached = std::move(b);
  return *cached;
}

Verdict cipher_benchmark(const Context& ctx) {
  const CleanBenchmark& b = clean_benchmark(ctx);
  if (!b.report.p_at_1) return {false, "no P@1 in the report"};
  const double p1 = *b.report.p_at_1;
  return {p1 >= 0.60 && b.seconds < 1800.0,
          "P@1 " + num(p1) + " on the top 2000 words, " + num(b.seconds, 4) + " s"};
}

// ---- 3
Verdict eigenvector_metric(const Context& ctx) {
  const CleanBenchmark& b = clean_benchmark(ctx);
  const fs::path emb = b.dir / "run" / "embeddings";
  const EmbeddingSpace src_raw = load_embeddings(emb / "source.vec");
  const EmbeddingSpace tgt = normalize_for_alignment(load_embeddings(emb / "target.vec"));
  const EmbeddingSpace src = normalize_for_alignment(src_raw);

  const double self = eigenvector_similarity(tgt, tgt).similarity;
  const double base = eigenvector_similarity(src, tgt).similarity;
  const EmbeddingSpace rotated = src.with_vectors(src.vectors() * random_orthogonal(src.dim(), 31));
  const double rot = eigenvector_similarity(rotated, tgt).similarity;

  Lexicon gold;
  std::set<std::string> top;
  for (std::size_t i = 0; i < std::min<std::size_t>(2000, src.size()); ++i) top.insert(src.token(i));
  for (auto& e : read_lexicon(b.files.gold_lexicon))
    if (top.contains(e.first)) gold.push_back(std::move(e));

  // Noise of norm ~level added to unit vectors before the usual preprocessing.
  const std::vector<double> levels{0.0, 0.3, 0.6, 0.9, 1.2, 1.5};
  std::vector<double> sims, p1s;
  std::ostringstream detail;
  const EmbeddingSpace unit = src_raw.with_vectors(unit_rows(src_raw.vectors()));
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double sigma = levels[i] / std::sqrt(static_cast<double>(unit.dim()));
    const EmbeddingSpace noisy = normalize_for_alignment(sigma > 0 ? jitter(unit, sigma, 100 + i) : unit);
    AlignConfig ac;
    ac.vocab_cutoff = 1000;
    const SelfLearnResult r = self_learn(noisy, tgt, ac);
    const Retriever retriever(noisy, tgt, r.mapping, ac.csls_k);
    const double p1 = precision_at_k(induce_lexicon(retriever, noisy, 2000, RetrievalMethod::kCsls, 1), gold, 1);
    sims.push_back(eigenvector_similarity(noisy, tgt).similarity);
    p1s.push_back(p1);
    detail << (i ? "; " : "") << levels[i] << ": sim " << num(sims.back()) << " P@1 " << num(p1, 3);
  }
  const double rho = spearman(sims, p1s);
  const bool pass = self == 0.0 && std::abs(rot - base) <= 1e-6 && rho <= -0.7;
  return {pass, "self " + num(self) + ", rotation diff " + num(std::abs(rot - base)) + ", spearman " + num(rho) +
                    " [" + detail.str() + "]"};
}

// ---- 4
struct DecodeWorld {
  EmbeddingSpace src, tgt;
  MappingMatrix mapping;
  NGramLM lm;
};

DecodeWorld decode_world(int n, int d, std::uint64_t seed) {
  DecodeWorld w;
  Rng rng(seed);
  const Matrix t = unit_rows(gaussian_matrix(n, d, rng));
  const Matrix r = random_orthogonal(d, seed + 1);
  const Matrix s = unit_rows(t * r + 0.3 * gaussian_matrix(n, d, rng));
  w.tgt = EmbeddingSpace(numbered("t", n), t);
  w.src = EmbeddingSpace(numbered("s", n), s);
  w.mapping.W = r;
  std::vector<Sentence> text;
  for (int i = 0; i < 500; ++i) {
    Sentence sent;
    std::size_t prev = uniform_index(rng, static_cast<std::uint64_t>(n));
    for (int j = 0; j < 6; ++j) {
      sent.push_back("t" + std::to_string(prev));
      prev = (prev * 5 + uniform_index(rng, 4)) % static_cast<std::size_t>(n);
    }
    text.push_back(sent);
  }
  LoadOptions lo;
  lo.min_count = 1;
  w.lm = train_lm(build_corpus(text, lo), 3);
  return w;
}

UtteranceInput random_utterance(const DecodeWorld& w, std::size_t len, Rng& rng) {
  UtteranceInput u;
  for (std::size_t i = 0; i < len; ++i) {
    Vector v = w.src.vector(uniform_index(rng, w.src.size()));
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) += 0.2 * gaussian(rng);
    u.segments.push_back(v);
  }
  return u;
}

Verdict decoder_reductions(const Context&) {
  const DecodeWorld w = decode_world(80, 16, 41);
  const Retriever retriever(w.src, w.tgt, w.mapping, 10);
  Rng rng(43);

  DecoderConfig greedy;
  greedy.beam_size = 1;
  greedy.lambda_lm = 0.0;
  const BeamDecoder nn_decoder(retriever, w.lm, greedy);
  int nn_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = random_utterance(w, 1 + uniform_index(rng, 8), rng);
    const auto out = nn_decoder.translate(u);
    for (std::size_t i = 0; i < u.segments.size(); ++i) {
      const auto nn = retriever.translate(u.segments[i], RetrievalMethod::kNearestNeighbor, 1);
      if (out.tokens.at(i) != w.tgt.token(nn[0].index)) ++nn_mismatch;
    }
  }

  // Brute force scores every candidate sequence independently of the decoder.
  int instances = 0, exhaustive_mismatch = 0;
  for (std::size_t cands = 1; cands <= 3; ++cands)
    for (std::size_t len = 1; len <= 4; ++len)
      for (int trial = 0; trial < 10; ++trial) {
        DecoderConfig cfg;
        cfg.lambda_lm = 0.2 + uniform01(rng);
        cfg.candidates_per_step = cands;
        cfg.beam_size = 81;
        const auto u = random_utterance(w, len, rng);
        std::vector<std::vector<std::string>> options;
        for (const auto& seg : u.segments) {
          std::vector<std::string> o;
          for (const auto& c : retriever.translate(seg, cfg.method, cands)) o.push_back(w.tgt.token(c.index));
          options.push_back(o);
        }
        double best = -std::numeric_limits<double>::infinity();
        std::vector<std::size_t> idx(len, 0);
        while (true) {
          std::vector<std::string> hist{"<s>"};
          double total = 0.0;
          for (std::size_t i = 0; i < len; ++i) {
            const std::string& tok = options[i][idx[i]];
            total += step_score(u.segments[i], tok, hist, w.lm, w.tgt, w.mapping, cfg.lambda_lm);
            hist.push_back(tok);
          }
          best = std::max(best, total);
          std::size_t p = 0;
          while (p < len && ++idx[p] == options[p].size()) idx[p++] = 0;
          if (p == len) break;
        }
        const auto out = BeamDecoder(retriever, w.lm, cfg).translate(u);
        ++instances;
        if (std::abs(out.score - best) > 1e-9 * std::max(1.0, std::abs(best))) ++exhaustive_mismatch;
      }
  return {nn_mismatch == 0 && exhaustive_mismatch == 0,
          std::to_string(nn_mismatch) + " nearest-neighbour mismatches in 100 utterances, " +
              std::to_string(exhaustive_mismatch) + "/" + std::to_string(instances) + " exhaustive mismatches"};
}

// ---- 5
Verdict pipeline_monotonicity(const Context& ctx) {
  std::vector<double> wb, lm, dn;
  std::ostringstream detail;
  const Stopwatch sw;
  for (int s = 1; s <= ctx.seeds; ++s) {
    const fs::path dir = ctx.work / ("cipher_noisy_" + std::to_string(s));
    fs::remove_all(dir);
    BenchmarkSpec spec;
    spec.seed = static_cast<std::uint64_t>(s);
    const BenchmarkFiles files = write_cipher_benchmark(spec, dir);
    ExperimentConfig cfg = load_experiment_config(files.config);
    cfg.embedding.threads = 1;
    const ExperimentReport r = run_experiment(cfg);
    wb.push_back(r.find(Stage::kWordByWord)->bleu.bleu);
    lm.push_back(r.find(Stage::kLm)->bleu.bleu);
    dn.push_back(r.find(Stage::kDenoise)->bleu.bleu);
    detail << (s > 1 ? "; " : "") << "seed " << s << ": " << num(wb.back()) << " / " << num(lm.back()) << " / "
           << num(dn.back()) << " (P@1 " << num(r.p_at_1.value_or(0.0), 3) << ")";
    spdlog::info("criterion 5 seed {} done after {:.0f} s", s, sw.seconds());
  }
  const double m1 = median(wb), m2 = median(lm), m3 = median(dn);
  const double secs = sw.seconds();
  return {m1 < m2 && m2 <= m3 && secs < 3600.0,
          "median BLEU wordbyword " + num(m1) + " < +lm " + num(m2) + " <= +denoise " + num(m3) + ", " +
              num(secs, 4) + " s [" + detail.str() + "]"};
}

// ---- 6
Verdict lm_correctness(const Context&) {
  LoadOptions lo;
  lo.min_count = 1;
  const NGramLM hand = train_lm(build_corpus({split_whitespace("a b"), split_whitespace("b a b")}, lo), 2);
  struct Row {
    std::vector<std::string> h;
    std::string w;
    double p;
  };
  // Interpolated Kneser-Ney worked by hand: D1 = 1/5, D2 = 3/7.
  const std::vector<Row> rows{
      {{}, "a", 0.39},
      {{}, "b", 0.39},
      {{}, "</s>", 0.19},
      {{}, "<unk>", 0.03},
      {{"<s>"}, "a", 0.452857143},
      {{"a"}, "b", 0.869285714},
      {{"a"}, "a", 0.083571429},
      {{"b"}, "</s>", 0.578095238},
      {{"b"}, "a", 0.301904762},
      {{"b"}, "<unk>", 0.008571429},
  };
  double hand_err = 0.0;
  for (const auto& r : rows) hand_err = std::max(hand_err, std::abs(std::pow(10.0, hand.score(r.h, r.w)) - r.p));

  Rng rng(61);
  std::vector<Sentence> text;
  for (int s = 0; s < 2000; ++s) {
    Sentence x;
    const auto len = 1 + uniform_index(rng, 10);
    for (std::size_t i = 0; i < len; ++i) x.push_back("w" + std::to_string(uniform_index(rng, 30) * uniform_index(rng, 3)));
    text.push_back(x);
  }
  lo.min_count = 2;
  const NGramLM lm = train_lm(build_corpus(text, lo), 4);
  std::vector<LmId> predictable;
  for (LmId i = 0; i < static_cast<LmId>(lm.vocab().size()); ++i)
    if (i != lm.bos_id()) predictable.push_back(i);
  double norm_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<LmId> h;
    if (uniform01(rng) < 0.3) h.push_back(lm.bos_id());
    const auto len = uniform_index(rng, 4);
    for (std::size_t i = 0; i < len; ++i) h.push_back(predictable[uniform_index(rng, predictable.size())]);
    double total = 0.0;
    for (LmId w : predictable) total += std::pow(10.0, lm.score_ids(h, w));
    norm_err = std::max(norm_err, std::abs(total - 1.0));
  }

  const fs::path arpa = fs::temp_directory_path() / "monost_acceptance_lm.arpa";
  save_arpa(lm, arpa);
  const NGramLM back = load_arpa(arpa);
  fs::remove(arpa);
  double arpa_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> h;
    const auto len = uniform_index(rng, 4);
    for (std::size_t i = 0; i < len; ++i) h.push_back(lm.vocab()[static_cast<std::size_t>(predictable[uniform_index(rng, predictable.size())])]);
    const std::string& w = lm.vocab()[static_cast<std::size_t>(predictable[uniform_index(rng, predictable.size())])];
    arpa_err = std::max(arpa_err, std::abs(lm.score(h, w) - back.score(h, w)));
  }
  return {hand_err < 1e-6 && norm_err <= 1e-4 && arpa_err <= 1e-4,
          "hand error " + num(hand_err) + ", normalization error " + num(norm_err) + ", ARPA error " + num(arpa_err)};
}

// ---- 7
Verdict bleu_correctness(const Context& ctx) {
  const Sentence s = split_whitespace("the quick brown fox jumps over the lazy dog");
  const double perfect = corpus_bleu({s}, {s}).bleu;
  const BleuReport clip =
      corpus_bleu({split_whitespace("the the the the the the the")}, {split_whitespace("the cat is on the mat")});

  std::ifstream in(ctx.data / "bleu_nltk.json");
  if (!in) throw IoError("missing reference data: " + (ctx.data / "bleu_nltk.json").string());
  const auto cases = nlohmann::json::parse(in);
  double worst = 0.0;
  for (const auto& c : cases) {
    std::vector<Sentence> hyps, refs;
    for (const auto& h : c.at("hypotheses")) hyps.push_back(split_whitespace(h.get<std::string>()));
    for (const auto& r : c.at("references")) refs.push_back(split_whitespace(r.get<std::string>()));
    worst = std::max(worst, std::abs(corpus_bleu(hyps, refs).bleu - c.at("bleu").get<double>()));
  }
  const bool pass = std::abs(perfect - 100.0) < 1e-9 && clip.matches[0] == 2 && clip.totals[0] == 7 &&
                    cases.size() == 20 && worst < 0.1;
  return {pass, "perfect " + num(perfect) + ", clipped unigrams " + std::to_string(clip.matches[0]) + "/" +
                    std::to_string(clip.totals[0]) + ", max deviation from reference scorer " + num(worst) + " over " +
                    std::to_string(cases.size()) + " corpora"};
}

// ---- 8
Verdict denoiser_improvement(const Context&) {
  const SyntheticLanguage lang(SyntheticLanguageSpec{});
  LoadOptions lo;
  const NGramLM lm = train_lm(build_corpus(lang.sample(1'000'000, 81), lo), 5);
  const Corpus clean = Corpus::from_sentences(lang.sample_sentences(1000, 82));
  NoiseSpec noise;
  const auto pairs = make_denoise_pairs(clean, noise);
  std::vector<Sentence> noisy, refs, fixed;
  int worse = 0;
  for (const auto& p : pairs) {
    const DenoiseResult r = denoise_search(p.noisy, lm, DenoiseConfig{});
    if (r.objective < r.identity_objective - 1e-9) ++worse;
    noisy.push_back(p.noisy);
    refs.push_back(p.clean);
    fixed.push_back(r.tokens);
  }
  const double before = corpus_bleu(noisy, refs).bleu;
  const double after = corpus_bleu(fixed, refs).bleu;
  return {after > before && worse == 0, "BLEU " + num(before) + " -> " + num(after) + " on " +
                                            std::to_string(pairs.size()) + " sentences, " + std::to_string(worse) +
                                            " objective decreases"};
}

// ---- 9
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() == ".err") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = s.str();
  }
  return files;
}

Verdict cli_determinism(const Context& ctx) {
  const std::string fixed = " --seed 5 --threads 1";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"synth", "synth --out . --tokens 40000 --vocab 400 --test 30 --cutoff 300 --init-cutoffs 150,300" + fixed},
      {"train-embed-src", "train-embed --corpus source.txt --out src.vec --dim 40 --epochs 3 --p-split 0.1 --p-merge 0.1" + fixed},
      {"train-embed-tgt", "train-embed --corpus target.txt --out tgt.vec --dim 40 --epochs 3" + fixed},
      {"align", "align --src src.vec --tgt tgt.vec --out map.txt --lexicon-out lex.tsv --gold gold.tsv --top-n 300 "
                "--cutoff 300 --init-cutoffs 150,300" + fixed},
      {"eigsim", "eigsim --a src.vec --b tgt.vec --top-n 200 --out spectral.txt" + fixed},
      {"train-lm", "train-lm --corpus target.txt --out lm.arpa --order 3 --eval test.ref.txt" + fixed},
      {"translate", "translate --src src.vec --tgt tgt.vec --mapping map.txt --text test.src.txt --lm lm.arpa "
                    "--out hyp.txt --reference test.ref.txt" + fixed},
      {"corrupt", "denoise --corrupt --input test.ref.txt --out noisy.txt --pairs pairs.tsv" + fixed},
      {"denoise", "denoise --input noisy.txt --lm lm.arpa --out clean.txt --reference test.ref.txt" + fixed},
      {"bleu", "bleu --hyp hyp.txt --ref test.ref.txt"},
      {"run", "run --config experiment.cfg --out run" + fixed},
  };
  std::vector<std::map<std::string, std::string>> snaps;
  for (const char* tag : {"a", "b"}) {
    const fs::path dir = ctx.work / "cli_determinism" / tag;
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const auto& [name, args] : commands) {
      const std::string cmd = "cd '" + dir.string() + "' && '" + ctx.cli.string() + "' " + args + " > " + name +
                              ".out 2> " + name + ".err";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) return {false, "command '" + name + "' failed with status " + std::to_string(rc)};
    }
    snaps.push_back(snapshot(dir));
  }
  std::vector<std::string> differing;
  for (const auto& [file, bytes] : snaps[0]) {
    const auto it = snaps[1].find(file);
    if (it == snaps[1].end() || it->second != bytes) differing.push_back(file);
  }
  if (snaps[1].size() != snaps[0].size()) differing.push_back("(file sets differ)");
  std::string detail = std::to_string(commands.size()) + " commands, " + std::to_string(snaps[0].size()) +
                       " files compared";
  for (const auto& f : differing) detail += ", differs: " + f;
  return {differing.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.work = fs::temp_directory_path() / "monost_acceptance";
  ctx.data = MONOST_TEST_DATA_DIR;
  ctx.cli = MONOST_CLI_PATH;
  std::vector<int> only;
  bool keep = false;
  std::string log_level = "error";

  CLI::App app{"Acceptance checks; one PASS/FAIL line per criterion"};
  app.add_option("--work", ctx.work, "Scratch directory")->capture_default_str();
  app.add_option("--data", ctx.data, "Reference data directory")->capture_default_str();
  app.add_option("--cli", ctx.cli, "monost executable")->capture_default_str();
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--seeds", ctx.seeds, "Seeds for the pipeline criterion")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--keep", keep, "Keep the scratch directory");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));
  ctx.work = fs::absolute(ctx.work);
  fs::create_directories(ctx.work);

  const std::vector<std::pair<std::string, std::function<Verdict(const Context&)>>> criteria{
      {"procrustes exactness", procrustes_exactness},
      {"cipher benchmark", cipher_benchmark},
      {"eigenvector similarity", eigenvector_metric},
      {"decoder reductions", decoder_reductions},
      {"pipeline monotonicity", pipeline_monotonicity},
      {"language model", lm_correctness},
      {"bleu", bleu_correctness},
      {"denoiser", denoiser_improvement},
      {"determinism", cli_determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Verdict v;
    const Stopwatch sw;
    try {
      v = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << "criterion " << id << " (" << criteria[i].first << "): " << (v.pass ? "PASS" : "FAIL") << "  "
              << v.detail << "  [" << num(sw.seconds(), 4) << " s]" << std::endl;
  }
  if (!keep) fs::remove_all(ctx.work);
  return failed == 0 ? 0 : 1;
}
