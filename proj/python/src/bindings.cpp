#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "monost/align.hpp"
#include "monost/cli.hpp"
#include "monost/corpus.hpp"
#include "monost/decode.hpp"
#include "monost/denoise.hpp"
#include "monost/diagnostics.hpp"
#include "monost/embedding.hpp"
#include "monost/error.hpp"
#include "monost/eval.hpp"
#include "monost/lm.hpp"
#include "monost/pipeline.hpp"

namespace py = pybind11;
using namespace monost;

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

SeedDictionary to_dict(const Pairs& pairs) {
  SeedDictionary d;
  d.pairs = pairs;
  return d;
}

MappingMatrix to_mapping(const Matrix& w) {
  MappingMatrix m;
  m.W = w;
  return m;
}

py::dict bleu_dict(const BleuReport& r) {
  py::dict d;
  d["bleu"] = r.bleu;
  d["precisions"] = std::vector<double>(r.precisions.begin(), r.precisions.end());
  d["brevity_penalty"] = r.brevity_penalty;
  d["hyp_len"] = r.hyp_len;
  d["ref_len"] = r.ref_len;
  return d;
}

}  // namespace

PYBIND11_MODULE(_monost, m) {
  m.doc() = "Unsupervised cross-modal word translation toolkit";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  // ---- corpus
  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("vocab", &Corpus::vocab)
      .def_property_readonly("counts", &Corpus::counts)
      .def_property_readonly("total_tokens", &Corpus::total_tokens)
      .def("__len__", &Corpus::num_sentences)
      .def("sentence", &Corpus::sentence)
      .def("text", &Corpus::text)
      .def("count", py::overload_cast<std::string_view>(&Corpus::count, py::const_))
      .def("most_frequent", &Corpus::most_frequent);
  m.def(
      "load_corpus",
      [](const std::filesystem::path& p, bool lowercase, std::int64_t min_count) {
        return load_corpus(p, LoadOptions{lowercase, min_count});
      },
      py::arg("path"), py::arg("lowercase") = false, py::arg("min_count") = 5);
  m.def(
      "build_corpus",
      [](std::vector<Sentence> s, bool lowercase, std::int64_t min_count) {
        return build_corpus(std::move(s), LoadOptions{lowercase, min_count});
      },
      py::arg("sentences"), py::arg("lowercase") = false, py::arg("min_count") = 1);
  m.def(
      "segment",
      [](const Sentence& s, double p_split, double p_merge, std::uint64_t seed) {
        Rng rng(seed);
        return segment_sentence(s, p_split, p_merge, rng);
      },
      py::arg("tokens"), py::arg("p_split"), py::arg("p_merge"), py::arg("seed") = 0);
  m.def(
      "write_benchmark",
      [](const std::filesystem::path& out, std::int64_t tokens, std::size_t test, int vocab, std::uint64_t seed,
         double p_split, double p_merge) {
        BenchmarkSpec spec;
        spec.tokens_per_half = tokens;
        spec.test_sentences = test;
        spec.language.vocab_size = vocab;
        spec.language.seed = seed;
        spec.seed = seed;
        spec.p_split = p_split;
        spec.p_merge = p_merge;
        const auto f = write_cipher_benchmark(spec, out);
        py::dict d;
        d["source"] = f.source;
        d["target"] = f.target;
        d["test_source"] = f.test_source;
        d["test_reference"] = f.test_reference;
        d["gold_lexicon"] = f.gold_lexicon;
        d["config"] = f.config;
        return d;
      },
      py::arg("out"), py::arg("tokens") = 1'000'000, py::arg("test") = 500, py::arg("vocab") = 4000,
      py::arg("seed") = 1, py::arg("p_split") = 0.1, py::arg("p_merge") = 0.1);

  // ---- embeddings
  py::class_<EmbeddingSpace>(m, "EmbeddingSpace")
      .def(py::init<std::vector<std::string>, Matrix>(), py::arg("vocab"), py::arg("vectors"))
      .def_property_readonly("vocab", &EmbeddingSpace::vocab)
      .def_property_readonly("vectors", &EmbeddingSpace::vectors)
      .def_property_readonly("dim", &EmbeddingSpace::dim)
      .def("__len__", &EmbeddingSpace::size)
      .def("index", &EmbeddingSpace::index)
      .def("vector", &EmbeddingSpace::vector)
      .def("head", &EmbeddingSpace::head)
      .def("normalized", &normalize_for_alignment)
      .def("save", [](const EmbeddingSpace& s, const std::filesystem::path& p) { save_embeddings(s, p); })
      .def_static("load", &load_embeddings);
  m.def(
      "train_skipgram",
      [](const Corpus& c, int dim, int window, int negatives, int epochs, double lr, double subsample,
         std::uint64_t seed, int threads) {
        SkipGramConfig cfg;
        cfg.dim = dim;
        cfg.window = window;
        cfg.negatives = negatives;
        cfg.epochs = epochs;
        cfg.learning_rate = lr;
        cfg.subsample = subsample;
        cfg.seed = seed;
        cfg.threads = threads;
        py::gil_scoped_release release;
        return train_skipgram(c, cfg);
      },
      py::arg("corpus"), py::arg("dim") = 100, py::arg("window") = 5, py::arg("negatives") = 5,
      py::arg("epochs") = 5, py::arg("learning_rate") = 0.025, py::arg("subsample") = 1e-4, py::arg("seed") = 1,
      py::arg("threads") = 1);
  m.def("jitter", &jitter, py::arg("space"), py::arg("sigma"), py::arg("seed") = 1);

  // ---- alignment
  m.def(
      "procrustes",
      [](const EmbeddingSpace& s, const EmbeddingSpace& t, const Pairs& pairs) {
        return procrustes(s, t, to_dict(pairs)).W;
      },
      py::arg("src"), py::arg("tgt"), py::arg("pairs"));
  m.def(
      "self_learn",
      [](const EmbeddingSpace& s, const EmbeddingSpace& t, const std::string& init, std::size_t vocab_cutoff,
         std::vector<std::size_t> init_cutoffs, int max_iters, int csls_k, std::uint64_t seed,
         const std::optional<Pairs>& dictionary) {
        AlignConfig cfg;
        cfg.init = parse_init_method(init);
        cfg.vocab_cutoff = vocab_cutoff;
        cfg.init_cutoffs = std::move(init_cutoffs);
        cfg.max_iters = max_iters;
        cfg.csls_k = csls_k;
        cfg.seed = seed;
        if (dictionary) cfg.given = to_dict(*dictionary);
        SelfLearnResult r;
        {
          py::gil_scoped_release release;
          r = self_learn(s, t, cfg);
        }
        py::dict d;
        d["W"] = r.mapping.W;
        d["objective"] = r.objective;
        d["initial_objective"] = r.initial_objective;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        d["init_cutoff"] = r.init_cutoff;
        d["dictionary"] = r.dictionary.pairs;
        return d;
      },
      py::arg("src"), py::arg("tgt"), py::arg("init") = "unsupervised", py::arg("vocab_cutoff") = 4000,
      py::arg("init_cutoffs") = std::vector<std::size_t>{}, py::arg("max_iters") = 1000, py::arg("csls_k") = 10,
      py::arg("seed") = 1, py::arg("dictionary") = py::none());
  m.def(
      "translate_word",
      [](const Matrix& w, const Vector& v, const EmbeddingSpace& s, const EmbeddingSpace& t, const std::string& method,
         std::size_t k, int csls_k) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& c : translate_word(to_mapping(w), v, s, t, parse_retrieval_method(method), k, csls_k))
          out.emplace_back(t.token(c.index), c.score);
        return out;
      },
      py::arg("W"), py::arg("vector"), py::arg("src"), py::arg("tgt"), py::arg("method") = "csls", py::arg("k") = 1,
      py::arg("csls_k") = 10);
  m.def(
      "induce_lexicon",
      [](const Matrix& w, const EmbeddingSpace& s, const EmbeddingSpace& t, std::size_t top_n,
         const std::string& method, std::size_t k) {
        const Retriever r(s, t, to_mapping(w));
        return induce_lexicon(r, s, std::min(top_n, s.size()), parse_retrieval_method(method), k);
      },
      py::arg("W"), py::arg("src"), py::arg("tgt"), py::arg("top_n") = 2000, py::arg("method") = "csls",
      py::arg("k") = 5);
  py::class_<RankedEntry>(m, "RankedEntry")
      .def_readonly("source", &RankedEntry::source)
      .def_readonly("candidates", &RankedEntry::candidates);

  // ---- diagnostics
  m.def(
      "eigenvector_similarity",
      [](const EmbeddingSpace& a, const EmbeddingSpace& b, std::size_t top_n, int k) {
        const auto r = eigenvector_similarity(a, b, top_n, k);
        py::dict d;
        d["similarity"] = r.similarity;
        d["k_star"] = r.k_star;
        d["eigvals_a"] = r.eigvals_a;
        d["eigvals_b"] = r.eigvals_b;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("top_n") = 1000, py::arg("k") = 10);

  // ---- language model
  py::class_<NGramLM>(m, "NGramLM")
      .def_property_readonly("order", &NGramLM::order)
      .def_property_readonly("vocab", &NGramLM::vocab)
      .def_property_readonly("discounts", &NGramLM::discounts)
      .def(
          "score", [](const NGramLM& lm, const std::vector<std::string>& h, const std::string& w) { return lm.score(h, w); },
          py::arg("history"), py::arg("token"))
      .def(
          "sentence_log10", [](const NGramLM& lm, const Sentence& s) { return lm.sentence_log10(s); },
          py::arg("sentence"))
      .def(
          "perplexity", [](const NGramLM& lm, const std::vector<Sentence>& s) { return perplexity(lm, s); },
          py::arg("sentences"))
      .def("save", [](const NGramLM& lm, const std::filesystem::path& p) { save_arpa(lm, p); })
      .def_static("load", &load_arpa);
  m.def("train_lm", &train_lm, py::arg("corpus"), py::arg("order") = 5);

  // ---- decoding
  m.def(
      "decode",
      [](const EmbeddingSpace& s, const EmbeddingSpace& t, const Matrix& w, const std::optional<NGramLM>& lm,
         const std::vector<std::vector<Vector>>& utterances, double lambda_lm, std::size_t beam_size,
         std::size_t candidates, const std::string& method) {
        DecoderConfig cfg;
        cfg.lambda_lm = lambda_lm;
        cfg.beam_size = beam_size;
        cfg.candidates_per_step = candidates;
        cfg.method = parse_retrieval_method(method);
        const NGramLM model = lm ? *lm : null_lm();
        if (!lm && lambda_lm != 0.0) throw InvalidArgument("lambda_lm > 0 needs a language model");
        const Retriever r(s, t, to_mapping(w));
        const BeamDecoder dec(r, model, cfg);
        std::vector<Sentence> out;
        for (const auto& segs : utterances) {
          UtteranceInput u;
          u.segments = segs;
          out.push_back(dec.translate(u).tokens);
        }
        return out;
      },
      py::arg("src"), py::arg("tgt"), py::arg("W"), py::arg("lm"), py::arg("utterances"), py::arg("lambda_lm") = 0.1,
      py::arg("beam_size") = 10, py::arg("candidates") = 20, py::arg("method") = "nn");
  m.def("step_score", py::overload_cast<double, double, double>(&step_score), py::arg("cosine"),
        py::arg("ln_lm_prob"), py::arg("lambda_lm"));

  // ---- denoising
  m.def(
      "corrupt",
      [](const Sentence& s, const std::vector<std::string>& pool, double p_drop, double p_insert, int perm_window,
         std::size_t insert_vocab_topk, std::uint64_t seed) {
        NoiseSpec spec;
        spec.p_drop = p_drop;
        spec.p_insert = p_insert;
        spec.perm_window = perm_window;
        spec.insert_vocab_topk = insert_vocab_topk;
        spec.seed = seed;
        return corrupt(s, spec, pool);
      },
      py::arg("sentence"), py::arg("insert_vocab"), py::arg("p_drop") = 0.1, py::arg("p_insert") = 0.1,
      py::arg("perm_window") = 3, py::arg("insert_vocab_topk") = 50, py::arg("seed") = 0);
  m.def(
      "denoise",
      [](const Sentence& s, const NGramLM& lm, std::size_t beam_size, double max_edits_per_token, double cost_delete,
         double cost_insert, double cost_swap, std::size_t insert_candidates) {
        DenoiseConfig cfg;
        cfg.beam_size = beam_size;
        cfg.max_edits_per_token = max_edits_per_token;
        cfg.cost_delete = cost_delete;
        cfg.cost_insert = cost_insert;
        cfg.cost_swap = cost_swap;
        cfg.insert_candidates = insert_candidates;
        const auto r = denoise_search(s, lm, cfg);
        py::dict d;
        d["tokens"] = r.tokens;
        d["objective"] = r.objective;
        d["identity_objective"] = r.identity_objective;
        d["edits"] = r.edits;
        return d;
      },
      py::arg("sentence"), py::arg("lm"), py::arg("beam_size") = 10, py::arg("max_edits_per_token") = 0.5,
      py::arg("cost_delete") = 4.0, py::arg("cost_insert") = 4.0, py::arg("cost_swap") = 1.0,
      py::arg("insert_candidates") = 5);

  // ---- evaluation
  m.def(
      "corpus_bleu",
      [](const std::vector<Sentence>& h, const std::vector<Sentence>& r) { return bleu_dict(corpus_bleu(h, r)); },
      py::arg("hypotheses"), py::arg("references"));
  m.def(
      "precision_at_k",
      [](const std::vector<RankedEntry>& induced, const Lexicon& gold, std::size_t k) {
        return precision_at_k(induced, gold, k);
      },
      py::arg("induced"), py::arg("gold"), py::arg("k"));
  m.def("spearman", &spearman, py::arg("a"), py::arg("b"));

  // ---- experiments
  m.def(
      "run_experiment",
      [](const std::filesystem::path& config) {
        ExperimentReport r;
        {
          py::gil_scoped_release release;
          r = run_experiment(load_experiment_config(config));
        }
        return format_report(r);
      },
      py::arg("config"));
  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
