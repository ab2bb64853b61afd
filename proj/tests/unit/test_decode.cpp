#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "helpers.hpp"
#include "monost/decode.hpp"
#include "monost/error.hpp"

using namespace monost;

namespace {

struct World {
  EmbeddingSpace src, tgt;
  MappingMatrix mapping;
  NGramLM lm;
};

// Random target space, source = rotated noisy copy, and a bigram LM over
// random target sentences.
World make_world(int n, int d, std::uint64_t seed) {
  World w;
  const Matrix t = unit_rows(testing::gaussian_matrix(n, d, seed));
  const Matrix r = testing::random_orthogonal(d, seed + 1);
  Matrix s = t * r + 0.3 * testing::gaussian_matrix(n, d, seed + 2);
  w.tgt = EmbeddingSpace(testing::numbered("t", n), t);
  w.src = EmbeddingSpace(testing::numbered("s", n), unit_rows(s));
  // Rows satisfy s ~ t R, so t ~ s R^T and W x = R x.
  w.mapping.W = r;

  std::vector<Sentence> text;
  Rng rng(seed + 3);
  for (int i = 0; i < 400; ++i) {
    Sentence sent;
    std::size_t prev = uniform_index(rng, static_cast<std::uint64_t>(n));
    for (int j = 0; j < 6; ++j) {
      sent.push_back("t" + std::to_string(prev));
      prev = (prev * 7 + uniform_index(rng, 3)) % static_cast<std::size_t>(n);
    }
    text.push_back(sent);
  }
  LoadOptions lo;
  lo.min_count = 1;
  w.lm = train_lm(build_corpus(text, lo), 2);
  return w;
}

UtteranceInput random_utterance(const World& w, std::size_t len, Rng& rng) {
  UtteranceInput u;
  for (std::size_t i = 0; i < len; ++i) {
    Vector v = w.src.vector(uniform_index(rng, w.src.size()));
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) += 0.2 * gaussian(rng);
    u.segments.push_back(v);
  }
  return u;
}

}  // namespace

TEST_CASE("step score formula") {
  CHECK(step_score(0.0, std::log(0.01), 0.1) == doctest::Approx(-1.1536).epsilon(1e-4));
  CHECK(step_score(0.0, std::log(0.01), 0.1) == doctest::Approx(std::log(0.5) + 0.1 * std::log(0.01)).epsilon(1e-12));
  CHECK(step_score(1.0, -5.0, 0.0) == doctest::Approx(0.0));
  CHECK(step_score(-1.0, 0.0, 0.1) == -std::numeric_limits<double>::infinity());
  // Zero LM weight ignores even an impossible LM event.
  CHECK(std::isfinite(step_score(0.5, -std::numeric_limits<double>::infinity(), 0.0)));
}

TEST_CASE("full step score uses the mapped cosine and the lm") {
  const World w = make_world(30, 8, 101);
  const Vector x = w.src.vector(4);
  const std::vector<std::string> hist{"<s>", "t3"};
  const double got = step_score(x, "t9", hist, w.lm, w.tgt, w.mapping, 0.1);
  const Vector m = w.mapping.apply(x);
  const Vector y = w.tgt.vector(9);
  const double f = m.dot(y) / (m.norm() * y.norm());
  CHECK(got == doctest::Approx(std::log((f + 1) / 2) + 0.1 * w.lm.score(hist, "t9") * std::log(10.0)));
  CHECK_THROWS_AS(step_score(x, "nope", hist, w.lm, w.tgt, w.mapping, 0.1), InvalidArgument);
}

TEST_CASE("beam 1 without lm is per-token nearest neighbour") {
  const World w = make_world(60, 12, 7);
  const Retriever retriever(w.src, w.tgt, w.mapping, 10);
  DecoderConfig cfg;
  cfg.beam_size = 1;
  cfg.lambda_lm = 0.0;
  const BeamDecoder dec(retriever, w.lm, cfg);
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = random_utterance(w, 1 + uniform_index(rng, 7), rng);
    const auto out = dec.translate(u);
    REQUIRE(out.tokens.size() == u.segments.size());
    for (std::size_t i = 0; i < u.segments.size(); ++i) {
      const auto nn = retriever.translate(u.segments[i], RetrievalMethod::kNearestNeighbor, 1);
      CHECK(out.tokens[i] == w.tgt.token(nn[0].index));
    }
  }
}

TEST_CASE("wide beam equals exhaustive search on small instances") {
  const World w = make_world(40, 10, 21);
  const Retriever retriever(w.src, w.tgt, w.mapping, 10);
  Rng rng(5);
  for (std::size_t cands = 1; cands <= 3; ++cands) {
    for (std::size_t len = 1; len <= 4; ++len) {
      for (int trial = 0; trial < 15; ++trial) {
        DecoderConfig cfg;
        cfg.lambda_lm = 0.1 + uniform01(rng);  // heavier LM weights make the search non-trivial
        cfg.candidates_per_step = cands;
        cfg.beam_size = 81;
        const BeamDecoder dec(retriever, w.lm, cfg);
        const auto u = random_utterance(w, len, rng);

        std::vector<std::vector<std::size_t>> options;
        for (const auto& seg : u.segments) {
          std::vector<std::size_t> o;
          for (const auto& c : retriever.translate(seg, cfg.method, cands)) o.push_back(c.index);
          options.push_back(o);
        }
        double best = -std::numeric_limits<double>::infinity();
        std::vector<std::size_t> idx(len, 0);
        while (true) {
          Sentence s;
          for (std::size_t i = 0; i < len; ++i) s.push_back(w.tgt.token(options[i][idx[i]]));
          best = std::max(best, dec.score_sequence(u, s));
          std::size_t p = 0;
          while (p < len && ++idx[p] == options[p].size()) idx[p++] = 0;
          if (p == len) break;
        }
        const auto out = dec.translate(u);
        CHECK(out.score == doctest::Approx(best).epsilon(1e-9));
        CHECK(dec.score_sequence(u, out.tokens) == doctest::Approx(out.score).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("decoder is deterministic and keeps utterance length") {
  const World w = make_world(50, 10, 33);
  const Retriever retriever(w.src, w.tgt, w.mapping, 10);
  const BeamDecoder dec(retriever, w.lm, DecoderConfig{});
  Rng rng(1);
  const auto u = random_utterance(w, 9, rng);
  const auto a = dec.translate(u);
  const auto b = dec.translate(u);
  CHECK(a.tokens == b.tokens);
  CHECK(a.score == b.score);
  CHECK(a.tokens.size() == 9);
  CHECK_THROWS_AS(dec.translate(UtteranceInput{}), InvalidArgument);
}

TEST_CASE("decoder configuration is validated") {
  DecoderConfig c;
  c.beam_size = 0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c = DecoderConfig{};
  c.lambda_lm = -1;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c = DecoderConfig{};
  c.candidates_per_step = 0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
}

TEST_CASE("utterance files round trip") {
  testing::TempDir dir("utt");
  std::vector<UtteranceInput> us(2);
  us[0].segments = {Vector::Constant(3, 0.25), Vector::LinSpaced(3, -1, 1)};
  us[0].labels = {"a", "b"};
  us[1].segments = {Vector::Constant(3, 1e-3)};
  us[1].labels = {"c"};
  write_utterances(us, dir / "x.utt");
  const auto back = read_utterances(dir / "x.utt");
  REQUIRE(back.size() == 2);
  CHECK(back[0].labels == us[0].labels);
  CHECK((back[0].segments[1] - us[0].segments[1]).norm() < 1e-8);
  CHECK(back[1].segments[0](2) == doctest::Approx(1e-3));
  {
    std::ofstream(dir / "bad.utt") << "2 3\na 1 2 3\n";
  }
  CHECK_THROWS_AS(read_utterances(dir / "bad.utt"), FormatError);
}
