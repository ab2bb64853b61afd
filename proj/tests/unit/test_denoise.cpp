#include <doctest.h>

#include <cmath>
#include <fstream>

#include "helpers.hpp"
#include "monost/denoise.hpp"
#include "monost/error.hpp"

using namespace monost;
using testing::corpus_of;
using testing::words;

namespace {

NGramLM lm_from(std::initializer_list<const char*> lines, int order, int repeat = 1) {
  std::vector<Sentence> text;
  for (int r = 0; r < repeat; ++r)
    for (const char* l : lines) text.push_back(split_whitespace(l));
  LoadOptions lo;
  lo.min_count = 1;
  return train_lm(build_corpus(text, lo), order);
}

NoiseSpec quiet() {
  NoiseSpec s;
  s.p_drop = 0.0;
  s.p_insert = 0.0;
  s.perm_window = 1;
  return s;
}

const std::vector<std::string> kPool{"x", "y", "z"};

}  // namespace

TEST_CASE("zero noise is the identity") {
  const Sentence s = testing::numbered("w", 30);
  Rng rng(3);
  CHECK(corrupt(s, quiet(), kPool, rng) == s);
  CHECK(corrupt(Sentence{}, NoiseSpec{}, kPool).empty());
}

TEST_CASE("p_drop = 1 deletes everything") {
  NoiseSpec s = quiet();
  s.p_drop = 1.0;
  s.p_insert = 1.0;  // nothing left to insert after
  Rng rng(1);
  CHECK(corrupt(testing::numbered("w", 20), s, kPool, rng).empty());
}

TEST_CASE("drop count follows the binomial") {
  NoiseSpec s = quiet();
  s.p_drop = 0.1;
  Rng rng(11);
  const Sentence sent = testing::numbered("w", 100);
  std::size_t kept = 0;
  for (int i = 0; i < 100; ++i) kept += corrupt(sent, s, kPool, rng).size();
  // 10k trials, sd = sqrt(10000 * 0.1 * 0.9) = 30
  CHECK(std::abs(static_cast<double>(kept) - 9000.0) <= 90.0);
}

TEST_CASE("insertions come from the top of the pool") {
  NoiseSpec s = quiet();
  s.p_insert = 1.0;
  s.insert_vocab_topk = 2;
  Rng rng(2);
  const Sentence out = corrupt(words("a b c"), s, kPool, rng);
  REQUIRE(out.size() == 6);
  for (std::size_t i = 0; i < 6; i += 2) CHECK(out[i] == words("a b c")[i / 2]);
  for (std::size_t i = 1; i < 6; i += 2) CHECK((out[i] == "x" || out[i] == "y"));
}

TEST_CASE("permutation displacement is bounded and matches the offset model") {
  NoiseSpec s = quiet();
  s.perm_window = 3;
  const std::size_t n = 40;
  const Sentence sent = testing::numbered("w", static_cast<int>(n));
  std::size_t adjacent_inversions = 0, gap2_inversions = 0, trials = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    s.seed = seed;
    const Sentence out = corrupt(sent, s, kPool);
    REQUIRE(out.size() == n);
    std::vector<std::size_t> pos(n);
    for (std::size_t p = 0; p < n; ++p) pos[std::stoul(out[p].substr(1))] = p;
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(static_cast<long>(pos[i]) - static_cast<long>(i)) <= 2);
    for (std::size_t i = 0; i + 1 < n; ++i) adjacent_inversions += pos[i + 1] < pos[i];
    for (std::size_t i = 0; i + 2 < n; ++i) gap2_inversions += pos[i + 2] < pos[i];
    trials += 1;
  }
  // Items d apart invert iff U_i - U_{i+d} > d/w: probability (1 - d/w)^2 / 2.
  auto within_4sd = [](std::size_t hits, std::size_t m, double p) {
    const double sd = std::sqrt(static_cast<double>(m) * p * (1 - p));
    return std::abs(static_cast<double>(hits) - p * static_cast<double>(m)) <= 4 * sd;
  };
  CHECK(within_4sd(adjacent_inversions, trials * (n - 1), 2.0 / 9.0));
  CHECK(within_4sd(gap2_inversions, trials * (n - 2), 1.0 / 18.0));
}

TEST_CASE("corruption is reproducible from its seed") {
  NoiseSpec s;
  s.seed = 42;
  const Sentence sent = testing::numbered("w", 50);
  CHECK(corrupt(sent, s, kPool) == corrupt(sent, s, kPool));
  s.seed = 43;
  const Sentence other = corrupt(sent, s, kPool);
  s.seed = 42;
  CHECK(other != corrupt(sent, s, kPool));
}

TEST_CASE("noise and denoiser settings are validated") {
  NoiseSpec s;
  s.p_drop = 1.5;
  CHECK_THROWS_AS(validate(s), InvalidArgument);
  s = NoiseSpec{};
  s.perm_window = 0;
  CHECK_THROWS_AS(validate(s), InvalidArgument);
  DenoiseConfig c;
  c.cost_swap = -1;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c = DenoiseConfig{};
  c.beam_size = 0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
}

TEST_CASE("pairs keep the clean side and round trip through disk") {
  const Corpus corpus = corpus_of({"a b c d", "b c d a", "c d a b"});
  NoiseSpec s;
  s.p_drop = 0.3;
  s.p_insert = 0.3;
  s.seed = 5;
  const auto pairs = make_denoise_pairs(corpus, s);
  REQUIRE(pairs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(pairs[i].clean == corpus.sentence(i));
  testing::TempDir dir("pairs");
  write_denoise_pairs(pairs, dir / "p.tsv");
  const auto back = read_denoise_pairs(dir / "p.tsv");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].clean == pairs[i].clean);
    CHECK(back[i].noisy == pairs[i].noisy);
  }
  std::ofstream(dir / "bad.tsv") << "no tab here\n";
  CHECK_THROWS_AS(read_denoise_pairs(dir / "bad.tsv"), FormatError);
}

TEST_CASE("a cheap swap repairs a transposition") {
  const NGramLM lm = lm_from({"a b c"}, 2, 5);
  DenoiseConfig cfg;
  cfg.cost_swap = 0.1;
  const auto r = denoise_search(words("b a c"), lm, cfg);
  CHECK(r.tokens == words("a b c"));
  CHECK(r.edits == 1);
  CHECK(r.objective == doctest::Approx(lm_log_prob(words("a b c"), lm) - 0.1));
}

TEST_CASE("spurious words are deleted and missing ones inserted") {
  const NGramLM lm = lm_from({"a b c d", "a b c d", "a b c d", "x"}, 2, 3);
  CHECK(denoise(words("a b x c d"), lm, DenoiseConfig{}) == words("a b c d"));
  CHECK(denoise(words("a c d"), lm, DenoiseConfig{}) == words("a b c d"));
}

TEST_CASE("zero edit budget is the identity") {
  const NGramLM lm = lm_from({"a b c"}, 2, 5);
  DenoiseConfig cfg;
  cfg.max_edits_per_token = 0.0;
  const auto r = denoise_search(words("c b a"), lm, cfg);
  CHECK(r.tokens == words("c b a"));
  CHECK(r.edits == 0);
  CHECK(r.objective == r.identity_objective);
}

TEST_CASE("unknown words survive when left in place") {
  const NGramLM lm = lm_from({"a b c"}, 2, 5);
  const auto r = denoise_search(words("a b c"), lm, DenoiseConfig{});
  CHECK(r.tokens == words("a b c"));
  CHECK(denoise(words("zzz"), lm, DenoiseConfig{}).size() <= 2);
}

TEST_CASE("the objective never falls below the unedited input") {
  const NGramLM lm = lm_from({"a b c d e", "b c d e a", "e d c b a", "a c e", "b d"}, 3, 4);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "q"};
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    Sentence s;
    const std::size_t len = 1 + uniform_index(rng, 8);
    for (std::size_t i = 0; i < len; ++i) s.push_back(vocab[uniform_index(rng, vocab.size())]);
    DenoiseConfig cfg;
    cfg.cost_delete = uniform01(rng) * 5;
    cfg.cost_insert = uniform01(rng) * 5;
    cfg.cost_swap = uniform01(rng) * 2;
    const auto r = denoise_search(s, lm, cfg);
    CHECK(r.objective >= r.identity_objective);
    CHECK(r.identity_objective == doctest::Approx(lm_log_prob(s, lm)));
    CHECK(r.edits <= static_cast<int>(std::ceil(0.5 * static_cast<double>(len))));
    // Penalties are non-negative, so the objective is bounded by the output's LM score.
    CHECK(r.objective <= lm_log_prob(r.tokens, lm) + 1e-9);
    CHECK(denoise_search(s, lm, cfg).tokens == r.tokens);
  }
}
