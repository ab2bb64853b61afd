#include "monost/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "monost/error.hpp"
#include "monost/random.hpp"

namespace monost {

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> vocab, Matrix vectors)
    : vocab_(std::move(vocab)), vectors_(std::move(vectors)) {
  if (static_cast<Eigen::Index>(vocab_.size()) != vectors_.rows())
    throw InvalidArgument("embedding space needs exactly one vector per vocabulary entry");
  if (!vocab_.empty() && vectors_.cols() <= 0) throw InvalidArgument("embedding dimension must be positive");
  index_.reserve(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], i).second)
      throw InvalidArgument("duplicate token in embedding vocabulary: " + vocab_[i]);
  }
}

std::optional<std::size_t> EmbeddingSpace::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingSpace EmbeddingSpace::with_vectors(Matrix vectors) const {
  return EmbeddingSpace(vocab_, std::move(vectors));
}

EmbeddingSpace EmbeddingSpace::head(std::size_t n) const {
  n = std::min(n, vocab_.size());
  std::vector<std::string> v(vocab_.begin(), vocab_.begin() + static_cast<std::ptrdiff_t>(n));
  return EmbeddingSpace(std::move(v), vectors_.topRows(static_cast<Eigen::Index>(n)));
}

Matrix unit_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

void validate(const SkipGramConfig& cfg) {
  if (cfg.dim <= 0) throw InvalidArgument("skip-gram dim must be positive");
  if (cfg.window < 1) throw InvalidArgument("skip-gram window must be >= 1");
  if (cfg.negatives < 1) throw InvalidArgument("skip-gram negatives must be >= 1");
  if (cfg.epochs < 0) throw InvalidArgument("skip-gram epochs must be >= 0");
  if (!(cfg.learning_rate > 0.0)) throw InvalidArgument("skip-gram learning_rate must be positive");
  if (cfg.jitter_sigma < 0.0) throw InvalidArgument("jitter_sigma must be >= 0");
  if (cfg.threads < 1) throw InvalidArgument("threads must be >= 1");
}

namespace {

class SkipGramTrainer {
 public:
  SkipGramTrainer(const Corpus& corpus, const SkipGramConfig& cfg)
      : corpus_(corpus), cfg_(cfg), vocab_(corpus.vocab_size()), dim_(static_cast<std::size_t>(cfg.dim)) {
    Rng rng(derive_seed(cfg.seed, 0xE1));
    input_.resize(vocab_ * dim_);
    output_.assign(vocab_ * dim_, 0.0f);
    for (auto& x : input_) x = static_cast<float>((uniform01(rng) - 0.5) / static_cast<double>(dim_));
    build_negative_table();
    build_keep_probabilities();
  }

  void train(SkipGramStats* stats) {
    build_loss_probe();
    const std::int64_t total = corpus_.total_tokens() * cfg_.epochs;
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      run_epoch(epoch, total);
      if (stats) stats->epoch_loss.push_back(probe_loss());
    }
  }

  Matrix result() const {
    Matrix m(static_cast<Eigen::Index>(vocab_), static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < vocab_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = input_[i * dim_ + j];
    return m;
  }

 private:
  void build_negative_table() {
    double norm = 0.0;
    for (auto c : corpus_.counts()) norm += std::pow(static_cast<double>(c), 0.75);
    const std::size_t size = std::max<std::size_t>(1'000'000, vocab_ * 100);
    table_.resize(size);
    std::size_t w = 0;
    double acc = std::pow(static_cast<double>(corpus_.count(0)), 0.75) / norm;
    for (std::size_t i = 0; i < size; ++i) {
      table_[i] = static_cast<TokenId>(w);
      if (static_cast<double>(i + 1) / static_cast<double>(size) > acc && w + 1 < vocab_) {
        ++w;
        acc += std::pow(static_cast<double>(corpus_.count(static_cast<TokenId>(w))), 0.75) / norm;
      }
    }
  }

  void build_keep_probabilities() {
    keep_.assign(vocab_, 1.0);
    if (cfg_.subsample <= 0.0) return;
    const double threshold = cfg_.subsample * static_cast<double>(corpus_.total_tokens());
    for (std::size_t w = 0; w < vocab_; ++w) {
      const double c = static_cast<double>(corpus_.count(static_cast<TokenId>(w)));
      keep_[w] = std::min(1.0, (std::sqrt(c / threshold) + 1.0) * threshold / c);
    }
  }

  TokenId draw_negative(Rng& rng) const { return table_[uniform_index(rng, table_.size())]; }

  static float sigmoid(float x) {
    if (x > 30.0f) return 1.0f;
    if (x < -30.0f) return 0.0f;
    return 1.0f / (1.0f + std::exp(-x));
  }

  // One (center, context) update; returns nothing, mutates rows in place.
  void update_pair(TokenId center, TokenId context, float lr, Rng& rng, std::vector<float>& grad) {
    float* in = &input_[static_cast<std::size_t>(center) * dim_];
    std::fill(grad.begin(), grad.end(), 0.0f);
    for (int n = 0; n <= cfg_.negatives; ++n) {
      TokenId target;
      float label;
      if (n == 0) {
        target = context;
        label = 1.0f;
      } else {
        target = draw_negative(rng);
        if (target == context) continue;
        label = 0.0f;
      }
      float* out = &output_[static_cast<std::size_t>(target) * dim_];
      float dot = 0.0f;
      for (std::size_t j = 0; j < dim_; ++j) dot += in[j] * out[j];
      const float g = (label - sigmoid(dot)) * lr;
      for (std::size_t j = 0; j < dim_; ++j) grad[j] += g * out[j];
      for (std::size_t j = 0; j < dim_; ++j) out[j] += g * in[j];
    }
    for (std::size_t j = 0; j < dim_; ++j) in[j] += grad[j];
  }

  void train_range(std::size_t begin, std::size_t end, int epoch, std::uint64_t stream,
                   std::int64_t total_work, std::int64_t work_before) {
    Rng rng(derive_seed(cfg_.seed, 0x1000 + static_cast<std::uint64_t>(epoch) * 1024 + stream));
    std::vector<float> grad(dim_);
    std::vector<TokenId> kept;
    std::int64_t done = work_before;
    const float lr0 = static_cast<float>(cfg_.learning_rate);
    const auto& sentences = corpus_.sentences();
    for (std::size_t s = begin; s < end; ++s) {
      const auto& sent = sentences[s];
      done += static_cast<std::int64_t>(sent.size());
      const float progress = static_cast<float>(done) / static_cast<float>(std::max<std::int64_t>(1, total_work));
      const float lr = std::max(lr0 * 1e-4f, lr0 * (1.0f - progress));
      kept.clear();
      for (TokenId w : sent)
        if (keep_[static_cast<std::size_t>(w)] >= 1.0 || uniform01(rng) < keep_[static_cast<std::size_t>(w)])
          kept.push_back(w);
      const auto n = static_cast<std::ptrdiff_t>(kept.size());
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto span = static_cast<std::ptrdiff_t>(
            cfg_.window - static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(cfg_.window))));
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - span); j <= std::min(n - 1, i + span); ++j) {
          if (j == i) continue;
          update_pair(kept[static_cast<std::size_t>(i)], kept[static_cast<std::size_t>(j)], lr, rng, grad);
        }
      }
    }
  }

  void run_epoch(int epoch, std::int64_t total_work) {
    const std::size_t num = corpus_.num_sentences();
    const std::int64_t before = corpus_.total_tokens() * epoch;
    if (cfg_.threads <= 1) {
      train_range(0, num, epoch, 0, total_work, before);
      return;
    }
    const auto t = static_cast<std::size_t>(cfg_.threads);
    std::vector<std::thread> workers;
    for (std::size_t k = 0; k < t; ++k) {
      const std::size_t b = num * k / t, e = num * (k + 1) / t;
      // Each worker sees only its share, so progress is scaled by t to keep
      // the learning-rate schedule comparable to the sequential run.
      workers.emplace_back([=, this] {
        train_range(b, e, epoch, k, total_work / static_cast<std::int64_t>(t),
                    before / static_cast<std::int64_t>(t));
      });
    }
    for (auto& w : workers) w.join();
  }

  void build_loss_probe() {
    Rng rng(derive_seed(cfg_.seed, 0xE2));
    const auto& sentences = corpus_.sentences();
    probe_.clear();
    if (sentences.empty()) return;
    for (int i = 0; i < 2000; ++i) {
      const auto& sent = sentences[uniform_index(rng, sentences.size())];
      if (sent.size() < 2) continue;
      const std::size_t a = uniform_index(rng, sent.size());
      std::size_t b = uniform_index(rng, sent.size() - 1);
      if (b >= a) ++b;
      Probe p{sent[a], sent[b], {}};
      for (int n = 0; n < cfg_.negatives; ++n) p.negatives.push_back(draw_negative(rng));
      probe_.push_back(std::move(p));
    }
  }

  double probe_loss() const {
    if (probe_.empty()) return 0.0;
    auto dot = [&](TokenId a, TokenId b) {
      const float* x = &input_[static_cast<std::size_t>(a) * dim_];
      const float* y = &output_[static_cast<std::size_t>(b) * dim_];
      double d = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) d += static_cast<double>(x[j]) * y[j];
      return d;
    };
    auto log_sigmoid = [](double x) { return x > 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); };
    double loss = 0.0;
    for (const auto& p : probe_) {
      loss -= log_sigmoid(dot(p.center, p.context));
      for (TokenId n : p.negatives) loss -= log_sigmoid(-dot(p.center, n));
    }
    return loss / static_cast<double>(probe_.size());
  }

  struct Probe {
    TokenId center;
    TokenId context;
    std::vector<TokenId> negatives;
  };

  const Corpus& corpus_;
  SkipGramConfig cfg_;
  std::size_t vocab_;
  std::size_t dim_;
  std::vector<float> input_;
  std::vector<float> output_;
  std::vector<TokenId> table_;
  std::vector<double> keep_;
  std::vector<Probe> probe_;
};

}  // namespace

EmbeddingSpace train_skipgram(const Corpus& corpus, const SkipGramConfig& cfg, SkipGramStats* stats) {
  validate(cfg);
  if (corpus.total_tokens() == 0) throw InvalidArgument("cannot train embeddings on an empty corpus");
  if (corpus.vocab_size() < 2) throw InvalidArgument("skip-gram needs a vocabulary of at least 2 tokens");
  if (corpus.vocab_size() < static_cast<std::size_t>(cfg.negatives) + 1)
    throw InvalidArgument("vocabulary (" + std::to_string(corpus.vocab_size()) +
                          ") is smaller than negatives + 1");
  SkipGramTrainer trainer(corpus, cfg);
  trainer.train(stats);
  EmbeddingSpace space(corpus.vocab(), trainer.result());
  if (cfg.jitter_sigma > 0.0) space = jitter(space, cfg.jitter_sigma, derive_seed(cfg.seed, 0xE3));
  return space;
}

EmbeddingSpace jitter(const EmbeddingSpace& space, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw InvalidArgument("jitter sigma must be >= 0");
  if (sigma == 0.0) return space;
  Rng rng(derive_seed(seed, 0x717));
  Matrix m = space.vectors();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) += sigma * gaussian(rng);
  return space.with_vectors(std::move(m));
}

std::vector<NormalizeStep> parse_normalize_steps(std::string_view spec) {
  std::vector<NormalizeStep> steps;
  std::string item;
  std::stringstream ss{std::string(spec)};
  while (std::getline(ss, item, ',')) {
    if (item == "unit") {
      steps.push_back(NormalizeStep::kUnit);
    } else if (item == "center") {
      steps.push_back(NormalizeStep::kCenter);
    } else if (!item.empty()) {
      throw InvalidArgument("unknown normalization step: " + item);
    }
  }
  return steps;
}

EmbeddingSpace normalize(const EmbeddingSpace& space, std::span<const NormalizeStep> steps) {
  Matrix m = space.vectors();
  for (auto step : steps) {
    if (step == NormalizeStep::kUnit) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double norm = m.row(i).norm();
        if (norm == 0.0)
          throw NumericError("cannot unit-normalize zero vector of token '" +
                             space.token(static_cast<std::size_t>(i)) + "'");
        m.row(i) /= norm;
      }
    } else {
      if (m.rows() > 0) m.rowwise() -= m.colwise().mean();
    }
  }
  return space.with_vectors(std::move(m));
}

EmbeddingSpace normalize_for_alignment(const EmbeddingSpace& space) {
  static constexpr NormalizeStep kSteps[] = {NormalizeStep::kUnit, NormalizeStep::kCenter,
                                             NormalizeStep::kUnit};
  return normalize(space, kSteps);
}

void save_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write embeddings: " + path.string());
  out << space.size() << ' ' << space.dim() << '\n';
  out << std::setprecision(9);
  const Matrix& m = space.vectors();
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& tok = space.token(i);
    if (tok.empty() || std::any_of(tok.begin(), tok.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
      throw InvalidArgument("embedding token may not be empty or contain whitespace: '" + tok + "'");
    out << tok;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ' ' << m(static_cast<Eigen::Index>(i), j);
    out << '\n';
  }
  if (!out) throw IoError("error while writing embeddings: " + path.string());
}

EmbeddingSpace load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read embeddings: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": malformed header (empty file)");
  auto header = split_whitespace(line);
  long long rows = 0, cols = 0;
  try {
    if (header.size() != 2) throw std::invalid_argument("fields");
    std::size_t pos = 0;
    rows = std::stoll(header[0], &pos);
    if (pos != header[0].size()) throw std::invalid_argument("rows");
    cols = std::stoll(header[1], &pos);
    if (pos != header[1].size()) throw std::invalid_argument("cols");
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": malformed header '" + line + "', expected '|V| d'");
  }
  if (rows < 0 || cols <= 0) throw FormatError(path.string() + ": malformed header '" + line + "'");

  std::vector<std::string> vocab;
  vocab.reserve(static_cast<std::size_t>(rows));
  Matrix m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(in, line))
      throw FormatError(path.string() + ": expected " + std::to_string(rows) + " rows, found " + std::to_string(i));
    auto fields = split_whitespace(line);
    if (static_cast<long long>(fields.size()) != cols + 1)
      throw FormatError(path.string() + ":" + std::to_string(i + 2) + ": dimension mismatch, expected " +
                        std::to_string(cols) + " values, found " +
                        std::to_string(fields.empty() ? 0 : fields.size() - 1));
    vocab.push_back(fields[0]);
    for (long long j = 0; j < cols; ++j) {
      try {
        m(i, j) = std::stod(fields[static_cast<std::size_t>(j + 1)]);
      } catch (const std::exception&) {
        throw FormatError(path.string() + ":" + std::to_string(i + 2) + ": bad number '" +
                          fields[static_cast<std::size_t>(j + 1)] + "'");
      }
    }
  }
  return EmbeddingSpace(std::move(vocab), std::move(m));
}

}  // namespace monost
