#include "monost/align.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

#include <Eigen/SVD>
#include <spdlog/spdlog.h>

#include "monost/error.hpp"
#include "monost/random.hpp"

namespace monost {

namespace {

using FMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FVector = Eigen::VectorXf;

// Running k largest values for each of n slots. Buffers start at -inf, so
// means() is only meaningful once every slot saw at least k values.
template <class Scalar>
class TopK {
 public:
  TopK(Eigen::Index n, Eigen::Index k)
      : k_(k), vals_(static_cast<std::size_t>(n * k), -std::numeric_limits<Scalar>::infinity()),
        min_(static_cast<std::size_t>(n), -std::numeric_limits<Scalar>::infinity()),
        argmin_(static_cast<std::size_t>(n), 0) {}

  void push(Eigen::Index slot, Scalar v) {
    const auto s = static_cast<std::size_t>(slot);
    if (!(v > min_[s])) return;
    Scalar* b = vals_.data() + s * static_cast<std::size_t>(k_);
    b[argmin_[s]] = v;
    Eigen::Index a = 0;
    for (Eigen::Index t = 1; t < k_; ++t)
      if (b[t] < b[a]) a = t;
    argmin_[s] = a;
    min_[s] = b[a];
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> means() const {
    const auto n = static_cast<Eigen::Index>(min_.size());
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar* b = vals_.data() + static_cast<std::size_t>(i * k_);
      Scalar sum = 0;
      for (Eigen::Index t = 0; t < k_; ++t) sum += b[t];
      out(i) = sum / static_cast<Scalar>(k_);
    }
    return out;
  }

 private:
  Eigen::Index k_;
  std::vector<Scalar> vals_;
  std::vector<Scalar> min_;
  std::vector<Eigen::Index> argmin_;
};

template <class Mat>
Eigen::Matrix<typename Mat::Scalar, Eigen::Dynamic, 1> row_topk_mean(const Mat& m, int k) {
  using Scalar = typename Mat::Scalar;
  const Eigen::Index rows = m.rows(), cols = m.cols();
  if (cols == 0) return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(rows);
  TopK<Scalar> top(rows, std::clamp<Eigen::Index>(k, 1, cols));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) top.push(i, m(i, j));
  return top.means();
}

FMatrix to_float(const Matrix& m) { return m.cast<float>(); }

struct Induction {
  SeedDictionary dictionary;
  double objective = 0.0;
};

// Bidirectional CSLS re-induction between mapped source rows `xw` and target
// rows `z` (both unit length). Entries are independently dropped with
// probability 1 - keep when keep < 1.
Induction induce(const FMatrix& xw, const FMatrix& z, int csls_k, double keep, Rng& rng) {
  const FMatrix sim = xw * z.transpose();
  const Eigen::Index ns = sim.rows(), nt = sim.cols();
  // r_tgt: mapped source's neighbourhood among targets; r_src: the reverse.
  TopK<float> rows(ns, std::clamp<Eigen::Index>(csls_k, 1, nt));
  TopK<float> cols(nt, std::clamp<Eigen::Index>(csls_k, 1, ns));
  for (Eigen::Index i = 0; i < ns; ++i)
    for (Eigen::Index j = 0; j < nt; ++j) {
      const float s = sim(i, j);
      rows.push(i, s);
      cols.push(j, s);
    }
  const FVector r_tgt = rows.means();
  const FVector r_src = cols.means();

  constexpr float kNegInf = -std::numeric_limits<float>::infinity();
  std::vector<float> col_best(static_cast<std::size_t>(nt), kNegInf);
  std::vector<Eigen::Index> col_arg(static_cast<std::size_t>(nt), -1);
  std::vector<Eigen::Index> row_arg(static_cast<std::size_t>(ns), -1);
  const bool dropout = keep < 1.0;
  const auto threshold = static_cast<std::uint64_t>(keep * 4294967296.0);

  for (Eigen::Index i = 0; i < ns; ++i) {
    float row_best = kNegInf;
    const float half_rt = 0.5f * r_tgt(i);
    for (Eigen::Index j = 0; j < nt; ++j) {
      const float s = sim(i, j);
      bool keep_fwd = true, keep_bwd = true;
      if (dropout) {
        const std::uint64_t r = rng();
        keep_fwd = (r & 0xffffffffULL) < threshold;
        keep_bwd = (r >> 32) < threshold;
      }
      if (keep_fwd) {
        const float v = s - 0.5f * r_src(j);
        if (v > row_best) {
          row_best = v;
          row_arg[static_cast<std::size_t>(i)] = j;
        }
      }
      if (keep_bwd) {
        const float v = s - half_rt;
        if (v > col_best[static_cast<std::size_t>(j)]) {
          col_best[static_cast<std::size_t>(j)] = v;
          col_arg[static_cast<std::size_t>(j)] = i;
        }
      }
    }
  }

  Induction out;
  auto csls = [&](Eigen::Index i, Eigen::Index j) {
    return 2.0 * sim(i, j) - static_cast<double>(r_tgt(i)) - static_cast<double>(r_src(j));
  };
  double fwd = 0.0, bwd = 0.0;
  std::size_t nf = 0, nb = 0;
  for (Eigen::Index i = 0; i < ns; ++i) {
    const Eigen::Index j = row_arg[static_cast<std::size_t>(i)];
    if (j < 0) continue;
    out.dictionary.pairs.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    fwd += csls(i, j);
    ++nf;
  }
  for (Eigen::Index j = 0; j < nt; ++j) {
    const Eigen::Index i = col_arg[static_cast<std::size_t>(j)];
    if (i < 0) continue;
    out.dictionary.pairs.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    bwd += csls(i, j);
    ++nb;
  }
  out.dictionary.weights.assign(out.dictionary.pairs.size(), 1.0);
  const double mf = nf ? fwd / static_cast<double>(nf) : 0.0;
  const double mb = nb ? bwd / static_cast<double>(nb) : 0.0;
  out.objective = 0.5 * (mf + mb);
  return out;
}

void check_same_dim(const EmbeddingSpace& src, const EmbeddingSpace& tgt) {
  if (src.dim() != tgt.dim())
    throw InvalidArgument("dimension mismatch: source d=" + std::to_string(src.dim()) +
                          ", target d=" + std::to_string(tgt.dim()));
}

}  // namespace

Vector topk_row_mean(const Matrix& m, int k) { return row_topk_mean(m, k); }

double MappingMatrix::orthogonality_error() const {
  const Matrix g = W.transpose() * W - Matrix::Identity(W.cols(), W.cols());
  return g.cwiseAbs().maxCoeff();
}

void save_mapping(const MappingMatrix& mapping, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mapping: " + path.string());
  out << mapping.W.rows() << ' ' << mapping.W.cols() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < mapping.W.rows(); ++i) {
    for (Eigen::Index j = 0; j < mapping.W.cols(); ++j) out << (j ? " " : "") << mapping.W(i, j);
    out << '\n';
  }
  if (!out) throw IoError("error while writing mapping: " + path.string());
}

MappingMatrix load_mapping(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read mapping: " + path.string());
  long long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0 || rows != cols)
    throw FormatError(path.string() + ": malformed mapping header, expected 'd d'");
  MappingMatrix m;
  m.W.resize(rows, cols);
  for (long long i = 0; i < rows; ++i)
    for (long long j = 0; j < cols; ++j)
      if (!(in >> m.W(i, j))) throw FormatError(path.string() + ": truncated mapping matrix");
  m.orthogonal = m.orthogonality_error() < 1e-5;
  return m;
}

void validate(const SeedDictionary& dict, std::size_t src_size, std::size_t tgt_size) {
  if (dict.weighted() && dict.weights.size() != dict.pairs.size())
    throw InvalidArgument("dictionary weights must match the number of pairs");
  std::vector<char> seen(src_size, 0);
  for (auto [s, t] : dict.pairs) {
    if (s >= src_size || t >= tgt_size) throw InvalidArgument("dictionary index out of range");
    if (!dict.weighted()) {
      if (seen[s]) throw InvalidArgument("duplicate source index in unweighted dictionary");
      seen[s] = 1;
    }
  }
}

SeedDictionary dictionary_from_lexicon(const Lexicon& lexicon, const EmbeddingSpace& src,
                                       const EmbeddingSpace& tgt) {
  SeedDictionary dict;
  bool duplicate = false;
  std::vector<char> seen(src.size(), 0);
  for (const auto& [s, t] : lexicon) {
    auto si = src.index(s);
    auto ti = tgt.index(t);
    if (!si || !ti) continue;
    duplicate |= seen[*si] != 0;
    seen[*si] = 1;
    dict.pairs.emplace_back(*si, *ti);
  }
  if (duplicate) dict.weights.assign(dict.pairs.size(), 1.0);
  return dict;
}

InitMethod parse_init_method(const std::string& name) {
  if (name == "unsupervised" || name == "unsupervised_similarity") return InitMethod::kUnsupervised;
  if (name == "identity") return InitMethod::kIdentity;
  if (name == "given" || name == "given_dictionary") return InitMethod::kGivenDictionary;
  throw InvalidArgument("unknown init method: " + name);
}

RetrievalMethod parse_retrieval_method(const std::string& name) {
  if (name == "nn") return RetrievalMethod::kNearestNeighbor;
  if (name == "csls") return RetrievalMethod::kCsls;
  throw InvalidArgument("unknown retrieval method: " + name + " (expected nn or csls)");
}

std::string to_string(RetrievalMethod method) {
  return method == RetrievalMethod::kNearestNeighbor ? "nn" : "csls";
}

void validate(const AlignConfig& cfg) {
  if (cfg.vocab_cutoff == 0) throw InvalidArgument("vocab_cutoff must be positive");
  if (cfg.csls_k <= 0) throw InvalidArgument("csls_k must be positive");
  if (!(cfg.stochastic_keep > 0.0) || cfg.stochastic_keep > 1.0)
    throw InvalidArgument("stochastic_keep must lie in (0, 1]");
  if (!(cfg.stochastic_multiplier > 1.0)) throw InvalidArgument("stochastic_multiplier must exceed 1");
  if (cfg.stochastic_interval <= 0) throw InvalidArgument("stochastic_interval must be positive");
  if (!(cfg.convergence_tol > 0.0)) throw InvalidArgument("convergence_tol must be positive");
  if (cfg.max_iters < 0) throw InvalidArgument("max_iters must be >= 0");
  for (std::size_t c : cfg.init_cutoffs)
    if (c == 0) throw InvalidArgument("init_cutoffs entries must be positive");
}

MappingMatrix procrustes(const EmbeddingSpace& src, const EmbeddingSpace& tgt, const SeedDictionary& dict) {
  check_same_dim(src, tgt);
  if (dict.pairs.empty()) throw InvalidArgument("procrustes needs a non-empty dictionary");
  validate(dict, src.size(), tgt.size());

  const Eigen::Index d = src.dim();
  const auto n = static_cast<Eigen::Index>(dict.pairs.size());
  Matrix xs(n, d), ys(n, d);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto [s, t] = dict.pairs[static_cast<std::size_t>(r)];
    const double w = dict.weighted() ? dict.weights[static_cast<std::size_t>(r)] : 1.0;
    xs.row(r) = w * src.vectors().row(static_cast<Eigen::Index>(s));
    ys.row(r) = tgt.vectors().row(static_cast<Eigen::Index>(t));
  }
  const Eigen::MatrixXd cross = ys.transpose() * xs;  // sum_i w_i y_i x_i^T
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().size() == 0 || svd.singularValues()(0) <= 1e-300)
    throw NumericError("degenerate (rank-0) cross-covariance in procrustes");
  MappingMatrix m;
  m.W = svd.matrixU() * svd.matrixV().transpose();
  m.orthogonal = true;
  return m;
}

SeedDictionary unsupervised_init(const EmbeddingSpace& src, const EmbeddingSpace& tgt, std::size_t cutoff,
                                 int csls_k) {
  check_same_dim(src, tgt);
  if (cutoff == 0) throw InvalidArgument("cutoff must be positive");
  if (cutoff > src.size() || cutoff > tgt.size())
    throw InvalidArgument("cutoff " + std::to_string(cutoff) + " exceeds a vocabulary size (" +
                          std::to_string(src.size()) + ", " + std::to_string(tgt.size()) + ")");
  const auto c = static_cast<Eigen::Index>(cutoff);

  // sqrt(X X^T) = U S U^T for the thin SVD X = U S V^T; rows sorted ascending.
  auto signature = [&](const Matrix& x) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(x.topRows(c)), Eigen::ComputeThinU);
    const Eigen::MatrixXd us = svd.matrixU() * svd.singularValues().asDiagonal();
    FMatrix sim = (us * svd.matrixU().transpose()).cast<float>();
    for (Eigen::Index i = 0; i < sim.rows(); ++i) std::sort(sim.row(i).data(), sim.row(i).data() + sim.cols());
    // unit, center, unit
    for (Eigen::Index i = 0; i < sim.rows(); ++i) {
      const float nrm = sim.row(i).norm();
      if (nrm > 0) sim.row(i) /= nrm;
    }
    sim.rowwise() -= sim.colwise().mean();
    for (Eigen::Index i = 0; i < sim.rows(); ++i) {
      const float nrm = sim.row(i).norm();
      if (nrm > 0) sim.row(i) /= nrm;
    }
    return sim;
  };
  const FMatrix xsig = signature(src.vectors());
  const FMatrix zsig = signature(tgt.vectors());
  Rng unused(0);
  return induce(xsig, zsig, csls_k, 1.0, unused).dictionary;
}

namespace {

// One self-learning run from a fixed initial dictionary.
SelfLearnResult refine(const EmbeddingSpace& src, const EmbeddingSpace& tgt, const AlignConfig& cfg,
                       SeedDictionary dict, std::size_t cs, std::size_t ct, std::uint64_t stream) {
  const FMatrix x_head = to_float(src.vectors().topRows(static_cast<Eigen::Index>(cs)));
  const FMatrix z_head = to_float(tgt.vectors().topRows(static_cast<Eigen::Index>(ct)));
  auto evaluate = [&](const MappingMatrix& m, double keep, Rng& rng) {
    const FMatrix xw = x_head * m.W.transpose().cast<float>();
    return induce(xw, z_head, cfg.csls_k, keep, rng);
  };

  Rng rng(derive_seed(cfg.seed, stream));
  const MappingMatrix init_mapping = procrustes(src, tgt, dict);
  const Induction init_eval = evaluate(init_mapping, 1.0, rng);

  double keep = cfg.stochastic_keep;
  double best = -std::numeric_limits<double>::infinity();
  int last_improvement = 0;
  int it = 0;
  bool converged = false;
  while (true) {
    if (it - last_improvement > cfg.stochastic_interval) {
      if (keep >= 1.0) {
        converged = true;
        break;
      }
      keep = std::min(1.0, keep * cfg.stochastic_multiplier);
      last_improvement = it;
    }
    if (it >= cfg.max_iters) break;
    const MappingMatrix m = procrustes(src, tgt, dict);
    Induction step = evaluate(m, keep, rng);
    if (step.objective - best >= cfg.convergence_tol) {
      best = step.objective;
      last_improvement = it;
    }
    dict = std::move(step.dictionary);
    ++it;
    spdlog::debug("self_learn iter {} keep {:.3f} objective {:.6f}", it, keep, best);
  }

  SelfLearnResult result;
  result.iterations = it;
  result.converged = converged;
  result.initial_objective = init_eval.objective;
  const MappingMatrix final_mapping = procrustes(src, tgt, dict);
  Induction final_eval = evaluate(final_mapping, 1.0, rng);
  if (final_eval.objective >= init_eval.objective) {
    result.mapping = final_mapping;
    result.dictionary = std::move(final_eval.dictionary);
    result.objective = final_eval.objective;
  } else {
    result.mapping = init_mapping;
    result.dictionary = init_eval.dictionary;
    result.objective = init_eval.objective;
  }
  return result;
}

}  // namespace

SelfLearnResult self_learn(const EmbeddingSpace& src, const EmbeddingSpace& tgt, const AlignConfig& cfg) {
  validate(cfg);
  check_same_dim(src, tgt);
  const std::size_t cs = std::min(cfg.vocab_cutoff, src.size());
  const std::size_t ct = std::min(cfg.vocab_cutoff, tgt.size());
  if (cs == 0 || ct == 0) throw InvalidArgument("self_learn needs non-empty spaces");

  auto run = [&](SeedDictionary dict, std::size_t init_cutoff, std::uint64_t stream, const AlignConfig& c) {
    if (dict.pairs.empty()) throw InvalidArgument("initial dictionary is empty");
    SelfLearnResult r = refine(src, tgt, c, std::move(dict), cs, ct, stream);
    r.init_cutoff = init_cutoff;
    return r;
  };

  // Objective of a mapping over the top ns source and nt target words.
  auto objective_at = [&](const MappingMatrix& m, std::size_t ns, std::size_t nt, SeedDictionary* dict) {
    const FMatrix xw = to_float(src.vectors().topRows(static_cast<Eigen::Index>(ns))) * m.W.transpose().cast<float>();
    Rng unused(0);
    Induction ind = induce(xw, to_float(tgt.vectors().topRows(static_cast<Eigen::Index>(nt))), cfg.csls_k, 1.0, unused);
    if (dict) *dict = std::move(ind.dictionary);
    return ind.objective;
  };

  SelfLearnResult best;
  switch (cfg.init) {
    case InitMethod::kUnsupervised: {
      std::vector<std::size_t> cutoffs = cfg.init_cutoffs;
      if (cutoffs.empty()) cutoffs.push_back(cfg.vocab_cutoff);
      for (auto& c : cutoffs) c = std::min({c, src.size(), tgt.size()});
      if (cutoffs.size() == 1) {
        best = run(unsupervised_init(src, tgt, cutoffs[0], cfg.csls_k), cutoffs[0], 0xA11, cfg);
        break;
      }
      // Each candidate self-learns over its own vocabulary; the mappings are
      // compared on the smallest one, and the winner is refined over
      // vocab_cutoff words without dropout.
      const std::size_t common = std::min(*std::min_element(cutoffs.begin(), cutoffs.end()), std::min(cs, ct));
      double top = -std::numeric_limits<double>::infinity();
      std::size_t pick = 0;
      MappingMatrix winner;
      for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        SeedDictionary dict = unsupervised_init(src, tgt, cutoffs[i], cfg.csls_k);
        if (dict.pairs.empty()) throw InvalidArgument("initial dictionary is empty");
        const std::size_t own = std::min(cutoffs[i], std::min(cs, ct));
        const SelfLearnResult r = refine(src, tgt, cfg, std::move(dict), own, own, derive_seed(0xA11, i));
        const double obj = objective_at(r.mapping, common, common, nullptr);
        spdlog::info("self_learn init cutoff {}: objective {:.6f} on the top {} words after {} iterations", cutoffs[i],
                     obj, common, r.iterations);
        if (obj > top) {
          top = obj;
          pick = i;
          winner = r.mapping;
        }
      }
      SeedDictionary dict;
      objective_at(winner, cs, ct, &dict);
      AlignConfig polish = cfg;
      polish.stochastic_keep = 1.0;
      best = run(std::move(dict), cutoffs[pick], 0xA11, polish);
      break;
    }
    case InitMethod::kIdentity: {
      SeedDictionary dict;
      for (std::size_t i = 0; i < std::min(cs, ct); ++i) dict.pairs.emplace_back(i, i);
      best = run(std::move(dict), 0, 0xA11, cfg);
      break;
    }
    case InitMethod::kGivenDictionary:
      best = run(cfg.given, 0, 0xA11, cfg);
      break;
  }
  if (!best.converged) spdlog::warn("self_learn stopped at max_iters={} before convergence", cfg.max_iters);
  return best;
}

Retriever::Retriever(const EmbeddingSpace& src, const EmbeddingSpace& tgt, MappingMatrix mapping, int csls_k)
    : tgt_(tgt), mapping_(std::move(mapping)), csls_k_(csls_k) {
  check_same_dim(src, tgt);
  if (mapping_.W.rows() != tgt.dim() || mapping_.W.cols() != src.dim())
    throw InvalidArgument("mapping dimension does not match the embedding spaces");
  if (csls_k <= 0) throw InvalidArgument("csls_k must be positive");
  tgt_unit_ = unit_rows(tgt.vectors());
  const Matrix src_mapped = unit_rows(mapping_.apply_rows(src.vectors()));
  r_src_.resize(tgt_unit_.rows());
  constexpr Eigen::Index kBlock = 512;
  for (Eigen::Index b = 0; b < tgt_unit_.rows(); b += kBlock) {
    const Eigen::Index len = std::min(kBlock, tgt_unit_.rows() - b);
    const Matrix block = tgt_unit_.middleRows(b, len) * src_mapped.transpose();
    r_src_.segment(b, len) = row_topk_mean(block, csls_k);
  }
}

std::vector<Candidate> Retriever::rank_mapped(const Vector& mapped, RetrievalMethod method, std::size_t k) const {
  if (mapped.size() != tgt_unit_.cols()) throw InvalidArgument("query dimension does not match target space");
  const double norm = mapped.norm();
  const Vector q = norm > 0 ? Vector(mapped / norm) : mapped;
  const Vector cos = tgt_unit_ * q;
  Vector score = cos;
  if (method == RetrievalMethod::kCsls) {
    const double r_tgt = row_topk_mean(Matrix(cos.transpose()), csls_k_)(0);
    score = 2.0 * cos - r_src_ - Vector::Constant(cos.size(), r_tgt);
  }
  std::vector<std::size_t> order(static_cast<std::size_t>(score.size()));
  std::iota(order.begin(), order.end(), 0);
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double sa = score(static_cast<Eigen::Index>(a)), sb = score(static_cast<Eigen::Index>(b));
                      return sa != sb ? sa > sb : a < b;
                    });
  std::vector<Candidate> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const auto i = static_cast<Eigen::Index>(order[r]);
    out.push_back({order[r], score(i), cos(i)});
  }
  return out;
}

std::vector<Candidate> Retriever::translate(const Vector& src_vec, RetrievalMethod method, std::size_t k) const {
  if (src_vec.size() != mapping_.W.cols()) throw InvalidArgument("source vector dimension mismatch");
  return rank_mapped(mapping_.apply(src_vec), method, k);
}

std::vector<Candidate> translate_word(const MappingMatrix& mapping, const Vector& src_vec,
                                      const EmbeddingSpace& src, const EmbeddingSpace& tgt,
                                      RetrievalMethod method, std::size_t k, int csls_k) {
  return Retriever(src, tgt, mapping, csls_k).translate(src_vec, method, k);
}

RankedLexicon induce_lexicon(const Retriever& retriever, const EmbeddingSpace& src, std::size_t top_n,
                             RetrievalMethod method, std::size_t k) {
  RankedLexicon out;
  top_n = std::min(top_n, src.size());
  out.reserve(top_n);
  for (std::size_t i = 0; i < top_n; ++i) {
    RankedEntry e;
    e.source = src.token(i);
    for (const auto& c : retriever.translate(src.vector(i), method, k))
      e.candidates.emplace_back(retriever.target().token(c.index), c.score);
    out.push_back(std::move(e));
  }
  return out;
}

void write_ranked_lexicon(const RankedLexicon& lexicon, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write lexicon: " + path.string());
  out << std::setprecision(6);
  for (const auto& e : lexicon)
    for (const auto& [t, s] : e.candidates) out << e.source << '\t' << t << '\t' << s << '\n';
}

}  // namespace monost
