#include "monost/diagnostics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "monost/error.hpp"

namespace monost {

Eigen::MatrixXd NeighborGraph::laplacian() const {
  Eigen::MatrixXd lap = -adjacency;
  lap.diagonal() = adjacency.rowwise().sum();
  return lap;
}

NeighborGraph build_knn_graph(const EmbeddingSpace& space, std::size_t top_n, int k) {
  if (top_n > space.size())
    throw InvalidArgument("top_n (" + std::to_string(top_n) + ") exceeds vocabulary size (" +
                          std::to_string(space.size()) + ")");
  if (k < 1 || static_cast<std::size_t>(k) >= top_n)
    throw InvalidArgument("k must satisfy 1 <= k < top_n");
  const auto n = static_cast<Eigen::Index>(top_n);
  const Matrix unit = unit_rows(space.vectors().topRows(n));
  const Matrix sim = unit * unit.transpose();

  NeighborGraph g;
  g.k = k;
  g.nodes.assign(space.vocab().begin(), space.vocab().begin() + n);
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return sim(i, a) != sim(i, b) ? sim(i, a) > sim(i, b) : a < b;
    });
    for (int r = 0; r < k; ++r) {
      const Eigen::Index j = order[static_cast<std::size_t>(r)];
      g.adjacency(i, j) = 1.0;
      g.adjacency(j, i) = 1.0;
    }
  }
  return g;
}

std::vector<double> laplacian_spectrum(const NeighborGraph& graph) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(graph.laplacian(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("Laplacian eigen-decomposition failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  std::vector<double> out(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    out[static_cast<std::size_t>(i)] = std::max(0.0, ev(ev.size() - 1 - i));
  return out;
}

std::size_t spectrum_cutoff(const std::vector<double>& descending, double fraction) {
  const double total = std::accumulate(descending.begin(), descending.end(), 0.0);
  if (total <= 0.0) return 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < descending.size(); ++i) {
    acc += descending[i];
    if (acc >= fraction * total) return i + 1;
  }
  return descending.size();
}

SpectralReport spectral_comparison(const NeighborGraph& a, const NeighborGraph& b, double fraction) {
  SpectralReport r;
  r.eigvals_a = laplacian_spectrum(a);
  r.eigvals_b = laplacian_spectrum(b);
  r.k_star = std::min(spectrum_cutoff(r.eigvals_a, fraction), spectrum_cutoff(r.eigvals_b, fraction));
  for (std::size_t i = 0; i < r.k_star; ++i) {
    const double d = r.eigvals_a[i] - r.eigvals_b[i];
    r.similarity += d * d;
  }
  return r;
}

SpectralReport eigenvector_similarity(const EmbeddingSpace& a, const EmbeddingSpace& b, std::size_t top_n, int k) {
  return spectral_comparison(build_knn_graph(a, top_n, k), build_knn_graph(b, top_n, k));
}

std::string format_spectral_report(const SpectralReport& report) {
  std::ostringstream out;
  out.precision(12);
  out << "k_star\t" << report.k_star << '\n';
  out << "similarity\t" << report.similarity << '\n';
  auto list = [&](const char* name, const std::vector<double>& v) {
    out << name;
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ' ' : '\t') << v[i];
    out << '\n';
  };
  list("eigvals_a", report.eigvals_a);
  list("eigvals_b", report.eigvals_b);
  return out.str();
}

void write_spectral_report(const SpectralReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write spectral report: " + path.string());
  out << format_spectral_report(report);
}

}  // namespace monost
