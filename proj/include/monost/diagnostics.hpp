#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "monost/embedding.hpp"

namespace monost {

// Symmetrised k-nearest-neighbour graph (cosine) over the most frequent words.
struct NeighborGraph {
  std::vector<std::string> nodes;
  Eigen::MatrixXd adjacency;  // symmetric 0/1, zero diagonal
  int k = 0;

  Eigen::MatrixXd laplacian() const;  // D - A
};

NeighborGraph build_knn_graph(const EmbeddingSpace& space, std::size_t top_n, int k);

// Laplacian eigenvalues sorted descending (non-negative up to round-off,
// which is clamped to zero).
std::vector<double> laplacian_spectrum(const NeighborGraph& graph);

// Smallest k' such that the k' largest eigenvalues sum to at least
// `fraction` of the total.
std::size_t spectrum_cutoff(const std::vector<double>& descending, double fraction = 0.9);

struct SpectralReport {
  std::size_t k_star = 0;
  std::vector<double> eigvals_a;
  std::vector<double> eigvals_b;
  double similarity = 0.0;  // sum_{i < k_star} (a_i - b_i)^2; larger = less alike
};

// Squared difference of the leading Laplacian eigenvalues of the two spaces'
// kNN graphs. Defaults: top_n = 1000, k = 10.
SpectralReport eigenvector_similarity(const EmbeddingSpace& a, const EmbeddingSpace& b,
                                      std::size_t top_n = 1000, int k = 10);

// Same computation from two graphs built elsewhere.
SpectralReport spectral_comparison(const NeighborGraph& a, const NeighborGraph& b, double fraction = 0.9);

// Structured text: k_star, similarity, then both spectra.
void write_spectral_report(const SpectralReport& report, const std::filesystem::path& path);
std::string format_spectral_report(const SpectralReport& report);

}  // namespace monost
