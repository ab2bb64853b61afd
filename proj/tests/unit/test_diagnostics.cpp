#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "monost/diagnostics.hpp"
#include "monost/error.hpp"

using namespace monost;

namespace {

// Six unit vectors 60 degrees apart: the 2-NN graph is the 6-cycle.
EmbeddingSpace hexagon() {
  Matrix m(6, 3);
  for (int i = 0; i < 6; ++i) {
    const double a = i * std::numbers::pi / 3.0;
    m.row(i) << std::cos(a), std::sin(a), 0.0;
  }
  return EmbeddingSpace(testing::numbered("h", 6), m);
}

// Two tight clusters of three: the 2-NN graph is two disjoint triangles.
EmbeddingSpace two_triangles() {
  Matrix m(6, 3);
  m << 1, 0.1, 0, 1, -0.1, 0, 1, 0, 0.1, 0.1, 1, 0, -0.1, 1, 0, 0, 1, 0.1;
  return EmbeddingSpace(testing::numbered("t", 6), m);
}

void check_spectrum(const std::vector<double>& got, const std::vector<double>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
}

}  // namespace

TEST_CASE("hexagon graph is the 6-cycle") {
  const auto g = build_knn_graph(hexagon(), 6, 2);
  for (int i = 0; i < 6; ++i) {
    CHECK(g.adjacency.row(i).sum() == 2.0);
    CHECK(g.adjacency(i, (i + 1) % 6) == 1.0);
    CHECK(g.adjacency(i, i) == 0.0);
  }
  CHECK((g.adjacency - g.adjacency.transpose()).norm() == 0.0);
  // 2 - 2 cos(2 pi j / 6)
  check_spectrum(laplacian_spectrum(g), {4, 3, 3, 1, 1, 0});
  CHECK(spectrum_cutoff(laplacian_spectrum(g)) == 4);
}

TEST_CASE("two triangles against the hexagon") {
  const auto tri = build_knn_graph(two_triangles(), 6, 2);
  check_spectrum(laplacian_spectrum(tri), {3, 3, 3, 3, 0, 0});
  CHECK(spectrum_cutoff(laplacian_spectrum(tri)) == 4);
  const auto r = eigenvector_similarity(hexagon(), two_triangles(), 6, 2);
  CHECK(r.k_star == 4);
  // (4-3)^2 + 0 + 0 + (1-3)^2
  CHECK(r.similarity == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("spectrum cutoff edge cases") {
  CHECK(spectrum_cutoff({}) == 0);
  CHECK(spectrum_cutoff({0, 0}) == 0);
  CHECK(spectrum_cutoff({5}) == 1);
  CHECK(spectrum_cutoff({9, 1}, 0.9) == 1);
  CHECK(spectrum_cutoff({9, 1}, 0.95) == 2);
}

TEST_CASE("identical spaces score exactly zero") {
  const EmbeddingSpace s(testing::numbered("w", 200), testing::gaussian_matrix(200, 16, 4));
  const auto r = eigenvector_similarity(s, s, 150, 5);
  CHECK(r.similarity == 0.0);
  CHECK(r.k_star > 0);
}

TEST_CASE("similarity is invariant to rotation") {
  const Matrix x = testing::gaussian_matrix(300, 20, 8);
  const EmbeddingSpace a(testing::numbered("w", 300), x);
  const EmbeddingSpace b(testing::numbered("w", 300), x * testing::random_orthogonal(20, 9));
  const EmbeddingSpace c(testing::numbered("w", 300), testing::gaussian_matrix(300, 20, 10));
  const auto same = eigenvector_similarity(a, b, 300, 10);
  CHECK(std::abs(same.similarity) < 1e-6);
  CHECK(eigenvector_similarity(a, c, 300, 10).similarity > 1e-3);
  // Symmetric in its arguments.
  CHECK(eigenvector_similarity(c, a, 300, 10).similarity ==
        doctest::Approx(eigenvector_similarity(a, c, 300, 10).similarity));
}

TEST_CASE("graph parameters are validated") {
  const auto s = hexagon();
  CHECK_THROWS_AS(build_knn_graph(s, 7, 2), InvalidArgument);
  CHECK_THROWS_AS(build_knn_graph(s, 6, 0), InvalidArgument);
  CHECK_THROWS_AS(build_knn_graph(s, 6, 6), InvalidArgument);
}

TEST_CASE("spectral report lists both spectra") {
  const auto r = eigenvector_similarity(hexagon(), two_triangles(), 6, 2);
  const std::string text = format_spectral_report(r);
  CHECK(text.find("k_star\t4") != std::string::npos);
  CHECK(text.find("similarity\t5") != std::string::npos);
}
