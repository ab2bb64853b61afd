#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "monost/corpus.hpp"
#include "monost/embedding.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("monost_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline monost::Sentence words(const std::string& line) { return monost::split_whitespace(line); }

inline monost::Corpus corpus_of(std::initializer_list<const char*> lines) {
  std::vector<monost::Sentence> s;
  for (const char* l : lines) s.push_back(words(l));
  monost::LoadOptions lo;
  lo.min_count = 1;
  return monost::build_corpus(std::move(s), lo);
}

// Haar-distributed random orthogonal matrix.
inline monost::Matrix random_orthogonal(int d, std::uint64_t seed) {
  monost::Rng rng(seed);
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = monost::gaussian(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  for (int i = 0; i < d; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return q;
}

inline monost::Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  monost::Rng rng(seed);
  monost::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = monost::gaussian(rng);
  return m;
}

inline std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
  return v;
}

}  // namespace testing
