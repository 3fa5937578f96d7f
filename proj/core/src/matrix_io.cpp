#include "sparsense/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sparsense/errors.hpp"

namespace sparsense {

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void save_matrix(const Eigen::MatrixXd& matrix, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open for writing", path.string());
  out << matrix.rows() << ' ' << matrix.cols() << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_real(matrix(i, j));
    }
    out << '\n';
  }
  if (!out) throw FileError("write failed", path.string());
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open for reading", path.string());
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    throw FileError("malformed header (expected \"M N\")", path.string());
  }
  Eigen::MatrixXd matrix(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> matrix(i, j))) {
        throw FileError("truncated matrix body", path.string());
      }
    }
  }
  return matrix;
}

void save_vector(const Eigen::VectorXd& vector, const std::filesystem::path& path) {
  save_matrix(vector, path);
}

Eigen::VectorXd load_vector(const std::filesystem::path& path) {
  const Eigen::MatrixXd matrix = load_matrix(path);
  if (matrix.cols() != 1) {
    throw FileError("expected a single-column matrix", path.string());
  }
  return matrix.col(0);
}

}  // namespace sparsense
