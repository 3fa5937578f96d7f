#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

namespace sparsense {

/// Plain-text matrix format used for debugging dumps: a header line
/// "M N" followed by M rows of N space-separated reals (row-major),
/// printed with 17 significant digits so a round trip is bit-exact.
void save_matrix(const Eigen::MatrixXd& matrix, const std::filesystem::path& path);
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);

/// Vectors are stored as M x 1 matrices.
void save_vector(const Eigen::VectorXd& vector, const std::filesystem::path& path);
Eigen::VectorXd load_vector(const std::filesystem::path& path);

/// One real rendered with 17 significant digits (%.17g).
std::string format_real(double value);

}  // namespace sparsense
