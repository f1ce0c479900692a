#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "oadmm/errors.hpp"

namespace oadmm {

/// Dense CSV: first line "n,m", then n rows of m comma-separated literals.
Eigen::MatrixXd read_csv(const std::string& path);
void write_csv(const std::string& path, const Eigen::MatrixXd& m);

/// MatrixMarket "matrix coordinate real general" (sparse input, dense result).
Eigen::MatrixXd read_matrix_market(const std::string& path);

/// rows x cols matrix of i.i.d. standard normals; bit-reproducible per seed.
Eigen::MatrixXd synth_randn(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// In-place data preparation: normalize each column to unit l2 norm, then
/// center. Standard centering subtracts the per-column mean; the literal
/// variant computes D <- D - 1 1^T D (column sums) instead.
/// Throws DegenerateColumnError on a zero column.
void prepare_columns(Eigen::MatrixXd& d, bool literal_ones_centering = false);

/// Parsed form of the dataset descriptor grammar
///   file:<path> | randn-<rows>-<cols>[:seed=<u64>]
struct DatasetDescriptor {
  enum class Kind { File, Randn } kind = Kind::Randn;
  std::string path;
  Eigen::Index rows = 0, cols = 0;
  std::uint64_t seed = 0;
  bool has_seed = false;

  static DatasetDescriptor parse(const std::string& text);
};

/// Load (or synthesize) a dataset and apply column preparation. When the
/// descriptor carries no inline seed, default_seed is used for synthesis.
Eigen::MatrixXd load_or_synthesize_data(const std::string& descriptor,
                                        std::uint64_t default_seed = 0,
                                        bool literal_ones_centering = false);

}  // namespace oadmm
