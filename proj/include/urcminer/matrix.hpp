#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace urcminer {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  void append_row(std::span<const double> values);
  Matrix select_rows(std::span<const std::size_t> indices) const;
  Matrix select_cols(std::span<const std::size_t> indices) const;

  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Side-by-side concatenation; row counts must agree.
Matrix hconcat(const Matrix& left, const Matrix& right);

// A matrix with named columns and an id per row.
struct LabeledMatrix {
  std::vector<long long> ids;
  std::vector<std::string> columns;
  Matrix values;
};

// Reorders `m` so its columns follow `target`, matching by name. Throws
// SchemaError naming the first target column that `m` lacks.
LabeledMatrix align_columns(const LabeledMatrix& m, std::span<const std::string> target);

}  // namespace urcminer
