#include "urcminer/matrix.hpp"

#include <algorithm>
#include <map>

#include "urcminer/common.hpp"

namespace urcminer {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw ArgumentError("row width " + std::to_string(values.size()) +
                        " does not match matrix width " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> indices) const {
  Matrix out(rows_, indices.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < indices.size(); ++j) out(r, j) = (*this)(r, indices[j]);
  }
  return out;
}

Matrix hconcat(const Matrix& left, const Matrix& right) {
  if (left.rows() != right.rows()) {
    throw ArgumentError("cannot concatenate matrices with " + std::to_string(left.rows()) +
                        " and " + std::to_string(right.rows()) + " rows");
  }
  Matrix out(left.rows(), left.cols() + right.cols());
  for (std::size_t r = 0; r < left.rows(); ++r) {
    auto dst = out.row(r);
    auto l = left.row(r);
    auto rr = right.row(r);
    std::copy(l.begin(), l.end(), dst.begin());
    std::copy(rr.begin(), rr.end(), dst.begin() + static_cast<std::ptrdiff_t>(l.size()));
  }
  return out;
}

LabeledMatrix align_columns(const LabeledMatrix& m, std::span<const std::string> target) {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < m.columns.size(); ++i) index.emplace(m.columns[i], i);
  std::vector<std::size_t> order;
  for (const std::string& name : target) {
    auto it = index.find(name);
    if (it == index.end()) throw SchemaError("missing column '" + name + "'");
    order.push_back(it->second);
  }
  return LabeledMatrix{m.ids, {target.begin(), target.end()}, m.values.select_cols(order)};
}

}  // namespace urcminer
