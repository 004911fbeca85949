#include "readmit/matrix.hpp"

#include <algorithm>

#include "readmit/error.hpp"

namespace readmit {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw DomainError("row width mismatch in Matrix::append_row");
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

Matrix Matrix::drop_columns(std::span<const std::size_t> columns) const {
  std::vector<bool> dropped(cols_, false);
  for (std::size_t c : columns) {
    if (c >= cols_) throw DomainError("column index out of range in Matrix::drop_columns");
    dropped[c] = true;
  }
  std::size_t kept = static_cast<std::size_t>(std::count(dropped.begin(), dropped.end(), false));
  Matrix out(rows_, kept);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::size_t k = 0;
    for (std::size_t c = 0; c < cols_; ++c)
      if (!dropped[c]) out(r, k++) = (*this)(r, c);
  }
  return out;
}

}  // namespace readmit
