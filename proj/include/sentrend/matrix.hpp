#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sentrend {

using Vector = std::vector<double>;

// Small dense row-major matrix. Sizes in this library are tiny (at most a
// few dozen rows), so no expression templates or blocking.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  // this * x
  Vector multiply(std::span<const double> x) const {
    Vector y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
      y[r] = acc;
    }
    return y;
  }

  // this^T * this
  Matrix gram() const {
    Matrix out(cols_, cols_);
    for (std::size_t i = 0; i < cols_; ++i)
      for (std::size_t j = i; j < cols_; ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) acc += (*this)(r, i) * (*this)(r, j);
        out(i, j) = acc;
        out(j, i) = acc;
      }
    return out;
  }

  // Reference to the raw storage, row-major.
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace sentrend
