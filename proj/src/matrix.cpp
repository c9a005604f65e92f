#include "nntopo/matrix.hpp"

#include <string>

#include "nntopo/error.hpp"

namespace nntopo {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ValidationError("matrix of " + std::to_string(rows_) + "x" +
                          std::to_string(cols_) + " given " +
                          std::to_string(data_.size()) + " values");
  }
}

}  // namespace nntopo
