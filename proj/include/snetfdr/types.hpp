#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace snetfdr {

/// Selects the OpenMP branch or the serial reference branch of a kernel.
enum class Execution { serial, parallel };

/// Per-sensor truth or decision label.
enum class Hypothesis : std::uint8_t { null = 0, significant = 1 };

using Labels = std::vector<Hypothesis>;

/// Row-major m x d block of sensor observations.
class ObservationMatrix {
 public:
  ObservationMatrix() = default;
  ObservationMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace snetfdr
