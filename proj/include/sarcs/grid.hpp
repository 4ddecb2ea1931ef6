#ifndef SARCS_GRID_HPP
#define SARCS_GRID_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sarcs/errors.hpp"

namespace sarcs {

/// Dense row-major matrix. Rows index range (fast time), columns index
/// azimuth (pulse number) throughout this project unless stated otherwise.
template <typename T>
class Grid {
  public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    std::vector<T>& storage() { return data_; }
    const std::vector<T>& storage() const { return data_; }

    bool same_shape(const Grid& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using GridD = Grid<double>;
using GridC = Grid<std::complex<double>>;
using GridU8 = Grid<std::uint8_t>;

}  // namespace sarcs

#endif
