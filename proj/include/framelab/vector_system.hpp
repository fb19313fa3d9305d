#pragma once

// A finite system of vectors in R^d, stored flat and row-major. This is the
// lingua franca of the library: frame statistics, ratio evaluation, the
// builder and the optimizer all operate on it. Coordinates are always finite;
// every mutation re-checks that invariant so downstream code never sees NaN.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "framelab/linalg.hpp"

namespace framelab {

class VectorSystem {
 public:
  /// Takes ownership of `coords`, interpreted as count = coords.size()/dim
  /// rows of length dim.
  VectorSystem(int dim, std::vector<double> coords)
      : dim_(dim), coords_(std::move(coords)) {
    if (dim_ < 1) throw std::invalid_argument("VectorSystem: dim must be >= 1");
    if (coords_.empty() || coords_.size() % static_cast<std::size_t>(dim_) != 0)
      throw std::invalid_argument(
          "VectorSystem: coordinate count " + std::to_string(coords_.size()) +
          " is not a positive multiple of dim " + std::to_string(dim_));
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (!std::isfinite(coords_[i]))
        throw std::invalid_argument("VectorSystem: non-finite coordinate at flat index " +
                                    std::to_string(i));
  }

  static VectorSystem from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("VectorSystem: no rows");
    const std::size_t d = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != d)
        throw std::invalid_argument("VectorSystem: row " + std::to_string(r) +
                                    " has length " + std::to_string(rows[r].size()) +
                                    ", expected " + std::to_string(d));
      flat.insert(flat.end(), rows[r].begin(), rows[r].end());
    }
    return VectorSystem(static_cast<int>(d), std::move(flat));
  }

  int dim() const { return dim_; }
  int count() const { return static_cast<int>(coords_.size() / static_cast<std::size_t>(dim_)); }

  std::span<const double> vec(int i) const {
    check_index(i);
    return {coords_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
  }

  /// Squared Euclidean norm of vector i.
  double norm2(int i) const { return framelab::norm2(vec(i)); }

  /// Sum of all squared norms (total energy R of the system).
  double total_norm2() const {
    const int n = count();
    return indexed_sum(static_cast<std::size_t>(n),
                       [&](std::size_t k) { return norm2(static_cast<int>(k)); });
  }

  void set_vec(int i, std::span<const double> v) {
    check_index(i);
    if (v.size() != static_cast<std::size_t>(dim_))
      throw std::invalid_argument("VectorSystem: set_vec length mismatch");
    for (double x : v)
      if (!std::isfinite(x)) throw std::invalid_argument("VectorSystem: set_vec non-finite");
    std::copy(v.begin(), v.end(), coords_.begin() + static_cast<std::size_t>(i) * dim_);
  }

  void scale_vec(int i, double factor) {
    check_index(i);
    if (!std::isfinite(factor))
      throw std::invalid_argument("VectorSystem: scale factor must be finite");
    double* p = coords_.data() + static_cast<std::size_t>(i) * dim_;
    for (int j = 0; j < dim_; ++j) p[j] *= factor;
  }

  const std::vector<double>& coords() const { return coords_; }
  std::vector<double>& mutable_coords() { return coords_; }

  friend bool operator==(const VectorSystem& a, const VectorSystem& b) {
    return a.dim_ == b.dim_ && a.coords_ == b.coords_;
  }

 private:
  void check_index(int i) const {
    if (i < 0 || i >= count())
      throw std::out_of_range("VectorSystem: vector index " + std::to_string(i) +
                              " out of range [0, " + std::to_string(count()) + ")");
  }

  int dim_;
  std::vector<double> coords_;
};

}  // namespace framelab
