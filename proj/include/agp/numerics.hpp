// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace agp {

// Activations, weights and gradients are held in double in memory. Anything
// written to disk is 32-bit.
using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  void fill(double v);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);

// y += M x
void matvec_accumulate(const Matrix& m, std::span<const double> x, std::span<double> y);
// x += M^T y
void matvec_transposed_accumulate(const Matrix& m, std::span<const double> y, std::span<double> x);
// M += scale * a b^T
void outer_accumulate(Matrix& m, std::span<const double> a, std::span<const double> b,
                      double scale = 1.0);

Matrix matmul(const Matrix& a, const Matrix& b);

double sigmoid(double z) noexcept;

// Max-subtracted softmax. Throws DimensionError on empty input.
Vector softmax(std::span<const double> logits);
double log_sum_exp(std::span<const double> v);

bool all_finite(std::span<const double> v) noexcept;

// Max over coordinates of |grad_i - fd_i| / max(1, |grad_i|), with fd_i the
// central difference of f at x using step h * max(1, |x_i|).
double check_gradient(const std::function<double(std::span<const double>)>& f,
                      std::span<const double> grad, std::span<const double> x, double h = 1e-4);

// Deterministic generator: std::mt19937_64 (its output sequence is fixed by
// the C++ standard) with hand-written mappings to reals and integers, since
// the std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);
  double normal();
  bool coin() { return (next_u64() >> 63) != 0; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

// Seed for a named sub-task: splitmix64(seed ^ fnv1a64(task)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view task);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view task, std::uint64_t index);

}  // namespace agp
