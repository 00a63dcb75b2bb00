// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include "agp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "agp/error.hpp"

namespace agp {

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot: sizes " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void matvec_accumulate(const Matrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.cols() || y.size() != m.rows()) {
    throw DimensionError("matvec: matrix " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " with x " + std::to_string(x.size()) +
                         ", y " + std::to_string(y.size()));
  }
  const std::size_t cols = m.cols();
  const double* p = m.values().data();
  for (std::size_t r = 0; r < m.rows(); ++r, p += cols) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += p[c] * x[c];
    y[r] += s;
  }
}

void matvec_transposed_accumulate(const Matrix& m, std::span<const double> y,
                                  std::span<double> x) {
  if (x.size() != m.cols() || y.size() != m.rows()) {
    throw DimensionError("matvec_transposed: matrix " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " with y " + std::to_string(y.size()) +
                         ", x " + std::to_string(x.size()));
  }
  const std::size_t cols = m.cols();
  const double* p = m.values().data();
  for (std::size_t r = 0; r < m.rows(); ++r, p += cols) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) x[c] += p[c] * yr;
  }
}

void outer_accumulate(Matrix& m, std::span<const double> a, std::span<const double> b,
                      double scale) {
  if (a.size() != m.rows() || b.size() != m.cols()) {
    throw DimensionError("outer: matrix " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " with " + std::to_string(a.size()) + "x" +
                         std::to_string(b.size()));
  }
  const std::size_t cols = m.cols();
  double* p = m.values().data();
  for (std::size_t r = 0; r < m.rows(); ++r, p += cols) {
    const double ar = scale * a[r];
    if (ar == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) p[c] += ar * b[c];
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Vector softmax(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("softmax: empty input");
  const double mx = *std::max_element(logits.begin(), logits.end());
  Vector out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) throw DimensionError("log_sum_exp: empty input");
  const double mx = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (double x : v) total += std::exp(x - mx);
  return mx + std::log(total);
}

bool all_finite(std::span<const double> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double check_gradient(const std::function<double(std::span<const double>)>& f,
                      std::span<const double> grad, std::span<const double> x, double h) {
  if (grad.size() != x.size()) {
    throw DimensionError("check_gradient: gradient has " + std::to_string(grad.size()) +
                         " entries, point has " + std::to_string(x.size()));
  }
  Vector probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    const double numeric = (up - down) / (2.0 * step);
    const double err = std::abs(grad[i] - numeric) / std::max(1.0, std::abs(grad[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return static_cast<std::size_t>(r % bound);
}

double Rng::normal() {
  // Box-Muller; one of the pair is discarded to keep the stream stateless.
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view task) {
  return splitmix64(seed ^ fnv1a64(task));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view task, std::uint64_t index) {
  return splitmix64(derive_seed(seed, task) + index);
}

}  // namespace agp
