// Copyright 2026 The txc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "txc/transform.h"

#include <array>
#include <cmath>
#include <numbers>

#include "txc/error.h"

namespace txc {
namespace {

struct Basis {
  explicit Basis(int n) : n(n), c(static_cast<size_t>(n) * n) {
    for (int k = 0; k < n; ++k) {
      const double alpha = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
      for (int i = 0; i < n; ++i) {
        c[k * n + i] =
            alpha * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
      }
    }
  }
  int n;
  std::vector<double> c;  // c[k][i]
};

const Basis& GetBasis(int n) {
  static const Basis b8(8);
  static const Basis b16(16);
  if (n == 8) return b8;
  if (n == 16) return b16;
  throw Error("unsupported transform size");
}

std::vector<int> MakeZigZag(int n) {
  std::vector<int> order;
  order.reserve(static_cast<size_t>(n) * n);
  for (int s = 0; s < 2 * n - 1; ++s) {
    for (int i = 0; i <= s; ++i) {
      // Odd anti-diagonals run top to bottom, even ones bottom to top.
      const int row = (s % 2 == 1) ? i : s - i;
      const int col = s - row;
      if (row < n && col < n) order.push_back(row * n + col);
    }
  }
  return order;
}

void CheckSizes(size_t in, size_t out, int n) {
  const size_t nn = static_cast<size_t>(n) * n;
  if (in != nn || out != nn) throw Error("transform buffer size mismatch");
}

}  // namespace

void ForwardDct(std::span<const int32_t> residual, int n,
                std::span<double> coeffs) {
  CheckSizes(residual.size(), coeffs.size(), n);
  const auto& c = GetBasis(n).c;
  std::vector<double> tmp(static_cast<size_t>(n) * n);
  // tmp = R * C^T (rows), coeffs = C * tmp (columns).
  for (int r = 0; r < n; ++r) {
    for (int k = 0; k < n; ++k) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += residual[r * n + i] * c[k * n + i];
      tmp[r * n + k] = s;
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int col = 0; col < n; ++col) {
      double s = 0;
      for (int r = 0; r < n; ++r) s += c[k * n + r] * tmp[r * n + col];
      coeffs[k * n + col] = s;
    }
  }
}

void InverseDct(std::span<const double> coeffs, int n, std::span<double> out) {
  CheckSizes(coeffs.size(), out.size(), n);
  const auto& c = GetBasis(n).c;
  std::vector<double> tmp(static_cast<size_t>(n) * n);
  // tmp = C^T * X (columns), out = tmp * C (rows).
  for (int r = 0; r < n; ++r) {
    for (int col = 0; col < n; ++col) {
      double s = 0;
      for (int k = 0; k < n; ++k) s += c[k * n + r] * coeffs[k * n + col];
      tmp[r * n + col] = s;
    }
  }
  for (int r = 0; r < n; ++r) {
    for (int col = 0; col < n; ++col) {
      double s = 0;
      for (int k = 0; k < n; ++k) s += tmp[r * n + k] * c[k * n + col];
      out[r * n + col] = s;
    }
  }
}

int32_t QuantizeCoefficient(double coeff, int q) {
  return static_cast<int32_t>(std::round(coeff / q));
}

std::vector<int32_t> TransformQuantize(std::span<const int32_t> residual,
                                       int n, int q) {
  std::vector<double> coeffs(static_cast<size_t>(n) * n);
  ForwardDct(residual, n, coeffs);
  std::vector<int32_t> levels(coeffs.size());
  for (size_t i = 0; i < coeffs.size(); ++i) {
    levels[i] = QuantizeCoefficient(coeffs[i], q);
  }
  return levels;
}

std::vector<int32_t> InverseTransformQuantize(std::span<const int32_t> levels,
                                              int n, int q) {
  const size_t nn = static_cast<size_t>(n) * n;
  if (levels.size() != nn) throw Error("transform buffer size mismatch");
  std::vector<int32_t> residual(nn, 0);
  bool any = false;
  for (int32_t l : levels) any = any || l != 0;
  if (!any) return residual;
  std::vector<double> coeffs(nn);
  for (size_t i = 0; i < nn; ++i) coeffs[i] = static_cast<double>(levels[i]) * q;
  std::vector<double> out(nn);
  InverseDct(coeffs, n, out);
  for (size_t i = 0; i < nn; ++i) {
    residual[i] = static_cast<int32_t>(std::round(out[i]));
  }
  return residual;
}

std::span<const int> ZigZag(int n) {
  static const std::vector<int> z8 = MakeZigZag(8);
  static const std::vector<int> z16 = MakeZigZag(16);
  if (n == 8) return z8;
  if (n == 16) return z16;
  throw Error("unsupported transform size");
}

}  // namespace txc
