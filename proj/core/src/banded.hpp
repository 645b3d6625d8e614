// SPDX-License-Identifier: Apache-2.0
//
// Band LU with partial pivoting (row interchanges), LAPACK gbtrf layout:
// kl extra super-diagonals are reserved for fill-in.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace pulsectl::detail {

template <class T>
class BandedMatrix {
public:
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), a_(ld_ * n, T{}), piv_(n, 0) {}

  std::size_t size() const noexcept { return n_; }

  /// Element (i, j) with |i - j| inside the original band.
  T& operator()(std::size_t i, std::size_t j) { return a_[j * ld_ + (kl_ + ku_ + i - j)]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return a_[j * ld_ + (kl_ + ku_ + i - j)];
  }

  /// In-place factorization. Returns the smallest |pivot| relative to the
  /// largest entry seen; callers decide what counts as singular.
  double factorize() {
    double amax = 0.0;
    for (const T& v : a_) amax = std::max(amax, static_cast<double>(std::abs(v)));
    double pmin = amax > 0.0 ? amax : 1.0;
    std::size_t ju = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t km = std::min(kl_, n_ - 1 - j);
      std::size_t p = 0;
      double best = -1.0;
      for (std::size_t r = 0; r <= km; ++r) {
        const double m = std::abs(at(j + r, j));
        if (m > best) {
          best = m;
          p = r;
        }
      }
      piv_[j] = j + p;
      pmin = std::min(pmin, best);
      if (best == 0.0) continue;
      ju = std::max(ju, std::min(j + ku_ + p, n_ - 1));
      if (p != 0) {
        for (std::size_t c = j; c <= ju; ++c) std::swap(at(j, c), at(j + p, c));
      }
      const T inv = T(1) / at(j, j);
      for (std::size_t r = 1; r <= km; ++r) at(j + r, j) *= inv;
      for (std::size_t c = j + 1; c <= ju; ++c) {
        const T u = at(j, c);
        if (u == T{}) continue;
        for (std::size_t r = 1; r <= km; ++r) at(j + r, c) -= at(j + r, j) * u;
      }
    }
    return amax > 0.0 ? pmin / amax : 0.0;
  }

  /// Solves A x = b after factorize(); b is overwritten with x.
  template <class V>
  void solve(std::vector<V>& b) const {
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t p = piv_[j];
      if (p != j) std::swap(b[j], b[p]);
      const std::size_t km = std::min(kl_, n_ - 1 - j);
      for (std::size_t r = 1; r <= km; ++r) b[j + r] -= at(j + r, j) * b[j];
    }
    const std::size_t w = kl_ + ku_;
    for (std::size_t jj = n_; jj-- > 0;) {
      b[jj] /= at(jj, jj);
      const std::size_t lo = jj >= w ? jj - w : 0;
      for (std::size_t i = lo; i < jj; ++i) b[i] -= at(i, jj) * b[jj];
    }
  }

private:
  // Band storage including the fill-in rows above the original ku diagonals.
  T& at(std::size_t i, std::size_t j) { return a_[j * ld_ + (kl_ + ku_ + i - j)]; }
  const T& at(std::size_t i, std::size_t j) const { return a_[j * ld_ + (kl_ + ku_ + i - j)]; }

  std::size_t n_, kl_, ku_, ld_;
  std::vector<T> a_;
  std::vector<std::size_t> piv_;
};

/// Tridiagonal system factored once and solved many times (no pivoting;
/// intended for diagonally dominant matrices).
class TridiagonalFactor {
public:
  TridiagonalFactor() = default;
  TridiagonalFactor(std::vector<double> lower, std::vector<double> diag,
                    std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)), inv_(diag.size()) {
    const std::size_t n = diag.size();
    cprime_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = diag[i] - (i > 0 ? lower_[i] * cprime_[i - 1] : 0.0);
      inv_[i] = 1.0 / d;
      if (i + 1 < n) cprime_[i] = upper_[i] * inv_[i];
    }
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = inv_.size();
    if (n == 0) return;
    b[0] *= inv_[0];
    for (std::size_t i = 1; i < n; ++i) b[i] = (b[i] - lower_[i] * b[i - 1]) * inv_[i];
    for (std::size_t i = n - 1; i-- > 0;) b[i] -= cprime_[i] * b[i + 1];
  }

private:
  std::vector<double> lower_, upper_, inv_, cprime_;
};

}  // namespace pulsectl::detail
