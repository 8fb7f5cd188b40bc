#ifndef FOPT_SERIES_HPP
#define FOPT_SERIES_HPP

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fopt/errors.hpp"

namespace fopt {

using cd = std::complex<double>;

// Dense bivariate power series truncated at orders (kx, ky).  Arithmetic is
// exact through the stated truncation: multiplying two series that are exact
// to (kx, ky) yields a product exact to (kx, ky), and a reciprocal of a
// series with nonzero constant term is exact likewise.  Coefficients are
// plain complex numbers; the Laplace variable enters by rebuilding the
// series at each evaluation point.
class TruncatedSeries {
 public:
  TruncatedSeries(int kx, int ky)
      : kx_(kx), ky_(ky), c_((kx + 1) * (ky + 1), cd(0.0)) {
    if (kx < 0 || ky < 0)
      throw std::invalid_argument("TruncatedSeries: negative order");
  }

  static TruncatedSeries constant(cd value, int kx, int ky) {
    TruncatedSeries s(kx, ky);
    s.at(0, 0) = value;
    return s;
  }

  int order_x() const { return kx_; }
  int order_y() const { return ky_; }

  cd& at(int i, int j) { return c_[static_cast<std::size_t>(i) * (ky_ + 1) + j]; }
  const cd& at(int i, int j) const {
    return c_[static_cast<std::size_t>(i) * (ky_ + 1) + j];
  }

  cd constant_term() const { return at(0, 0); }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  TruncatedSeries& operator*=(cd s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) {
    return a += b;
  }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) {
    return a -= b;
  }
  friend TruncatedSeries operator*(TruncatedSeries a, cd s) { return a *= s; }
  friend TruncatedSeries operator*(cd s, TruncatedSeries a) { return a *= s; }

  friend TruncatedSeries operator*(const TruncatedSeries& a,
                                   const TruncatedSeries& b) {
    a.check_same(b);
    TruncatedSeries out(a.kx_, a.ky_);
    for (int i = 0; i <= a.kx_; ++i)
      for (int j = 0; j <= a.ky_; ++j) {
        cd aij = a.at(i, j);
        if (aij == cd(0.0)) continue;
        for (int k = 0; i + k <= a.kx_; ++k)
          for (int l = 0; j + l <= a.ky_; ++l)
            out.at(i + k, j + l) += aij * b.at(k, l);
      }
    return out;
  }

  // 1 / S via the geometric expansion around the constant term.  The
  // constant term must stay away from zero by `margin`.
  TruncatedSeries reciprocal(double margin = 1e-10) const {
    cd c0 = constant_term();
    if (std::abs(c0) < margin)
      throw NumericError("TruncatedSeries::reciprocal: constant term within margin of 0");
    TruncatedSeries t = *this;
    t.at(0, 0) = cd(0.0);
    t *= cd(-1.0) / c0;  // t = -(S - c0)/c0, zero constant term
    // 1/S = (1/c0) * sum t^n, n up to total truncation degree
    int nmax = kx_ + ky_;
    TruncatedSeries acc = TruncatedSeries::constant(cd(1.0), kx_, ky_);
    for (int n = 0; n < nmax; ++n) {
      acc = acc * t;
      acc.at(0, 0) += cd(1.0);  // Horner: acc = 1 + t*acc
    }
    return acc * (cd(1.0) / c0);
  }

  // Multiply by x^j (coefficients above the truncation order fall away).
  TruncatedSeries shift_x(int j) const {
    TruncatedSeries out(kx_, ky_);
    for (int i = 0; i + j <= kx_; ++i)
      for (int l = 0; l <= ky_; ++l) out.at(i + j, l) = at(i, l);
    return out;
  }
  TruncatedSeries shift_y(int j) const {
    TruncatedSeries out(kx_, ky_);
    for (int i = 0; i <= kx_; ++i)
      for (int l = 0; l + j <= ky_; ++l) out.at(i, l + j) = at(i, l);
    return out;
  }

 private:
  void check_same(const TruncatedSeries& o) const {
    if (kx_ != o.kx_ || ky_ != o.ky_)
      throw std::invalid_argument("TruncatedSeries: mismatched orders");
  }

  int kx_, ky_;
  std::vector<cd> c_;
};

enum class SeriesAxis { X, Y };

// Inverse D-operator on one axis: the partial sum of coefficients of orders
// 0..k, returned as a series with that axis collapsed.  k = -1 gives the
// zero series; k beyond the truncation order is an error, because the
// missing coefficients would silently change the answer.
inline TruncatedSeries d_partial_sum(const TruncatedSeries& s, SeriesAxis axis,
                                     long long k) {
  if (axis == SeriesAxis::X) {
    TruncatedSeries out(0, s.order_y());
    if (k < 0) return out;
    if (k > s.order_x())
      throw NumericError("d_partial_sum: truncation order insufficient on x");
    for (int j = 0; j <= s.order_y(); ++j) {
      cd acc(0.0);
      for (int i = 0; i <= static_cast<int>(k); ++i) acc += s.at(i, j);
      out.at(0, j) = acc;
    }
    return out;
  }
  TruncatedSeries out(s.order_x(), 0);
  if (k < 0) return out;
  if (k > s.order_y())
    throw NumericError("d_partial_sum: truncation order insufficient on y");
  for (int i = 0; i <= s.order_x(); ++i) {
    cd acc(0.0);
    for (int j = 0; j <= static_cast<int>(k); ++j) acc += s.at(i, j);
    out.at(i, 0) = acc;
  }
  return out;
}

// sum_n coeff(n) * T^n for an inner series T with zero constant term;
// exact through the truncation orders because T^n has no terms of total
// degree below n.
inline TruncatedSeries compose_analytic(const std::function<cd(int)>& coeff,
                                        const TruncatedSeries& inner) {
  if (std::abs(inner.constant_term()) > 1e-14)
    throw std::invalid_argument("compose_analytic: inner constant term must be 0");
  int nmax = inner.order_x() + inner.order_y();
  TruncatedSeries acc =
      TruncatedSeries::constant(coeff(nmax), inner.order_x(), inner.order_y());
  for (int n = nmax - 1; n >= 0; --n) {
    acc = acc * inner;
    acc.at(0, 0) += coeff(n);
  }
  return acc;
}

}  // namespace fopt

#endif  // FOPT_SERIES_HPP
