#pragma once

#include <cmath>
#include <initializer_list>
#include <map>
#include <utility>

#include "aim/linalg.hpp"
#include "aim/types.hpp"

namespace aim {

// Finitely supported sequence t_1, t_2, ... of complex flow times.
// Entries that are exactly zero are dropped, so support() is the true support.
class TimeVector {
 public:
  explicit TimeVector(int max_index = kDefaultMaxTimeIndex) : max_index_(max_index) {
    if (max_index < 1) throw Error("TimeVector: max index must be >= 1");
  }

  TimeVector(std::initializer_list<std::pair<int, Complex>> entries, int max_index = kDefaultMaxTimeIndex)
      : TimeVector(max_index) {
    for (const auto& [i, v] : entries) set(i, v);
  }

  static TimeVector zero() { return TimeVector(); }

  static TimeVector single(int index, Complex value, int max_index = kDefaultMaxTimeIndex) {
    TimeVector t(std::max(max_index, index));
    t.set(index, value);
    return t;
  }

  /// (x, y, s) in the first three slots -- the KP evaluation point.
  static TimeVector xyt(Complex x, Complex y, Complex s) {
    TimeVector t;
    t.set(1, x).set(2, y).set(3, s);
    return t;
  }

  TimeVector& set(int index, Complex value) {
    if (index < 1) throw Error("TimeVector: index must be >= 1");
    if (index > max_index_) throw Error("TimeVector: index beyond configured maximum");
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
      throw Error("TimeVector: non-finite entry");
    if (value == Complex(0.0, 0.0))
      terms_.erase(index);
    else
      terms_[index] = value;
    return *this;
  }

  Complex get(int index) const {
    const auto it = terms_.find(index);
    return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
  }

  const std::map<int, Complex>& support() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int max_index() const { return max_index_; }
  int max_support() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

  /// t - truncated Miwa vector [1/a]: subtracts a^{-i}/i for i = 1..order.
  TimeVector minus_miwa(Complex a, int order) const {
    if (a == Complex(0.0, 0.0)) throw Error("minus_miwa: a must be nonzero");
    TimeVector out(std::max(max_index_, order));
    out.terms_ = terms_;
    Complex ainv_pow(1.0, 0.0);
    for (int i = 1; i <= order; ++i) {
      ainv_pow /= a;
      out.set(i, out.get(i) - ainv_pow / static_cast<double>(i));
    }
    return out;
  }

 private:
  std::map<int, Complex> terms_;
  int max_index_;
};

/// g(W) = sum_i t_i W^i, accumulated Horner-style from the top of the support.
inline CMatrix g_eval(const CMatrix& w, const TimeVector& t) {
  require_square(w, "g_eval");
  const int n = static_cast<int>(w.rows());
  const int top = t.max_support();
  if (top == 0) return CMatrix::Zero(n, n);
  CMatrix acc = t.get(top) * identity(n);
  for (int i = top - 1; i >= 1; --i) {
    acc = acc * w;
    const Complex ti = t.get(i);
    if (ti != Complex(0.0, 0.0)) acc += ti * identity(n);
  }
  return acc * w;
}

}  // namespace aim
