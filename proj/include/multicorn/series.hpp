#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace multicorn {

/// Power series truncated after the x^order term. Coefficients are stored
/// lowest degree first; arithmetic between series of different order keeps
/// the smaller order.
template <typename T>
class Series {
 public:
  Series() = default;
  explicit Series(std::size_t order) : c_(order + 1, T{}) {}
  Series(std::size_t order, std::initializer_list<T> leading) : c_(order + 1, T{}) {
    std::size_t i = 0;
    for (const T& v : leading) {
      if (i > order) break;
      c_[i++] = v;
    }
  }

  static Series constant(std::size_t order, T v) {
    Series s(order);
    s.c_[0] = v;
    return s;
  }
  static Series identity(std::size_t order) {
    Series s(order);
    if (order >= 1) s.c_[1] = T{1};
    return s;
  }

  std::size_t order() const { return c_.size() - 1; }
  T& operator[](std::size_t i) { return c_[i]; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  const std::vector<T>& coefficients() const { return c_; }

  Series& operator+=(const Series& o) {
    truncate(o.order());
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Series& operator-=(const Series& o) {
    truncate(o.order());
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Series& operator+=(const T& v) {
    c_[0] += v;
    return *this;
  }
  Series& operator*=(const T& v) {
    for (auto& x : c_) x *= v;
    return *this;
  }

  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator+(Series a, const T& v) { return a += v; }
  friend Series operator*(Series a, const T& v) { return a *= v; }
  friend Series operator*(const T& v, Series a) { return a *= v; }

  friend Series operator*(const Series& a, const Series& b) {
    const std::size_t n = std::min(a.order(), b.order());
    Series r(n);
    for (std::size_t i = 0; i <= n; ++i) {
      if (a.c_[i] == T{}) continue;
      for (std::size_t j = 0; i + j <= n; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return r;
  }

  Series pow(int n) const {
    Series result = constant(order(), T{1});
    Series base = *this;
    while (n > 0) {
      if (n & 1) result = result * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return result;
  }

  /// 1/s; requires a nonzero constant term.
  Series reciprocal() const {
    assert(c_[0] != T{});
    Series r(order());
    r.c_[0] = T{1} / c_[0];
    for (std::size_t n = 1; n <= order(); ++n) {
      T acc{};
      for (std::size_t j = 1; j <= n; ++j) acc += c_[j] * r.c_[n - j];
      r.c_[n] = -acc / c_[0];
    }
    return r;
  }

  /// log(s) for s with constant term exactly 1.
  Series log1p_of_tail() const {
    // d/dx log s = s'/s
    Series deriv(order());
    for (std::size_t i = 1; i <= order(); ++i) deriv.c_[i - 1] = T(static_cast<double>(i)) * c_[i];
    Series q = deriv * reciprocal();
    Series r(order());
    for (std::size_t i = 1; i <= order(); ++i) r.c_[i] = q.c_[i - 1] / T(static_cast<double>(i));
    return r;
  }

  /// Evaluate by Horner's rule.
  T operator()(const T& x) const {
    T acc{};
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  /// Composition this(inner) where inner has zero constant term.
  Series compose(const Series& inner) const {
    const std::size_t n = std::min(order(), inner.order());
    Series r = constant(n, c_[n]);
    for (std::size_t i = n; i-- > 0;) {
      r = r * inner;
      r.c_[0] += c_[i];
    }
    return r;
  }

  /// Compositional inverse of u + a2 u^2 + ... (zero constant, unit linear term).
  Series reversion() const {
    const std::size_t n = order();
    Series g = identity(n);
    Series tail = *this;
    tail.c_[0] = T{};
    tail.c_[1] = T{};
    for (std::size_t it = 0; it < n; ++it) g = identity(n) - tail.compose(g);
    return g;
  }

 private:
  void truncate(std::size_t order) {
    if (order < this->order()) c_.resize(order + 1);
  }

  std::vector<T> c_;
};

}  // namespace multicorn
