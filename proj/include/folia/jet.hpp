#pragma once

// Truncated multivariate Taylor arithmetic. A Jet stores all partial
// derivatives of a smooth function at a point up to a fixed order, as
// Taylor coefficients. Arithmetic on jets propagates derivatives exactly
// (machine precision), which is what the pointwise operator formulas need.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace folia {

namespace detail {

// Enumeration of multi-indices |alpha| <= order over `dim` variables,
// graded order, plus a product table alpha+beta -> position.
class JetLayout {
public:
  JetLayout(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 1 || dim > 8) throw std::invalid_argument("jet dim out of range");
    if (order < 0 || order > 8) throw std::invalid_argument("jet order out of range");
    std::vector<int> alpha(dim, 0);
    enumerate(alpha, 0, 0);
    const int n = static_cast<int>(indices_.size());
    prod_.assign(static_cast<std::size_t>(n) * n, -1);
    std::vector<int> sum(dim);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        int total = 0;
        for (int d = 0; d < dim; ++d) {
          sum[d] = indices_[i][d] + indices_[j][d];
          total += sum[d];
        }
        if (total <= order) prod_[static_cast<std::size_t>(i) * n + j] = position(sum);
      }
    }
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<int>& index(int pos) const { return indices_[pos]; }

  int position(const std::vector<int>& alpha) const {
    auto it = pos_.find(key(alpha));
    return it == pos_.end() ? -1 : it->second;
  }

  int product_position(int i, int j) const {
    return prod_[static_cast<std::size_t>(i) * indices_.size() + j];
  }

  static const JetLayout& get(int dim, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{dim, order}];
    if (!slot) slot = std::make_unique<JetLayout>(dim, order);
    return *slot;
  }

private:
  void enumerate(std::vector<int>& alpha, int from, int total) {
    if (from == dim_) {
      pos_[key(alpha)] = static_cast<int>(indices_.size());
      indices_.push_back(alpha);
      return;
    }
    for (int k = 0; total + k <= order_; ++k) {
      alpha[from] = k;
      enumerate(alpha, from + 1, total + k);
    }
    alpha[from] = 0;
  }

  static std::uint64_t key(const std::vector<int>& alpha) {
    std::uint64_t k = 0;
    for (int a : alpha) k = (k << 8) | static_cast<std::uint64_t>(a & 0xff);
    return k;
  }

  int dim_;
  int order_;
  std::vector<std::vector<int>> indices_;
  std::map<std::uint64_t, int> pos_;
  std::vector<int> prod_;
};

inline double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

}  // namespace detail

class Jet {
public:
  Jet() : Jet(1, 0, 0.0) {}

  Jet(int dim, int order, double value = 0.0)
      : lay_(&detail::JetLayout::get(dim, order)), c_(lay_->size(), 0.0) {
    c_[0] = value;
  }

  static Jet constant(int dim, int order, double value) { return Jet(dim, order, value); }

  static Jet variable(int dim, int order, int var, double value) {
    Jet j(dim, order, value);
    if (order >= 1) {
      std::vector<int> alpha(dim, 0);
      alpha[var] = 1;
      j.c_[j.lay_->position(alpha)] = 1.0;
    }
    return j;
  }

  int dim() const { return lay_->dim(); }
  int order() const { return lay_->order(); }
  double value() const { return c_[0]; }

  // d^alpha f at the base point.
  double partial(const std::vector<int>& alpha) const {
    int pos = lay_->position(alpha);
    if (pos < 0) throw std::invalid_argument("partial beyond jet order");
    double fact = 1.0;
    for (int a : alpha) fact *= detail::factorial(a);
    return c_[pos] * fact;
  }

  Jet truncated(int new_order) const {
    if (new_order >= order()) return *this;
    Jet r(dim(), new_order);
    for (int pos = 0; pos < r.lay_->size(); ++pos)
      r.c_[pos] = c_[lay_->position(r.lay_->index(pos))];
    return r;
  }

  // Partial derivative as a jet one order lower.
  Jet deriv(int var) const {
    if (order() == 0) throw std::invalid_argument("cannot differentiate order-0 jet");
    Jet r(dim(), order() - 1);
    for (int pos = 0; pos < r.lay_->size(); ++pos) {
      std::vector<int> alpha = r.lay_->index(pos);
      alpha[var] += 1;
      r.c_[pos] = c_[lay_->position(alpha)] * alpha[var];
    }
    return r;
  }

  Jet& operator+=(const Jet& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, const Jet& a) { return (a * -1.0) + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator-(const Jet& a) { return a * -1.0; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_same(b);
    Jet r(a.dim(), a.order());
    const int n = a.lay_->size();
    for (int i = 0; i < n; ++i) {
      if (a.c_[i] == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        int pos = a.lay_->product_position(i, j);
        if (pos >= 0) r.c_[pos] += a.c_[i] * b.c_[j];
      }
    }
    return r;
  }

  // Composition g(f): series[k] must hold g^{(k)}(f.value())/k!.
  Jet compose(const std::vector<double>& series) const {
    Jet p = *this;
    p.c_[0] = 0.0;
    Jet r(dim(), order(), series[0]);
    Jet pk(dim(), order(), 1.0);
    for (int k = 1; k <= order() && k < static_cast<int>(series.size()); ++k) {
      pk = pk * p;
      r += pk * series[k];
    }
    return r;
  }

private:
  void check_same(const Jet& o) const {
    if (lay_ != o.lay_) throw std::invalid_argument("jet shape mismatch");
  }

  const detail::JetLayout* lay_;
  std::vector<double> c_;
};

inline Jet sin(const Jet& f) {
  double a = f.value();
  std::vector<double> s(f.order() + 1);
  const double sa = std::sin(a), ca = std::cos(a);
  const double cyc[4] = {sa, ca, -sa, -ca};
  for (int k = 0; k <= f.order(); ++k) s[k] = cyc[k % 4] / detail::factorial(k);
  return f.compose(s);
}

inline Jet cos(const Jet& f) {
  double a = f.value();
  std::vector<double> s(f.order() + 1);
  const double sa = std::sin(a), ca = std::cos(a);
  const double cyc[4] = {ca, -sa, -ca, sa};
  for (int k = 0; k <= f.order(); ++k) s[k] = cyc[k % 4] / detail::factorial(k);
  return f.compose(s);
}

inline Jet exp(const Jet& f) {
  std::vector<double> s(f.order() + 1);
  const double ea = std::exp(f.value());
  for (int k = 0; k <= f.order(); ++k) s[k] = ea / detail::factorial(k);
  return f.compose(s);
}

inline Jet log(const Jet& f) {
  double a = f.value();
  if (a <= 0.0) throw std::domain_error("log of non-positive jet");
  std::vector<double> s(f.order() + 1);
  s[0] = std::log(a);
  for (int k = 1; k <= f.order(); ++k)
    s[k] = ((k % 2 == 1) ? 1.0 : -1.0) / (k * std::pow(a, k));
  return f.compose(s);
}

inline Jet sqrt(const Jet& f) {
  double a = f.value();
  if (a <= 0.0) throw std::domain_error("sqrt of non-positive jet");
  std::vector<double> s(f.order() + 1);
  double coeff = std::sqrt(a);
  double e = 0.5;
  s[0] = coeff;
  for (int k = 1; k <= f.order(); ++k) {
    coeff *= e / (k * a);
    s[k] = coeff;
    e -= 1.0;
  }
  return f.compose(s);
}

inline Jet inv(const Jet& f) {
  double a = f.value();
  if (a == 0.0) throw std::domain_error("reciprocal of zero jet");
  std::vector<double> s(f.order() + 1);
  double coeff = 1.0 / a;
  for (int k = 0; k <= f.order(); ++k) {
    s[k] = coeff;
    coeff *= -1.0 / a;
  }
  return f.compose(s);
}

inline Jet pow(const Jet& f, int n) {
  if (n == 0) return Jet(f.dim(), f.order(), 1.0);
  Jet base = n > 0 ? f : inv(f);
  int e = n > 0 ? n : -n;
  Jet r = base;
  for (int k = 1; k < e; ++k) r = r * base;
  return r;
}

}  // namespace folia
