#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace conicnet {

/// Arbitrary-precision rational, always kept in canonical form (gcd 1,
/// positive denominator). Thin value wrapper around mpq_class so that all
/// operators return evaluated values, which is what Eigen expects of a
/// scalar type.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(int n) : v_(n) {}
  Rat(long n) : v_(n) {}
  Rat(long n, long d) : v_(n, d) { v_.canonicalize(); }
  explicit Rat(const mpq_class& v) : v_(v) { v_.canonicalize(); }
  explicit Rat(const mpz_class& n, const mpz_class& d) : v_(n, d) { v_.canonicalize(); }

  // Parses "p", "p/q" or a plain decimal like "-1.25". Returns nullopt on
  // malformed input or zero denominator.
  static std::optional<Rat> parse(std::string_view s);

  std::string str() const { return v_.get_str(); }
  double to_double() const { return v_.get_d(); }

  const mpq_class& raw() const { return v_; }
  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }

  // Exact square root when both numerator and denominator are perfect
  // squares; nullopt otherwise (including negative values).
  std::optional<Rat> sqrt_exact() const;

  friend Rat operator+(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ + b.v_)); }
  friend Rat operator-(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ - b.v_)); }
  friend Rat operator*(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ * b.v_)); }
  friend Rat operator/(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ / b.v_)); }
  Rat operator-() const { return Rat(mpq_class(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) { v_ /= o.v_; return *this; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

  friend Rat abs(const Rat& a) { return Rat(mpq_class(::abs(a.v_))); }

 private:
  mpq_class v_;
};

namespace config {
// Tolerance of the approximate backend. Defaults to 1e-9; the environment
// variable CONIC_NETS_EPS overrides the default at startup.
double epsilon();
void set_epsilon(double eps);
}  // namespace config

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rat> {
  static constexpr bool exact = true;
  static const char* backend_name() { return "exact"; }
  static bool near_zero(const Rat& x, const Rat& /*scale*/) { return x.is_zero(); }
  static bool is_zero(const Rat& x) { return x.is_zero(); }
  static Rat of(long n, long d = 1) { return Rat(n, d); }
  static double to_double(const Rat& x) { return x.to_double(); }
  static std::string str(const Rat& x) { return x.str(); }
  static std::optional<Rat> parse(std::string_view s) { return Rat::parse(s); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static const char* backend_name() { return "approx"; }
  // Scale-relative zero test: projective quantities carry no absolute scale.
  static bool near_zero(double x, double scale) {
    double s = scale < 0 ? -scale : scale;
    if (s < 1.0) s = 1.0;
    return std::abs(x) <= config::epsilon() * s;
  }
  static bool is_zero(double x) { return near_zero(x, 1.0); }
  static double of(long n, long d = 1) { return double(n) / double(d); }
  static double to_double(double x) { return x; }
  static std::string str(double x);
  static std::optional<double> parse(std::string_view s);
};

template <class S> using Vec2 = Eigen::Matrix<S, 2, 1>;
template <class S> using Vec3 = Eigen::Matrix<S, 3, 1>;
template <class S> using Vec6 = Eigen::Matrix<S, 6, 1>;
template <class S> using Mat2 = Eigen::Matrix<S, 2, 2>;
template <class S> using Mat3 = Eigen::Matrix<S, 3, 3>;

template <class S>
S norm1(const Vec3<S>& v) {
  return abs(v(0)) + abs(v(1)) + abs(v(2));
}

// Divides out the rational content and fixes the sign of the first nonzero
// entry, so exact constructions have a reproducible coefficient scale.
Vec3<Rat> reduce(const Vec3<Rat>& v);
Vec6<Rat> reduce(const Vec6<Rat>& v);
Mat3<Rat> reduce(const Mat3<Rat>& m);
Vec3<double> reduce(const Vec3<double>& v);
Vec6<double> reduce(const Vec6<double>& v);
Mat3<double> reduce(const Mat3<double>& m);

}  // namespace conicnet

namespace Eigen {
template <>
struct NumTraits<conicnet::Rat> {
  using Real = conicnet::Rat;
  using NonInteger = conicnet::Rat;
  using Nested = conicnet::Rat;
  using Literal = long;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 30,
    MulCost = 30
  };
  static inline conicnet::Rat epsilon() { return conicnet::Rat(0); }
  static inline conicnet::Rat dummy_precision() { return conicnet::Rat(0); }
  static inline int digits10() { return 0; }
};
}  // namespace Eigen
