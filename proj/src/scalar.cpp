#include "conicnet/scalar.hpp"

#include <atomic>
#include <cstdlib>
#include <sstream>

namespace conicnet {

std::optional<Rat> Rat::parse(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string str(s);
  auto slash = str.find('/');
  auto dot = str.find('.');
  try {
    if (slash != std::string::npos) {
      mpz_class num(str.substr(0, slash));
      mpz_class den(str.substr(slash + 1));
      if (den == 0) return std::nullopt;
      return Rat(num, den);
    }
    if (dot != std::string::npos) {
      std::string digits = str.substr(0, dot) + str.substr(dot + 1);
      size_t frac = str.size() - dot - 1;
      mpz_class num(digits);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
      return Rat(num, den);
    }
    return Rat(mpz_class(str), mpz_class(1));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::optional<Rat> Rat::sqrt_exact() const {
  if (sign() < 0) return std::nullopt;
  mpz_class n = num(), d = den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
    return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  return Rat(rn, rd);
}

namespace config {
namespace {
double initial_epsilon() {
  if (const char* env = std::getenv("CONIC_NETS_EPS")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0) return v;
  }
  return 1e-9;
}
std::atomic<double>& eps_store() {
  static std::atomic<double> eps{initial_epsilon()};
  return eps;
}
}  // namespace

double epsilon() { return eps_store().load(); }
void set_epsilon(double eps) { eps_store().store(eps); }
}  // namespace config

std::string ScalarTraits<double>::str(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::optional<double> ScalarTraits<double>::parse(std::string_view s) {
  std::string str(s);
  auto slash = str.find('/');
  char* end = nullptr;
  if (slash != std::string::npos) {
    double num = std::strtod(str.c_str(), &end);
    if (end != str.c_str() + slash) return std::nullopt;
    double den = std::strtod(str.c_str() + slash + 1, &end);
    if (*end != '\0' || den == 0) return std::nullopt;
    return num / den;
  }
  double v = std::strtod(str.c_str(), &end);
  if (end == str.c_str() || *end != '\0') return std::nullopt;
  return v;
}

namespace {

mpz_class gcd_z(const mpz_class& a, const mpz_class& b) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

mpz_class lcm_z(const mpz_class& a, const mpz_class& b) {
  mpz_class l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

// Content of a rational vector: gcd of numerators over lcm of denominators,
// signed like the first nonzero entry.
template <int N>
Eigen::Matrix<Rat, N, 1> reduce_vec(const Eigen::Matrix<Rat, N, 1>& v) {
  mpz_class g(0), l(1);
  int lead = 0;
  for (int i = 0; i < N; ++i) {
    if (v(i).is_zero()) continue;
    if (g == 0) lead = v(i).sign();
    g = gcd_z(g, v(i).num());
    l = lcm_z(l, v(i).den());
  }
  if (g == 0) return v;
  Rat content = Rat(lead < 0 ? mpz_class(-g) : g, l);
  Eigen::Matrix<Rat, N, 1> out;
  for (int i = 0; i < N; ++i) out(i) = v(i) / content;
  return out;
}

template <int N>
Eigen::Matrix<double, N, 1> reduce_vec(const Eigen::Matrix<double, N, 1>& v) {
  double m = 0;
  int lead = 0;
  for (int i = 0; i < N; ++i) {
    if (m < std::abs(v(i))) m = std::abs(v(i));
    if (lead == 0 && v(i) != 0) lead = v(i) < 0 ? -1 : 1;
  }
  if (m == 0) return v;
  return v * (lead < 0 ? -1.0 : 1.0) / m;
}

template <class S>
Mat3<S> reduce_mat(const Mat3<S>& m) {
  Vec6<S> v;
  v << m(0, 0), m(0, 1), m(0, 2), m(1, 1), m(1, 2), m(2, 2);
  v = reduce(v);
  Mat3<S> out;
  out << v(0), v(1), v(2), v(1), v(3), v(4), v(2), v(4), v(5);
  return out;
}

}  // namespace

Vec3<Rat> reduce(const Vec3<Rat>& v) { return reduce_vec<3>(v); }
Vec6<Rat> reduce(const Vec6<Rat>& v) { return reduce_vec<6>(v); }
Mat3<Rat> reduce(const Mat3<Rat>& m) { return reduce_mat<Rat>(m); }
Vec3<double> reduce(const Vec3<double>& v) { return reduce_vec<3>(v); }
Vec6<double> reduce(const Vec6<double>& v) { return reduce_vec<6>(v); }
Mat3<double> reduce(const Mat3<double>& m) { return reduce_mat<double>(m); }

}  // namespace conicnet
