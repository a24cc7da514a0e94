#pragma once

// Scalar types shared by the exact and floating-point code paths.
//
// Rational      exact arbitrary-precision rational (GMP)
// ExactComplex  Gaussian rational, re + i*im with both parts Rational
//
// scalar_traits<T> gives every algorithm the handful of operations it needs
// without caring whether T is exact.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>

namespace virbound {

using Rational = mpq_class;

/// Parses "p/q", an integer, or a plain decimal ("0.75") into a canonical
/// rational. Throws std::invalid_argument on malformed input.
inline Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty rational");

  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos)
      throw std::invalid_argument("malformed rational: " + text);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const std::size_t scale = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
      throw std::invalid_argument("malformed rational: " + text);
    Rational r;
    if (r.set_str(digits + "/1" + std::string(scale, '0'), 10) != 0)
      throw std::invalid_argument("malformed rational: " + text);
    r.canonicalize();
    return r;
  }

  Rational r;
  if (s.front() == '+') s.erase(0, 1);
  if (r.set_str(s, 10) != 0 || r.get_den() == 0)
    throw std::invalid_argument("malformed rational: " + text);
  r.canonicalize();
  return r;
}

/// Always "p/q" (denominator printed even when it is 1).
inline std::string format_rational(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

struct ExactComplex {
  Rational re;
  Rational im;

  ExactComplex() = default;
  ExactComplex(Rational r) : re(std::move(r)), im(0) {}  // NOLINT: implicit by intent
  ExactComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  ExactComplex(int r) : re(r), im(0) {}  // NOLINT

  ExactComplex& operator+=(const ExactComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  ExactComplex& operator-=(const ExactComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  ExactComplex& operator*=(const ExactComplex& o) {
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  ExactComplex& operator/=(const ExactComplex& o) {
    Rational d = o.re * o.re + o.im * o.im;
    if (d == 0) throw std::domain_error("ExactComplex division by zero");
    Rational r = (re * o.re + im * o.im) / d;
    Rational i = (im * o.re - re * o.im) / d;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
  friend ExactComplex operator-(const ExactComplex& a) { return {Rational(-a.re), Rational(-a.im)}; }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const ExactComplex& a, const ExactComplex& b) { return !(a == b); }
  friend std::ostream& operator<<(std::ostream& os, const ExactComplex& z) {
    return os << format_rational(z.re) << (z.im < 0 ? "-" : "+") << format_rational(abs(z.im)) << "i";
  }
};

inline ExactComplex conj(const ExactComplex& z) { return {z.re, Rational(-z.im)}; }

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr bool complex = false;
  using real_type = double;
  using complex_type = std::complex<double>;
  static double conj(double x) { return x; }
  static double abs2(double x) { return x * x; }
  static double magnitude(double x) { return std::abs(x); }
  static bool is_zero(double x) { return x == 0.0; }
  static std::complex<double> to_complex_double(double x) { return {x, 0.0}; }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr bool complex = false;
  using real_type = Rational;
  using complex_type = ExactComplex;
  static Rational conj(const Rational& x) { return x; }
  static Rational abs2(const Rational& x) { return x * x; }
  static double magnitude(const Rational& x) { return std::abs(x.get_d()); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static std::complex<double> to_complex_double(const Rational& x) { return {x.get_d(), 0.0}; }
};

template <>
struct scalar_traits<std::complex<double>> {
  static constexpr bool exact = false;
  static constexpr bool complex = true;
  using real_type = double;
  using complex_type = std::complex<double>;
  static std::complex<double> conj(const std::complex<double>& x) { return std::conj(x); }
  static double abs2(const std::complex<double>& x) { return std::norm(x); }
  static double magnitude(const std::complex<double>& x) { return std::abs(x); }
  static bool is_zero(const std::complex<double>& x) { return x == std::complex<double>{}; }
  static std::complex<double> to_complex_double(const std::complex<double>& x) { return x; }
};

template <>
struct scalar_traits<ExactComplex> {
  static constexpr bool exact = true;
  static constexpr bool complex = true;
  using real_type = Rational;
  using complex_type = ExactComplex;
  static ExactComplex conj(const ExactComplex& x) { return virbound::conj(x); }
  static Rational abs2(const ExactComplex& x) { return x.re * x.re + x.im * x.im; }
  static double magnitude(const ExactComplex& x) { return std::sqrt(abs2(x).get_d()); }
  static bool is_zero(const ExactComplex& x) { return sgn(x.re) == 0 && sgn(x.im) == 0; }
  static std::complex<double> to_complex_double(const ExactComplex& x) {
    return {x.re.get_d(), x.im.get_d()};
  }
};

template <class T>
using complex_of = typename scalar_traits<T>::complex_type;

template <class T>
using real_of = typename scalar_traits<T>::real_type;

/// Lifts a real scalar into the matching complex type.
template <class T>
complex_of<T> to_complex(const T& x) {
  return complex_of<T>(x);
}

template <class T>
constexpr bool is_exact_v = scalar_traits<T>::exact;

}  // namespace virbound
