#pragma once

// Vector fields on the circle, stored through their Fourier coefficients
// f(theta) = sum_n fhat_n e^{i n theta}, and the piecewise-Moebius field
// glued from four rotated copies of g_1(z) = (i-1)z + 2 - (i+1)/z.

#include "virbound/scalar.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <algorithm>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace virbound {

/// Declared coefficient bound outside the stored range: for |n| > known_up_to,
/// |fhat_n| <= constant / |n|^3 and fhat_n = 0 unless n = offset (mod stride).
struct DecayBound {
  int known_up_to = 0;
  double constant = 0.0;
  int stride = 1;
  int offset = 0;
};

template <class C>
class FourierField {
 public:
  using Scalar = C;

  FourierField() = default;
  FourierField(std::map<int, C> coefficients, bool real) : real_(real) {
    for (auto& [n, a] : coefficients)
      if (!scalar_traits<C>::is_zero(a)) coeffs_.emplace(n, std::move(a));
    if (real_) validate_reality();
  }

  static FourierField mode(int n, C value = C(1)) { return FourierField({{n, std::move(value)}}, false); }

  /// cos(k theta) scaled by amplitude: coefficients amplitude/2 at +-k.
  static FourierField cosine(int k, C amplitude = C(1)) {
    if (k == 0) return FourierField({{0, amplitude}}, true);
    C half = amplitude / C(2);
    return FourierField({{k, half}, {-k, half}}, true);
  }

  C coefficient(int n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? C(0) : it->second;
  }
  const std::map<int, C>& coefficients() const { return coeffs_; }
  bool is_real() const { return real_; }
  bool is_zero() const { return coeffs_.empty(); }

  int min_mode() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }
  int max_mode() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }
  int max_abs_mode() const { return std::max(std::abs(min_mode()), std::abs(max_mode())); }

  const std::optional<DecayBound>& decay() const { return decay_; }
  void set_decay(DecayBound d) { decay_ = d; }

  /// Modes n for which coefficient(-n) != conj(coefficient(n)).
  std::vector<int> reality_violations() const {
    std::vector<int> bad;
    for (const auto& [n, a] : coeffs_)
      if (!(coefficient(-n) == scalar_traits<C>::conj(a))) bad.push_back(n);
    for (const auto& [n, a] : coeffs_) {
      (void)a;
      if (coeffs_.count(-n) == 0 && n != 0) bad.push_back(-n);
    }
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    return bad;
  }

  FourierField& operator+=(const FourierField& o) { return combine(o, C(1)); }
  FourierField& operator-=(const FourierField& o) { return combine(o, C(-1)); }
  friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
  friend FourierField operator*(const C& s, const FourierField& f) {
    std::map<int, C> out;
    for (const auto& [n, a] : f.coeffs_) out.emplace(n, s * a);
    const bool real = f.real_ && scalar_traits<C>::is_zero(s - scalar_traits<C>::conj(s));
    return FourierField(std::move(out), real);
  }
  friend bool operator==(const FourierField& a, const FourierField& b) { return a.coeffs_ == b.coeffs_; }

 private:
  void validate_reality() const {
    const auto bad = reality_violations();
    if (!bad.empty()) {
      std::ostringstream os;
      os << "field flagged real violates coefficient(-n) = conj(coefficient(n)) at n =";
      for (int n : bad) os << ' ' << n;
      throw std::invalid_argument(os.str());
    }
  }

  FourierField& combine(const FourierField& o, const C& sign) {
    for (const auto& [n, a] : o.coeffs_) {
      auto [it, inserted] = coeffs_.emplace(n, sign * a);
      if (!inserted) {
        it->second += sign * a;
        if (scalar_traits<C>::is_zero(it->second)) coeffs_.erase(it);
      }
    }
    real_ = real_ && o.real_;
    decay_.reset();
    return *this;
  }

  std::map<int, C> coeffs_;
  bool real_ = false;
  std::optional<DecayBound> decay_;
};

using Field = FourierField<std::complex<double>>;
using ExactField = FourierField<ExactComplex>;

inline Field to_float(const ExactField& f) {
  std::map<int, std::complex<double>> out;
  for (const auto& [n, a] : f.coefficients()) out.emplace(n, scalar_traits<ExactComplex>::to_complex_double(a));
  return Field(std::move(out), f.is_real());
}

/// Sum of fhat_n e^{i n theta}; for real fields the real part.
template <class C>
std::complex<double> evaluate_series(const FourierField<C>& f, double theta) {
  std::complex<double> s{};
  for (const auto& [n, a] : f.coefficients())
    s += scalar_traits<C>::to_complex_double(a) * std::polar(1.0, n * theta);
  return s;
}

// ---------------------------------------------------------------------------
// Gaussian integers for the exact corner data of the piecewise field.

struct GaussInt {
  long re = 0;
  long im = 0;
  friend GaussInt operator+(GaussInt a, GaussInt b) { return {a.re + b.re, a.im + b.im}; }
  friend GaussInt operator*(GaussInt a, GaussInt b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(GaussInt a, GaussInt b) { return a.re == b.re && a.im == b.im; }
};

/// i^e for any integer e.
inline GaussInt i_power(long e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

inline GaussInt gauss_power(GaussInt z, int e) {
  GaussInt r{1, 0};
  for (int k = 0; k < e; ++k) r = r * z;
  return r;
}

// ---------------------------------------------------------------------------

/// Corner of the piecewise field: the point i^index on the circle.
struct Corner {
  int index = 0;  // 0 -> 1, 1 -> i, 2 -> -1, 3 -> -i
  double angle() const { return index * std::numbers::pi / 2; }
  std::string label() const {
    static const char* names[] = {"1", "i", "-1", "-i"};
    return names[index & 3];
  }
};

struct OneSided {
  long left = 0;
  long right = 0;
  long jump() const { return right - left; }
};

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate = 0.0;
};

/// f(z) = g_p(z) on the open quarter arc from p to ip, p in {1, i, -1, -i},
/// with g_p(pz) = p^2 g_1(z).
class PiecewiseMobiusField {
 public:
  /// Coefficients (m = -1, 0, 1) of g_1 as Gaussian integers.
  static constexpr GaussInt g1_coefficient(int m) {
    switch (m) {
      case -1: return {-1, -1};
      case 0: return {2, 0};
      case 1: return {-1, 1};
      default: return {0, 0};
    }
  }

  /// Coefficient m of the piece g_p for p = i^piece: ghat1_m p^{2-m}.
  static GaussInt piece_coefficient(int piece, int m) {
    return g1_coefficient(m) * i_power(static_cast<long>(piece) * (2 - m));
  }

  static Field piece(int piece) {
    std::map<int, std::complex<double>> c;
    for (int m = -1; m <= 1; ++m) {
      const GaussInt g = piece_coefficient(piece, m);
      c.emplace(m, std::complex<double>(static_cast<double>(g.re), static_cast<double>(g.im)));
    }
    return Field(std::move(c), true);
  }

  /// Index of the arc [i^j, i^{j+1}) containing theta.
  static int arc_of(double theta) {
    double t = std::fmod(theta, 2 * std::numbers::pi);
    if (t < 0) t += 2 * std::numbers::pi;
    return std::min(3, static_cast<int>(t / (std::numbers::pi / 2)));
  }

  double evaluate(double theta) const {
    const int j = arc_of(theta);
    double v = 0.0;
    for (int m = -1; m <= 1; ++m) {
      const GaussInt g = piece_coefficient(j, m);
      v += (std::complex<double>(static_cast<double>(g.re), static_cast<double>(g.im)) * std::polar(1.0, m * theta)).real();
    }
    return v;
  }

  /// Exact value at a corner, from the piece starting there.
  static long corner_value(Corner c) {
    GaussInt s{};
    for (int m = -1; m <= 1; ++m) s = s + piece_coefficient(c.index, m) * i_power(static_cast<long>(c.index) * m);
    if (s.im != 0) throw std::logic_error("nonreal corner value");
    return s.re;
  }

  /// Exact one-sided theta-derivatives of the given order at a corner:
  /// d^r/dtheta^r g(e^{i theta}) = sum_m (i m)^r ghat_m e^{i m theta}.
  static OneSided one_sided_derivatives(Corner c, int order) {
    if (order < 1 || order > 2) throw std::invalid_argument("derivative order must be 1 or 2");
    auto derivative = [&](int piece) {
      GaussInt s{};
      for (int m = -1; m <= 1; ++m) {
        const GaussInt factor = gauss_power(GaussInt{0, m}, order);
        s = s + factor * piece_coefficient(piece, m) * i_power(static_cast<long>(c.index) * m);
      }
      if (s.im != 0) throw std::logic_error("nonreal derivative");
      return s.re;
    };
    return {derivative((c.index + 3) % 4), derivative(c.index)};
  }

  /// fhat_n = (2/pi) * exact_part(n). Over the arc from i^j, the piece
  /// contributes ghat1_m i^{j(2-m)} i^{j(m-n)} J(m-n) with
  /// J(d) = int_0^{pi/2} e^{i d theta} = (i^d - 1)/(i d); the rotation sum
  /// sum_j i^{j(2-n)} is 4 for n = 2 (mod 4) and 0 otherwise, and d = m - n
  /// never vanishes on that lattice.
  static ExactComplex exact_part(int n) {
    GaussInt rotation{};
    for (int j = 0; j < 4; ++j) rotation = rotation + i_power(static_cast<long>(j) * (2 - n));
    if (rotation == GaussInt{}) return ExactComplex(0);
    ExactComplex total(0);
    for (int m = -1; m <= 1; ++m) {
      const int d = m - n;
      if (d == 0) throw std::logic_error("unexpected resonant mode");
      const GaussInt num = i_power(d) + GaussInt{-1, 0};
      const GaussInt g = g1_coefficient(m);
      total += ExactComplex(Rational(g.re), Rational(g.im)) * ExactComplex(Rational(num.re), Rational(num.im)) /
               ExactComplex(Rational(0), Rational(d));
    }
    // rotation / (2 pi) = (2/pi) * rotation / 4
    return total * ExactComplex(Rational(rotation.re, 4), Rational(rotation.im, 4));
  }

  static std::complex<double> coefficient(int n) {
    const ExactComplex e = exact_part(n);
    return 2.0 / std::numbers::pi * scalar_traits<ExactComplex>::to_complex_double(e);
  }

  /// Independent evaluation by adaptive Gauss-Kronrod quadrature over the four
  /// arcs. The integrands are trigonometric polynomials, so a shallow depth
  /// limit suffices; many coefficients vanish, and a relative tolerance alone
  /// would otherwise refine forever around zero.
  QuadratureResult quadrature_coefficient(int n, double tolerance = 1e-14, unsigned max_depth = 6) const {
    using boost::math::quadrature::gauss_kronrod;
    QuadratureResult r;
    const double q = std::numbers::pi / 2;
    for (int j = 0; j < 4; ++j) {
      auto re = [&](double t) { return evaluate_piece(j, t) * std::cos(n * t); };
      auto im = [&](double t) { return -evaluate_piece(j, t) * std::sin(n * t); };
      double err_re = 0, err_im = 0;
      const double a = j * q, b = (j + 1) * q;
      const double vr = gauss_kronrod<double, 61>::integrate(re, a, b, max_depth, tolerance, &err_re);
      const double vi = gauss_kronrod<double, 61>::integrate(im, a, b, max_depth, tolerance, &err_im);
      r.value += std::complex<double>(vr, vi);
      r.error_estimate += std::abs(err_re * (b - a)) + std::abs(err_im * (b - a));
    }
    r.value /= 2 * std::numbers::pi;
    r.error_estimate /= 2 * std::numbers::pi;
    return r;
  }

  /// |fhat_n| |n|^3 is at most this for every |n| >= n0 (n0 >= 2).
  static double decay_constant_beyond(int n0) {
    int n = std::max(2, n0);
    while (((n % 4) + 4) % 4 != 2) ++n;
    const double dn = n;
    return 8.0 / std::numbers::pi * dn * dn * dn / (dn * dn * dn - dn);
  }

  /// Coefficients for |n| <= K with decay metadata for the rest.
  static Field truncated(int K) {
    std::map<int, std::complex<double>> c;
    for (int n = -K; n <= K; ++n) {
      const auto a = coefficient(n);
      if (a != std::complex<double>{}) c.emplace(n, a);
    }
    Field f(std::move(c), true);
    f.set_decay({K, decay_constant_beyond(K + 1), 4, 2});
    return f;
  }

 private:
  static double evaluate_piece(int j, double theta) {
    double v = 0.0;
    for (int m = -1; m <= 1; ++m) {
      const GaussInt g = piece_coefficient(j, m);
      v += (std::complex<double>(static_cast<double>(g.re), static_cast<double>(g.im)) * std::polar(1.0, m * theta)).real();
    }
    return v;
  }
};

// ---------------------------------------------------------------------------
// Norms.

struct NormReport {
  std::string field_id;
  int cutoff = 0;
  /// partial_sums[K'] for K' = 0..cutoff
  std::vector<double> partial_sums;
  double tail_bound = 0.0;
  bool finite = false;

  double partial() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
  double upper() const { return partial() + tail_bound; }
};

inline double mode_weight(int n) { return 1.0 + std::pow(std::abs(static_cast<double>(n)), 1.5); }

/// Upper bound of sum over |n| > K of constant (1 + |n|^{3/2}) / |n|^3 on the
/// lattice n = offset (mod stride): first term plus integral comparison.
inline double decay_tail_bound(const DecayBound& d, int K) {
  if (d.constant == 0.0) return 0.0;
  double total = 0.0;
  for (int sign : {1, -1}) {
    long n1 = K + 1;
    while ((((sign * n1 - d.offset) % d.stride) + d.stride) % d.stride != 0) ++n1;
    const double x = static_cast<double>(n1);
    const double first = (1.0 + std::pow(x, 1.5)) / (x * x * x);
    const double integral = (1.0 / (2 * x * x) + 2.0 / std::sqrt(x)) / d.stride;
    total += d.constant * (first + integral);
  }
  return total;
}

template <class C>
NormReport norm_three_halves(const FourierField<C>& f, int K, std::string id = "field") {
  if (K < 1) throw std::invalid_argument("cutoff must be at least 1");
  NormReport r;
  r.field_id = std::move(id);
  r.cutoff = K;
  double s = 0.0;
  for (int k = 0; k <= K; ++k) {
    s += std::abs(scalar_traits<C>::to_complex_double(f.coefficient(k))) * mode_weight(k);
    if (k != 0) s += std::abs(scalar_traits<C>::to_complex_double(f.coefficient(-k))) * mode_weight(k);
    r.partial_sums.push_back(s);
  }
  if (f.decay()) {
    const auto& d = *f.decay();
    if (K < d.known_up_to) {
      // stored coefficients beyond K are summed exactly, the rest bounded
      double rest = 0.0;
      for (const auto& [n, a] : f.coefficients())
        if (std::abs(n) > K) rest += std::abs(scalar_traits<C>::to_complex_double(a)) * mode_weight(n);
      r.tail_bound = rest + decay_tail_bound(d, d.known_up_to);
    } else {
      r.tail_bound = decay_tail_bound(d, K);
    }
    r.finite = true;
  } else {
    double rest = 0.0;
    for (const auto& [n, a] : f.coefficients())
      if (std::abs(n) > K) rest += std::abs(scalar_traits<C>::to_complex_double(a)) * mode_weight(n);
    r.tail_bound = rest;
    r.finite = true;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Bracket.

/// [T(f), T(g)] = T(h) + omega for T(f) = sum fhat_n L_n:
/// hhat_k = sum_n (2n - k) fhat_n ghat_{k-n},
/// omega  = (c/12) sum_n fhat_n ghat_{-n} (n^3 - n).
template <class C>
std::pair<FourierField<C>, C> bracket_with_cocycle(const FourierField<C>& f, const FourierField<C>& g,
                                                  const real_of<C>& c) {
  std::map<int, C> h;
  C omega(0);
  for (const auto& [n, a] : f.coefficients())
    for (const auto& [m, b] : g.coefficients()) {
      const int k = n + m;
      C term = a * b * C(2 * n - k);
      auto [it, inserted] = h.emplace(k, term);
      if (!inserted) it->second += term;
      if (m == -n) {
        const long n3 = static_cast<long>(n) * n * n - n;
        omega += a * b * C(real_of<C>(n3));
      }
    }
  omega = omega * C(real_of<C>(c / real_of<C>(12)));
  FourierField<C> out(std::move(h), false);
  return {out, omega};
}

// ---------------------------------------------------------------------------
// Mollifiers.

enum class MollifierKind { Fejer, Gaussian };

struct MollifierFamily {
  MollifierKind kind = MollifierKind::Fejer;

  /// Multiplier m_k(n) in [0, 1]: Fejer max(0, 1 - |n|/(k+1)), Gaussian exp(-(n/k)^2).
  double multiplier(int k, int n) const {
    const double an = std::abs(static_cast<double>(n));
    if (kind == MollifierKind::Fejer) return std::max(0.0, 1.0 - an / (k + 1.0));
    const double x = an / k;
    return std::exp(-x * x);
  }

  /// Largest |n| with a nonzero multiplier (unbounded for Gaussian).
  std::optional<int> support(int k) const {
    if (kind == MollifierKind::Fejer) return k;
    return std::nullopt;
  }

  std::string name() const { return kind == MollifierKind::Fejer ? "fejer" : "gaussian"; }
};

/// Coefficient-wise product with the multiplier sequence.
inline Field mollify(const Field& f, const MollifierFamily& family, int k) {
  std::map<int, std::complex<double>> out;
  for (const auto& [n, a] : f.coefficients()) {
    const double m = family.multiplier(k, n);
    if (m != 0.0) out.emplace(n, m * a);
  }
  return Field(std::move(out), f.is_real());
}

/// Largest |value| of a field sampled on [a, b]; used to check that a
/// mollified field stays small where the original vanishes.
inline double max_on_interval(const Field& f, double a, double b, int samples) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = a + (b - a) * (s + 0.5) / samples;
    worst = std::max(worst, std::abs(evaluate_series(f, t)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// I/O.

/// CSV rows "n, re, im", one per stored coefficient.
inline void write_field_csv(std::ostream& os, const Field& f) {
  os << "n,re,im\n";
  os.precision(17);
  for (const auto& [n, a] : f.coefficients()) os << n << ',' << a.real() << ',' << a.imag() << '\n';
}

struct FieldParseError : std::runtime_error {
  int line;
  FieldParseError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

/// Reads "n, re, im" rows (an optional header line is skipped). The result is
/// flagged real when `real` is set; reality violations then throw.
inline Field read_field_csv(std::istream& is, bool real) {
  std::map<int, std::complex<double>> c;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line_no == 1 && line.find_first_of("0123456789") != 0 && line.find('n') != std::string::npos) continue;
    std::stringstream ss(line);
    std::string a, b, d;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, d))
      throw FieldParseError(line_no, "expected three comma-separated values");
    try {
      std::size_t pos = 0;
      const int n = std::stoi(a, &pos);
      if (a.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument("n");
      const double re = std::stod(b), im = std::stod(d);
      if (!c.emplace(n, std::complex<double>(re, im)).second) throw FieldParseError(line_no, "duplicate mode " + a);
    } catch (const FieldParseError&) {
      throw;
    } catch (const std::exception&) {
      throw FieldParseError(line_no, "malformed number");
    }
  }
  return Field(std::move(c), real);
}

/// Dense "theta, value" samples of the piecewise field on [0, 2 pi).
inline void write_samples_csv(std::ostream& os, const PiecewiseMobiusField& f, int samples) {
  os << "theta,value\n";
  os.precision(17);
  for (int s = 0; s < samples; ++s) {
    const double t = 2 * std::numbers::pi * s / samples;
    os << t << ',' << f.evaluate(t) << '\n';
  }
}

}  // namespace virbound
