#pragma once

// Plain-text format for Gram matrices and truncated representations.
//
//   schema=1 kind=rep mode=exact c=1/2 h=0/1 N=12 order=reverse-lex
//   level <k> <dim>
//   metric <d_1> ... <d_dim>
//   block <n> <k> <rows> <cols>
//   <row 0 entries>
//   ...
//
// Exact entries are written "p/q"; float entries with 17 significant digits,
// which reproduces every double.

#include "virbound/partition.hpp"
#include "virbound/scalar.hpp"
#include "virbound/truncated_rep.hpp"
#include "virbound/verma.hpp"

#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace virbound {

inline constexpr int schema_version = 1;

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class R>
std::string format_scalar(const R& x) {
  if constexpr (is_exact_v<R>) {
    return format_rational(x);
  } else {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
  }
}

template <class R>
R parse_scalar(const std::string& s) {
  if constexpr (is_exact_v<R>) {
    try {
      return parse_rational(s);
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  } else {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw FormatError("trailing characters in number: " + s);
      return v;
    } catch (const std::logic_error&) {
      throw FormatError("malformed number: " + s);
    }
  }
}

template <class R>
constexpr const char* mode_name() {
  return is_exact_v<R> ? "exact" : "float";
}

/// key=value pairs of a header line.
inline std::map<std::string, std::string> parse_header(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("malformed header token: " + tok);
    out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

inline const std::string& header_field(const std::map<std::string, std::string>& h, const std::string& key) {
  auto it = h.find(key);
  if (it == h.end()) throw FormatError("header is missing " + key);
  return it->second;
}

inline void check_schema(const std::map<std::string, std::string>& h, const std::string& kind) {
  if (header_field(h, "schema") != std::to_string(schema_version))
    throw FormatError("unsupported schema version " + header_field(h, "schema"));
  if (header_field(h, "kind") != kind) throw FormatError("expected kind " + kind);
  if (header_field(h, "order") != "reverse-lex") throw FormatError("unknown partition order");
}

template <class R>
void write_matrix_rows(std::ostream& os, const Matrix<R>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << format_scalar(m(i, j));
    os << '\n';
  }
}

template <class R>
Matrix<R> read_matrix_rows(std::istream& is, std::size_t rows, std::size_t cols) {
  Matrix<R> m(rows, cols);
  std::string tok;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      if (!(is >> tok)) throw FormatError("truncated matrix data");
      m(i, j) = parse_scalar<R>(tok);
    }
  return m;
}

template <class R>
void write_gram(std::ostream& os, const GramMatrix<R>& g) {
  os << "schema=" << schema_version << " kind=gram mode=" << mode_name<R>() << " c=" << format_scalar(g.c)
     << " h=" << format_scalar(g.h) << " level=" << g.level << " order=reverse-lex\n";
  os << "basis";
  for (const auto& p : g.basis) os << ' ' << p;
  os << '\n';
  write_matrix_rows(os, g.entries);
}

template <class R>
GramMatrix<R> read_gram(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty input");
  const auto h = parse_header(line);
  check_schema(h, "gram");
  if (header_field(h, "mode") != mode_name<R>()) throw FormatError("arithmetic mode mismatch");
  GramMatrix<R> g;
  g.c = parse_scalar<R>(header_field(h, "c"));
  g.h = parse_scalar<R>(header_field(h, "h"));
  g.level = std::stoi(header_field(h, "level"));
  g.basis = enumerate_partitions(g.level);
  if (!std::getline(is, line) || line.rfind("basis", 0) != 0) throw FormatError("missing basis line");
  g.entries = read_matrix_rows<R>(is, g.basis.size(), g.basis.size());
  return g;
}

template <class R>
void write_rep(std::ostream& os, const TruncatedRep<R>& rep) {
  os << "schema=" << schema_version << " kind=rep mode=" << mode_name<R>() << " c=" << format_scalar(rep.c())
     << " h=" << format_scalar(rep.h()) << " N=" << rep.truncation() << " order=reverse-lex\n";
  for (int k = 0; k <= rep.truncation(); ++k) {
    os << "level " << k << ' ' << rep.dim(k) << "\nmetric";
    for (const auto& d : rep.metric(k)) os << ' ' << format_scalar(d);
    os << '\n';
  }
  for (const auto& [key, m] : rep.blocks()) {
    os << "block " << key.first << ' ' << key.second << ' ' << m.rows() << ' ' << m.cols() << '\n';
    write_matrix_rows(os, m);
  }
}

template <class R>
TruncatedRep<R> read_rep(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty input");
  const auto h = parse_header(line);
  check_schema(h, "rep");
  if (header_field(h, "mode") != mode_name<R>()) throw FormatError("arithmetic mode mismatch");
  const int N = std::stoi(header_field(h, "N"));
  TruncatedRep<R> rep(parse_scalar<R>(header_field(h, "c")), parse_scalar<R>(header_field(h, "h")), N);
  std::string tag;
  for (int k = 0; k <= N; ++k) {
    int level = -1, dim = -1;
    if (!(is >> tag >> level >> dim) || tag != "level" || level != k || dim < 0) throw FormatError("bad level record");
    if (!(is >> tag) || tag != "metric") throw FormatError("bad metric record");
    std::vector<R> metric;
    std::string tok;
    for (int i = 0; i < dim; ++i) {
      if (!(is >> tok)) throw FormatError("truncated metric");
      metric.push_back(parse_scalar<R>(tok));
    }
    rep.set_level(k, dim, std::move(metric));
  }
  while (is >> tag) {
    if (tag != "block") throw FormatError("unexpected record " + tag);
    int n = 0, k = 0;
    std::size_t rows = 0, cols = 0;
    if (!(is >> n >> k >> rows >> cols)) throw FormatError("bad block header");
    if (k < 0 || k > N || k - n < 0 || k - n > N || rows != static_cast<std::size_t>(rep.dim(k - n)) ||
        cols != static_cast<std::size_t>(rep.dim(k)))
      throw FormatError("block shape does not match level dimensions");
    rep.set_block(n, k, read_matrix_rows<R>(is, rows, cols));
  }
  return rep;
}

}  // namespace virbound
