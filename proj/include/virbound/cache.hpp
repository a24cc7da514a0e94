#pragma once

// On-disk cache of built representations. Each file is
//   virbound-cache schema=<v> digest=<sha256 hex of payload>
//   <payload in the serialize.hpp rep format>
// A digest mismatch is corruption; an older schema is rejected, not migrated.
// Requires linking OpenSSL's libcrypto.

#include "virbound/serialize.hpp"
#include "virbound/truncated_rep.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace virbound {

struct CacheError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

/// File name for (schema, c, h, N, mode); "/" in rationals becomes "_".
template <class R>
std::string cache_key(const R& c, const R& h, int N) {
  auto clean = [](std::string s) {
    for (auto& ch : s)
      if (ch == '/') ch = '_';
    return s;
  };
  return "rep-v" + std::to_string(schema_version) + "-c" + clean(format_scalar(c)) + "-h" + clean(format_scalar(h)) +
         "-N" + std::to_string(N) + "-" + mode_name<R>() + ".txt";
}

template <class R>
void store_cached(const std::filesystem::path& dir, const TruncatedRep<R>& rep) {
  std::filesystem::create_directories(dir);
  std::ostringstream payload;
  write_rep(payload, rep);
  const std::string body = payload.str();
  const auto path = dir / cache_key(rep.c(), rep.h(), rep.truncation());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    os << "virbound-cache schema=" << schema_version << " digest=" << sha256_hex(body) << '\n' << body;
    if (!os) throw CacheError("cannot write cache file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

/// nullopt when there is no entry; throws CacheError on corruption or a stale schema.
template <class R>
std::optional<TruncatedRep<R>> load_cached(const std::filesystem::path& dir, const R& c, const R& h, int N) {
  const auto path = dir / cache_key(c, h, N);
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream is(path, std::ios::binary);
  std::string header;
  if (!std::getline(is, header)) throw CacheError("empty cache file " + path.string());
  std::istringstream hs(header);
  std::string magic, schema, digest;
  hs >> magic >> schema >> digest;
  if (magic != "virbound-cache" || schema.rfind("schema=", 0) != 0 || digest.rfind("digest=", 0) != 0)
    throw CacheError("malformed cache header in " + path.string());
  if (schema != "schema=" + std::to_string(schema_version))
    throw CacheError("stale cache schema " + schema.substr(7) + " in " + path.string());
  std::stringstream body;
  body << is.rdbuf();
  if (sha256_hex(body.str()) != digest.substr(7)) throw CacheError("digest mismatch in " + path.string());
  try {
    auto rep = read_rep<R>(body);
    if (!(rep.c() == c) || !(rep.h() == h) || rep.truncation() != N)
      throw CacheError("cache entry does not match its key: " + path.string());
    return rep;
  } catch (const FormatError& e) {
    throw CacheError(std::string("unreadable cache payload: ") + e.what());
  }
}

}  // namespace virbound
