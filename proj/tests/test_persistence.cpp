#include "virbound/cache.hpp"
#include "virbound/virbound.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace virbound;
using Q = Rational;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("virbound-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

template <class R>
void require_same(const TruncatedRep<R>& a, const TruncatedRep<R>& b) {
  REQUIRE(a.level_dims() == b.level_dims());
  CHECK(a.c() == b.c());
  CHECK(a.h() == b.h());
  for (int k = 0; k <= a.truncation(); ++k) CHECK(a.metric(k) == b.metric(k));
  REQUIRE(a.blocks().size() == b.blocks().size());
  for (const auto& [key, m] : a.blocks()) CHECK(m == b.block(key.first, key.second));
}

}  // namespace

TEST_CASE("Gram matrices round trip", "[serialize]") {
  const VermaModule<Q> v(CentralCharge<Q>(Q(7, 10)), LowestWeight<Q>(Q(3, 5)));
  const auto g = v.gram_matrix(4);
  std::stringstream ss;
  write_gram(ss, g);
  const auto back = read_gram<Q>(ss);
  CHECK(back.entries == g.entries);
  CHECK(back.level == 4);
  CHECK(back.c == Q(7, 10));
}

TEST_CASE("representations round trip exactly", "[serialize]") {
  const auto rep = build_rep<Q>(CentralCharge<Q>(Q(1, 2)), LowestWeight<Q>(Q(1, 16)), 8);
  std::stringstream ss;
  write_rep(ss, rep);
  const std::string text = ss.str();
  CHECK(text.rfind("schema=1 kind=rep mode=exact c=1/2 h=1/16 N=8 order=reverse-lex\n", 0) == 0);
  require_same(rep, read_rep<Q>(ss));

  const auto frep = build_rep<double>(CentralCharge<double>(0.5), LowestWeight<double>(0.0), 8);
  std::stringstream fs_;
  write_rep(fs_, frep);
  require_same(frep, read_rep<double>(fs_));
}

TEST_CASE("malformed serialized input is rejected", "[serialize]") {
  std::stringstream wrong_schema("schema=0 kind=rep mode=exact c=1/2 h=0/1 N=2 order=reverse-lex\n");
  CHECK_THROWS_AS(read_rep<Q>(wrong_schema), FormatError);
  std::stringstream wrong_mode("schema=1 kind=rep mode=float c=1/2 h=0/1 N=2 order=reverse-lex\n");
  CHECK_THROWS_AS(read_rep<Q>(wrong_mode), FormatError);
  std::stringstream truncated("schema=1 kind=rep mode=exact c=1/2 h=0/1 N=2 order=reverse-lex\nlevel 0 1\nmetric 1/1\n");
  CHECK_THROWS_AS(read_rep<Q>(truncated), FormatError);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_rep<Q>(empty), FormatError);
}

TEST_CASE("cache stores, reloads and detects corruption", "[cache]") {
  const auto dir = scratch("cache");
  const Q c(1, 2), h(0);
  CHECK_FALSE(load_cached<Q>(dir, c, h, 8));
  const auto rep = build_rep<Q>(CentralCharge<Q>(c), LowestWeight<Q>(h), 8);
  store_cached(dir, rep);
  const auto key = cache_key(c, h, 8);
  CHECK(key == "rep-v1-c1_2-h0_1-N8-exact.txt");
  const auto hit = load_cached<Q>(dir, c, h, 8);
  REQUIRE(hit);
  require_same(rep, *hit);
  CHECK_FALSE(load_cached<Q>(dir, c, h, 9));

  SECTION("flipped payload byte") {
    std::fstream f(dir / key, std::ios::in | std::ios::out | std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(f)), {});
    const auto pos = content.rfind("1/");
    REQUIRE(pos != std::string::npos);
    content[pos] = '3';
    f.seekp(0);
    f << content;
    f.close();
    CHECK_THROWS_AS(load_cached<Q>(dir, c, h, 8), CacheError);
  }
  SECTION("stale schema") {
    std::ifstream in(dir / key, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), {});
    in.close();
    content.replace(content.find("schema=1"), 8, "schema=0");
    std::ofstream(dir / key, std::ios::binary) << content;
    CHECK_THROWS_WITH(load_cached<Q>(dir, c, h, 8), Catch::Matchers::ContainsSubstring("stale"));
  }
  SECTION("entry under the wrong key") {
    fs::copy_file(dir / key, dir / cache_key(Q(1), h, 8));
    CHECK_THROWS_AS(load_cached<Q>(dir, Q(1), h, 8), CacheError);
  }
  fs::remove_all(dir);
}

TEST_CASE("sha256 digest", "[cache]") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
