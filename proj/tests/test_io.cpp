#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "corrdyn/chainio.hpp"
#include "corrdyn/errors.hpp"
#include "test_util.hpp"

using namespace corrdyn;
using namespace corrdyn::testutil;

TEST_SUITE_BEGIN("io");

TEST_CASE("chain json round-trip is bit-exact") {
  SplitMix64 g(443);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Chain::Component> comps;
    int n = 1 + static_cast<int>(g.next() % 3);
    for (int k = 0; k < n; ++k)
      comps.push_back({rand_dense_poly(g, 1 + (g.next() % 3), 1 + (g.next() % 3)),
                       1 + static_cast<int>(g.next() % 3)});
    Chain c = Chain::from_components(comps, false);
    std::string text = chain_to_json(c);
    Chain back = chain_from_json(text);
    std::string text2 = chain_to_json(back);
    CHECK(text == text2);
    REQUIRE(back.components().size() == c.components().size());
    DegreePair d0 = degrees(c), d1 = degrees(back);
    CHECK(d0.d0 == d1.d0);
    CHECK(d0.d1 == d1.d1);
    for (std::size_t k = 0; k < c.components().size(); ++k) {
      const auto& a = c.components()[k].poly;
      const auto& b = back.components()[k].poly;
      REQUIRE(a.c.size() == b.c.size());
      for (std::size_t t = 0; t < a.c.size(); ++t) {
        CHECK(a.c[t].real() == b.c[t].real());
        CHECK(a.c[t].imag() == b.c[t].imag());
      }
    }
  }
}

TEST_CASE("malformed chain file raises ParseError with byte offset") {
  std::string bad = R"({"components": [ {"bidegree": [2, 1], "coeffs": [[)" "\x01" R"(]]}]})";
  try {
    chain_from_json(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset >= 0);
  }
  CHECK_THROWS_AS(chain_from_json("{\"components\": []}"), ParseError);
}

TEST_CASE("file save/load") {
  namespace fs = std::filesystem;
  fs::path tmp = fs::temp_directory_path() / "corrdyn_test_chain.json";
  Chain c = chain_of(poly_z2w2_minus_1());
  save_chain_file(c, tmp.string());
  Chain back = load_chain_file(tmp.string());
  CHECK(degrees(back).d0 == 2);
  CHECK(degrees(back).d1 == 2);
  fs::remove(tmp);
}

TEST_CASE("point parsing") {
  CHECK(chordal(parse_point("inf"), ProjPoint::infinity()) < 1e-15);
  CHECK(chordal(parse_point("1.5,-0.25"), ProjPoint::affine(cdouble(1.5, -0.25))) < 1e-15);
  CHECK(chordal(parse_point("[0.5, 0.5]"), ProjPoint::affine(cdouble(0.5, 0.5))) < 1e-15);
  CHECK(chordal(parse_point("[0, 0, 1, 0]"), ProjPoint::infinity()) < 1e-15);
  CHECK(chordal(parse_point("3"), ProjPoint::affine(3.0)) < 1e-15);
}

TEST_SUITE_END();
