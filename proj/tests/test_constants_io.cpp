#include <doctest.h>

#include <filesystem>

#include "hypdim/constants_io.hpp"

using namespace hypdim;

TEST_CASE("constants text round trip") {
  CalibratedConstants c;
  c.p = 1.0;
  c.C = 78.7639;
  c.D = 3.13282;
  c.r0 = 630.111;
  c.K = 1.5845;
  c.Kcal = 1.000853;
  c.grid_description = "grid 200";
  c.diagnostics = {{"max_inner", 0.1 + 0.2}, {"samples", 4000.0}};
  const CalibratedConstants d = parse_constants(format_constants(c));
  CHECK(d.p == c.p);
  CHECK(d.C == c.C);
  CHECK(d.r0 == c.r0);
  CHECK(d.Kcal == c.Kcal);
  CHECK(d.grid_description == c.grid_description);
  CHECK(d.diagnostics == c.diagnostics);

  const auto path = std::filesystem::temp_directory_path() / "hypdim_constants_test.txt";
  save_constants(path.string(), c);
  CHECK(load_constants(path.string()).K == c.K);
  std::filesystem::remove(path);
  CHECK_THROWS(load_constants(path.string()));
}

TEST_CASE("constants parse errors") {
  const std::string ok = "p = 1\nC = 10\nD = 20\nr0 = 100\nK = 1.5\nKcal = 1.1\n";
  CHECK(parse_constants("# comment\n\n" + ok).D == 20.0);
  CHECK_THROWS_AS(parse_constants("p = 1\nC = 10\n"), DomainError);
  CHECK_THROWS_AS(parse_constants(ok + "junk\n"), DomainError);
  CHECK_THROWS_AS(parse_constants(ok + "diag.x = 1e\n"), DomainError);
  CHECK_THROWS_AS(parse_constants("p = one\nC = 10\nD = 20\nr0 = 100\nK = 1.5\nKcal = 1.1\n"), DomainError);
  // r0 must exceed 4 C
  CHECK_THROWS_AS(parse_constants("p = 1\nC = 30\nD = 20\nr0 = 100\nK = 1.5\nKcal = 1.1\n"), DomainError);
}

TEST_CASE("bundled constants") {
  for (double p : {0.5, 1.0, 2.0}) {
    const auto c = bundled_constants(p);
    REQUIRE(c.has_value());
    CHECK(c->p == p);
    CHECK(c->K >= 1.0);
    CHECK(c->Kcal >= 1.0);
    CHECK(c->r0 > 4.0 * c->C);
  }
  CHECK_FALSE(bundled_constants(1.5).has_value());
}
