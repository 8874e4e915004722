#include <doctest.h>

#include <fstream>
#include <sstream>

#include "abo/rng.hpp"
#include "abo/sampling.hpp"
#include "oracles.hpp"

using namespace abo;

TEST_CASE("first points of the two-dimensional sequence") {
  Matrix pts = sobol_points(2, 4);
  CHECK(pts(0, 0) == 0.0);
  CHECK(pts(0, 1) == 0.0);
  CHECK(pts(1, 0) == 0.5);
  CHECK(pts(1, 1) == 0.5);
  CHECK(pts(2, 0) == 0.75);
  CHECK(pts(2, 1) == 0.25);
  CHECK(pts(3, 0) == 0.25);
  CHECK(pts(3, 1) == 0.75);
}

TEST_CASE("points stay in the half-open unit cube") {
  Matrix pts = sobol_points(5, 300);
  for (Index i = 0; i < pts.rows(); ++i)
    for (Index d = 0; d < 5; ++d) {
      CHECK(pts(i, d) >= 0.0);
      CHECK(pts(i, d) < 1.0);
    }
}

TEST_CASE("prefix and skip consistency") {
  Matrix big = sobol_points(3, 100);
  Matrix small = sobol_points(3, 40);
  CHECK(big.topRows(40) == small);

  Matrix skipped = sobol_points(2, 8, 8);
  Matrix full = sobol_points(2, 16);
  CHECK(skipped == full.bottomRows(8));
}

TEST_CASE("balance of dyadic prefixes") {
  for (int k = 4; k <= 9; ++k) {
    const Index n = Index{1} << k;
    Matrix pts = sobol_points(4, n);
    for (Index d = 0; d < 4; ++d) {
      const double mean = pts.col(d).mean();
      CHECK(std::abs(mean - 0.5) <= std::pow(2.0, -k) + 1e-15);
    }
  }
}

TEST_CASE("beats uniform random on star discrepancy") {
  Matrix sobol = sobol_points(2, 128);
  const double d_sobol = oracles::star_discrepancy_2d(sobol);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RngStream rng(seed, "discrepancy");
    Matrix uniform(128, 2);
    for (Index i = 0; i < 128; ++i)
      for (Index d = 0; d < 2; ++d) uniform(i, d) = rng.uniform();
    CHECK(d_sobol < oracles::star_discrepancy_2d(uniform));
  }
}

TEST_CASE("direction table capacity and parsing errors") {
  CHECK_THROWS_AS(sobol_points(4096, 4), DimensionError);

  std::istringstream bad("2 1 0 2\n");  // m_1 must be odd
  CHECK_THROWS_AS(DirectionTable::parse(bad), Error);
  std::istringstream gap("3 2 1 1 3\n");  // dimensions must start at 2
  CHECK_THROWS_AS(DirectionTable::parse(gap), Error);
}

TEST_CASE("bundled table matches the on-disk data file") {
  const DirectionTable& table = DirectionTable::joe_kuo_default();
  CHECK(table.checksum() == embedded_direction_table_checksum());
  CHECK(table.max_dimension() == 128);

#ifdef ABO_SOURCE_DIR
  std::ifstream file(std::string(ABO_SOURCE_DIR) +
                     "/core/data/sobol_direction_numbers.txt");
  REQUIRE(file.good());
  std::ostringstream content;
  content << file.rdbuf();
  CHECK(fnv1a64(content.str()) == embedded_direction_table_checksum());

  std::ifstream checksum_file(std::string(ABO_SOURCE_DIR) +
                              "/core/data/sobol_direction_numbers.checksum");
  REQUIRE(checksum_file.good());
  std::string algo, hex;
  checksum_file >> algo >> hex;
  CHECK(algo == "fnv1a64");
  CHECK(std::stoull(hex, nullptr, 16) == embedded_direction_table_checksum());
#endif
}

TEST_CASE("stream seek equals fresh generation") {
  SobolStream stream(3);
  stream.seek(37);
  Matrix from_seek = stream.take(5);
  Matrix direct = sobol_points(3, 5, 37);
  CHECK(from_seek == direct);
}

TEST_CASE("saltelli layout") {
  SaltelliDesign d1 = saltelli_design(1, 4);
  CHECK(d1.rows.rows() == 12);

  SaltelliDesign d4 = saltelli_design(4, 59);
  CHECK(d4.rows.rows() == 354);

  SaltelliDesign design = saltelli_design(3, 16);
  for (int i = 0; i < 3; ++i) {
    Matrix ab = design.block_ab(i);
    for (Index r = 0; r < design.n_base; ++r) {
      for (Index c = 0; c < 3; ++c) {
        if (c == i)
          CHECK(ab(r, c) == design.block_b()(r, c));
        else
          CHECK(ab(r, c) == design.block_a()(r, c));
      }
    }
  }
  // every row in [0,1)
  CHECK((design.rows.array() >= 0.0).all());
  CHECK((design.rows.array() < 1.0).all());

  CHECK_THROWS_AS(saltelli_design(2, 3), DimensionError);
}
