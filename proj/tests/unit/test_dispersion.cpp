#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "jitterkit/dispersion.hpp"
#include "jitterkit/error.hpp"
#include "oracles.hpp"

using namespace jitterkit;

namespace {

const UniaxialCrystal& bbo() {
  static const UniaxialCrystal c = load_builtin_crystal("bbo");
  return c;
}

// Measured BBO indices (Eimerl et al. 1987, as tabulated by Nikogosyan 1991).
struct TablePoint {
  double lambda_um;
  double n_o;
  double n_e;
};
constexpr TablePoint kTable[] = {
    {0.4047, 1.69267, 1.56796},
    {0.5321, 1.67496, 1.55554},
    {1.0642, 1.65510, 1.54254},
};

}  // namespace

TEST_CASE("BBO coefficient file loads with its citation") {
  CHECK(bbo().name == "BBO");
  CHECK(bbo().source.find("Eimerl") != std::string::npos);
  CHECK(bbo().ordinary.lambda_min_um == doctest::Approx(0.22));
  CHECK(bbo().ordinary.lambda_max_um == doctest::Approx(1.9));
}

TEST_CASE("indices agree with the published BBO table to 1e-3") {
  for (const auto& p : kTable) {
    CAPTURE(p.lambda_um);
    CHECK(std::abs(n_ordinary(bbo(), p.lambda_um) - p.n_o) <= 1e-3);
    CHECK(std::abs(n_extraordinary_principal(bbo(), p.lambda_um) - p.n_e) <= 1e-3);
  }
}

TEST_CASE("n_ordinary shows normal dispersion and range errors") {
  CHECK(n_ordinary(bbo(), 1.0) < n_ordinary(bbo(), 0.5));
  CHECK_THROWS_AS(n_ordinary(bbo(), 10.0), DomainError);
  CHECK_THROWS_WITH_AS(n_extraordinary_principal(bbo(), 0.05), doctest::Contains("0.22"),
                       DomainError);
}

TEST_CASE("n_extraordinary follows the index ellipse") {
  const double l = 0.405;
  const double no = n_ordinary(bbo(), l);
  const double ne = n_extraordinary_principal(bbo(), l);
  CHECK(ne < no);
  CHECK(n_extraordinary(bbo(), l, 0.0) == no);
  CHECK(n_extraordinary(bbo(), l, std::numbers::pi / 2) == doctest::Approx(ne).epsilon(1e-14));

  const double mid = n_extraordinary(bbo(), l, std::numbers::pi / 4);
  CHECK(mid > ne);
  CHECK(mid < no);
  // Ellipse at 45 degrees: 1/n^2 = (1/no^2 + 1/ne^2) / 2.
  CHECK(mid == doctest::Approx(std::sqrt(2.0 / (1.0 / (no * no) + 1.0 / (ne * ne)))));

  CHECK_THROWS_AS(n_extraordinary(bbo(), l, -0.01), DomainError);
  CHECK_THROWS_AS(n_extraordinary(bbo(), l, 1.6), DomainError);
}

TEST_CASE("invariants over the validity window") {
  for (int i = 0; i <= 200; ++i) {
    const double l = 0.22 + (1.9 - 0.22) * i / 200.0;
    const double no = n_ordinary(bbo(), l);
    const double ne = n_extraordinary_principal(bbo(), l);
    CHECK(no > 1.0);
    CHECK(no < 3.0);
    CHECK(ne > 1.0);
    CHECK(ne < no);
    CHECK(n_extraordinary(bbo(), l, 0.0) == no);

    double prev = no;
    for (int k = 1; k < 100; ++k) {
      const double n = n_extraordinary(bbo(), l, std::numbers::pi / 2 * k / 100.0);
      REQUIRE(n < prev);
      prev = n;
    }
  }
}

TEST_CASE("crystal files are validated") {
  const auto dir = oracle::scratch_dir("dispersion");
  {
    std::ofstream f(dir / "pole.crystal");
    f << "name = bad\nlambda_min_um = 0.1\nlambda_max_um = 1.0\n"
         "ordinary.b1 = 2.7\nordinary.b2 = 0.02\nordinary.b3 = 0.04\nordinary.b4 = 0.01\n"
         "extraordinary.b1 = 2.3\nextraordinary.b2 = 0.01\nextraordinary.b3 = 0.01\n"
         "extraordinary.b4 = 0.0\n";
  }
  CHECK_THROWS_WITH_AS(load_crystal(dir / "pole.crystal"), doctest::Contains("pole"),
                       ConfigError);
  {
    std::ofstream f(dir / "missing.crystal");
    f << "name = bad\nlambda_min_um = 0.3\n";
  }
  CHECK_THROWS_AS(load_crystal(dir / "missing.crystal"), ConfigError);
  CHECK_THROWS_AS(load_crystal(dir / "nope.crystal"), IoError);
}
