#include <doctest.h>

#include <limits>
#include <sstream>
#include <stdexcept>

#include "mininfo/ext_real.hpp"
#include "mininfo/mdp_json.hpp"

using mininfo::ExtReal;

TEST_CASE("finite values round trip and order") {
  const ExtReal a(1.5), b(2.0);
  CHECK(a < b);
  CHECK((a + b).value() == doctest::Approx(3.5));
  CHECK(a.is_finite());
  CHECK(ExtReal::zero().value() == 0.0);
}

TEST_CASE("infinity saturates sums") {
  const ExtReal inf = ExtReal::infinity();
  CHECK((inf + ExtReal(3.0)).is_infinite());
  CHECK((ExtReal(3.0) + inf).is_infinite());
  CHECK(ExtReal(1e300) < inf);
  CHECK_THROWS_AS((void)inf.value(), std::domain_error);
  CHECK(inf.to_double() == std::numeric_limits<double>::infinity());
}

TEST_CASE("negative and nan inputs are rejected") {
  CHECK_THROWS_AS(ExtReal(-1e-3), std::domain_error);
  CHECK_THROWS_AS(ExtReal(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("scaling keeps the zero times infinity case explicit") {
  CHECK(ExtReal(2.0).scaled(0.5).value() == doctest::Approx(1.0));
  CHECK(ExtReal::infinity().scaled(2.0).is_infinite());
  CHECK_THROWS_AS((void)ExtReal::infinity().scaled(0.0), std::domain_error);
  CHECK_THROWS_AS((void)ExtReal(1.0).scaled(-1.0), std::domain_error);
}

TEST_CASE("printing and json use inf") {
  std::ostringstream os;
  os << ExtReal::infinity() << ' ' << ExtReal(0.25);
  CHECK(os.str() == "inf 0.25");
  CHECK(mininfo::ext_real_to_json(ExtReal::infinity()) == "inf");
  CHECK(mininfo::ext_real_from_json(mininfo::Json("inf")).is_infinite());
  CHECK(mininfo::ext_real_from_json(mininfo::ext_real_to_json(ExtReal(0.1))).value() == 0.1);
}
