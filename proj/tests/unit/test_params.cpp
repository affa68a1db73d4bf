#include <cmath>

#include "doctest.h"
#include "hrn/params.hpp"

using namespace hrn;

TEST_SUITE("model-core") {

TEST_CASE("make_params fills gamma") {
  const auto p = make_params(0.1, 0.8, 0.8, 1.3, 0.7);
  CHECK(p.gamma == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_FALSE(p.is_extended());
  const auto q = make_params(0.1, 0.7, 0.8, 1.3, 0.7, 0.05, 0.05);
  CHECK(q.gamma == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(q.is_extended());
}

TEST_CASE("validation rejects constraint violations") {
  CHECK_THROWS_AS(make_params(0.0, 1.0, 0.5, 1.0, 1.0), ValidationError);  // beta = 1
  CHECK_THROWS_AS(make_params(1.0, 0.0, 0.5, 1.0, 1.0), ValidationError);  // alpha = 1
  CHECK_THROWS_AS(make_params(0.6, 0.6, 0.5, 1.0, 1.0), ValidationError);  // gamma < 0
  CHECK_THROWS_AS(make_params(0.3, 0.3, 1.5, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_params(0.3, 0.3, 0.5, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_params(0.3, 0.3, 0.5, 1.0, -2.0), ValidationError);
  CHECK_THROWS_AS(make_params(0.3, 0.3, 0.5, INFINITY, 1.0), ValidationError);
  CHECK_THROWS_AS(make_params(0.3, 0.3, NAN, 1.0, 1.0), ValidationError);

  HybridParams off{0.3, 0.3, 0.3, 0.5, 1.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS(validate(off), ValidationError);  // sums to 0.9
  off.gamma = 0.4 + 1e-13;
  CHECK_NOTHROW(validate(off));

  HybridParams target_only{0.0, 0.0, 1.0, 0.5, 1.0, 1.0};
  CHECK_NOTHROW(validate(target_only));
  CHECK_THROWS_AS(validate_for_estimation(target_only), ValidationError);
  CHECK_FALSE(is_valid(HybridParams{0.5, 0.5, 0.5, 0.5, 1.0, 1.0}));
}

TEST_CASE("derived constants") {
  const auto th = make_params(0.1, 0.8, 0.8, 1.3, 0.7);
  const auto d = derived_constants(th);
  CHECK(d.delta_in_tilde == doctest::Approx(1.3 / 0.8 + 0.2 / (0.8 * 0.2)));
  CHECK(d.delta_out_tilde == doctest::Approx(0.7 / 0.8 + 0.2 / (0.8 * 0.2)));
  CHECK(d.c1 == doctest::Approx(0.9 * 0.8 / (1.0 + 1.3 * 0.2)));
  CHECK(d.c2 == doctest::Approx(0.9 * 0.8 / (1.0 + 0.7 * 0.2)));
  CHECK(d.rate_in == doctest::Approx(1.0 / d.c1));
  CHECK(d.rate_out == doctest::Approx(1.0 / d.c2));
  CHECK(growth_exponent_in(th) == doctest::Approx(d.c1));
  CHECK(growth_exponent_out(th) == doctest::Approx(d.c2));
  CHECK(offset_from_effective(d.delta_in_tilde, th.p, th.beta) == doctest::Approx(1.3));
}

TEST_CASE("p = 1, beta = 0 reduces to pure preferential attachment") {
  const auto th = make_params(0.4, 0.0, 1.0, 1.7, 0.6);
  const auto d = derived_constants(th);
  CHECK(d.delta_in_tilde == doctest::Approx(1.7).epsilon(1e-15));
  CHECK(d.delta_out_tilde == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(d.c1 == doctest::Approx(0.4 / (1.0 + 1.7)));
  CHECK(d.c2 == doctest::Approx(0.6 / (1.0 + 0.6)));
}

TEST_CASE("p = 0 has no effective offsets") {
  const auto th = make_params(0.3, 0.3, 0.0, 1.0, 1.0);
  CHECK_THROWS_AS(derived_constants(th), ValidationError);
  CHECK_THROWS_AS(effective_offset(1.0, 0.0, 0.3), ValidationError);
  CHECK(growth_exponent_in(th) == 0.0);
}

}
