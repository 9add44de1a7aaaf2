#include <doctest.h>

#include <cmath>
#include <random>

#include "bhdimer/errors.hpp"
#include "bhdimer/model.hpp"

using namespace bhd;

TEST_CASE("reduce maps the two-mode couplings") {
    PhysicalParams p{-0.25, -1.0, -0.4, 0.0, 100};
    ReducedParams r = reduce(p);
    CHECK(r.c2() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(r.delta() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.N() == 100);

    PhysicalParams q{-1.0, -1.0, -2.0, 0.0, 10};
    CHECK(reduce(q).c() == doctest::Approx(std::sqrt(2.0)));
    CHECK(reduce(q).delta() == doctest::Approx(2.0));
}

TEST_CASE("reduce rejects degenerate couplings") {
    CHECK_THROWS_AS(reduce({0.0, 0.0, -1.0, 0.0, 4}), Error);
    try {
        reduce({0.0, 0.0, -1.0, 0.0, 4});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroTunneling);
    }
    try {
        reduce({0.0, -1.0, 0.5, 0.0, 4});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonAttractive);
    }
    try {
        ReducedParams(1.0, 0.5, 0);
        FAIL("N = 0 accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidParams);
    }
    CHECK_THROWS_AS(ReducedParams(-1.0, 0.5, 3), Error);
    CHECK_THROWS_AS(ReducedParams(1.0, NAN, 3), Error);
}

TEST_CASE("energy map is affine in E") {
    PhysicalParams p{0.3, -1.0, -0.8, 0.1, 7};
    double a = map_energy_to_physical(0.0, p);
    double b = map_energy_to_physical(1.0, p);
    CHECK(b - a == doctest::Approx(-p.J));
    CHECK(a == doctest::Approx(0.5 * p.U * p.N * (p.N - 1) + p.epsilon * p.N));
}

TEST_CASE("symmetry images carry the expected signs") {
    PhysicalParams p{0.2, -1.0, -0.5, 0.1, 5};
    auto im = symmetry_images(p);
    REQUIRE(im.size() == 3);
    int minus = 0;
    for (const auto& s : im) minus += s.sign < 0;
    CHECK(minus == 1);
    for (const auto& s : im) {
        if (s.sign < 0) {
            CHECK(s.params.U == -p.U);
            CHECK(s.params.V == -p.V);
        }
    }
}

TEST_CASE("parameter JSON round trip and key exclusivity") {
    ParamSet a = ReducedParams(0.7, 0.25, 12);
    ParamSet b = params_from_json(params_to_json(a));
    CHECK(std::get<ReducedParams>(b) == std::get<ReducedParams>(a));

    PhysicalParams p{-0.25, -1.0, -0.4, 0.0, 30};
    auto back = std::get<PhysicalParams>(params_from_json(params_to_json(p)));
    CHECK(back.epsilon == p.epsilon);
    CHECK(back.U == p.U);
    CHECK(back.N == p.N);

    nlohmann::json mixed = {{"c", 1.0}, {"delta", 0.5}, {"U", -1.0}, {"N", 3}};
    CHECK_THROWS_AS(params_from_json(mixed), Error);
    nlohmann::json partial = {{"c", 1.0}, {"N", 3}};
    CHECK_THROWS_AS(params_from_json(partial), Error);
}
