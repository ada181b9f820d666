#include <doctest.h>

#include <cmath>

#include "diwe/instance.hpp"
#include "diwe/rng.hpp"

using namespace diwe;

TEST_CASE("euclidean_distance basics") {
    CHECK(euclidean_distance(std::vector<double>{0, 0}, std::vector<double>{3, 4}) ==
          doctest::Approx(5.0));
    const std::vector<double> v{0.3, 0.1, 0.9};
    CHECK(euclidean_distance(v, v) == 0.0);
    // hand evaluation: sqrt(0.09 + 0.16 + 0)
    CHECK(euclidean_distance(std::vector<double>{0.2, 0.7, 0.1},
                             std::vector<double>{0.5, 0.3, 0.1}) == doctest::Approx(0.5));
}

TEST_CASE("euclidean_distance rejects dimension mismatch") {
    CHECK_THROWS_AS(euclidean_distance(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("distance symmetry and triangle inequality on random triples") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(5), b(5), c(5);
        for (auto* vec : {&a, &b, &c})
            for (double& x : *vec) x = rng.uniform(-2.0, 2.0);
        const double ab = euclidean_distance(a, b);
        const double ba = euclidean_distance(b, a);
        CHECK(ab == ba);  // bit-identical, same summation order
        const double ac = euclidean_distance(a, c);
        const double cb = euclidean_distance(c, b);
        CHECK(ab <= ac + cb + 1e-12);
    }
}

TEST_CASE("validate_instance") {
    const StreamSchema schema{3, 2, {}};
    CHECK(!validate_instance({{0.1, 0.2, 0.3}, 1, 1}, schema));
    CHECK(validate_instance({{0.1, 0.2}, 0, 1}, schema));           // wrong dimension
    CHECK(validate_instance({{0.1, 0.2, 0.3}, 7, 1}, {3, 2, {}}));  // label out of range
}

TEST_CASE("schema invariants") {
    CHECK_THROWS_AS((StreamSchema{0, 2, {}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((StreamSchema{3, 1, {}}).validate(), std::invalid_argument);
    CHECK_NOTHROW((StreamSchema{1, 2, {}}).validate());
}

TEST_CASE("rng determinism") {
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(Rng(124).next_u64() != Rng(123).next_u64());
}

TEST_CASE("rng gaussian moments") {
    Rng rng(7);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sq += g * g;
    }
    CHECK(sum / n == doctest::Approx(0.0).epsilon(0.02).scale(1.0));
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}
