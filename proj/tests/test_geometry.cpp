#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "hnav/geometry.hpp"
#include "hnav/rng.hpp"

using namespace hnav;

TEST_CASE("wrap_angle lands in (-pi, pi]")
{
    CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi / 2.0) == doctest::Approx(-kPi / 2.0));

    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double a = rng.uniform(-50.0, 50.0);
        const double w = wrap_angle(a);
        CHECK(w > -kPi);
        CHECK(w <= kPi);
        // Same direction: the difference is a whole number of turns.
        const double turns = (a - w) / (2.0 * kPi);
        CHECK(std::fabs(turns - std::round(turns)) < 1e-9);
    }
}

TEST_CASE("planar distance")
{
    Pose a{0.0, 0.0, 0.3};
    Pose b{3.0, 4.0, -1.0};
    CHECK(planar_dist(a, b) == doctest::Approx(5.0));
    CHECK(planar_dist(a, 3.0, 4.0) == doctest::Approx(5.0));
}

TEST_CASE("point to segment distance")
{
    // Interior projection, endpoint clamp, degenerate segment.
    CHECK(point_segment_dist(1.0, 1.0, 0.0, 0.0, 2.0, 0.0) == doctest::Approx(1.0));
    CHECK(point_segment_dist(-1.0, 1.0, 0.0, 0.0, 2.0, 0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(point_segment_dist(5.0, 0.0, 2.0, 0.0, 2.0, 0.0) == doctest::Approx(3.0));
}

TEST_CASE("splitmix stream is stable across platforms")
{
    // Pinned values: the log replay story depends on this sequence never moving.
    Rng rng(42);
    CHECK(rng.next_u64() == UINT64_C(13679457532755275413));
    Rng rng2(42);
    const double u = rng2.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);

    Rng a(9), b(9);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("gaussian moments are sane")
{
    Rng rng(3);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.gaussian(0.0, 1.0);
        sum += x;
        sq += x * x;
    }
    CHECK(std::fabs(sum / n) < 0.01);
    CHECK(std::fabs(sq / n - 1.0) < 0.02);
}
