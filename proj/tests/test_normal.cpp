#include <doctest.h>

#include <cmath>
#include <limits>

#include "hopsi/errors.hpp"
#include "hopsi/normal.hpp"
#include "oracle/oracle.hpp"
#include "support.hpp"

using namespace hopsi;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

bool rel_close(double got, double want, double tol) {
    return std::abs(got - want) <= tol * std::abs(want);
}
}  // namespace

TEST_CASE("normal cdf against high-precision values") {
    // 40-digit reference values
    CHECK(rel_close(normal_cdf(1.0), 0.8413447460685429485852, 1e-15));
    CHECK(rel_close(normal_cdf(2.0), 0.9772498680518207928, 1e-15));
    CHECK(rel_close(normal_cdf(-3.0), 0.0013498980316300945267, 1e-14));
    CHECK(rel_close(normal_cdf(0.3), 0.61791142218895263307, 1e-15));
    CHECK(rel_close(normal_sf(6.0), 9.865876450376981407e-10, 1e-13));
    CHECK(rel_close(normal_sf(8.0), 6.220960574271784123516e-16, 1e-13));
    CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("log Mills ratio is continuous across the branch point") {
    const double below = log_mills_ratio(std::nextafter(8.0, 0.0));
    const double above = log_mills_ratio(8.0);
    CHECK(std::abs(below - above) < 1e-12);
    // (1 - Phi(t)) / phi(t) -> 1/t
    CHECK(rel_close(std::exp(log_mills_ratio(1e4)), 1e-4, 1e-7));
}

TEST_CASE("truncated normal cdf examples") {
    CHECK(trunc_norm_cdf(0.0, 0.0, 1.0, -inf, inf) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(trunc_norm_cdf(0.0, 0.0, 1.0, -2.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rel_close(trunc_norm_cdf(1.0, 0.0, 1.0, 0.0, 2.0), 0.71523277201090607594, 1e-14));
    // deep windows keep relative accuracy
    CHECK(rel_close(trunc_norm_cdf(10.5, 0.0, 1.0, 10.0, 12.0), 0.99433190361090492524, 1e-12));
    CHECK(rel_close(trunc_norm_cdf(30.01, 0.0, 1.0, 30.0, 31.0), 0.25946511883215678952, 1e-10));
    // mirrored window on the lower side
    CHECK(rel_close(trunc_norm_cdf(-30.01, 0.0, 1.0, -31.0, -30.0), 1.0 - 0.25946511883215678952,
                    1e-10));
    // scaled and shifted
    CHECK(rel_close(trunc_norm_cdf(3.0, 1.0, 4.0, 1.0, 5.0), 0.71523277201090607594, 1e-14));
}

TEST_CASE("truncated normal cdf boundaries and errors") {
    CHECK(trunc_norm_cdf(-1.0, 0.0, 1.0, -1.0, 1.0) == 0.0);
    CHECK(trunc_norm_cdf(1.0, 0.0, 1.0, -1.0, 1.0) == 1.0);
    CHECK(trunc_norm_cdf(-5.0, 0.0, 1.0, -1.0, 1.0) == 0.0);
    CHECK(trunc_norm_cdf(5.0, 0.0, 1.0, -1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(trunc_norm_cdf(0.0, 0.0, 1.0, 1.0, 1.0), UsageError);
    CHECK_THROWS_AS(trunc_norm_cdf(0.0, 0.0, 1.0, 2.0, 1.0), UsageError);
    CHECK_THROWS_AS(trunc_norm_cdf(0.0, 0.0, 0.0, -1.0, 1.0), UsageError);
    CHECK_THROWS_AS(trunc_norm_cdf(0.0, 0.0, -1.0, -1.0, 1.0), UsageError);
}

TEST_CASE("truncated normal cdf agrees with the extended-precision reference") {
    const double windows[][2] = {{-inf, inf}, {-1.0, 2.0},  {0.5, inf},  {-inf, -0.5},
                                 {3.0, 4.0},  {-4.0, -3.0}, {8.0, 9.5},  {12.0, 40.0},
                                 {-40.0, -12.0}, {20.0, 20.5}, {-0.1, 0.1}};
    int failures = 0, checked = 0;
    for (const auto& win : windows)
        for (double mean : {-1.0, 0.0, 0.7})
            for (int i = 1; i < 20; ++i) {
                const double v = win[0], w = win[1];
                const double lo = std::isinf(v) ? std::max(w, 0.0) - 6.0 : v;
                const double hi = std::isinf(w) ? std::min(v, 0.0) + 6.0 : w;
                const double x = lo + (hi - lo) * i / 20.0;
                if (x <= v || x >= w) continue;
                const double got = trunc_norm_cdf(x, mean, 1.0, v, w);
                const double want =
                    static_cast<double>(oracle::reference_trunc_norm_cdf(x, mean, 1.0L, v, w));
                ++checked;
                const double scale = std::min(want, 1.0 - want);
                if (std::abs(got - want) > 1e-9 * std::max(scale, 1e-300) + 1e-15) ++failures;
            }
    CHECK(checked > 300);
    CHECK(failures == 0);
}

TEST_CASE("truncated normal cdf is monotone") {
    for (const auto& win : {std::pair{-1.0, 2.0}, std::pair{5.0, 6.0}, std::pair{-inf, 0.3}}) {
        // in x
        double prev = 0.0;
        for (int i = 1; i < 200; ++i) {
            const double lo = std::isinf(win.first) ? -6.0 : win.first;
            const double x = lo + (win.second - lo) * i / 200.0;
            const double f = trunc_norm_cdf(x, 0.0, 1.0, win.first, win.second);
            CHECK(f >= prev);
            prev = f;
        }
        // in the mean, at a fixed interior point
        const double x = std::isinf(win.first) ? -0.2 : 0.5 * (win.first + win.second);
        prev = 1.0;
        for (int i = 0; i < 400; ++i) {
            const double mean = -20.0 + 0.1 * i;
            const double f = trunc_norm_cdf(x, mean, 1.0, win.first, win.second);
            CHECK(f <= prev);
            prev = f;
        }
        CHECK(trunc_norm_cdf(x, -1.0, 1.0, win.first, win.second) >
              trunc_norm_cdf(x, 1.0, 1.0, win.first, win.second));
    }
}

TEST_CASE("extended-precision instantiation") {
    const long double f = trunc_norm_cdf<long double>(1.0L, 0.0L, 1.0L, 0.0L, 2.0L);
    CHECK(std::abs(static_cast<double>(f) - 0.71523277201090607594) < 1e-15);
}

TEST_CASE("truncated normal survival function") {
    for (double x : {-0.7, 0.2, 1.9})
        CHECK(trunc_norm_sf(x, 0.1, 1.3, -1.0, 2.0) + trunc_norm_cdf(x, 0.1, 1.3, -1.0, 2.0) ==
              doctest::Approx(1.0).epsilon(1e-14));
    // Q(10) keeps full relative accuracy where 1 - F is zero
    CHECK(rel_close(trunc_norm_sf(10.0, 0.0, 1.0, -inf, inf), 7.61985302416052606597334325e-24,
                    1e-12));
    CHECK(trunc_norm_sf(2.0, 0.0, 1.0, -1.0, 2.0) == 0.0);
    CHECK(trunc_norm_sf(-1.0, 0.0, 1.0, -1.0, 2.0) == 1.0);
}
