#include "property_suites.hpp"

#include <doctest.h>

using namespace ratewatch;

namespace {

void expect_clean(const props::PropResult& r, int want_cases) {
    INFO(r.name, ": ", r.first_failure);
    CHECK(r.cases == want_cases);
    CHECK(r.failures == 0);
}

}  // namespace

TEST_CASE("property: cleaning is idempotent") {
    expect_clean(props::cleaning_idempotent(1000, 0x5eed0001), 1000);
}

TEST_CASE("property: cleaned interior runs span at least 3 samples") {
    expect_clean(props::interior_runs_long(1000, 0x5eed0002), 1000);
}

TEST_CASE("property: arbitration is the max grant and monotonic") {
    expect_clean(props::arbitration_monotonic(1000, 0x5eed0003), 1000);
}

TEST_CASE("property: file formats round trip") {
    expect_clean(props::files_round_trip(1000, 0x5eed0004), 1000);
}

TEST_CASE("suite runner aggregates all four properties") {
    const auto all = props::run_all(25, 7);
    REQUIRE(all.size() == 4);
    for (const props::PropResult& r : all) {
        INFO(r.name, ": ", r.first_failure);
        CHECK(r.cases == 25);
        CHECK(r.ok());
    }
}
