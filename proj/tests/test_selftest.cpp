#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "adfslam/selftest.hpp"

TEST_CASE("selftest passes on a healthy build") {
    const auto report = adfslam::run_selftest();
    REQUIRE(report.properties.size() >= 6);
    for (const auto& p : report.properties) {
        INFO(p.name << " observed " << p.observed << " tolerance " << p.tolerance);
        CHECK(p.passed);
        CHECK(p.tolerance > 0.0);
        CHECK(std::isfinite(p.observed));
        CHECK(p.observed >= 0.0);
    }
    CHECK(report.all_passed());

    std::set<std::string> names;
    for (const auto& p : report.properties) {
        names.insert(p.name);
    }
    CHECK(names.size() == report.properties.size());
    CHECK(names.count("cubature-degree3-exactness") == 1);
    CHECK(names.count("linear-kf-equivalence") == 1);
    CHECK(names.count("slam-jacobian-fd-agreement") == 1);
    CHECK(names.count("procrustes-recovery") == 1);

    // the probes measure real deviations, not zero against zero
    int nonzero = 0;
    for (const auto& p : report.properties) {
        nonzero += p.observed > 0.0 ? 1 : 0;
    }
    CHECK(nonzero >= 3);
}

TEST_CASE("selftest report prints one line per property with its tolerance") {
    const auto report = adfslam::run_selftest();
    std::ostringstream out;
    adfslam::print_selftest(out, report);
    const std::string text = out.str();
    std::istringstream in(text);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        CHECK(line.find("tolerance") != std::string::npos);
        CHECK((line.rfind("[PASS] ", 0) == 0 || line.rfind("[FAIL] ", 0) == 0));
        ++lines;
    }
    CHECK(lines == report.properties.size());
}
