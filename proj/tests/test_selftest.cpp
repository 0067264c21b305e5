#include "doctest.h"

#include "l1h/selftest.hpp"

using namespace l1h;

TEST_CASE("selftest suites pass at small counts") {
  selftest::Counts counts;
  counts.bpdn = 20;
  counts.ds = 12;
  counts.decode = 12;
  counts.kkt = 24;
  for (const auto& suite : selftest::run_all(counts, 5)) {
    CAPTURE(suite.name);
    CAPTURE(suite.first_failure);
    CHECK(suite.total > 0);
    CHECK(suite.ok());
    CHECK(suite.skipped <= suite.total);
  }
}
