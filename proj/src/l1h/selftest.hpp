#pragma once

#include "l1h/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace l1h::selftest {

struct SuiteResult {
  std::string name;
  Index total = 0;
  Index passed = 0;
  Index skipped = 0;     // degenerate draws the oracle refuses to certify
  double worst = 0.0;    // largest discrepancy or certificate violation seen
  std::string first_failure;

  bool ok() const { return passed == total; }
};

// Homotopy against the enumeration oracles on tiny random instances.
SuiteResult bpdn_oracle(Index count, std::uint64_t seed);
SuiteResult ds_oracle(Index count, std::uint64_t seed);
SuiteResult decode_oracle(Index count, std::uint64_t seed);
// Optimality certificates of every solver, cold and warm, cycling through
// the solver kinds.
SuiteResult kkt_mixed(Index count, std::uint64_t seed);

struct Counts {
  Index bpdn = 50;
  Index ds = 30;
  Index decode = 30;
  Index kkt = 80;
};

std::vector<SuiteResult> run_all(const Counts& counts, std::uint64_t seed);

}  // namespace l1h::selftest
