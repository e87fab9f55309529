// Acceptance gate: runs the full criterion battery in-process and asserts
// every criterion passes, then drives the installed CLI binary to pin the
// end-to-end contract (byte-identical repeated runs, negative control
// failing exactly the table-dependent criteria).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <set>
#include <string>

#include <json.hpp>

#include "qhom/verify.hpp"

#include "helpers.hpp"

TEST_CASE("acceptance battery: every criterion passes") {
  const qhom::BatteryReport r = qhom::run_battery(false);
  // One pass/fail line per criterion, visible in the test log.
  std::fputs(qhom::battery_text(r).c_str(), stdout);
  std::fflush(stdout);
  CHECK(!r.negative_control);
  REQUIRE(r.criteria.size() == 11);
  for (const qhom::CriterionResult& c : r.criteria) {
    CAPTURE(c.id);
    CAPTURE(c.name);
    CHECK(c.passed);
  }
  CHECK(r.all_passed);
}

#ifdef QHOM_CLI_PATH

TEST_CASE("acceptance: repeated verification runs are byte-identical") {
  const std::string cmd = qtest::shell_quote(QHOM_CLI_PATH) +
                          " verify-paper --format json 2>/dev/null";
  const qtest::SpawnResult r1 = qtest::spawn(cmd);
  const qtest::SpawnResult r2 = qtest::spawn(cmd);
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  REQUIRE(!r1.out.empty());
  CHECK(r1.out == r2.out);
  CHECK(r1.out.back() == '\n');
  // The payload parses and reports a clean battery.
  const nlohmann::json j = nlohmann::json::parse(r1.out);
  CHECK(j.at("all_passed").get<bool>());
  CHECK(!j.at("negative_control").get<bool>());
  CHECK(j.at("criteria").size() == 11);
}

TEST_CASE("acceptance: the negative control fails exactly the table-dependent criteria") {
  const std::string cmd = qtest::shell_quote(QHOM_CLI_PATH) +
                          " verify-paper --negative-control --format json 2>/dev/null";
  const qtest::SpawnResult r = qtest::spawn(cmd);
  CHECK(r.exit_code != 0);
  REQUIRE(!r.out.empty());
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.at("negative_control").get<bool>());
  CHECK(!j.at("all_passed").get<bool>());
  std::set<int> failed;
  for (const nlohmann::json& c : j.at("criteria")) {
    if (!c.at("passed").get<bool>()) failed.insert(c.at("id").get<int>());
  }
  const std::set<int> expected = {1, 4, 9};
  CHECK(failed == expected);
}

#endif  // QHOM_CLI_PATH
