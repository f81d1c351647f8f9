// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include "sdcc/io.hpp"
#include "sdcc/selftest.hpp"
#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <thread>

using namespace sdcc;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void line(int criterion, bool pass, const std::string& what, double runtime,
          const std::string& detail = "") {
  std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), runtime, detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++failures;
}

int jobs() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// criterion 1: reproduction of the built-in worked example
void criterion1() {
  Timer t;
  const ExampleReport rep = example1();
  std::string detail;
  for (const auto& c : rep.clauses) {
    detail += c.name + (c.pass ? ":pass " : ":FAIL(" + std::to_string(c.error) + ") ");
  }
  const bool pass = rep.pass && rep.runtime_seconds < 5.0;
  line(1, pass, "worked-example reproduction", t.seconds(), detail);
}

// criterion 2: finite-difference oracle for the second directional derivative
void criterion2() {
  Timer t;
  const SuiteResult res = suite_fd_second_order(0x5DCC, 200, jobs());
  const bool pass = res.pass && t.seconds() < 60.0;
  line(2, pass, "second-derivative finite-difference oracle", t.seconds(),
       "worst normalized final residual " + std::to_string(res.worst) + " over " +
           std::to_string(res.count) + " instances");
}

// criterion 3: closed-form cases against the generic engine
void criterion3() {
  Timer t;
  const SuiteResult res = suite_engine_equivalence(0x5DCC, 200, jobs());
  line(3, res.pass, "engine equivalence", t.seconds(),
       "max discrepancy " + std::to_string(res.worst));
}

// criterion 4: dual membership oracle plus the curve ladder
void criterion4() {
  Timer t;
  const SuiteResult res = suite_tangent_dual_oracle(0x5DCC, 500, 500, true, jobs());
  const int disagreements = static_cast<int>(res.metric("disagreements", 1));
  const int literal = static_cast<int>(res.metric("curve_literal_violations", 1));
  const int substance = static_cast<int>(res.metric("curve_substance_violations", 1));
  const bool pass = disagreements == 0 && literal == 0 &&
                    res.metric("members") >= 500 && res.metric("nonmembers") >= 500;
  std::ostringstream detail;
  detail << "disagreements " << disagreements << "/" << res.count
         << ", per-decade factor-0.1 ladder violations " << literal << " (worst ratio "
         << res.metric("worst_ladder_ratio") << "), bottom-rung o(t^2) witness violations "
         << substance;
  line(4, pass, "second-order tangent dual oracle + curve ladder", t.seconds(),
       detail.str());
}

// criterion 5: polarity of the Clarke cone and translation closure
void criterion5() {
  Timer t;
  const SuiteResult res = suite_clarke_polarity(0x5DCC, 500, jobs());
  line(5, res.pass, "Clarke-cone polarity and translation closure", t.seconds(),
       "worst pairing " + std::to_string(res.worst) + " over " +
           std::to_string(res.count) + " samples");
}

// criterion 6: support-function values against the sampling maximizer
void criterion6() {
  Timer t;
  const SuiteResult res = suite_sigma_support(0x5DCC, 50, 10000, jobs());
  line(6, res.pass, "support-function validation", t.seconds(),
       "worst value gap " + std::to_string(res.worst) + " over " +
           std::to_string(res.count) + " instances");
}

// criterion 7: necessary-condition sanity on constructed instances
void criterion7() {
  Timer t;
  const SuiteResult res = suite_sonc_sanity(0x5DCC);
  line(7, res.pass, "necessary-condition sanity", t.seconds());
}

// criterion 8: byte-identical install-check reports for a fixed seed
void criterion8() {
  Timer t;
  std::ostringstream a, b, err;
  const int ca = cli::run({"selftest", "--quick", "--seed", "4242"}, a, err);
  const int cb = cli::run({"selftest", "--quick", "--seed", "4242"}, b, err);
  const bool pass = ca == 0 && cb == 0 && a.str() == b.str() && !a.str().empty();
  line(8, pass, "install-check determinism", t.seconds(),
       "report size " + std::to_string(a.str().size()) + " bytes");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
