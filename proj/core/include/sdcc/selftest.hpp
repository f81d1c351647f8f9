#pragma once

#include "sdcc/lowner.hpp"
#include "sdcc/rank_app.hpp"

namespace sdcc {

/// Random point/direction triple with engineered eigenvalue clusters
/// (repeated eigenvalues, optionally a nonempty zero group).
struct OracleInstance {
  Mat Z, H, W;
};
OracleInstance random_clustered_instance(std::mt19937_64& rng, int n, bool with_zero);

/// Finite-difference residuals of the projection's directional derivatives:
///   r1(t) = || (Pi(Z + tH) - Pi(Z)) / t - dir1 ||
///   r2(t) = || 2/t^2 (Pi(Z + tH + t^2 W/2) - Pi(Z) - t dir1) - dir2 ||.
double fd_dir1_residual(const Mat& z, const Mat& h, double t);
double fd_dir2_residual(const Mat& z, const Mat& h, const Mat& w, double t);

/// Same residuals for the generic engine at an arbitrary scalar function.
double fd_dir1_residual(const ScalarFun& f, const Mat& z, const Mat& h, double t);
double fd_dir2_residual(const ScalarFun& f, const Mat& z, const Mat& h, const Mat& w,
                        double t);

struct SuiteResult {
  std::string name;
  bool pass = false;
  int count = 0;          // instances exercised
  double worst = 0.0;     // suite-specific worst figure of merit
  std::vector<std::string> details;
  std::vector<std::pair<std::string, double>> metrics;

  double metric(const std::string& key, double fallback = 0.0) const {
    for (const auto& [k, v] : metrics)
      if (k == key) return v;
    return fallback;
  }
};

SuiteResult suite_fd_second_order(std::uint64_t seed, int instances, int jobs = 1);
SuiteResult suite_engine_equivalence(std::uint64_t seed, int instances, int jobs = 1);
SuiteResult suite_complement_identity(std::uint64_t seed, int instances, int jobs = 1);
SuiteResult suite_tangent_dual_oracle(std::uint64_t seed, int members, int nonmembers,
                                      bool with_curve_ladder, int jobs = 1);
SuiteResult suite_clarke_polarity(std::uint64_t seed, int samples, int jobs = 1);
SuiteResult suite_sigma_support(std::uint64_t seed, int instances, int samples,
                                int jobs = 1);
SuiteResult suite_sonc_sanity(std::uint64_t seed);
SuiteResult suite_example_internal();

struct SelftestConfig {
  std::uint64_t seed = 0x5DCC;
  bool quick = false;
  int jobs = 1;
};

struct SelftestReport {
  SelftestConfig config;
  std::vector<SuiteResult> suites;
  bool pass = false;
  double runtime_seconds = 0.0;
};

/// Install check: the oracle suites at reduced sample counts.
SelftestReport run_selftest(const SelftestConfig& cfg);

}  // namespace sdcc
