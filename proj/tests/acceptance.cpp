// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracle.hpp"
#include "qkd/cli.hpp"
#include "qkd/cww.hpp"
#include "qkd/decoy.hpp"
#include "qkd/qudit.hpp"
#include "qkd/rates.hpp"
#include "qkd/simulator.hpp"

using namespace qkd;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int invoke(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "qkdrate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const std::string kData = QKD_DATA_DIR;
const std::string kScratch = QKD_SCRATCH_DIR;

Outcome field_data() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto rep = cli::analyze_experiment(cli::load_experiment_input(kData + "/field.json"), cli::AnalysisProtocol::cww4);
  const double dt = seconds_since(t0);
  const auto& b = rep.bounds;
  o.require(rel(b.y1, 8.38e-3) <= 0.01, "Y1 within 1%");
  o.require(rel(b.e1[1], 0.0021) <= 0.05, "e1^1 within 5%");
  o.require(rel(b.e1[3], 0.0021) <= 0.05, "e1^3 within 5%");
  o.require(rel(b.e1[2], 0.019) <= 0.03, "e1^2 within 3%");
  o.require(rel(rep.rate(), 7.31e-4) <= 0.02, "R within 2%");
  o.require(dt < 1.0, "runtime < 1 s");
  o.note("Y1=" + fmt("%.4g", b.y1) + " e1=(" + fmt("%.3f%%", 100 * b.e1[1]) + "," + fmt("%.3f%%", 100 * b.e1[2]) + "," +
         fmt("%.3f%%", 100 * b.e1[3]) + ") R=" + fmt("%.4g", rep.rate()) + " t=" + fmt("%.3fs", dt));
  return o;
}

Outcome degraded() {
  Outcome o;
  const std::string path = kData + "/field_degraded.json";
  const auto in = cli::load_experiment_input(path);
  const auto cww = cli::analyze_experiment(in, cli::AnalysisProtocol::cww4);
  const auto bb = cli::analyze_experiment(in, cli::AnalysisProtocol::bb84);
  const int code = invoke({"experiment", path, "--protocol", "bb84"});
  o.require(rel(cww.rate(), 1.64e-5) <= 0.05, "CWW4 R within 5%");
  o.require(rel(bb.bb84_e1, 0.205) <= 0.02, "BB84 e1 within 2%");
  o.require(bb.raw_rate() <= 0.0, "BB84 rate non-positive");
  o.require(code == cli::kNoKey, "exit code 2");
  o.note("R=" + fmt("%.4g", cww.rate()) + " bb84 e1=" + fmt("%.3f%%", 100 * bb.bb84_e1) + " bb84 raw R=" +
         fmt("%.3g", bb.raw_rate()) + " exit=" + std::to_string(code));
  return o;
}

Outcome thresholds() {
  Outcome o;
  using rates::Axis;
  using rates::Protocol;
  const auto t0 = Clock::now();
  const double six = rates::find_threshold({Protocol::six_state, 1}, Axis::ber);
  const double bb = rates::find_threshold({Protocol::bb84, 1}, Axis::ber);
  const double cd = rates::find_threshold({Protocol::cww4_der, 1}, Axis::der);
  const double cb = rates::find_threshold({Protocol::cww4_der, 1}, Axis::ber);
  const double ss = rates::find_threshold({Protocol::ss4_unbiased, 1}, Axis::der);
  const double x1 = rates::find_crossover({Protocol::cww4_der, 1}, {Protocol::ss4_unbiased, 1}, Axis::der);
  const double x2 = rates::find_crossover({Protocol::cww4_der, 1}, {Protocol::ss4_extreme, 1}, Axis::der);
  const double dt = seconds_since(t0);
  o.require(std::abs(six - 0.126) <= 0.0005, "six-state BER 12.6%");
  o.require(std::abs(bb - 0.110) <= 0.0005, "BB84 BER 11.0%");
  o.require(std::abs(cd - 0.216) <= 0.001, "CWW4 DER 21.6%");
  o.require(std::abs(cb - 0.144) <= 0.001, "CWW4 BER 14.4%");
  o.require(std::abs(ss - 0.189) <= 0.002, "SS4 DER 18.9%");
  o.require(std::abs(x1 - 0.144) <= 0.003, "crossover 14.4%");
  o.require(std::abs(x2 - 0.177) <= 0.003, "crossover 17.7%");
  o.require(dt < 5.0, "runtime < 5 s");
  o.note("six=" + fmt("%.4f", six) + " bb84=" + fmt("%.4f", bb) + " cww4 der=" + fmt("%.4f", cd) + " ber=" +
         fmt("%.4f", cb) + " ss4=" + fmt("%.4f", ss) + " cross=" + fmt("%.4f", x1) + "," + fmt("%.4f", x2) +
         " t=" + fmt("%.3fs", dt));
  return o;
}

Outcome coincidence() {
  Outcome o;
  double worst = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double e = 0.125 * i / 101.0;
    const double want = oracle::six_state(e) / 3.0;
    worst = std::fmax(worst, std::abs(cww::rate_cww4_ber(e) - want));
  }
  o.require(worst <= 1e-4, "max deviation <= 1e-4");
  o.note("100 points, max |dR|=" + fmt("%.2e", worst));
  return o;
}

Outcome stationarity() {
  Outcome o;
  double worst = 0.0;
  int points = 0;
  for (int k = 0; k <= 6; ++k) {
    const double es = 0.02 + 0.03 * k;
    const double root = cww::solve_worstcase_e01(es);
    const auto grid = oracle::der_grid_max(es, 1'000'000);
    worst = std::fmax(worst, std::abs(root - grid.arg));
    o.require(std::abs(root - grid.arg) < 5e-5, "root vs grid at e*=" + fmt("%.2f", es));
    // f increases strictly across the bracket and changes sign once.
    const double hi = std::fmin(es / 6.0, (1.0 - es) / 3.0);
    double prev = cww::worstcase_stationarity(0.0, es);
    bool monotone = prev < 0.0;
    for (int i = 1; i <= 100'000; ++i) {
      const double f = cww::worstcase_stationarity(hi * i / 100'000, es);
      monotone = monotone && f > prev;
      prev = f;
    }
    monotone = monotone && prev > 0.0;
    o.require(monotone, "f monotone on the bracket at e*=" + fmt("%.2f", es));
    ++points;
  }
  o.note(std::to_string(points) + " values of e*, max |root - grid argmax|=" + fmt("%.1e", worst));
  return o;
}

// |k - n p| in binomial standard deviations.
double zscore(std::uint64_t k, std::uint64_t n, double p) {
  const double nn = static_cast<double>(n);
  return std::abs(static_cast<double>(k) - nn * p) / std::sqrt(nn * p * (1.0 - p));
}

Outcome simulator_suite() {
  Outcome o;
  const auto t0 = Clock::now();
  sim::SimConfig config = sim::load_sim_config(kData + "/sim_depolarized.conf");
  o.require(config.packets == 10'000'000 && config.depolarize_p == 0.05, "config at 1e7 packets, p = 0.05");
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  const auto truth = sim::single_photon_truth(config);

  constexpr int kRuns = 100;
  int sandwiched = 0;
  for (int run = 0; run < kRuns; ++run) {
    config.seed = 1 + static_cast<std::uint64_t>(run);
    const sim::TallySheet sheet = sim::run_campaign(config, workers);
    if (run == 0) {
      sim::IntensityTally all;
      for (const auto& r : sheet.rows) all += r;
      for (std::size_t g = 1; g < 4; ++g) {
        const double z = zscore(all.single_errors[g], all.single_sifted, 0.0125);
        o.require(z <= 3.0, "e^" + std::to_string(g) + " within 3 sigma of 0.0125");
        o.note("e^" + std::to_string(g) + "=" +
               fmt("%.5f", static_cast<double>(all.single_errors[g]) / static_cast<double>(all.single_sifted)) +
               " (" + fmt("%.1f", z) + " sigma)");
      }
      const double z = zscore(all.single_sifted, all.single_detected, 1.0 / 6.0);
      o.require(z <= 3.0, "sifted/detected within 3 sigma of 1/6");
      o.note("sift=" + fmt("%.5f", static_cast<double>(all.single_sifted) / static_cast<double>(all.single_detected)) +
             " (" + fmt("%.1f", z) + " sigma)");
    }
    const auto b = decoy::estimate_all(sim::tally_to_records(sheet));
    bool ok = b.y0 <= truth.y0 && b.y1 <= truth.y1;
    for (int g = 1; g < 4; ++g) ok = ok && b.e1[g] >= truth.e1[g];
    sandwiched += ok;
  }
  const double dt = seconds_since(t0);
  o.require(sandwiched >= 99, "bounds sandwich truth in >= 99 of 100 runs");
  o.require(dt < 120.0, "runtime < 2 min");
  o.note("sandwich " + std::to_string(sandwiched) + "/100, workers=" + std::to_string(workers) + " t=" + fmt("%.1fs", dt));
  return o;
}

Outcome determinism() {
  Outcome o;
  const std::string conf = kData + "/sim_depolarized.conf";
  const std::string a = kScratch + "/acc_a.json", b = kScratch + "/acc_b.json";
  std::string out_a, out_b;
  invoke({"simulate", conf, "--packets", "1000000", "--seed", "5", "--workers", "1", "--output", a}, &out_a);
  invoke({"simulate", conf, "--packets", "1000000", "--seed", "5", "--workers", "7", "--output", b}, &out_b);
  const std::string ja = slurp(a), jb = slurp(b);
  o.require(!ja.empty() && ja == jb, "record files identical across worker counts");
  o.require(out_a == out_b, "reports identical");

  const std::string ca = kScratch + "/acc_a.csv", cb = kScratch + "/acc_b.csv";
  invoke({"curves", "--axis", "der", "--grid", "0:0.25:0.001", "--output", ca});
  invoke({"curves", "--axis", "der", "--grid", "0:0.25:0.001", "--output", cb});
  const std::string sa = slurp(ca), sb = slurp(cb);
  o.require(!sa.empty() && sa == sb, "CSV files identical");
  std::string ta, tb;
  invoke({"thresholds"}, &ta);
  invoke({"thresholds"}, &tb);
  o.require(ta == tb, "threshold tables identical");
  o.note("records " + std::to_string(ja.size()) + " B, csv " + std::to_string(sa.size()) + " B");
  return o;
}

Outcome mub() {
  Outcome o;
  const auto t = sim::overlap_table();
  double worst = 0.0;
  for (int a = 0; a < 12; ++a) {
    for (int b = 0; b < 12; ++b) {
      const auto la = sim::StateLabel::from_index(a), lb = sim::StateLabel::from_index(b);
      const double want = a == b ? 1.0 : (la.basis() == lb.basis() ? 0.0 : 0.25);
      worst = std::fmax(worst, std::abs(t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] - want));
    }
  }
  o.require(worst <= 1e-12, "all 144 overlaps within 1e-12");
  o.note("max deviation " + fmt("%.1e", worst));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 field data reproduction", field_data},
      {"2 degraded interference", degraded},
      {"3 threshold regression", thresholds},
      {"4 BER coincidence with six-state", coincidence},
      {"5 worst-case DER root vs grid", stationarity},
      {"6 simulator statistics", simulator_suite},
      {"7 determinism", determinism},
      {"8 mutually unbiased bases", mub},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s  %-34s %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
