#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "qcr/constants.hpp"
#include "qcr/errors.hpp"
#include "qcr/rng.hpp"
#include "qcr/trace.hpp"
#include "support/oracles.hpp"

using namespace qcr;

namespace {

constexpr double ns = constants::nanosecond;

// Flat unit-amplitude trajectory over [0, span_ns]: lets the noise model be
// tested in isolation.
AmplitudeTrajectory flat_trajectory(double span_ns) {
  AmplitudeTrajectory traj;
  traj.times = {0.0, span_ns * ns};
  traj.amplitudes = {1.0, 1.0};
  traj.damping_before = {0.0, 0.0};
  traj.damping_after = {0.0, 0.0};
  return traj;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("qcr_trace_test_" + std::to_string(++counter));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

}  // namespace

TEST_CASE("noiseless sampling reproduces the trajectory exactly") {
  const AmplitudeTrajectory traj = flat_trajectory(10.0);
  const Trace trace = sample_trace(traj, 2.0, 0.0, 1, 99, 1234);
  REQUIRE(trace.times_ns.size() == 21);
  CHECK(trace.times_ns.front() == 0.0);
  CHECK(trace.times_ns.back() == 10.0);
  CHECK(trace.times_ns[1] == 0.5);
  for (std::size_t i = 0; i < trace.times_ns.size(); ++i) {
    CHECK(trace.amplitudes[i] == 1.0);
  }
  CHECK(trace.meta.noise_sigma == 0.0);
  CHECK(trace.meta.timeline_hash == 1234);
  CHECK(trace.meta.seed == 99);
}

TEST_CASE("noise is deterministic per seed and independent across seeds") {
  const AmplitudeTrajectory traj = flat_trajectory(50.0);
  const Trace a = sample_trace(traj, 2.0, 0.01, 4, 7, 0);
  const Trace b = sample_trace(traj, 2.0, 0.01, 4, 7, 0);
  const Trace c = sample_trace(traj, 2.0, 0.01, 4, 8, 0);
  CHECK(a.amplitudes == b.amplitudes);
  CHECK(a.amplitudes != c.amplitudes);
}

TEST_CASE("noise statistics match the averaged-shot model") {
  const AmplitudeTrajectory traj = flat_trajectory(1e5);
  const double sigma = 0.1;

  SUBCASE("single shot") {
    const Trace t = sample_trace(traj, 2.0, sigma, 1, 11, 0);
    const std::size_t n = t.amplitudes.size();
    REQUIRE(n > 100000);
    double sum = 0.0, sum2 = 0.0;
    for (double a : t.amplitudes) {
      sum += a - 1.0;
      sum2 += (a - 1.0) * (a - 1.0);
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 * sigma / std::sqrt(double(n)));
    CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.02));
  }
  SUBCASE("averaging 16 shots shrinks the variance 16-fold") {
    const Trace t = sample_trace(traj, 2.0, sigma, 16, 11, 0);
    const std::size_t n = t.amplitudes.size();
    double sum = 0.0, sum2 = 0.0;
    for (double a : t.amplitudes) {
      sum += a - 1.0;
      sum2 += (a - 1.0) * (a - 1.0);
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(var == doctest::Approx(sigma * sigma / 16.0).epsilon(0.03));
  }
}

TEST_CASE("noise samples are uncorrelated in time") {
  const AmplitudeTrajectory traj = flat_trajectory(1e5);
  const Trace t = sample_trace(traj, 1.0, 0.05, 1, 3, 0);
  const std::size_t n = t.amplitudes.size();
  double mean = 0.0;
  for (double a : t.amplitudes) mean += a;
  mean /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    num += (t.amplitudes[i] - mean) * (t.amplitudes[i + 1] - mean);
  }
  for (std::size_t i = 0; i < n; ++i) {
    den += (t.amplitudes[i] - mean) * (t.amplitudes[i] - mean);
  }
  CHECK(std::abs(num / den) < 3.5 / std::sqrt(double(n)));
}

TEST_CASE("a million noisy samples stay under the latency budget") {
  const AmplitudeTrajectory traj = flat_trajectory(1e6);
  const auto start = std::chrono::steady_clock::now();
  const Trace t = sample_trace(traj, 1.0, 0.01, 1, 5, 0);
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  CHECK(t.amplitudes.size() >= 1000000);
  CHECK(elapsed < 1.0);
}

TEST_CASE("gaussian sampler has standard-normal moments") {
  GaussianSampler gauss(31415);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0, sum3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = gauss();
    sum += z;
    sum2 += z * z;
    sum3 += z * z * z;
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(double(n)));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(sum3 / n) < 0.05);
}

TEST_CASE("seed mixing separates streams across index tuples") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 4; ++i) {
    for (std::uint64_t j = 0; j < 4; ++j) {
      for (std::uint64_t k = 0; k < 4; ++k) {
        seen.insert(mix_seed(1, i, j, k));
      }
    }
  }
  CHECK(seen.size() == 64);
  CHECK(mix_seed(1) != mix_seed(2));
  CHECK(mix_seed(1, 0, 0, 1) != mix_seed(1, 0, 1, 0));
  CHECK(mix_seed(1, 2, 3, 4) == mix_seed(1, 2, 3, 4));
}

TEST_CASE("trace files round-trip bit-exactly") {
  TempDir dir;
  const AmplitudeTrajectory traj = flat_trajectory(20.0);
  Trace trace = sample_trace(traj, 2.0, 0.0123, 100, 42, 777);
  const std::string path = dir.file("trace.csv");
  write_trace(trace, path);
  CHECK(std::filesystem::exists(path));
  CHECK(std::filesystem::exists(path + ".meta.json"));

  const Trace loaded = read_trace(path);
  CHECK(loaded.times_ns == trace.times_ns);
  CHECK(loaded.amplitudes == trace.amplitudes);
  CHECK(loaded.meta == trace.meta);
}

TEST_CASE("golden trace and rate files are byte-stable") {
  TempDir dir;
  testing::write_golden_artifacts(dir.path.string());
  for (const char* name :
       {"rates_small.csv", "golden_trace.csv", "golden_trace.csv.meta.json"}) {
    CAPTURE(name);
    const std::string fresh = testing::slurp_file(dir.file(name));
    const std::string golden =
        testing::slurp_file(std::string(QCR_GOLDEN_DIR) + "/" + name);
    CHECK(fresh == golden);
  }
}

TEST_CASE("trace reader rejects defective files with typed errors") {
  TempDir dir;
  const std::string meta =
      R"({"n_avg": 1, "n_samples": 2, "noise_sigma": 0.0, "seed": 0, "timeline_hash": 0})";

  SUBCASE("wrong header") {
    write_file(dir.file("bad.csv"), "time,amp\n0,1\n0.5,1\n");
    write_file(dir.file("bad.csv.meta.json"), meta);
    CHECK_THROWS_AS(read_trace(dir.file("bad.csv")), MalformedCsvError);
  }
  SUBCASE("unparseable number, line identified") {
    write_file(dir.file("bad.csv"), "t_ns,amplitude\n0,1\n0.5,oops\n");
    write_file(dir.file("bad.csv.meta.json"), meta);
    CHECK_THROWS_WITH_AS(read_trace(dir.file("bad.csv")),
                         doctest::Contains("line 3"), MalformedCsvError);
  }
  SUBCASE("missing column") {
    write_file(dir.file("bad.csv"), "t_ns,amplitude\n0\n0.5,1\n");
    write_file(dir.file("bad.csv.meta.json"), meta);
    CHECK_THROWS_AS(read_trace(dir.file("bad.csv")), MalformedCsvError);
  }
  SUBCASE("non-monotonic time axis") {
    write_file(dir.file("bad.csv"), "t_ns,amplitude\n0,1\n0.5,1\n0.25,1\n");
    write_file(dir.file("bad.csv.meta.json"),
               R"({"n_avg": 1, "n_samples": 3, "noise_sigma": 0.0, "seed": 0, "timeline_hash": 0})");
    CHECK_THROWS_AS(read_trace(dir.file("bad.csv")), NonMonotonicTimeError);
  }
  SUBCASE("missing sidecar") {
    write_file(dir.file("orphan.csv"), "t_ns,amplitude\n0,1\n0.5,1\n");
    CHECK_THROWS_AS(read_trace(dir.file("orphan.csv")), MissingSidecarError);
  }
  SUBCASE("sample count disagrees with the sidecar") {
    write_file(dir.file("bad.csv"), "t_ns,amplitude\n0,1\n0.5,1\n1,1\n");
    write_file(dir.file("bad.csv.meta.json"), meta);  // declares 2
    CHECK_THROWS_AS(read_trace(dir.file("bad.csv")), LengthMismatchError);
  }
  SUBCASE("corrupt sidecar JSON") {
    write_file(dir.file("bad.csv"), "t_ns,amplitude\n0,1\n0.5,1\n");
    write_file(dir.file("bad.csv.meta.json"), "{ nope");
    CHECK_THROWS_AS(read_trace(dir.file("bad.csv")), MalformedCsvError);
  }
}

TEST_CASE("sampling clamps queries to the trajectory support") {
  // End time lands between sample points: the last grid point must not step
  // beyond the trajectory.
  AmplitudeTrajectory traj = flat_trajectory(10.3);
  const Trace t = sample_trace(traj, 2.0, 0.0, 1, 0, 0);
  CHECK(t.times_ns.back() <= 10.3);
  CHECK(t.times_ns.size() == 21);
}
