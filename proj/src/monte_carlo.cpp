#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "equicontrol/verify.hpp"

namespace equicontrol {

namespace {

constexpr std::int64_t kBlockSize = 4096;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t block_seed(std::uint64_t seed, std::int64_t block) {
  return splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(block) + 0x5851F42D4C957F2Dull));
}

}  // namespace

int resolve_thread_count(int requested) {
  const int hardware = std::max(1u, std::thread::hardware_concurrency());
  int threads = requested > 0 ? requested : hardware;
  if (const char* env = std::getenv("EQUICONTROL_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) threads = std::min<long>(threads, cap);
  }
  return std::max(1, threads);
}

McReport monte_carlo(const EquilibriumSolution& sol, const McOptions& options) {
  if (options.num_paths < 10'000) throw Error(ErrorKind::Domain, "monte carlo needs at least 10^4 paths");
  if (options.num_steps < 1) throw Error(ErrorKind::Domain, "monte carlo needs at least one step");
  if (options.num_paths > 200'000'000 || options.num_steps > 10'000'000 ||
      static_cast<double>(options.num_paths) * options.num_steps > 1e12)
    throw Error(ErrorKind::Resource, "monte carlo size exceeds the supported budget");
  if (options.max_order < 2) throw Error(ErrorKind::Domain, "monte carlo needs max_order >= 2");

  const CoefficientSet& coeffs = sol.coeffs();
  const double horizon = sol.grid().horizon();
  const int steps = options.num_steps;
  const double dt = horizon / steps;
  const double sqrt_dt = std::sqrt(dt);

  // Left-point coefficients; the equilibrium control does not depend on X.
  std::vector<double> growth(steps), drift(steps), vol(steps);
  for (int k = 0; k < steps; ++k) {
    const double s = k * dt;
    const double u = control(sol, s, 0.0);
    growth[k] = 1.0 + coeffs.a(s) * dt;
    drift[k] = (coeffs.b(s) * u + coeffs.c(s)) * dt;
    vol[k] = (coeffs.d(s) * u + coeffs.f(s)) * sqrt_dt;
  }

  std::vector<double> terminal;
  try {
    terminal.resize(static_cast<std::size_t>(options.num_paths));
  } catch (const std::bad_alloc&) {
    throw Error(ErrorKind::Resource, "cannot allocate the terminal-state buffer");
  }

  const std::int64_t blocks = (options.num_paths + kBlockSize - 1) / kBlockSize;
  std::atomic<std::int64_t> next{0};
  const auto worker = [&] {
    for (std::int64_t b = next++; b < blocks; b = next++) {
      boost::random::mt19937_64 engine(block_seed(options.seed, b));
      boost::random::normal_distribution<double> normal;
      const std::int64_t end = std::min(options.num_paths, (b + 1) * kBlockSize);
      for (std::int64_t p = b * kBlockSize; p < end; ++p) {
        double x = options.x0;
        for (int k = 0; k < steps; ++k) x = growth[k] * x + drift[k] + vol[k] * normal(engine);
        terminal[static_cast<std::size_t>(p)] = x;
      }
    }
  };
  const int threads = static_cast<int>(std::min<std::int64_t>(resolve_thread_count(options.threads), blocks));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // Central moments with influence-function standard errors.
  const int n = options.max_order;
  const double count = static_cast<double>(options.num_paths);
  double mean = 0.0;
  for (double x : terminal) mean += x;
  mean /= count;
  Eigen::VectorXd central = Eigen::VectorXd::Zero(n + 1);
  for (double x : terminal) {
    const double d = x - mean;
    double power = d;
    for (int k = 2; k <= n; ++k) central[k] += (power *= d);
  }
  central /= count;
  central[0] = 1.0;
  central[1] = 0.0;
  Eigen::VectorXd influence_sq = Eigen::VectorXd::Zero(n + 1);
  for (double x : terminal) {
    const double d = x - mean;
    influence_sq[1] += d * d;
    double power = d;
    for (int k = 2; k <= n; ++k) {
      power *= d;
      const double inf = power - central[k] - k * central[k - 1] * d;
      influence_sq[k] += inf * inf;
    }
  }

  McReport report;
  report.seed = options.seed;
  report.num_paths = options.num_paths;
  report.num_steps = steps;
  report.estimate = central;
  report.estimate[1] = mean;
  report.standard_error = (influence_sq / count).cwiseSqrt() / std::sqrt(count);
  report.standard_error[0] = 0.0;
  report.target.resize(n + 1);
  report.target[0] = 1.0;
  report.target[1] = big_theta(coeffs, 0.0, options.x0) + sol.mean_shift(0.0);
  const double y0 = sol.y_at(0.0);
  for (int k = 2; k <= n; ++k) report.target[k] = alpha(k, y0);
  report.pass.assign(n + 1, true);
  for (int k = 1; k <= n; ++k) {
    const double floor = 1e-12 * (1.0 + std::abs(report.target[k]));
    report.pass[k] = std::abs(report.estimate[k] - report.target[k]) <= 3.0 * report.standard_error[k] + floor;
  }
  return report;
}

}  // namespace equicontrol
