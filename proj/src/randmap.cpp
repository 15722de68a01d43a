#include "rholab/randmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rholab/errors.hpp"
#include "rholab/parallel.hpp"
#include "rholab/stats.hpp"

namespace rholab::randmap {

namespace {

void check_machines(std::uint64_t n, std::span<const std::uint64_t> ds,
                    std::span<const double> lambdas) {
  if (ds.empty()) throw DomainError("at least one machine is required");
  if (ds.size() != lambdas.size()) {
    throw DomainError("d and lambda lists differ in length");
  }
  if (n == 0) throw DomainError("n must be positive");
  for (const std::uint64_t d : ds) {
    if (d < 2) throw DomainError("every d must be >= 2");
  }
  for (const double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw DomainError("every lambda must be positive and finite");
    }
  }
}

void check_divides(std::uint64_t n, std::uint64_t d) {
  if (d < 2) throw DomainError("d must be >= 2");
  if (n % d != 0) {
    throw DomainError("d = " + std::to_string(d) + " does not divide n = " +
                      std::to_string(n));
  }
}

// One trial of min_i lambda_i S_i.
template <typename DrawS>
double min_weighted(std::span<const double> lambdas, DrawS&& draw) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    best = std::min(best, lambdas[i] * static_cast<double>(draw(i)));
  }
  return best;
}

struct StreamOutput {
  stats::RunningStats stats;
  std::vector<double> samples;
};

std::vector<StreamOutput> simulate(std::uint64_t n,
                                   std::span<const std::uint64_t> ds,
                                   std::span<const double> lambdas,
                                   std::uint64_t trials, std::uint64_t seed,
                                   SampleMode mode, unsigned streams,
                                   bool keep_samples) {
  check_machines(n, ds, lambdas);
  if (mode == SampleMode::kFullMap) {
    for (const std::uint64_t d : ds) check_divides(n, d);
    if (n > kMaxFullMapTrialSize) {
      throw CapacityError("full-map sampling is limited to n <= 10^6");
    }
  }
  streams = std::max(1u, streams);
  std::vector<RhoModel> models;
  for (const std::uint64_t d : ds) models.push_back(RhoModel::from_nd(n, d));

  std::vector<StreamOutput> out(streams);
  parallel_for(streams, streams, [&](std::size_t w) {
    Rng rng = make_stream(seed, w);
    const std::uint64_t lo = w * trials / streams;
    const std::uint64_t hi = (w + 1) * trials / streams;
    StreamOutput& o = out[w];
    if (keep_samples) o.samples.reserve(hi - lo);
    for (std::uint64_t t = lo; t < hi; ++t) {
      double value;
      if (mode == SampleMode::kDirect) {
        value = min_weighted(lambdas, [&](std::size_t i) {
          return sample_rho_direct(models[i], rng);
        });
      } else {
        value = min_weighted(lambdas, [&](std::size_t i) {
          const TabulatedFunction f = sample_f_nd(n, ds[i], rng);
          const auto x = static_cast<std::uint32_t>(uniform_below(rng, n));
          return rho_length(f, x);
        });
      }
      o.stats.add(value);
      if (keep_samples) o.samples.push_back(value);
    }
  });
  return out;
}

}  // namespace

std::vector<std::uint64_t> TabulatedFunction::indegrees() const {
  std::vector<std::uint64_t> deg(n, 0);
  for (const std::uint32_t y : images) ++deg[y];
  return deg;
}

bool TabulatedFunction::is_valid() const {
  if (d == 0 || images.size() != n || n % d != 0) return false;
  for (const std::uint32_t y : images) {
    if (y >= n) return false;
  }
  std::uint64_t full = 0;
  for (const std::uint64_t deg : indegrees()) {
    if (deg == d) {
      ++full;
    } else if (deg != 0) {
      return false;
    }
  }
  return full == n / d;
}

RhoModel RhoModel::from_nd(std::uint64_t n, std::uint64_t d) {
  if (d < 2) throw DomainError("RhoModel: d must be >= 2");
  if (n == 0) throw DomainError("RhoModel: n must be positive");
  return RhoModel{n, d,
                  static_cast<double>(n) / static_cast<double>(d - 1)};
}

RhoModel RhoModel::from_q(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw DomainError("RhoModel: q must be positive");
  }
  return RhoModel{0, 0, q};
}

TabulatedFunction sample_f_nd(std::uint64_t n, std::uint64_t d, Rng& rng) {
  check_divides(n, d);
  if (n > kMaxMapSize) throw CapacityError("sample_f_nd: n exceeds 10^7");
  TabulatedFunction f;
  f.n = n;
  f.d = d;
  f.images.assign(n, 0);

  std::vector<std::uint32_t> domain(n);
  for (std::uint64_t i = 0; i < n; ++i) domain[i] = static_cast<std::uint32_t>(i);
  for (std::uint64_t i = n - 1; i > 0; --i) {
    std::swap(domain[i], domain[uniform_below(rng, i + 1)]);
  }
  // Partial Fisher-Yates: the first n/d slots form a uniform injection.
  const std::uint64_t blocks = n / d;
  std::vector<std::uint32_t> values(n);
  for (std::uint64_t i = 0; i < n; ++i) values[i] = static_cast<std::uint32_t>(i);
  for (std::uint64_t i = 0; i < blocks; ++i) {
    std::swap(values[i], values[i + uniform_below(rng, n - i)]);
  }
  for (std::uint64_t b = 0; b < blocks; ++b) {
    for (std::uint64_t j = 0; j < d; ++j) f.images[domain[b * d + j]] = values[b];
  }
  return f;
}

std::uint64_t rho_length(const TabulatedFunction& f, std::uint32_t x) {
  if (x >= f.n) throw DomainError("rho_length: start point outside Z/nZ");
  std::vector<bool> seen(f.n, false);
  std::uint64_t count = 0;
  while (!seen[x]) {
    seen[x] = true;
    ++count;
    x = f(x);
  }
  return count;
}

double exact_pmf(const RhoModel& model, std::uint64_t s) {
  if (s == 0) return 0.0;
  const double q = model.q;
  double survive = 1.0;  // P(S >= s)
  for (std::uint64_t j = 1; j < s; ++j) {
    const double stay = 1.0 - static_cast<double>(j) / q;
    if (stay <= 0.0) return 0.0;
    survive *= stay;
  }
  return std::min(static_cast<double>(s) / q, 1.0) * survive;
}

namespace {

// Calls visit(s, P(S = s)) for s = 1, 2, ... over the support.
template <typename Visit>
void walk_pmf(double q, Visit&& visit) {
  double survive = 1.0;
  for (std::uint64_t s = 1;; ++s) {
    const double ratio = static_cast<double>(s) / q;
    if (ratio >= 1.0) {
      visit(s, survive);
      return;
    }
    visit(s, ratio * survive);
    survive *= 1.0 - ratio;
  }
}

}  // namespace

double pmf_total(const RhoModel& model) {
  double total = 0.0;
  walk_pmf(model.q, [&](std::uint64_t, double p) { total += p; });
  return total;
}

double exact_mean(const RhoModel& model) {
  if (model.q > kMaxExactQ) throw CapacityError("exact_mean: q exceeds 10^7");
  double total = 0.0;
  double mean = 0.0;
  walk_pmf(model.q, [&](std::uint64_t s, double p) {
    total += p;
    mean += static_cast<double>(s) * p;
  });
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::logic_error("exact_mean: pmf mass " + std::to_string(total) +
                           " is not 1");
  }
  return mean;
}

double exact_min_mean(std::uint64_t n, std::span<const std::uint64_t> ds,
                      std::span<const double> lambdas) {
  check_machines(n, ds, lambdas);
  const std::size_t m = ds.size();
  std::vector<double> q(m);
  for (std::size_t i = 0; i < m; ++i) {
    q[i] = RhoModel::from_nd(n, ds[i]).q;
    if (q[i] > kMaxExactQ) throw CapacityError("exact_min_mean: q exceeds 10^7");
  }
  // On [lambda_i s_i, lambda_i (s_i + 1)), P(lambda_i S_i > t) equals
  // P(S_i >= s_i + 1) = survive[i].
  std::vector<std::uint64_t> step(m, 0);
  std::vector<double> survive(m, 1.0);
  double t = 0.0;
  double integral = 0.0;
  while (true) {
    double product = 1.0;
    double next = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      product *= survive[i];
      next = std::min(next, lambdas[i] * static_cast<double>(step[i] + 1));
    }
    if (product == 0.0) break;
    integral += product * (next - t);
    t = next;
    for (std::size_t i = 0; i < m; ++i) {
      if (lambdas[i] * static_cast<double>(step[i] + 1) == next) {
        ++step[i];
        const double stay = 1.0 - static_cast<double>(step[i]) / q[i];
        survive[i] = stay > 0.0 ? survive[i] * stay : 0.0;
      }
    }
  }
  return integral;
}

std::uint64_t sample_rho_direct(const RhoModel& model, Rng& rng) {
  for (std::uint64_t s = 1;; ++s) {
    const double stop = static_cast<double>(s) / model.q;
    if (stop >= 1.0 || uniform01(rng) < stop) return s;
  }
}

double rayleigh_pdf(double q, double s) {
  if (!(q > 0.0)) throw DomainError("rayleigh_pdf: q must be positive");
  if (s <= 0.0) return 0.0;
  return s / q * std::exp(-s * s / (2.0 * q));
}

double theorem1_rhs(std::uint64_t n, std::span<const std::uint64_t> ds,
                    std::span<const double> lambdas) {
  check_machines(n, ds, lambdas);
  double inner = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    inner += static_cast<double>(ds[i] - 1) / (lambdas[i] * lambdas[i]);
  }
  return std::sqrt(std::numbers::pi * static_cast<double>(n) / 2.0) /
         std::sqrt(inner);
}

TrialBatch estimate_min_expectation(std::uint64_t n,
                                    std::span<const std::uint64_t> ds,
                                    std::span<const double> lambdas,
                                    std::uint64_t trials, std::uint64_t seed,
                                    SampleMode mode, unsigned streams) {
  if (trials < 100) throw DomainError("at least 100 trials are required");
  streams = std::max(1u, streams);
  const auto parts =
      simulate(n, ds, lambdas, trials, seed, mode, streams, false);
  stats::RunningStats all;
  for (const auto& p : parts) all.merge(p.stats);
  TrialBatch batch;
  batch.seed = seed;
  batch.trials = all.count();
  batch.streams = streams;
  batch.mean = all.mean();
  batch.half_width_95 = all.half_width_95();
  batch.min = all.min();
  batch.max = all.max();
  return batch;
}

std::vector<double> sample_rho_lengths(std::uint64_t n, std::uint64_t d,
                                       std::uint64_t trials,
                                       std::uint64_t seed, SampleMode mode,
                                       unsigned streams) {
  const std::uint64_t ds[] = {d};
  const double lambdas[] = {1.0};
  auto parts = simulate(n, ds, lambdas, trials, seed, mode, streams, true);
  std::vector<double> out;
  out.reserve(trials);
  for (auto& p : parts) out.insert(out.end(), p.samples.begin(), p.samples.end());
  return out;
}

}  // namespace rholab::randmap
