#include "karcher/lln.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace karcher {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DiscreteMeasure sample_finite(const FiniteLaw& law, int n, const CounterRng& rng) {
  const DiscreteMeasure& mu = law.measure;
  std::vector<double> cumulative(mu.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) cumulative[i] = acc += mu.weight(i);
  std::vector<double> hits(mu.size(), 0.0);
  for (int d = 0; d < n; ++d) {
    const double u = rng.uniform(static_cast<std::uint64_t>(d), 0) * acc;
    std::size_t k = 0;
    while (k + 1 < cumulative.size() && u >= cumulative[k]) ++k;
    hits[k] += 1.0;
  }
  std::vector<SpdMatrix> atoms;
  std::vector<double> weights;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (hits[i] == 0.0) continue;
    atoms.push_back(mu.atom(i));
    weights.push_back(hits[i] / n);
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

SpdMatrix draw_log_gaussian(const LogGaussianLaw& law, std::uint64_t d, const CounterRng& rng) {
  const int n = law.base.dim();
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    g(i, i) = rng.normal(d, static_cast<std::uint64_t>(i * n + i));
    for (int j = i + 1; j < n; ++j) {
      const double zij = rng.normal(d, static_cast<std::uint64_t>(i * n + j));
      const double zji = rng.normal(d, static_cast<std::uint64_t>(j * n + i));
      g(i, j) = g(j, i) = 0.5 * (zij + zji);
    }
  }
  const SpdMatrix e = mat_exp(symmetric_part(law.scale * g));
  return SpdMatrix(congruence(law.base.sqrt_matrix(), e.matrix()));
}

DiscreteMeasure sample_log_gaussian(const LogGaussianLaw& law, int n, const CounterRng& rng) {
  std::vector<SpdMatrix> atoms;
  atoms.reserve(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) atoms.push_back(draw_log_gaussian(law, static_cast<std::uint64_t>(d), rng));
  return DiscreteMeasure::uniform(std::move(atoms));
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter, std::uint64_t lane) const {
  std::uint64_t h = mix64(seed_);
  h = mix64(h ^ (stream_ * 0xD1B54A32D192ED03ULL));
  h = mix64(h ^ counter);
  return mix64(h ^ (lane * 0x8CB92BA72F3D8DD7ULL + 1));
}

double CounterRng::uniform(std::uint64_t counter, std::uint64_t lane) const {
  return (static_cast<double>(bits(counter, lane) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter, std::uint64_t lane) const {
  const double u1 = uniform(counter, 2 * lane);
  const double u2 = uniform(counter, 2 * lane + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SpdLaw SpdLaw::finite(DiscreteMeasure mu) { return SpdLaw(FiniteLaw{std::move(mu)}); }

SpdLaw SpdLaw::log_gaussian(SpdMatrix base, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("log-gaussian scale must be positive");
  return SpdLaw(LogGaussianLaw{std::move(base), scale});
}

int SpdLaw::dim() const {
  return is_finite() ? as_finite().measure.dim() : as_log_gaussian().base.dim();
}

DiscreteMeasure sample(const SpdLaw& law, int n, std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw DomainError("sample size must be at least 1");
  const CounterRng rng(seed, stream);
  if (law.is_finite()) return sample_finite(law.as_finite(), n, rng);
  return sample_log_gaussian(law.as_log_gaussian(), n, rng);
}

LlnReport lln_run(const SpdLaw& law, const std::vector<int>& sizes, double t, const SpdMatrix& x,
                  std::uint64_t seed, const LlnOptions& opts) {
  if (sizes.empty()) throw DomainError("at least one sample size is required");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw DomainError("sample sizes must be positive");
    if (i > 0 && sizes[i] < sizes[i - 1]) throw DomainError("sample sizes must be ascending");
  }
  if (!(t > 0.0)) throw DomainError("flow time must be positive");
  require_same_dim(law.dim(), x.dim());

  LlnReport report;
  std::optional<DiscreteMeasure> reference;
  if (law.is_finite()) {
    reference = law.as_finite().measure;
  } else {
    const int size = opts.reference_factor * sizes.back();
    reference = sample(law, size, seed, 1);
    report.reference_note = "reference sample: stream 1, size " + std::to_string(size) +
                            ", seed " + std::to_string(seed);
  }
  std::optional<SpdMatrix> mean_ref, flow_ref;
  try {
    mean_ref = karcher_mean(*reference, opts.solver).value;
    flow_ref = semigroup(*reference, t, x, opts.flow).state;
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("reference: ") + e.what(), e.report());
  }

  const std::size_t count = sizes.size();
  std::vector<LlnRow> rows(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        const DiscreteMeasure mu = sample(law, sizes[i], seed);
        LlnRow row;
        row.n = sizes[i];
        row.seed = seed;
        if (law.is_finite()) row.w1_to_law = w1(mu, *reference).cost;
        row.d_mean = thompson_distance(karcher_mean(mu, opts.solver).value, *mean_ref);
        row.d_flow = thompson_distance(semigroup(mu, t, x, opts.flow).state, *flow_ref);
        rows[i] = row;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(count)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    const std::string where = "row " + std::to_string(i) + " (n=" + std::to_string(sizes[i]) + "): ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(where + e.what(), e.report());
    }
  }
  report.rows = std::move(rows);
  return report;
}

void write_csv(std::ostream& out, const LlnReport& report) {
  if (report.reference_note) out << "# " << *report.reference_note << '\n';
  out << "n,w1_to_law,d_mean,d_flow,seed\n";
  for (const LlnRow& r : report.rows) {
    out << r.n << ',' << format_real(r.w1_to_law.value_or(std::nan(""))) << ','
        << format_real(r.d_mean) << ',' << format_real(r.d_flow) << ',' << r.seed << '\n';
  }
}

std::string to_csv(const LlnReport& report) {
  std::ostringstream os;
  write_csv(os, report);
  return os.str();
}

}  // namespace karcher
