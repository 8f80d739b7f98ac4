#include "dquant/dynamics.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "dquant/error.h"
#include "dquant/report_io.h"

namespace dquant {

namespace {

double expectation(const SparseMatrix& h, const Eigen::VectorXcd& psi) { return psi.dot(h * psi).real(); }

double edge_population(const FockSpace& space, const Eigen::VectorXcd& psi) {
  double p = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    if (!space.is_interior(static_cast<std::size_t>(i), 2)) p += std::norm(psi[i]);
  return p;
}

Eigen::VectorXcd taylor_step(const SparseMatrix& h, const Eigen::VectorXcd& psi, double dt, double hbar) {
  const complex f(0.0, -dt / hbar);
  Eigen::VectorXcd term = psi;
  Eigen::VectorXcd out = psi;
  for (int k = 1; k < 80; ++k) {
    term = (f / static_cast<double>(k)) * (h * term);
    out += term;
    if (term.norm() <= 1e-18 * out.norm()) break;
  }
  return out;
}

double one_norm(const SparseMatrix& h) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(h.cols());
  for (int r = 0; r < h.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(h, r); it; ++it) col[it.col()] += std::abs(it.value());
  return col.size() ? col.maxCoeff() : 0.0;
}

// Step-doubling control: accept when one step and two half steps agree.
Eigen::VectorXcd propagate_taylor(const SparseMatrix& h, Eigen::VectorXcd psi, double t, double hbar) {
  const double norm = one_norm(h);
  double dt = norm > 0.0 ? std::min(t, hbar / norm) : t;
  double done = 0.0;
  while (done < t) {
    const double step = std::min(dt, t - done);
    const Eigen::VectorXcd full = taylor_step(h, psi, step, hbar);
    const Eigen::VectorXcd half = taylor_step(h, taylor_step(h, psi, step / 2, hbar), step / 2, hbar);
    if ((full - half).norm() > 1e-13 && step > 1e-12 * t) {
      dt = step / 2;
      continue;
    }
    psi = half;
    done += step;
    dt = std::min(2.0 * step, std::max(dt, step));
  }
  return psi;
}

Eigen::VectorXcd vacuum(const FockSpace& space) {
  return space.basis_state(std::vector<int>(space.modes().size(), 0));
}

SqueezingResult squeezing_from(const EvolutionResult& ev, const FockSpace& space, const EvolutionConfig& cfg,
                               double g) {
  SqueezingResult out;
  out.g = g;
  out.norm_drift = ev.norm_drift;
  out.energy_drift = ev.energy_drift;
  out.truncation_unsafe = ev.truncation_unsafe;
  double sty = 0.0, stt = 0.0;
  std::vector<std::pair<double, double>> samples;
  for (std::size_t j = 0; j < ev.trajectory.size(); ++j) {
    const double tj = cfg.t * static_cast<double>(j + 1) / static_cast<double>(ev.trajectory.size());
    const double na = mean_number(space, ev.trajectory[j], mode_a);
    const double nb = mean_number(space, ev.trajectory[j], mode_b);
    out.pair_mismatch = std::max(out.pair_mismatch, std::abs(na - nb));
    const double y = std::asinh(std::sqrt(std::max(na, 0.0)));
    samples.emplace_back(tj, y);
    sty += tj * y;
    stt += tj * tj;
  }
  const double slope = stt > 0.0 ? sty / stt : 0.0;
  for (const auto& [tj, y] : samples) out.fit_residual = std::max(out.fit_residual, std::abs(y - slope * tj));
  out.r = slope * cfg.t;
  out.mean_n_a = mean_number(space, ev.state, mode_a);
  out.mean_n_b = mean_number(space, ev.state, mode_b);
  return out;
}

InteractionParams scaled(InteractionParams p, double factor) {
  p.theta *= factor;
  return p;
}

}  // namespace

void EvolutionConfig::validate() const {
  if (n_max < 2) throw InputError("Fock cutoff n_max must be >= 2");
  if (steps < 1) throw InputError("step count must be >= 1");
  if (!std::isfinite(t) || t < 0.0) throw InputError("evolution time must be finite and non-negative");
  if (!(hbar > 0.0)) throw InputError("hbar must be positive");
  if (pump == PumpTreatment::quantum && pump_cutoff < 2) throw InputError("pump cutoff must be >= 2");
}

EvolutionResult evolve(const BosonicPolynomial& h, const FockSpace& space, const Eigen::VectorXcd& psi0, double t,
                       double hbar, int steps) {
  if (!h.is_hermitian()) throw NotHermitian();
  if (steps < 1) throw InputError("step count must be >= 1");
  if (static_cast<std::size_t>(psi0.size()) != space.dimension())
    throw InputError("initial state does not match the Fock space dimension");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw InputError("initial state must be normalized");

  const SparseMatrix hm = to_matrix(h, space);
  const double e0 = expectation(hm, psi0);
  const double dt = t / steps;

  EvolutionResult out;
  out.dense = space.dimension() <= dense_dimension_limit;
  Eigen::MatrixXcd u;
  if (out.dense) {
    const Eigen::MatrixXcd gen = Eigen::MatrixXcd(hm) * complex(0.0, -dt / hbar);
    u = gen.exp();
  }
  Eigen::VectorXcd psi = psi0;
  out.edge_population = edge_population(space, psi0);
  for (int j = 0; j < steps; ++j) {
    psi = out.dense ? Eigen::VectorXcd(u * psi) : propagate_taylor(hm, psi, dt, hbar);
    out.norm_drift = std::max(out.norm_drift, std::abs(psi.norm() - 1.0));
    out.energy_drift = std::max(out.energy_drift, std::abs(expectation(hm, psi) - e0));
    out.edge_population = std::max(out.edge_population, edge_population(space, psi));
    out.trajectory.push_back(psi);
  }
  out.state = psi;
  out.truncation_unsafe = out.edge_population > truncation_threshold;
  return out;
}

double mean_number(const FockSpace& space, const Eigen::VectorXcd& psi, ModeLabel m) {
  const std::size_t s = space.slot(m);
  double n = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double p = std::norm(psi[i]);
    if (p == 0.0) continue;
    n += p * space.occupations(static_cast<std::size_t>(i))[s];
  }
  return n;
}

Eigen::VectorXcd coherent_state(const FockSpace& space, ModeLabel m, complex alpha) {
  const std::size_t s = space.slot(m);
  const int cutoff = space.cutoffs()[s];
  std::vector<int> occ(space.modes().size(), 0);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension()));
  complex amp = std::exp(-std::norm(alpha) / 2.0);
  for (int n = 0; n <= cutoff; ++n) {
    if (n > 0) amp *= alpha / std::sqrt(static_cast<double>(n));
    occ[s] = n;
    psi[static_cast<Eigen::Index>(space.index_of(occ))] = amp;
  }
  return psi / psi.norm();
}

BosonicPolynomial three_wave_hamiltonian(const InteractionParams& params) {
  const Monomial forward({{mode_a.id, 1, 0}, {mode_b.id, 1, 0}, {mode_c.id, 0, 1}});
  const complex c = params.theta * params.phi;
  BosonicPolynomial h = BosonicPolynomial::term(c, forward);
  h += BosonicPolynomial::term(std::conj(c), forward.adjoint());
  return h;
}

double effective_coupling(const InteractionParams& params, complex beta, double hbar) {
  return std::abs(params.theta) * std::abs(beta) * std::abs(params.phi) / hbar;
}

SqueezingResult spdc_squeezing(const InteractionParams& params, const EvolutionConfig& cfg) {
  cfg.validate();
  BosonicPolynomial h = three_wave_hamiltonian(params);
  const BosonicPolynomial detuning = BosonicPolynomial::number(mode_a) * (cfg.hbar * params.delta);
  if (cfg.pump == PumpTreatment::classical) {
    h = h.substitute_classical(mode_c, cfg.beta) + detuning;
    const FockSpace space({mode_a, mode_b}, cfg.n_max);
    const auto ev = evolve(h, space, vacuum(space), cfg.t, cfg.hbar, cfg.steps);
    return squeezing_from(ev, space, cfg, effective_coupling(params, cfg.beta, cfg.hbar));
  }
  h = h + detuning;
  const FockSpace space({mode_a, mode_b, mode_c}, {cfg.n_max, cfg.n_max, cfg.pump_cutoff});
  const auto ev = evolve(h, space, coherent_state(space, mode_c, cfg.beta), cfg.t, cfg.hbar, cfg.steps);
  return squeezing_from(ev, space, cfg, effective_coupling(params, cfg.beta, cfg.hbar));
}

ConversionResult frequency_conversion(const InteractionParams& params, const EvolutionConfig& cfg) {
  cfg.validate();
  const BosonicPolynomial h = three_wave_hamiltonian(params).substitute_classical(mode_b, cfg.beta) +
                              BosonicPolynomial::number(mode_a) * (cfg.hbar * params.delta);
  const FockSpace space({mode_a, mode_c}, cfg.n_max);
  const auto ev = evolve(h, space, space.basis_state({1, 0}), cfg.t, cfg.hbar, cfg.steps);
  ConversionResult out;
  out.g = effective_coupling(params, cfg.beta, cfg.hbar);
  out.probability = mean_number(space, ev.state, mode_c);
  for (const auto& psi : ev.trajectory)
    out.conservation_error = std::max(
        out.conservation_error, std::abs(mean_number(space, psi, mode_a) + mean_number(space, psi, mode_c) - 1.0));
  out.norm_drift = ev.norm_drift;
  out.energy_drift = ev.energy_drift;
  out.truncation_unsafe = ev.truncation_unsafe;
  return out;
}

SchemePair<SqueezingResult> spdc_squeezing_schemes(const InteractionParams& params, const EvolutionConfig& cfg,
                                                   int order) {
  const double k = prefactor_ratio(order).value();
  return {spdc_squeezing(params, cfg), spdc_squeezing(scaled(params, k), cfg)};
}

SchemePair<ConversionResult> frequency_conversion_schemes(const InteractionParams& params,
                                                          const EvolutionConfig& cfg, int order) {
  const double k = prefactor_ratio(order).value();
  return {frequency_conversion(params, cfg), frequency_conversion(scaled(params, k), cfg)};
}

std::string to_string(Observable o) {
  switch (o) {
    case Observable::squeezing: return "squeezing";
    case Observable::conversion: return "conversion";
    case Observable::coefficient: return "coefficient";
  }
  return "?";
}

Observable parse_observable(const std::string& name) {
  if (name == "squeezing") return Observable::squeezing;
  if (name == "conversion") return Observable::conversion;
  if (name == "coefficient") return Observable::coefficient;
  throw InputError("unknown observable '" + name + "'");
}

ComparisonReport compare_schemes(Observable observable, int order, const ComparisonOptions& options) {
  if (order < 2) throw InputError("scheme comparison needs order >= 2");
  ComparisonReport rep;
  rep.observable = observable;
  rep.order = order;
  const double n = order;

  InteractionParams params;
  params.theta = options.theta * options.theta_scale;
  const double g = std::abs(params.theta);
  EvolutionConfig cfg;
  cfg.n_max = options.n_max;

  switch (observable) {
    case Observable::coefficient: {
      const ConstructedRatio cr = constructed_prefactor_ratio(order);
      rep.value_correct = cr.reference_correct.real() * options.theta_scale;
      rep.value_wrong = cr.reference_wrong.real() * options.theta_scale;
      rep.ratio = cr.ratio;
      rep.expected_ratio = prefactor_ratio(order).value();
      rep.tolerance = 1e-12;
      rep.pass = std::abs(rep.ratio - rep.expected_ratio) <= rep.tolerance * n && cr.spread <= rep.tolerance;
      return rep;
    }
    case Observable::squeezing: {
      cfg.t = options.squeezing_gt / g;
      cfg.steps = 4;
      const auto res = spdc_squeezing_schemes(params, cfg, order);
      rep.value_correct = res.correct.r;
      rep.value_wrong = res.wrong.r;
      rep.expected_ratio = n;
      rep.tolerance = 1e-4;
      break;
    }
    case Observable::conversion: {
      cfg.t = options.conversion_gt / g;
      cfg.n_max = std::min(options.n_max, 4);
      const auto res = frequency_conversion_schemes(params, cfg, order);
      rep.value_correct = res.correct.probability;
      rep.value_wrong = res.wrong.probability;
      rep.expected_ratio = n * n;
      rep.tolerance = 1e-3;
      break;
    }
  }
  rep.ratio = rep.value_correct != 0.0 ? std::abs(rep.value_wrong / rep.value_correct)
                                       : std::numeric_limits<double>::infinity();
  rep.pass = std::abs(rep.ratio - rep.expected_ratio) <= rep.tolerance * rep.expected_ratio;
  return rep;
}

std::string to_json(const ComparisonReport& r) {
  nlohmann::json doc;
  doc["observable"] = to_string(r.observable);
  doc["order"] = r.order;
  doc["value_correct"] = r.value_correct;
  doc["value_wrong"] = r.value_wrong;
  doc["ratio"] = r.ratio;
  doc["expected_ratio"] = r.expected_ratio;
  doc["tolerance"] = r.tolerance;
  doc["pass"] = r.pass;
  return dump_json(doc);
}

unsigned sweep_threads() {
  if (const char* env = std::getenv("DQUANT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepPoint> sweep(Observable observable, const InteractionParams& params, const EvolutionConfig& cfg,
                              std::span<const double> times, int order) {
  if (observable == Observable::coefficient) throw InputError("sweeps need a dynamical observable");
  cfg.validate();
  const double k = prefactor_ratio(order).value();

  struct Job {
    double t;
    bool wrong;
  };
  std::vector<Job> jobs;
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0) throw InputError("sweep times must be finite and non-negative");
    jobs.push_back({t, false});
    jobs.push_back({t, true});
  }

  auto run = [&](const Job& job) {
    EvolutionConfig c = cfg;
    c.t = job.t;
    const InteractionParams p = job.wrong ? scaled(params, k) : params;
    const double v = observable == Observable::squeezing ? spdc_squeezing(p, c).r : frequency_conversion(p, c).probability;
    return SweepPoint{job.t, v, job.wrong ? "E-linear-wrong" : "D-based"};
  };

  std::vector<SweepPoint> out(jobs.size());
  const std::size_t width = sweep_threads();
  for (std::size_t begin = 0; begin < jobs.size(); begin += width) {
    const std::size_t end = std::min(jobs.size(), begin + width);
    std::vector<std::future<SweepPoint>> batch;
    for (std::size_t i = begin; i < end; ++i) batch.push_back(std::async(std::launch::async, run, jobs[i]));
    for (std::size_t i = begin; i < end; ++i) out[i] = batch[i - begin].get();
  }
  std::stable_sort(out.begin(), out.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return a.t != b.t ? a.t < b.t : a.scheme < b.scheme;
  });
  return out;
}

std::string sweep_to_csv(std::span<const SweepPoint> points) {
  CsvWriter csv({"t", "observable", "scheme"});
  for (const auto& p : points) csv.row({format_double(p.t), format_double(p.value), p.scheme});
  return csv.str();
}

}  // namespace dquant
