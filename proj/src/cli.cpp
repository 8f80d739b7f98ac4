#include "dquant/cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dquant/dynamics.h"
#include "dquant/error.h"
#include "dquant/field_model.h"
#include "dquant/hamiltonian.h"
#include "dquant/maxwell_check.h"
#include "dquant/report_io.h"
#include "dquant/susceptibility.h"

namespace dquant {

namespace {

struct RunConfig {
  std::string medium;
  std::string out_dir;
  std::string format;
  int n_max = 16;
  double time = 1.0;
  int order = 0;  // 0 = derive from the medium / command default
  int modes = 2;
  int steps = 10;
  double theta = 0.04;
  double beta = 1.0;
  double length = 1.0;
  double dk_min = -4.0 * std::numbers::pi;
  double dk_max = 4.0 * std::numbers::pi;
  int points = 801;
  std::string observable = "coefficient";
};

nlohmann::json tensor_json(const SusceptibilityTensor& t) {
  auto re = nlohmann::json::array();
  auto im = nlohmann::json::array();
  for (complex z : t.entries()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  if (t.is_real(0.0)) return re;
  return {{"re", re}, {"im", im}};
}

MediumSpec default_medium() {
  const UnitSystem u = UnitSystem::natural();
  return MediumSpec(u, 1,
                    {SusceptibilityTensor::scalar(1, TensorRole::chi, 1.25),
                     SusceptibilityTensor::scalar(2, TensorRole::chi, 0.3)});
}

MediumSpec medium_from(const RunConfig& cfg) { return cfg.medium.empty() ? default_medium() : load_medium(cfg.medium); }

double linear_index(const MediumSpec& medium) {
  const auto eta1 = invert_linear(medium.chi_of(1), medium.units);
  const complex e = eta1[0];
  if (!(e.real() > 0.0) || std::abs(e.imag()) > 1e-12 * std::abs(e))
    throw InputError("linear response must give a real refractive index");
  const double n = std::sqrt(1.0 / (medium.units.eps0 * e.real()));
  if (!(n >= 1.0)) throw InputError("refractive index below one is not supported");
  return n;
}

class Emitter {
 public:
  Emitter(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  void emit(const std::string& name, const std::string& ext, const std::string& text) {
    out_ << text;
    if (cfg_.out_dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(cfg_.out_dir, ec);
    const auto path = std::filesystem::path(cfg_.out_dir) / (name + "." + ext);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path.string());
    f << text;
  }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
};

std::string require_format(const RunConfig& cfg, std::initializer_list<const char*> allowed, const char* fallback) {
  const std::string f = cfg.format.empty() ? fallback : cfg.format;
  for (const char* a : allowed)
    if (f == a) return f;
  throw InputError("format '" + f + "' is not available for this command");
}

int cmd_invert(const RunConfig& cfg, Emitter& em) {
  require_format(cfg, {"json"}, "json");
  const MediumSpec medium = medium_from(cfg);
  const int order = cfg.order > 0 ? cfg.order : medium.highest_order();
  const auto etas = invert_series(medium, order);
  nlohmann::json doc;
  doc["dim"] = medium.dim;
  doc["order"] = order;
  for (const auto& eta : etas) {
    const std::string key = std::to_string(eta.order());
    doc["eta"][key] = tensor_json(eta);
    doc["gamma"][key] = tensor_json(gamma_from_eta(eta, medium.units));
  }
  em.emit("invert", "json", dump_json(doc));
  return exit_ok;
}

int cmd_verify(const RunConfig& cfg, Emitter& em, std::ostream& err) {
  require_format(cfg, {"json"}, "json");
  if (cfg.medium.empty()) throw InputError("verify needs --medium FILE");
  if (cfg.modes < 1) throw InputError("--modes must be >= 1");
  const MediumSpec medium = load_medium(cfg.medium);
  std::vector<int> ms_values;
  for (int m = -cfg.modes; m <= cfg.modes; ++m)
    if (m != 0) ms_values.push_back(m);
  const ModeSet ms =
      make_uniform_medium_modes(linear_index(medium), 2.0 * std::numbers::pi, ms_values, medium.units);

  const FaradayReport d = verify_faraday(ms, medium, Scheme::d_based);
  const FaradayReport w = verify_faraday(ms, medium, Scheme::e_linear_wrong);
  err << to_table(d) << to_table(w);

  nlohmann::json doc;
  doc["d_based"] = nlohmann::json::parse(to_json(d));
  doc["e_linear_wrong"] = nlohmann::json::parse(to_json(w));
  const bool wrong_should_pass = medium.highest_order() == 1;
  const bool ok = d.pass && w.pass == wrong_should_pass;
  doc["expectation_met"] = ok;
  em.emit("faraday", "json", dump_json(doc));
  return ok ? exit_ok : exit_expectation_failed;
}

int cmd_compare(const RunConfig& cfg, Emitter& em) {
  require_format(cfg, {"json"}, "json");
  const int order = cfg.order > 0 ? cfg.order : 2;
  const Observable obs = parse_observable(cfg.observable);
  ComparisonOptions opts;
  opts.n_max = cfg.n_max;
  const ComparisonReport rep = compare_schemes(obs, order, opts);

  // Reference phase-matched triple in the medium: A (m=1) + B (m=2) -> C (m=3).
  const MediumSpec medium = medium_from(cfg);
  const double n = linear_index(medium);
  const double box = 2.0 * std::numbers::pi;
  ModeSet ms = make_uniform_medium_modes(n, box, std::vector<int>{1}, medium.units, {0, 0, 1.0});
  ms = ms.merged(make_uniform_medium_modes(n, box, std::vector<int>{2}, medium.units, {1, 0, 1.0}));
  ms = ms.merged(make_uniform_medium_modes(n, box, std::vector<int>{3}, medium.units, {2, 0, 1.0}));
  const ModeTriple triple = make_triple(ms, mode_label(0, 1), mode_label(1, 2), mode_label(2, 3), box);
  const auto etas = invert_series(medium, 2);
  const std::array<ModeProfile, 3> profiles{ms.modes()[0].profile, ms.modes()[1].profile, ms.modes()[2].profile};
  const Interaction inter = build_interaction(triple, profiles, etas[1], medium.units);

  nlohmann::json doc = nlohmann::json::parse(to_json(rep));
  doc["theta"] = {{"re", inter.params.theta.real()}, {"im", inter.params.theta.imag()}};
  doc["delta_k"] = inter.params.delta_k;
  doc["phi"] = inter.params.phi;
  em.emit("compare", "json", dump_json(doc));
  return rep.pass ? exit_ok : exit_expectation_failed;
}

int cmd_phasematch(const RunConfig& cfg, Emitter& em) {
  const std::string fmt = require_format(cfg, {"csv", "json"}, "csv");
  if (cfg.points < 2) throw InputError("--points must be >= 2");
  if (!(cfg.dk_max > cfg.dk_min)) throw InputError("--dk-max must exceed --dk-min");
  std::vector<double> grid(static_cast<std::size_t>(cfg.points));
  for (int i = 0; i < cfg.points; ++i)
    grid[static_cast<std::size_t>(i)] = cfg.dk_min + (cfg.dk_max - cfg.dk_min) * i / (cfg.points - 1);
  const auto curve = phase_matching_curve(cfg.length, grid);
  if (fmt == "csv") {
    CsvWriter csv({"delta_k", "phi", "phi2"});
    for (const auto& p : curve) csv.row({format_double(p.delta_k), format_double(p.phi), format_double(p.phi2)});
    em.emit("phasematch", "csv", csv.str());
  } else {
    nlohmann::json doc;
    doc["length"] = cfg.length;
    auto rows = nlohmann::json::array();
    for (const auto& p : curve) rows.push_back({{"delta_k", p.delta_k}, {"phi", p.phi}, {"phi2", p.phi2}});
    doc["curve"] = rows;
    em.emit("phasematch", "json", dump_json(doc));
  }
  return exit_ok;
}

int cmd_dynamics(const RunConfig& cfg, Emitter& em, Observable obs) {
  const std::string fmt = require_format(cfg, {"csv", "json"}, "csv");
  if (cfg.steps < 1) throw InputError("--steps must be >= 1");
  EvolutionConfig ec;
  ec.n_max = cfg.n_max;
  ec.beta = cfg.beta;
  ec.t = cfg.time;
  ec.validate();
  InteractionParams params;
  params.theta = cfg.theta;
  const int order = cfg.order > 0 ? cfg.order : 2;
  std::vector<double> times;
  for (int j = 0; j <= cfg.steps; ++j) times.push_back(cfg.time * j / cfg.steps);
  const auto points = sweep(obs, params, ec, times, order);
  const std::string name = obs == Observable::squeezing ? "spdc" : "convert";
  if (fmt == "csv") {
    em.emit(name, "csv", sweep_to_csv(points));
  } else {
    nlohmann::json doc;
    doc["observable"] = to_string(obs);
    doc["order"] = order;
    auto rows = nlohmann::json::array();
    for (const auto& p : points) rows.push_back({{"t", p.t}, {"value", p.value}, {"scheme", p.scheme}});
    doc["points"] = rows;
    em.emit(name, "json", dump_json(doc));
  }
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantization of nonlinear optical media: inversion, Maxwell checks, dynamics"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--medium", cfg.medium, "medium JSON file");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--n-max", cfg.n_max, "Fock cutoff per mode");
    sub->add_option("--time", cfg.time, "evolution time");
    sub->add_option("--order", cfg.order, "nonlinear order");
  };
  auto* invert = app.add_subcommand("invert", "inverse susceptibilities eta(n) and gamma(n)");
  auto* verify = app.add_subcommand("verify", "Faraday/Ampere check of both schemes");
  auto* compare = app.add_subcommand("compare", "correct vs E-linear scheme comparison");
  auto* phasematch = app.add_subcommand("phasematch", "phase-matching curve");
  auto* spdc = app.add_subcommand("spdc", "squeezing sweep");
  auto* convert = app.add_subcommand("convert", "frequency-conversion sweep");
  for (auto* s : {invert, verify, compare, phasematch, spdc, convert}) common(s);
  verify->add_option("--modes", cfg.modes, "box modes per sign (basis +-1..+-M)");
  compare->add_option("--observable", cfg.observable, "coefficient, squeezing or conversion");
  phasematch->add_option("--length", cfg.length, "interaction length");
  phasematch->add_option("--dk-min", cfg.dk_min);
  phasematch->add_option("--dk-max", cfg.dk_max);
  phasematch->add_option("--points", cfg.points);
  for (auto* s : {spdc, convert}) {
    s->add_option("--steps", cfg.steps, "sweep intervals");
    s->add_option("--theta", cfg.theta, "coupling theta");
    s->add_option("--beta", cfg.beta, "classical pump amplitude");
  }

  std::vector<std::string> argv_store{"dquant"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_input_error;
  }

  try {
    Emitter em(cfg, out);
    if (invert->parsed()) return cmd_invert(cfg, em);
    if (verify->parsed()) return cmd_verify(cfg, em, err);
    if (compare->parsed()) return cmd_compare(cfg, em);
    if (phasematch->parsed()) return cmd_phasematch(cfg, em);
    if (spdc->parsed()) return cmd_dynamics(cfg, em, Observable::squeezing);
    if (convert->parsed()) return cmd_dynamics(cfg, em, Observable::conversion);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return exit_input_error;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return exit_input_error;
  }
  return exit_input_error;
}

}  // namespace dquant
