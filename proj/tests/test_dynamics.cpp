#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "dquant/dynamics.h"
#include "dquant/error.h"
#include "oracles.h"

using namespace dquant;

namespace {

InteractionParams coupling(double theta, double delta = 0.0) {
  InteractionParams p;
  p.theta = theta;
  p.delta = delta;
  return p;
}

EvolutionConfig config(double t, int n_max, int steps = 1) {
  EvolutionConfig c;
  c.t = t;
  c.n_max = n_max;
  c.steps = steps;
  return c;
}

}  // namespace

TEST_CASE("eigenstates only pick up a phase") {
  const FockSpace space({mode_a}, 5);
  const auto h = BosonicPolynomial::number(mode_a) * 0.7;
  const auto psi0 = space.basis_state({2});
  const auto ev = evolve(h, space, psi0, 3.0);
  CHECK(std::abs(ev.state[2] - std::exp(complex(0.0, -1.4 * 3.0))) < 1e-12);
  CHECK(ev.state.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ev.dense);

  const auto zero = evolve(BosonicPolynomial{}, space, psi0, 10.0);
  CHECK((zero.state - psi0).norm() < 1e-15);
}

TEST_CASE("evolve agrees with a dense matrix exponential oracle") {
  const FockSpace space({mode_a, mode_b}, 5);
  const auto h = BosonicPolynomial::creation(mode_a) * BosonicPolynomial::creation(mode_b) * complex(0.2, 0.1) +
                 BosonicPolynomial::annihilation(mode_a) * BosonicPolynomial::annihilation(mode_b) * complex(0.2, -0.1) +
                 BosonicPolynomial::number(mode_b) * 0.3;
  const auto a = oracle::annihilator(5);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(6, 6);
  const Eigen::MatrixXcd A = oracle::kron(a, id), B = oracle::kron(id, a);
  const Eigen::MatrixXcd H = complex(0.2, 0.1) * A.adjoint() * B.adjoint() + complex(0.2, -0.1) * A * B +
                             0.3 * B.adjoint() * B;
  const Eigen::MatrixXcd U = (complex(0.0, -1.5) * H).exp();
  const auto psi0 = space.basis_state({0, 1});
  const auto ev = evolve(h, space, psi0, 1.5, 1.0, 3);
  CHECK((ev.state - U * psi0).norm() < 1e-12);
  CHECK(ev.trajectory.size() == 3);
}

TEST_CASE("input validation") {
  const FockSpace space({mode_a}, 4);
  const auto psi0 = space.basis_state({0});
  CHECK_THROWS_AS(evolve(BosonicPolynomial::creation(mode_a), space, psi0, 1.0), NotHermitian);
  CHECK_THROWS_AS(evolve(BosonicPolynomial{}, space, Eigen::VectorXcd(psi0 * 2.0), 1.0), InputError);
  CHECK_THROWS_AS(evolve(BosonicPolynomial{}, space, Eigen::VectorXcd::Ones(3), 1.0), InputError);
  CHECK_THROWS_AS(evolve(BosonicPolynomial{}, space, psi0, 1.0, 1.0, 0), InputError);
  CHECK_THROWS_AS(config(1.0, 1).validate(), InputError);
  CHECK_THROWS_AS(config(-1.0, 8).validate(), InputError);
  CHECK_THROWS_AS(config(1.0, 8, 0).validate(), InputError);
  CHECK_THROWS_AS(parse_observable("entropy"), InputError);
  CHECK(parse_observable("conversion") == Observable::conversion);
}

TEST_CASE("two-mode squeezing against sinh^2") {
  const auto s = spdc_squeezing(coupling(0.1), config(1.0, 12, 5));
  CHECK(s.g == doctest::Approx(0.1));
  CHECK(std::abs(s.mean_n_a - oracle::two_mode_squeezing_population(0.1)) < 1e-6);
  CHECK(s.pair_mismatch < 1e-8);
  CHECK(s.norm_drift < 1e-10);
  CHECK(s.energy_drift < 1e-10);
  CHECK_FALSE(s.truncation_unsafe);

  const auto r = spdc_squeezing(coupling(0.2), config(1.0, 16, 10));
  CHECK(std::abs(r.r - 0.2) < 1e-4);
  CHECK(std::abs(r.mean_n_a - r.mean_n_b) < 1e-8);
  CHECK(r.fit_residual < 1e-6);

  // Pump amplitude enters as |beta| theta.
  EvolutionConfig c = config(1.0, 16, 4);
  c.beta = complex(0.0, 2.0);
  CHECK(std::abs(spdc_squeezing(coupling(0.1), c).r - 0.2) < 1e-4);

  const auto none = spdc_squeezing(coupling(0.0), config(1.0, 8, 2));
  CHECK(none.mean_n_a == 0.0);
  CHECK(none.r == 0.0);
}

TEST_CASE("detuned squeezing") {
  const double g = 0.2, delta = 0.1, t = 1.0;
  const auto s = spdc_squeezing(coupling(g, delta), config(t, 16, 4));
  const double G = std::sqrt(g * g - delta * delta / 4.0);
  const double expect = (g / G) * (g / G) * std::sinh(G * t) * std::sinh(G * t);
  CHECK(std::abs(s.mean_n_a - expect) < 1e-8);
  CHECK(s.pair_mismatch < 1e-8);
}

TEST_CASE("quantum pump approaches the classical limit") {
  EvolutionConfig c = config(1.0, 6, 2);
  c.pump = PumpTreatment::quantum;
  c.beta = 3.0;
  c.pump_cutoff = 22;
  const auto q = spdc_squeezing(coupling(0.1 / 3.0), c);
  const double classical = oracle::two_mode_squeezing_population(0.1);
  CHECK(std::abs(q.mean_n_a - classical) < 2e-2 * classical);
  CHECK(q.pair_mismatch < 1e-8);
  CHECK(q.norm_drift < 1e-10);
}

TEST_CASE("frequency conversion against sin^2") {
  for (double gt : {0.01, 0.3, 1.0}) {
    const auto c = frequency_conversion(coupling(gt), config(1.0, 4, 4));
    CHECK(std::abs(c.probability - oracle::conversion_probability(gt)) < 1e-12);
    CHECK(c.conservation_error < 1e-12);
    CHECK(c.norm_drift < 1e-10);
    CHECK(c.energy_drift < 1e-10);
  }
  const auto full = frequency_conversion(coupling(std::numbers::pi / 2), config(1.0, 4));
  CHECK(std::abs(full.probability - 1.0) < 1e-12);

  const double g = 0.3, delta = 0.4;
  const auto d = frequency_conversion(coupling(g, delta), config(2.0, 4));
  const double om = std::sqrt(g * g + delta * delta / 4.0);
  CHECK(std::abs(d.probability - (g / om) * (g / om) * std::sin(om * 2.0) * std::sin(om * 2.0)) < 1e-12);
}

TEST_CASE("scheme comparisons") {
  const auto sq = compare_schemes(Observable::squeezing, 2);
  CHECK(sq.pass);
  CHECK(std::abs(sq.ratio - 2.0) < 1e-4);
  const auto cv = compare_schemes(Observable::conversion, 2);
  CHECK(cv.pass);
  CHECK(std::abs(cv.ratio - 4.0) < 1e-3);
  const auto co = compare_schemes(Observable::coefficient, 3);
  CHECK(co.pass);
  CHECK(std::abs(co.ratio + 3.0) < 1e-12);
  CHECK(nlohmann::json::parse(to_json(sq))["observable"] == "squeezing");

  // Rescaling theta with g t held fixed leaves the ratios unchanged.
  for (double lambda : {0.1, 10.0}) {
    ComparisonOptions o;
    o.theta_scale = lambda;
    CHECK(std::abs(compare_schemes(Observable::squeezing, 2, o).ratio - sq.ratio) < 1e-8);
    CHECK(std::abs(compare_schemes(Observable::conversion, 2, o).ratio - cv.ratio) < 1e-8);
  }
  const auto pair = spdc_squeezing_schemes(coupling(0.02), config(1.0, 16, 4));
  CHECK(std::abs(pair.wrong.r / pair.correct.r - 2.0) < 1e-4);
}

TEST_CASE("truncation flag") {
  CHECK(spdc_squeezing(coupling(2.0), config(1.0, 6)).truncation_unsafe);
  CHECK_FALSE(spdc_squeezing(coupling(0.05), config(1.0, 12)).truncation_unsafe);
}

TEST_CASE("large spaces use Taylor propagation") {
  // An idle third mode inflates the space past the dense limit without changing the physics.
  const auto h = (BosonicPolynomial::creation(mode_a) * BosonicPolynomial::creation(mode_b) +
                  BosonicPolynomial::annihilation(mode_a) * BosonicPolynomial::annihilation(mode_b)) *
                 0.2;
  const FockSpace big({mode_a, mode_b, mode_c}, 16);
  REQUIRE(big.dimension() > dense_dimension_limit);
  const auto ev = evolve(h, big, big.basis_state({0, 0, 0}), 1.0, 1.0, 2);
  CHECK_FALSE(ev.dense);
  CHECK(std::abs(mean_number(big, ev.state, mode_a) - oracle::two_mode_squeezing_population(0.2)) < 1e-10);
  CHECK(ev.norm_drift < 1e-10);
  CHECK(ev.energy_drift < 1e-10);
}

TEST_CASE("coherent state") {
  const FockSpace space({mode_a, mode_b}, 20);
  const auto psi = coherent_state(space, mode_b, complex(1.0, 1.0));
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(mean_number(space, psi, mode_b) - 2.0) < 1e-6);
  CHECK(mean_number(space, psi, mode_a) == 0.0);
}

TEST_CASE("sweeps are ordered and independent of the thread count") {
  const std::vector<double> times{0.5, 0.1, 0.3};
  const auto cfg = config(1.0, 10, 2);
  setenv("DQUANT_THREADS", "1", 1);
  CHECK(sweep_threads() == 1);
  const auto serial = sweep(Observable::squeezing, coupling(0.1), cfg, times);
  setenv("DQUANT_THREADS", "4", 1);
  CHECK(sweep_threads() == 4);
  const auto parallel = sweep(Observable::squeezing, coupling(0.1), cfg, times);
  unsetenv("DQUANT_THREADS");
  CHECK(sweep_threads() >= 1);
  REQUIRE(serial.size() == 6);
  REQUIRE(parallel.size() == 6);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].t == parallel[i].t);
    CHECK(serial[i].value == parallel[i].value);
    CHECK(serial[i].scheme == parallel[i].scheme);
  }
  CHECK(serial[0].t == 0.1);
  CHECK(serial[0].scheme == "D-based");
  CHECK(serial[1].scheme == "E-linear-wrong");
  CHECK(std::abs(serial[0].value - 0.01) < 1e-4);
  const std::string csv = sweep_to_csv(serial);
  CHECK(csv.rfind("t,observable,scheme\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  const auto conv = sweep(Observable::conversion, coupling(0.1), config(1.0, 4), times);
  CHECK(conv.size() == 6);
  CHECK_THROWS_AS(sweep(Observable::coefficient, coupling(0.1), cfg, times), InputError);
}
