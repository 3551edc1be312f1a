#include <cmath>
#include <sstream>

#include "cfswipt/network.hpp"
#include "cfswipt/rng.hpp"
#include "doctest.h"

using namespace cfswipt;

namespace {

SystemParams small_params() {
  SystemParams p;
  p.num_aps = 20;
  p.antennas_per_ap = 10;
  p.num_ius = 3;
  p.num_eus = 5;
  p.pilot_symbols = 8;
  p.area_side_m = 500.0;
  return p;
}

}  // namespace

TEST_CASE("path loss anchor values") {
  CHECK(path_loss_db(1.0) == doctest::Approx(-30.5).epsilon(1e-12));
  CHECK(path_loss_db(10.0) == doctest::Approx(-67.2).epsilon(1e-12));
  CHECK(path_loss_db(100.0) == doctest::Approx(-103.9).epsilon(1e-12));
  // Below the 1 m reference the law is clamped, never an error.
  CHECK(path_loss_db(0.01) == doctest::Approx(-30.5));
}

TEST_CASE("topology generation and determinism") {
  SystemParams p = small_params();
  NetworkRealization net = generate_topology(p, 1);
  CHECK(net.ap_positions.size() == 20);
  CHECK(net.iu_positions.size() == 3);
  CHECK(net.eu_positions.size() == 5);
  auto in_box = [&](const Vec2& v) {
    return v[0] >= 0.0 && v[0] < p.area_side_m && v[1] >= 0.0 && v[1] < p.area_side_m;
  };
  for (const auto& v : net.ap_positions) CHECK(in_box(v));
  for (const auto& v : net.iu_positions) CHECK(in_box(v));
  for (const auto& v : net.eu_positions) CHECK(in_box(v));

  NetworkRealization net2 = generate_topology(p, 1);
  for (size_t i = 0; i < net.ap_positions.size(); ++i) {
    CHECK(net.ap_positions[i][0] == net2.ap_positions[i][0]);
    CHECK(net.ap_positions[i][1] == net2.ap_positions[i][1]);
  }
  NetworkRealization net3 = generate_topology(p, 2);
  CHECK(net.ap_positions[0][0] != net3.ap_positions[0][0]);
}

TEST_CASE("torus distance wraps and is a metric") {
  CHECK(torus_distance({0, 1}, {0, 499}, 500.0) == doctest::Approx(2.0));
  CHECK(torus_distance({0, 0}, {250, 250}, 500.0) == doctest::Approx(std::sqrt(2.0) * 250));
  Rng rng(42);
  for (int it = 0; it < 200; ++it) {
    Vec2 a{rng.uniform(0, 500), rng.uniform(0, 500)};
    Vec2 b{rng.uniform(0, 500), rng.uniform(0, 500)};
    Vec2 c{rng.uniform(0, 500), rng.uniform(0, 500)};
    const double ab = torus_distance(a, b, 500);
    const double ba = torus_distance(b, a, 500);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
    CHECK(ab <= torus_distance(a, c, 500) + torus_distance(c, b, 500) + 1e-9);
  }
}

TEST_CASE("shadowing moments") {
  SystemParams p = small_params();
  p.num_aps = 100;
  p.num_ius = 5;
  p.num_eus = 5;
  p.pilot_symbols = 10;

  SUBCASE("zero sigma degenerates to zeros") {
    p.shadow_sigma_db = 0.0;
    NetworkRealization net = generate_topology(p, 7);
    Eigen::MatrixXd f = draw_shadowing(net, p, 7);
    CHECK(f.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("sample variance approaches sigma^2 = 16") {
    NetworkRealization net = generate_topology(p, 7);
    double sum = 0.0, sum2 = 0.0;
    long n = 0;
    for (int seed = 0; seed < 100; ++seed) {
      Eigen::MatrixXd f = draw_shadowing(net, p, seed);
      sum += f.sum();
      sum2 += f.array().square().sum();
      n += f.size();
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(var == doctest::Approx(16.0).epsilon(0.5 / 16.0));
  }

  SUBCASE("correlated mode: co-located UEs see identical shadowing") {
    p.correlated_shadowing = true;
    p.num_aps = 10;
    NetworkRealization net = generate_topology(p, 3);
    net.iu_positions[1] = net.iu_positions[0];
    double c01 = 0.0, v0 = 0.0, v1 = 0.0;
    for (int seed = 0; seed < 400; ++seed) {
      Eigen::MatrixXd f = draw_shadowing(net, p, seed);
      for (int m = 0; m < p.num_aps; ++m) {
        c01 += f(m, 0) * f(m, 1);
        v0 += f(m, 0) * f(m, 0);
        v1 += f(m, 1) * f(m, 1);
      }
    }
    CHECK(c01 / std::sqrt(v0 * v1) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("large scale coefficients") {
  SystemParams p = small_params();
  p.num_aps = 2;
  p.num_ius = 2;
  p.num_eus = 1;
  p.pilot_symbols = 3;
  NetworkRealization net = generate_topology(p, 1);
  // Place one AP exactly 1 m from IU 0, 10 m and 20 m cases via AP 1.
  net.ap_positions[0] = {100.0, 100.0};
  net.iu_positions[0] = {100.0, 101.0};
  net.ap_positions[1] = {200.0, 100.0};
  net.iu_positions[1] = {200.0, 110.0};
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, 3);
  compute_large_scale(net, f, p);
  CHECK(net.beta_iu(0, 0) == doctest::Approx(std::pow(10.0, -3.05)).epsilon(1e-12));

  // Doubling the distance from 10 m to 20 m scales beta by 2^-3.67.
  const double beta10 = net.beta_iu(1, 1);
  net.iu_positions[1] = {200.0, 120.0};
  compute_large_scale(net, f, p);
  CHECK(net.beta_iu(1, 1) / beta10 == doctest::Approx(std::pow(2.0, -3.67)).epsilon(1e-12));

  // +4 dB shadowing multiplies beta by 10^0.4.
  f(1, 1) = 4.0;
  compute_large_scale(net, f, p);
  CHECK(net.beta_iu(1, 1) / (beta10 * std::pow(2.0, -3.67)) ==
        doctest::Approx(std::pow(10.0, 0.4)).epsilon(1e-12));
}

TEST_CASE("estimation variances") {
  SystemParams p;
  p.num_aps = 1;
  p.num_ius = 1;
  p.num_eus = 1;
  p.antennas_per_ap = 2;
  p.pilot_symbols = 8;
  p.coherence_symbols = 200;
  // tau * rho_t = 1e4.
  p.noise_power_w = 1.0;
  p.p_pilot_w = 1250.0;

  NetworkRealization net;
  net.beta_iu.resize(1, 1);
  net.beta_eu.resize(1, 1);

  SUBCASE("hand value") {
    net.beta_iu(0, 0) = 1e-4;
    net.beta_eu(0, 0) = 0.0;
    estimation_variances(net, p);
    CHECK(net.gamma_iu(0, 0) == doctest::Approx(5e-5).epsilon(1e-12));
    CHECK(net.gamma_eu(0, 0) == 0.0);  // zero channel stays zero
  }

  SUBCASE("perfect estimation asymptote") {
    net.beta_iu(0, 0) = 1e6;  // tau rho_t beta huge
    net.beta_eu(0, 0) = 1e6;
    estimation_variances(net, p);
    CHECK(net.gamma_iu(0, 0) / net.beta_iu(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("monotone in beta and in tau*rho_t, ratio in [0,1)") {
    Rng rng(5);
    for (int it = 0; it < 200; ++it) {
      const double b1 = std::pow(10.0, rng.uniform(-13, -4));
      const double b2 = b1 * rng.uniform(1.0, 10.0);
      net.beta_iu(0, 0) = b1;
      net.beta_eu(0, 0) = b2;
      estimation_variances(net, p);
      const double g1 = net.gamma_iu(0, 0);
      const double g2 = net.gamma_eu(0, 0);
      CHECK(g2 >= g1);
      CHECK(g1 >= 0.0);
      CHECK(g1 / b1 < 1.0);
      CHECK(g2 / b2 < 1.0);
      // Larger pilot SNR estimates better.
      SystemParams p2 = p;
      p2.p_pilot_w *= 4.0;
      NetworkRealization net2 = net;
      estimation_variances(net2, p2);
      CHECK(net2.gamma_iu(0, 0) >= g1);
    }
  }
}

TEST_CASE("full realization determinism and round trip") {
  SystemParams p = small_params();
  NetworkRealization a = make_realization(p, 99);
  NetworkRealization b = make_realization(p, 99);
  CHECK(a.beta_iu == b.beta_iu);
  CHECK(a.gamma_eu == b.gamma_eu);
  CHECK((a.gamma_iu.array() <= a.beta_iu.array() + 1e-18).all());
  CHECK((a.beta_iu.array() > 0).all());

  std::stringstream ss;
  write_realization(ss, a);
  NetworkRealization c = read_realization(ss);
  CHECK(c.seed == a.seed);
  CHECK(c.beta_iu == a.beta_iu);
  CHECK(c.gamma_eu == a.gamma_eu);
  CHECK(c.ap_positions == a.ap_positions);
}

TEST_CASE("parameter validation") {
  SystemParams p = small_params();
  CHECK_NOTHROW(p.validate());
  SystemParams bad = p;
  bad.pilot_symbols = 7;  // < K_d + L
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.pilot_symbols = bad.coherence_symbols;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.antennas_per_ap = 3;  // == K_d
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.noise_power_w = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("json config round trip") {
  SystemParams p = small_params();
  p.he_targets_w = {1e-4};
  SystemParams q = SystemParams::from_json_text(p.to_json_text());
  CHECK(q.num_aps == p.num_aps);
  CHECK(q.noise_power_w == p.noise_power_w);
  CHECK(q.he_targets_w == p.he_targets_w);

  // Short keys and tau defaulting.
  SystemParams r = SystemParams::from_json_text(
      R"({"M": 8, "N": 10, "K_d": 2, "L": 2, "se_target": 0.5, "he_targets": 1e-9})");
  CHECK(r.num_aps == 8);
  CHECK(r.pilot_symbols == 4);
  CHECK(r.he_target(1) == 1e-9);
}
