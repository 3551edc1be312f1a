#include <cmath>
#include <complex>

#include "cfswipt/channel_mc.hpp"
#include "cfswipt/metrics.hpp"
#include "cfswipt/network.hpp"
#include "cfswipt/rng.hpp"
#include "doctest.h"

using namespace cfswipt;

namespace {

SystemParams reference_params(int m = 6, int n = 10, int k = 3, int l = 5) {
  SystemParams p;
  p.num_aps = m;
  p.antennas_per_ap = n;
  p.num_ius = k;
  p.num_eus = l;
  p.pilot_symbols = k + l;
  return p;
}

Allocation reference_allocation(const SystemParams& p, std::uint64_t seed) {
  // Fixed random binary modes with at least one AP per role, uniform power.
  Allocation al = Allocation::zeros(p.num_aps, p.num_ius, p.num_eus);
  Rng rng(seed);
  for (int m = 0; m < p.num_aps; ++m) al.a(m) = rng.uniform01() < 0.5 ? 1.0 : 0.0;
  al.a(0) = 1.0;
  al.a(p.num_aps - 1) = 0.0;
  for (int m = 0; m < p.num_aps; ++m) {
    for (int k = 0; k < p.num_ius; ++k) al.eta_i(m, k) = al.a(m) / p.num_ius;
    for (int l = 0; l < p.num_eus; ++l) al.eta_e(m, l) = (1.0 - al.a(m)) / p.num_eus;
  }
  return al;
}

}  // namespace

TEST_CASE("channel draws: determinism, moments, independence") {
  SystemParams p = reference_params();
  NetworkRealization net = make_realization(p, 11);

  SUBCASE("same (seed, trial) twice is identical") {
    ChannelDraw a = draw_channels(net, p, 5);
    ChannelDraw b = draw_channels(net, p, 5);
    CHECK(a.g_hat_iu[2] == b.g_hat_iu[2]);
    CHECK(a.g_err_eu[4] == b.g_err_eu[4]);
    ChannelDraw c = draw_channels(net, p, 6);
    CHECK(a.g_hat_iu[0] != c.g_hat_iu[0]);
  }

  SUBCASE("perfect CSI kills the error draw") {
    NetworkRealization ideal = with_perfect_csi(net);
    ChannelDraw d = draw_channels(ideal, p, 1);
    for (int m = 0; m < p.num_aps; ++m) {
      CHECK(d.g_err_iu[m].cwiseAbs().maxCoeff() == 0.0);
      CHECK(d.g_err_eu[m].cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("estimate norm matches gamma within Monte-Carlo tolerance") {
    const int trials = 10000;
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
      ChannelDraw d = draw_channels(net, p, t);
      acc += d.g_hat_iu[0].col(0).squaredNorm() / p.antennas_per_ap;
    }
    CHECK(acc / trials == doctest::Approx(net.gamma_iu(0, 0)).epsilon(0.03));
  }

  SUBCASE("estimate and error are uncorrelated") {
    const int trials = 10000;
    std::complex<double> cross(0, 0);
    double pw = 0.0;
    for (int t = 0; t < trials; ++t) {
      ChannelDraw d = draw_channels(net, p, t);
      cross += d.g_hat_iu[0].col(0).dot(d.g_err_iu[0].col(0));
      pw += d.g_hat_iu[0].col(0).norm() * d.g_err_iu[0].col(0).norm();
    }
    CHECK(std::abs(cross) / pw < 0.05);
  }
}

TEST_CASE("precoder structure") {
  SystemParams p = reference_params();
  NetworkRealization net = make_realization(p, 3);
  ChannelDraw d = draw_channels(net, p, 0);

  SUBCASE("zero forcing annihilates the other IU estimates") {
    const int m = 1;
    bool ok = true;
    Eigen::MatrixXcd w = build_pzf(d.g_hat_iu[m], net.gamma_iu.row(m), &ok);
    REQUIRE(ok);
    for (int k = 0; k < p.num_ius; ++k) {
      const double alpha =
          std::sqrt((p.antennas_per_ap - p.num_ius) * net.gamma_iu(m, k));
      for (int kp = 0; kp < p.num_ius; ++kp) {
        const std::complex<double> inner = d.g_hat_iu[m].col(kp).dot(w.col(k));
        if (kp == k) {
          CHECK(inner.real() == doctest::Approx(alpha).epsilon(1e-9));
          CHECK(std::abs(inner.imag()) <= 1e-9 * alpha);
        } else {
          CHECK(std::abs(inner) <= 1e-9 * alpha);
        }
      }
    }
  }

  SUBCASE("single-IU zero forcing reduces to the MRT direction") {
    SystemParams p1 = reference_params(2, 4, 1, 1);
    NetworkRealization net1 = make_realization(p1, 9);
    ChannelDraw d1 = draw_channels(net1, p1, 0);
    Eigen::MatrixXcd w = build_pzf(d1.g_hat_iu[0], net1.gamma_iu.row(0), nullptr);
    const Eigen::VectorXcd g = d1.g_hat_iu[0].col(0);
    // Collinearity: |<w, g>| = ||w|| ||g||.
    const double cosangle = std::abs(g.dot(w.col(0))) / (g.norm() * w.col(0).norm());
    CHECK(cosangle == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("projection is idempotent and annihilates IU estimates") {
    const int m = 0;
    Eigen::MatrixXcd b = pzf_projection(d.g_hat_iu[m]);
    CHECK((b * b - b).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((d.g_hat_iu[m].adjoint() * b).cwiseAbs().maxCoeff() <= 1e-9);
    Eigen::MatrixXcd w_e = build_pmrt(d.g_hat_eu[m], b, net.gamma_eu.row(m), p.num_ius);
    for (int k = 0; k < p.num_ius; ++k)
      for (int l = 0; l < p.num_eus; ++l)
        CHECK(std::abs(d.g_hat_iu[m].col(k).dot(w_e.col(l))) <= 1e-9);
  }

  SUBCASE("no IUs: projection is the identity and PMRT is plain MRT") {
    Eigen::MatrixXcd empty(p.antennas_per_ap, 0);
    Eigen::MatrixXcd b = pzf_projection(empty);
    CHECK((b - Eigen::MatrixXcd::Identity(10, 10)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("PMRT columns have unit mean square norm") {
    const int trials = 10000;
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
      ChannelDraw dt = draw_channels(net, p, t);
      Eigen::MatrixXcd b = pzf_projection(dt.g_hat_iu[0]);
      Eigen::MatrixXcd w = build_pmrt(dt.g_hat_eu[0], b, net.gamma_eu.row(0), p.num_ius);
      acc += w.col(0).squaredNorm();
    }
    CHECK(acc / trials == doctest::Approx(1.0).epsilon(0.03));
  }

  SUBCASE("PZF columns have unit mean square norm") {
    const int trials = 10000;
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
      ChannelDraw dt = draw_channels(net, p, t);
      Eigen::MatrixXcd w = build_pzf(dt.g_hat_iu[0], net.gamma_iu.row(0), nullptr);
      acc += w.col(1).squaredNorm();
    }
    CHECK(acc / trials == doctest::Approx(1.0).epsilon(0.03));
  }
}

TEST_CASE("empirical estimators against closed forms") {
  SystemParams p = reference_params();
  NetworkRealization net = make_realization(p, 2024);
  Allocation al = reference_allocation(p, 77);

  SUBCASE("SE matches the closed form on a reference drop") {
    EmpiricalSe emp = empirical_se(al, net, p, 4000);
    Eigen::VectorXd se_cf = se_per_iu(sinr_closed_form(al, net, p), p);
    for (int k = 0; k < p.num_ius; ++k)
      CHECK(emp.se(k) == doctest::Approx(se_cf(k)).epsilon(0.05));
  }

  SUBCASE("received energy matches the closed form") {
    EmpiricalEnergy emp = empirical_energy(al, net, p, 4000);
    Eigen::VectorXd q_cf = q_closed_form(al, net, p);
    for (int l = 0; l < p.num_eus; ++l)
      CHECK(emp.q(l) == doctest::Approx(q_cf(l)).epsilon(0.05));
  }

  SUBCASE("zero power leaves exactly the noise floor") {
    Allocation zero = Allocation::zeros(p.num_aps, p.num_ius, p.num_eus);
    EmpiricalEnergy emp = empirical_energy(zero, net, p, 50);
    const double floor = p.dl_symbols() * p.noise_power_w;
    for (int l = 0; l < p.num_eus; ++l) CHECK(emp.q(l) == doctest::Approx(floor).epsilon(1e-14));
  }

  SUBCASE("perfect CSI removes EU interference entirely") {
    NetworkRealization ideal = with_perfect_csi(net);
    EmpiricalSe emp = empirical_se(al, ideal, p, 200);
    for (int k = 0; k < p.num_ius; ++k)
      CHECK(emp.eui_power(k) <= 1e-12 * emp.ds_power(k));
  }

  SUBCASE("single trial returns finite values with large reported error") {
    EmpiricalSe emp = empirical_se(al, net, p, 1);
    CHECK(emp.se.allFinite());
    CHECK(emp.std_error.allFinite());
  }

  SUBCASE("error shrinks with the trial budget") {
    Eigen::VectorXd q_cf = q_closed_form(al, net, p);
    double err_last = std::numeric_limits<double>::infinity();
    for (int n : {100, 1000, 10000}) {
      EmpiricalEnergy emp = empirical_energy(al, net, p, n);
      const double err = ((emp.q - q_cf).cwiseQuotient(q_cf)).cwiseAbs().maxCoeff();
      CHECK(err < err_last * 1.5);  // allow sampling slack around the 1/sqrt(n) law
      err_last = err;
    }
    CHECK(err_last < 0.05);
  }
}

TEST_CASE("coherent MRT moment with no IUs") {
  // K_d = 0 edge: the coherent term of a single full-power beam has mean
  // rho (N+1) gamma; checked against the sample mean.
  SystemParams p = reference_params(1, 4, 0, 1);
  p.pilot_symbols = 2;
  NetworkRealization net;
  net.seed = 5;
  net.beta_iu.resize(1, 0);
  net.gamma_iu.resize(1, 0);
  net.beta_eu = Eigen::MatrixXd::Constant(1, 1, 2e-7);
  net.gamma_eu = Eigen::MatrixXd::Constant(1, 1, 1.5e-7);
  Allocation al = Allocation::zeros(1, 0, 1);
  al.eta_e(0, 0) = 1.0;
  EmpiricalEnergy emp = empirical_energy(al, net, p, 20000);
  const double rho = p.dl_snr();
  // Exact moment: (N+1) gamma for the coherent part plus the estimation-error
  // leakage (beta - gamma) through the unit-mean-norm beam.
  const double moment = (p.antennas_per_ap + 1) * net.gamma_eu(0, 0) +
                        (net.beta_eu(0, 0) - net.gamma_eu(0, 0));
  const double expected = p.dl_symbols() * p.noise_power_w * (rho * moment + 1.0);
  CHECK(emp.q(0) == doctest::Approx(expected).epsilon(0.04));
}
