#include "cfswipt/network.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "cfswipt/rng.hpp"

namespace cfswipt {

double torus_distance(const Vec2& a, const Vec2& b, double side) {
  double dx = std::fabs(a[0] - b[0]);
  double dy = std::fabs(a[1] - b[1]);
  dx = std::min(dx, side - dx);
  dy = std::min(dy, side - dy);
  return std::hypot(dx, dy);
}

double path_loss_db(double distance_m) {
  const double d = std::max(distance_m, kMinDistanceM);
  return -30.5 - 36.7 * std::log10(d);
}

NetworkRealization generate_topology(const SystemParams& params, std::uint64_t seed) {
  params.validate();
  NetworkRealization net;
  net.seed = seed;
  Rng rng(seed_combine(seed, 0x746f706fULL));  // topology stream
  auto draw = [&](int n, std::vector<Vec2>& out) {
    out.resize(n);
    for (auto& p : out) {
      p[0] = rng.uniform(0.0, params.area_side_m);
      p[1] = rng.uniform(0.0, params.area_side_m);
    }
  };
  draw(params.num_aps, net.ap_positions);
  draw(params.num_ius, net.iu_positions);
  draw(params.num_eus, net.eu_positions);
  return net;
}

namespace {

// Correlated component: zero-mean unit-variance Gaussian vector with
// covariance 2^(-dist/9 m) between entries, drawn through a Cholesky factor.
Eigen::VectorXd correlated_unit_gaussian(const std::vector<Vec2>& pos, double side, Rng& rng) {
  const int n = static_cast<int>(pos.size());
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cov(i, j) = std::exp2(-torus_distance(pos[i], pos[j], side) / 9.0);
  // Tiny jitter keeps the factorization stable for (near-)duplicate points.
  cov.diagonal().array() += 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("shadowing covariance not PSD");
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z(i) = rng.normal();
  return llt.matrixL() * z;
}

}  // namespace

Eigen::MatrixXd draw_shadowing(const NetworkRealization& topology, const SystemParams& params,
                               std::uint64_t seed) {
  const int m = params.num_aps;
  const int n_ue = params.num_ius + params.num_eus;
  Eigen::MatrixXd f(m, n_ue);
  Rng rng(seed_combine(seed, 0x73686164ULL));  // shadowing stream
  const double sigma = params.shadow_sigma_db;
  if (sigma == 0.0) {
    f.setZero();
    return f;
  }
  if (!params.correlated_shadowing) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n_ue; ++j) f(i, j) = rng.normal(0.0, sigma);
    return f;
  }
  // Two-component model: F_mk = sigma (sqrt(1/2) a_m + sqrt(1/2) b_k).
  std::vector<Vec2> ue_pos = topology.iu_positions;
  ue_pos.insert(ue_pos.end(), topology.eu_positions.begin(), topology.eu_positions.end());
  const Eigen::VectorXd a = correlated_unit_gaussian(topology.ap_positions, params.area_side_m, rng);
  const Eigen::VectorXd b = correlated_unit_gaussian(ue_pos, params.area_side_m, rng);
  const double w = std::sqrt(0.5);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n_ue; ++j) f(i, j) = sigma * (w * a(i) + w * b(j));
  return f;
}

void compute_large_scale(NetworkRealization& net, const Eigen::MatrixXd& shadowing_db,
                         const SystemParams& params) {
  const int m = params.num_aps;
  const int k = params.num_ius;
  const int l = params.num_eus;
  if (shadowing_db.rows() != m || shadowing_db.cols() != k + l)
    throw std::invalid_argument("shadowing matrix dimensions mismatch");
  net.beta_iu.resize(m, k);
  net.beta_eu.resize(m, l);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < k; ++j) {
      const double d = torus_distance(net.ap_positions[i], net.iu_positions[j], params.area_side_m);
      net.beta_iu(i, j) = std::pow(10.0, (path_loss_db(d) + shadowing_db(i, j)) / 10.0);
    }
    for (int j = 0; j < l; ++j) {
      const double d = torus_distance(net.ap_positions[i], net.eu_positions[j], params.area_side_m);
      net.beta_eu(i, j) = std::pow(10.0, (path_loss_db(d) + shadowing_db(i, k + j)) / 10.0);
    }
  }
}

void estimation_variances(NetworkRealization& net, const SystemParams& params) {
  const double trt = params.pilot_symbols * params.pilot_snr();
  auto gamma = [trt](double beta) { return trt * beta * beta / (trt * beta + 1.0); };
  net.gamma_iu = net.beta_iu.unaryExpr(gamma);
  net.gamma_eu = net.beta_eu.unaryExpr(gamma);
}

NetworkRealization make_realization(const SystemParams& params, std::uint64_t seed) {
  NetworkRealization net = generate_topology(params, seed);
  const Eigen::MatrixXd f = draw_shadowing(net, params, seed);
  compute_large_scale(net, f, params);
  estimation_variances(net, params);
  return net;
}

namespace {

void write_matrix(std::ostream& os, const char* name, const Eigen::MatrixXd& m) {
  os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      os << buf << (j + 1 == m.cols() ? '\n' : ' ');
    }
  }
}

Eigen::MatrixXd read_matrix(std::istream& is, const char* name) {
  std::string tag;
  Eigen::Index r = 0, c = 0;
  is >> tag >> r >> c;
  if (tag != name) throw std::runtime_error("realization parse error: expected " + std::string(name));
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) is >> m(i, j);
  return m;
}

void write_points(std::ostream& os, const char* name, const std::vector<Vec2>& pts) {
  os << name << ' ' << pts.size() << '\n';
  char buf[80];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g", p[0], p[1]);
    os << buf << '\n';
  }
}

std::vector<Vec2> read_points(std::istream& is, const char* name) {
  std::string tag;
  size_t n = 0;
  is >> tag >> n;
  if (tag != name) throw std::runtime_error("realization parse error: expected " + std::string(name));
  std::vector<Vec2> pts(n);
  for (auto& p : pts) is >> p[0] >> p[1];
  return pts;
}

}  // namespace

void write_realization(std::ostream& os, const NetworkRealization& net) {
  os << "cfswipt-realization v1\n";
  os << "seed " << net.seed << '\n';
  write_points(os, "ap_positions", net.ap_positions);
  write_points(os, "iu_positions", net.iu_positions);
  write_points(os, "eu_positions", net.eu_positions);
  write_matrix(os, "beta_iu", net.beta_iu);
  write_matrix(os, "beta_eu", net.beta_eu);
  write_matrix(os, "gamma_iu", net.gamma_iu);
  write_matrix(os, "gamma_eu", net.gamma_eu);
}

NetworkRealization read_realization(std::istream& is) {
  std::string word, version;
  is >> word >> version;
  if (word != "cfswipt-realization" || version != "v1")
    throw std::runtime_error("unrecognized realization header");
  NetworkRealization net;
  is >> word >> net.seed;
  net.ap_positions = read_points(is, "ap_positions");
  net.iu_positions = read_points(is, "iu_positions");
  net.eu_positions = read_points(is, "eu_positions");
  net.beta_iu = read_matrix(is, "beta_iu");
  net.beta_eu = read_matrix(is, "beta_eu");
  net.gamma_iu = read_matrix(is, "gamma_iu");
  net.gamma_eu = read_matrix(is, "gamma_eu");
  return net;
}

}  // namespace cfswipt
