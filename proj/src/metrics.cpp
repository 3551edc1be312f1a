#include "cfswipt/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace cfswipt {

Allocation Allocation::zeros(int m, int k, int l) {
  Allocation al;
  al.a = Eigen::VectorXd::Zero(m);
  al.eta_i = Eigen::MatrixXd::Zero(m, k);
  al.eta_e = Eigen::MatrixXd::Zero(m, l);
  return al;
}

double Allocation::power_violation() const {
  double worst = 0.0;
  for (Eigen::Index m = 0; m < a.size(); ++m) {
    worst = std::max(worst, eta_i.row(m).sum() - a(m));
    worst = std::max(worst, eta_e.row(m).sum() - (1.0 - a(m)));
  }
  return worst;
}

EhModel EhModel::from_params(const SystemParams& p) {
  EhModel m;
  m.xi = p.eh_steepness;
  m.chi = p.eh_threshold_w;
  m.phi = p.eh_saturation_w;
  m.omega = 1.0 / (1.0 + std::exp(m.xi * m.chi));
  return m;
}

double logistic_psi(double q, const EhModel& m) {
  return m.phi / (1.0 + std::exp(-m.xi * (q - m.chi)));
}

double harvested_energy_phi(double q, const EhModel& m) {
  const double phi = (logistic_psi(q, m) - m.phi * m.omega) / (1.0 - m.omega);
  return std::max(phi, 0.0);
}

double inverse_logistic_f(double psi, const EhModel& m) {
  if (!(psi > 0.0 && psi < m.phi))
    throw std::domain_error("inverse_logistic_f: psi outside (0, phi)");
  return m.chi - std::log((m.phi - psi) / psi) / m.xi;
}

Eigen::VectorXd sinr_closed_form(const Allocation& alloc, const NetworkRealization& net,
                                 const SystemParams& params) {
  const int m_count = params.num_aps;
  const int k_count = params.num_ius;
  const int l_count = params.num_eus;
  const double rho = params.dl_snr();
  const double zf_gain = params.antennas_per_ap - params.num_ius;

  constexpr double kNegTol = -1e-12;
  for (int m = 0; m < m_count; ++m) {
    for (int k = 0; k < k_count; ++k)
      if (alloc.a(m) * alloc.eta_i(m, k) < kNegTol)
        throw std::domain_error("sinr_closed_form: negative a*eta product");
  }

  Eigen::VectorXd sinr(k_count);
  for (int k = 0; k < k_count; ++k) {
    double amp = 0.0;
    double interference = 0.0;
    for (int m = 0; m < m_count; ++m) {
      const double nu = net.beta_iu(m, k) - net.gamma_iu(m, k);  // estimation-error variance
      amp += std::sqrt(std::max(0.0, alloc.a(m) * alloc.eta_i(m, k) * net.gamma_iu(m, k)));
      interference += alloc.a(m) * alloc.eta_i.row(m).sum() * nu;
      for (int l = 0; l < l_count; ++l)
        interference += (1.0 - alloc.a(m)) * alloc.eta_e(m, l) * nu;
    }
    sinr(k) = rho * zf_gain * amp * amp / (rho * interference + 1.0);
  }
  return sinr;
}

Eigen::VectorXd se_per_iu(const Eigen::VectorXd& sinr, const SystemParams& params) {
  const double prefactor = params.dl_fraction();
  return sinr.unaryExpr([prefactor](double s) { return prefactor * std::log2(1.0 + s); });
}

Eigen::VectorXd q_closed_form(const Allocation& alloc, const NetworkRealization& net,
                              const SystemParams& params) {
  const int m_count = params.num_aps;
  const int k_count = params.num_ius;
  const int l_count = params.num_eus;
  const double rho = params.dl_snr();
  const double coh_gain = params.antennas_per_ap - params.num_ius + 1;
  const double scale = params.dl_symbols() * params.noise_power_w;

  Eigen::VectorXd q(l_count);
  for (int l = 0; l < l_count; ++l) {
    double acc = 0.0;
    for (int m = 0; m < m_count; ++m) {
      const double e_budget = 1.0 - alloc.a(m);
      acc += coh_gain * e_budget * alloc.eta_e(m, l) * net.gamma_eu(m, l);
      for (int lp = 0; lp < l_count; ++lp)
        if (lp != l) acc += e_budget * alloc.eta_e(m, lp) * net.beta_eu(m, l);
      for (int k = 0; k < k_count; ++k)
        acc += alloc.a(m) * alloc.eta_i(m, k) * net.beta_eu(m, l);
    }
    q(l) = scale * (rho * acc + 1.0);
  }
  return q;
}

Eigen::VectorXd benchmark3_se(const Eigen::MatrixXd& eta_i, const NetworkRealization& net,
                              const SystemParams& params) {
  const int m_count = params.num_aps;
  const int k_count = params.num_ius;
  const double rho = params.dl_snr();
  const double zf_gain = params.antennas_per_ap - params.num_ius;
  const double prefactor = 0.5 * params.dl_fraction();

  Eigen::VectorXd se(k_count);
  for (int k = 0; k < k_count; ++k) {
    double amp = 0.0;
    double interference = 0.0;
    for (int m = 0; m < m_count; ++m) {
      amp += std::sqrt(std::max(0.0, eta_i(m, k) * net.gamma_iu(m, k)));
      interference += eta_i.row(m).sum() * (net.beta_iu(m, k) - net.gamma_iu(m, k));
    }
    const double sinr = rho * zf_gain * amp * amp / (rho * interference + 1.0);
    se(k) = prefactor * std::log2(1.0 + sinr);
  }
  return se;
}

Eigen::VectorXd benchmark3_q(const Eigen::MatrixXd& eta_e, const NetworkRealization& net,
                             const SystemParams& params) {
  const int m_count = params.num_aps;
  const int l_count = params.num_eus;
  const double rho = params.dl_snr();
  const double coh_gain = params.antennas_per_ap + 1;  // full MRT, no projection
  const double scale = 0.5 * params.dl_symbols() * params.noise_power_w;

  Eigen::VectorXd q(l_count);
  for (int l = 0; l < l_count; ++l) {
    double acc = 0.0;
    for (int m = 0; m < m_count; ++m) {
      acc += coh_gain * eta_e(m, l) * net.gamma_eu(m, l);
      for (int lp = 0; lp < l_count; ++lp)
        if (lp != l) acc += eta_e(m, lp) * net.beta_eu(m, l);
    }
    q(l) = scale * (rho * acc + 1.0);
  }
  return q;
}

bool MetricsReport::all_feasible() const {
  for (bool b : feasible_se)
    if (!b) return false;
  for (bool b : feasible_he)
    if (!b) return false;
  return true;
}

std::string MetricsReport::csv_row() const {
  std::ostringstream os;
  char buf[32];
  auto put = [&](double v, bool last = false) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    os << buf << (last ? "" : ",");
  };
  put(sum_phi_w() * 1e6);
  for (Eigen::Index i = 0; i < se_per_iu.size(); ++i) put(se_per_iu(i));
  os << (all_feasible() ? 1 : 0);
  return os.str();
}

MetricsReport evaluate_allocation(const Allocation& alloc, const NetworkRealization& net,
                                  const SystemParams& params) {
  MetricsReport r;
  r.se_per_iu = se_per_iu(sinr_closed_form(alloc, net, params), params);
  r.q_per_eu = q_closed_form(alloc, net, params);
  const EhModel eh = EhModel::from_params(params);
  r.phi_per_eu.resize(r.q_per_eu.size());
  for (Eigen::Index l = 0; l < r.q_per_eu.size(); ++l)
    r.phi_per_eu(l) = harvested_energy_phi(r.q_per_eu(l), eh);
  constexpr double kSeSlack = 1e-6;
  constexpr double kHeSlackW = 1e-9;
  r.feasible_se.resize(params.num_ius);
  for (int k = 0; k < params.num_ius; ++k)
    r.feasible_se[k] = r.se_per_iu(k) >= params.se_target - kSeSlack;
  r.feasible_he.resize(params.num_eus);
  for (int l = 0; l < params.num_eus; ++l)
    r.feasible_he[l] = r.phi_per_eu(l) >= params.he_target(l) - kHeSlackW;
  return r;
}

}  // namespace cfswipt
