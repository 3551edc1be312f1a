#include "cfswipt/channel_mc.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "cfswipt/rng.hpp"

namespace cfswipt {

namespace {

// Kahan-compensated accumulator; trials are accumulated in index order so a
// fixed seed reproduces bit-identical sums regardless of how callers schedule
// the surrounding work.
struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

Eigen::MatrixXcd draw_matrix(Rng& rng, const Eigen::VectorXd& variances, int n_antennas) {
  Eigen::MatrixXcd m(n_antennas, variances.size());
  for (Eigen::Index col = 0; col < variances.size(); ++col) {
    const double v = std::max(variances(col), 0.0);
    for (int row = 0; row < n_antennas; ++row) m(row, col) = rng.complex_normal(v);
  }
  return m;
}

// Cholesky solve of (G^H G) X = rhs with the jitter/retry policy.
bool gram_solve(const Eigen::MatrixXcd& g, const Eigen::MatrixXcd& rhs, Eigen::MatrixXcd& out) {
  const Eigen::MatrixXcd gram = g.adjoint() * g;
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() == Eigen::Success) {
    out = llt.solve(rhs);
    return true;
  }
  Eigen::MatrixXcd jittered = gram;
  jittered.diagonal().array() += 1e-12 * gram.real().trace() / static_cast<double>(gram.rows());
  Eigen::LLT<Eigen::MatrixXcd> llt2(jittered);
  if (llt2.info() != Eigen::Success) return false;
  out = llt2.solve(rhs);
  return true;
}

}  // namespace

ChannelDraw draw_channels(const NetworkRealization& net, const SystemParams& params,
                          std::uint64_t trial_seed) {
  const int m_count = params.num_aps;
  const int n = params.antennas_per_ap;
  ChannelDraw d;
  d.trial_seed = trial_seed;
  d.g_hat_iu.resize(m_count);
  d.g_err_iu.resize(m_count);
  d.g_hat_eu.resize(m_count);
  d.g_err_eu.resize(m_count);
  Rng rng(seed_combine(seed_combine(net.seed, 0x6368616eULL), trial_seed));
  for (int m = 0; m < m_count; ++m) {
    d.g_hat_iu[m] = draw_matrix(rng, net.gamma_iu.row(m), n);
    d.g_err_iu[m] = draw_matrix(rng, (net.beta_iu.row(m) - net.gamma_iu.row(m)).cwiseMax(0.0), n);
    d.g_hat_eu[m] = draw_matrix(rng, net.gamma_eu.row(m), n);
    d.g_err_eu[m] = draw_matrix(rng, (net.beta_eu.row(m) - net.gamma_eu.row(m)).cwiseMax(0.0), n);
  }
  return d;
}

Eigen::MatrixXcd pzf_projection(const Eigen::MatrixXcd& g) {
  const int n = static_cast<int>(g.rows());
  if (g.cols() == 0) return Eigen::MatrixXcd::Identity(n, n);  // no IUs: plain MRT
  Eigen::MatrixXcd inv_gh;
  if (!gram_solve(g, g.adjoint(), inv_gh)) return Eigen::MatrixXcd::Identity(n, n);
  return Eigen::MatrixXcd::Identity(n, n) - g * inv_gh;
}

Eigen::MatrixXcd build_pzf(const Eigen::MatrixXcd& g, const Eigen::VectorXd& gamma_row,
                           bool* ok) {
  const int k = static_cast<int>(g.cols());
  const int n = static_cast<int>(g.rows());
  if (k == 0) {
    if (ok) *ok = true;
    return Eigen::MatrixXcd(n, 0);
  }
  Eigen::MatrixXcd inv(k, k);
  const bool solved = gram_solve(g, Eigen::MatrixXcd::Identity(k, k), inv);
  if (ok) *ok = solved;
  Eigen::MatrixXcd w = g * inv;
  for (int col = 0; col < k; ++col)
    w.col(col) *= std::sqrt(std::max(0.0, (n - k) * gamma_row(col)));
  return w;
}

Eigen::MatrixXcd build_pmrt(const Eigen::MatrixXcd& g_eu, const Eigen::MatrixXcd& b_proj,
                            const Eigen::VectorXd& gamma_row, int num_ius) {
  const double zf_dims = static_cast<double>(b_proj.rows() - num_ius);
  Eigen::MatrixXcd w = b_proj * g_eu;
  for (Eigen::Index col = 0; col < w.cols(); ++col) {
    const double g = gamma_row(col);
    if (g > 0.0) w.col(col) /= std::sqrt(zf_dims * g);
  }
  return w;
}

std::vector<ApPrecoders> build_precoders(const ChannelDraw& draw, const NetworkRealization& net,
                                         const SystemParams& params) {
  const int m_count = params.num_aps;
  std::vector<ApPrecoders> out(m_count);
  for (int m = 0; m < m_count; ++m) {
    bool ok = true;
    out[m].w_i = build_pzf(draw.g_hat_iu[m], net.gamma_iu.row(m), &ok);
    const Eigen::MatrixXcd b = pzf_projection(draw.g_hat_iu[m]);
    out[m].w_e = build_pmrt(draw.g_hat_eu[m], b, net.gamma_eu.row(m), params.num_ius);
    out[m].ok = ok;
  }
  return out;
}

NetworkRealization with_perfect_csi(const NetworkRealization& net) {
  NetworkRealization out = net;
  out.gamma_iu = net.beta_iu;
  out.gamma_eu = net.beta_eu;
  return out;
}

EmpiricalSe empirical_se(const Allocation& alloc, const NetworkRealization& net,
                         const SystemParams& params, int n_trials) {
  const int m_count = params.num_aps;
  const int k_count = params.num_ius;
  const int l_count = params.num_eus;
  const double rho = params.dl_snr();

  // Per-IU accumulators: complex mean of the desired-signal amplitude, its
  // squared magnitude, and the interference powers.
  std::vector<Kahan> ds_re(k_count), ds_im(k_count), ds_sq(k_count);
  std::vector<std::vector<Kahan>> iui(k_count, std::vector<Kahan>(k_count));
  std::vector<std::vector<Kahan>> eui(k_count, std::vector<Kahan>(l_count));

  // Batch means for the standard error of the assembled SE.
  const int n_batches = std::min(20, std::max(1, n_trials));
  Eigen::MatrixXcd batch_ds = Eigen::MatrixXcd::Zero(n_batches, k_count);
  Eigen::MatrixXd batch_ds2 = Eigen::MatrixXd::Zero(n_batches, k_count);
  Eigen::MatrixXd batch_int = Eigen::MatrixXd::Zero(n_batches, k_count);
  Eigen::VectorXd batch_n = Eigen::VectorXd::Zero(n_batches);

  Eigen::MatrixXd amp_i(m_count, k_count);   // sqrt(rho a eta_i)
  Eigen::MatrixXd amp_e(m_count, l_count);   // sqrt(rho (1-a) eta_e)
  for (int m = 0; m < m_count; ++m) {
    for (int k = 0; k < k_count; ++k)
      amp_i(m, k) = std::sqrt(std::max(0.0, rho * alloc.a(m) * alloc.eta_i(m, k)));
    for (int l = 0; l < l_count; ++l)
      amp_e(m, l) = std::sqrt(std::max(0.0, rho * (1.0 - alloc.a(m)) * alloc.eta_e(m, l)));
  }

  for (int trial = 0; trial < n_trials; ++trial) {
    ChannelDraw draw = draw_channels(net, params, trial);
    const std::vector<ApPrecoders> prec = build_precoders(draw, net, params);
    const int batch = static_cast<int>((static_cast<long long>(trial) * n_batches) / n_trials);
    batch_n(batch) += 1.0;
    for (int k = 0; k < k_count; ++k) {
      std::complex<double> t(0.0, 0.0);
      Eigen::VectorXcd u = Eigen::VectorXcd::Zero(k_count);   // per interfering IU beam
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(l_count);   // per EU beam
      for (int m = 0; m < m_count; ++m) {
        const Eigen::VectorXcd g_true = draw.g_hat_iu[m].col(k) + draw.g_err_iu[m].col(k);
        for (int kp = 0; kp < k_count; ++kp) {
          const std::complex<double> inner = g_true.dot(prec[m].w_i.col(kp));
          if (kp == k)
            t += amp_i(m, k) * inner;
          else
            u(kp) += amp_i(m, kp) * inner;
        }
        for (int l = 0; l < l_count; ++l)
          v(l) += amp_e(m, l) * g_true.dot(prec[m].w_e.col(l));
      }
      ds_re[k].add(t.real());
      ds_im[k].add(t.imag());
      ds_sq[k].add(std::norm(t));
      batch_ds(batch, k) += t;
      batch_ds2(batch, k) += std::norm(t);
      double interf = 0.0;
      for (int kp = 0; kp < k_count; ++kp)
        if (kp != k) {
          iui[k][kp].add(std::norm(u(kp)));
          interf += std::norm(u(kp));
        }
      for (int l = 0; l < l_count; ++l) {
        eui[k][l].add(std::norm(v(l)));
        interf += std::norm(v(l));
      }
      batch_int(batch, k) += interf;
    }
  }

  const double inv_n = 1.0 / n_trials;
  EmpiricalSe out;
  out.n_trials = n_trials;
  out.se.resize(k_count);
  out.std_error.resize(k_count);
  out.ds_power.resize(k_count);
  out.bu_var.resize(k_count);
  out.iui_power.resize(k_count);
  out.eui_power.resize(k_count);
  const double pref = params.dl_fraction();

  auto assemble = [pref](double ds2, double bu, double interf) {
    const double sinr = ds2 / (bu + interf + 1.0);
    return pref * std::log2(1.0 + sinr);
  };

  for (int k = 0; k < k_count; ++k) {
    const std::complex<double> mean_ds(ds_re[k].sum * inv_n, ds_im[k].sum * inv_n);
    out.ds_power(k) = std::norm(mean_ds);
    out.bu_var(k) = std::max(0.0, ds_sq[k].sum * inv_n - std::norm(mean_ds));
    double it = 0.0;
    for (int kp = 0; kp < k_count; ++kp)
      if (kp != k) it += iui[k][kp].sum * inv_n;
    out.iui_power(k) = it;
    double et = 0.0;
    for (int l = 0; l < l_count; ++l) et += eui[k][l].sum * inv_n;
    out.eui_power(k) = et;
    out.se(k) = assemble(out.ds_power(k), out.bu_var(k), it + et);

    // Batch-means spread of the assembled estimate.
    if (n_batches > 1) {
      double mean_b = 0.0, sq_b = 0.0;
      int used = 0;
      for (int b = 0; b < n_batches; ++b) {
        if (batch_n(b) == 0) continue;
        const std::complex<double> dsb = batch_ds(b, k) / batch_n(b);
        const double bub = std::max(0.0, batch_ds2(b, k) / batch_n(b) - std::norm(dsb));
        const double seb = assemble(std::norm(dsb), bub, batch_int(b, k) / batch_n(b));
        mean_b += seb;
        sq_b += seb * seb;
        ++used;
      }
      mean_b /= used;
      const double var_b = std::max(0.0, sq_b / used - mean_b * mean_b);
      out.std_error(k) = std::sqrt(var_b / used);
    } else {
      out.std_error(k) = std::abs(out.se(k));  // degenerate single-trial case
    }
  }
  return out;
}

EmpiricalEnergy empirical_energy(const Allocation& alloc, const NetworkRealization& net,
                                 const SystemParams& params, int n_trials) {
  const int m_count = params.num_aps;
  const int k_count = params.num_ius;
  const int l_count = params.num_eus;
  const double rho = params.dl_snr();
  const double scale = params.dl_symbols() * params.noise_power_w;

  std::vector<Kahan> e_sum(l_count), e_sq(l_count);
  for (int trial = 0; trial < n_trials; ++trial) {
    ChannelDraw draw = draw_channels(net, params, trial);
    const std::vector<ApPrecoders> prec = build_precoders(draw, net, params);
    for (int l = 0; l < l_count; ++l) {
      double acc = 0.0;
      for (int m = 0; m < m_count; ++m) {
        const Eigen::VectorXcd g_true = draw.g_hat_eu[m].col(l) + draw.g_err_eu[m].col(l);
        const double e_budget = 1.0 - alloc.a(m);
        for (int lp = 0; lp < l_count; ++lp) {
          const double p = e_budget * alloc.eta_e(m, lp);
          if (p > 0.0) acc += rho * p * std::norm(g_true.dot(prec[m].w_e.col(lp)));
        }
        for (int k = 0; k < k_count; ++k) {
          const double p = alloc.a(m) * alloc.eta_i(m, k);
          if (p > 0.0) acc += rho * p * std::norm(g_true.dot(prec[m].w_i.col(k)));
        }
      }
      acc += 1.0;
      e_sum[l].add(acc);
      e_sq[l].add(acc * acc);
    }
  }

  EmpiricalEnergy out;
  out.n_trials = n_trials;
  out.q.resize(l_count);
  out.std_error.resize(l_count);
  const double inv_n = 1.0 / n_trials;
  for (int l = 0; l < l_count; ++l) {
    const double mean = e_sum[l].sum * inv_n;
    const double var = std::max(0.0, e_sq[l].sum * inv_n - mean * mean);
    out.q(l) = scale * mean;
    out.std_error(l) = scale * std::sqrt(var * inv_n);
  }
  return out;
}

}  // namespace cfswipt
