#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cfswipt/sca.hpp"
#include "sca/assemble.hpp"

namespace cfswipt::sca {

using detail::Assembler;
using detail::LinRow;

double psi_domain_target(double gamma_w, const EhModel& eh) {
  return gamma_w * (1.0 - eh.omega) + eh.phi * eh.omega;
}

void refresh_state(ScaState& state, const NetworkRealization& net, const SystemParams& params) {
  const int m_count = params.num_aps;
  const int k_count = params.num_ius;
  const int l_count = params.num_eus;
  const double coh = params.antennas_per_ap - params.num_ius + 1;
  state.u.resize(m_count, l_count);
  for (int m = 0; m < m_count; ++m) {
    const double eta_i_sum = state.alloc.eta_i.row(m).sum();
    const double eta_e_sum = state.alloc.eta_e.row(m).sum();
    for (int l = 0; l < l_count; ++l) {
      state.u(m, l) = net.beta_eu(m, l) * eta_i_sum -
                      coh * net.gamma_eu(m, l) * state.alloc.eta_e(m, l) -
                      net.beta_eu(m, l) * (eta_e_sum - state.alloc.eta_e(m, l));
    }
  }
  state.q.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    double acc = 0.0;
    for (int m = 0; m < m_count; ++m)
      acc += std::sqrt(
          std::max(0.0, net.gamma_iu(m, k) * state.alloc.a(m) * state.alloc.eta_i(m, k)));
    state.q(k) = acc;
  }
  state.z.resize(m_count);
  for (int m = 0; m < m_count; ++m)
    state.z(m) =
        state.alloc.a(m) + state.alloc.eta_i.row(m).sum() - state.alloc.eta_e.row(m).sum();
  state.objective = state.omega.sum();
}

conic::ConicProgram build_subproblem(const ScaState& state, const NetworkRealization& net,
                                     const SystemParams& params, const SubproblemOptions& opts,
                                     SubproblemLayout* layout_out) {
  const int m_count = params.num_aps;
  const int k_count = params.num_ius;
  const int l_count = params.num_eus;
  const double rho = params.dl_snr();
  const double zf_gain = params.antennas_per_ap - params.num_ius;
  const double coh_gain = zf_gain + 1;
  const bool se_active = params.se_target > 0.0;
  const EhModel eh = EhModel::from_params(params);
  const double eps_phi = 1e-6 * eh.phi;
  const double omega_hi = eh.phi - eps_phi;
  const double c_energy = 4.0 / (params.dl_symbols() * params.noise_power_w);
  const double se_bar = params.se_target / params.dl_fraction();
  const double c_sinr = se_active ? rho * zf_gain / (std::exp2(se_bar) - 1.0) : 0.0;

  auto is_iap = [&](int m) { return !opts.fix_modes || opts.fixed_a(m) >= 0.5; };
  auto is_eap = [&](int m) { return !opts.fix_modes || opts.fixed_a(m) < 0.5; };

  // Variable numbering.
  SubproblemLayout lay;
  int next = 0;
  lay.a.assign(m_count, -1);
  if (!opts.fix_modes)
    for (int m = 0; m < m_count; ++m) lay.a[m] = next++;
  lay.eta_i.assign(m_count * k_count, -1);
  for (int m = 0; m < m_count; ++m)
    if (is_iap(m))
      for (int k = 0; k < k_count; ++k) lay.eta_i[m * k_count + k] = next++;
  lay.eta_e.assign(m_count * l_count, -1);
  for (int m = 0; m < m_count; ++m)
    if (is_eap(m))
      for (int l = 0; l < l_count; ++l) lay.eta_e[m * l_count + l] = next++;
  lay.omega.assign(l_count, -1);
  for (int l = 0; l < l_count; ++l) lay.omega[l] = next++;
  lay.core_vars = next;

  std::vector<int> hyp(m_count * k_count, -1);
  if (se_active)
    for (int m = 0; m < m_count; ++m)
      if (is_iap(m))
        for (int k = 0; k < k_count; ++k) hyp[m * k_count + k] = next++;
  std::vector<int> w_eu(l_count), v_exp(l_count);
  for (int l = 0; l < l_count; ++l) w_eu[l] = next++;
  for (int l = 0; l < l_count; ++l) v_exp[l] = next++;
  lay.v_log = v_exp;
  std::vector<int> p_se(k_count, -1);
  if (se_active)
    for (int k = 0; k < k_count; ++k) p_se[k] = next++;
  if (opts.phase1_slacks) {
    lay.slack_he.assign(l_count, -1);
    for (int l = 0; l < l_count; ++l) lay.slack_he[l] = next++;
    if (se_active) {
      lay.slack_se.assign(k_count, -1);
      for (int k = 0; k < k_count; ++k) lay.slack_se[k] = next++;
    }
  }
  lay.n_vars = next;

  Assembler as(next);

  // Objective: maximize sum omega, or minimize total slack in phase 1.
  if (opts.phase1_slacks) {
    for (int l = 0; l < l_count; ++l) as.objective(lay.slack_he[l], 1.0);
    if (se_active)
      for (int k = 0; k < k_count; ++k) as.objective(lay.slack_se[k], 1.0);
  } else {
    for (int l = 0; l < l_count; ++l) as.objective(lay.omega[l], -1.0);
  }

  auto a_term = [&](int m, LinRow& r, double coef) {
    if (opts.fix_modes)
      r.c0 += coef * opts.fixed_a(m);
    else
      r.add(lay.a[m], coef);
  };
  // u_ml as an affine expression appended into r with the given weight.
  auto add_u = [&](int m, int l, LinRow& r, double w) {
    for (int k = 0; k < k_count; ++k) r.add(lay.eta_i[m * k_count + k], w * net.beta_eu(m, l));
    r.add(lay.eta_e[m * l_count + l], -w * coh_gain * net.gamma_eu(m, l));
    for (int lp = 0; lp < l_count; ++lp)
      if (lp != l) r.add(lay.eta_e[m * l_count + lp], -w * net.beta_eu(m, l));
  };
  // z_m = a_m + sum_k eta_i - sum_l eta_e.
  auto add_z = [&](int m, LinRow& r, double w) {
    a_term(m, r, w);
    for (int k = 0; k < k_count; ++k) r.add(lay.eta_i[m * k_count + k], w);
    for (int l = 0; l < l_count; ++l) r.add(lay.eta_e[m * l_count + l], -w);
  };
  // y_m = a_m - sum_k eta_i + sum_l eta_e (the convex-square side).
  auto add_y = [&](int m, LinRow& r, double w) {
    a_term(m, r, w);
    for (int k = 0; k < k_count; ++k) r.add(lay.eta_i[m * k_count + k], -w);
    for (int l = 0; l < l_count; ++l) r.add(lay.eta_e[m * l_count + l], w);
  };

  // Nonnegativity of every power share and hypograph variable.
  for (int i : lay.eta_i)
    if (i >= 0) as.ge0({0.0, {{i, 1.0}}});
  for (int i : lay.eta_e)
    if (i >= 0) as.ge0({0.0, {{i, 1.0}}});
  for (int i : hyp)
    if (i >= 0) as.ge0({0.0, {{i, 1.0}}});
  if (opts.phase1_slacks) {
    for (int i : lay.slack_he) as.ge0({0.0, {{i, 1.0}}});
    for (int i : lay.slack_se)
      if (i >= 0) as.ge0({0.0, {{i, 1.0}}});
  }

  // Mode box and per-AP power couplings.
  for (int m = 0; m < m_count; ++m) {
    if (!opts.fix_modes) {
      as.ge0({0.0, {{lay.a[m], 1.0}}});
      as.ge0({1.0, {{lay.a[m], -1.0}}});
    }
    if (is_iap(m)) {
      LinRow r;
      if (opts.fix_modes)
        r.c0 = 1.0;
      else
        r.add(lay.a[m], 1.0);
      for (int k = 0; k < k_count; ++k) r.add(lay.eta_i[m * k_count + k], -1.0);
      as.ge0(std::move(r));
    }
    if (is_eap(m)) {
      LinRow r;
      r.c0 = 1.0;
      if (!opts.fix_modes) r.add(lay.a[m], -1.0);
      for (int l = 0; l < l_count; ++l) r.add(lay.eta_e[m * l_count + l], -1.0);
      as.ge0(std::move(r));
    }
  }

  // Omega window: [max(mapped target, interior floor), phi - interior floor].
  for (int l = 0; l < l_count; ++l) {
    const double lo = std::max(psi_domain_target(params.he_target(l), eh), eps_phi);
    as.ge0({-lo, {{lay.omega[l], 1.0}}});
    as.ge0({omega_hi, {{lay.omega[l], -1.0}}});
  }

  // Per-EU energy constraint with the quadratic minorant and the linearized
  // logistic-inverse majorant. The row is expressed in watt-symbol units
  // (divided by 4/((tau_c-tau) sigma_n^2)) so its coefficients do not carry
  // the enormous normalized-SNR factor.
  const double e_scale = 1.0 / c_energy;
  for (int l = 0; l < l_count; ++l) {
    LinRow r;
    r.c0 = 4.0 * e_scale;
    for (int m = 0; m < m_count; ++m) {
      r.add(lay.eta_e[m * l_count + l],
            e_scale * 4.0 * rho * coh_gain * net.gamma_eu(m, l));
      for (int lp = 0; lp < l_count; ++lp)
        if (lp != l) r.add(lay.eta_e[m * l_count + lp], e_scale * 4.0 * rho * net.beta_eu(m, l));
      const double c_ml = state.alloc.a(m) + state.u(m, l);
      r.c0 -= e_scale * rho * c_ml * c_ml;
      a_term(m, r, e_scale * 2.0 * rho * c_ml);
      add_u(m, l, r, e_scale * 2.0 * rho * c_ml);
    }
    const double omega_n = state.omega(l);
    r.c0 -= eh.chi + (std::log(omega_n) - 1.0) / eh.xi;
    r.add(lay.omega[l], -1.0 / (eh.xi * omega_n));
    r.add(v_exp[l], -1.0 / eh.xi);
    r.add(w_eu[l], -e_scale * rho);
    r.normalize();
    if (opts.phase1_slacks) r.add(lay.slack_he[l], 1.0);
    as.ge0(std::move(r));
  }

  // Per-IU SE constraint: coherent-amplitude minorant, z-minorant, and the
  // convex square moved to an epigraph.
  if (se_active) {
    // Rows divided by rho: the remaining coefficients live on the scale of
    // the large-scale fading products.
    const double c_sinr_n = c_sinr / rho;
    for (int k = 0; k < k_count; ++k) {
      LinRow r;
      const double qn = state.q(k);
      r.c0 = -1.0 / rho - c_sinr_n * qn * qn;
      for (int m = 0; m < m_count; ++m) {
        r.add(hyp[m * k_count + k],
              2.0 * c_sinr_n * qn * std::sqrt(std::max(0.0, net.gamma_iu(m, k))));
        const double nu = std::max(0.0, net.beta_iu(m, k) - net.gamma_iu(m, k));
        const double zn = state.z(m);
        r.c0 -= 0.25 * nu * zn * zn;
        add_z(m, r, 0.5 * nu * zn);
        for (int l = 0; l < l_count; ++l) r.add(lay.eta_e[m * l_count + l], -nu);
      }
      r.add(p_se[k], -0.25);
      r.normalize();
      if (opts.phase1_slacks) r.add(lay.slack_se[k], 1.0);
      as.ge0(std::move(r));
    }

    // Hypograph cones 2 (a/2) eta >= t^2.
    for (int m = 0; m < m_count; ++m) {
      if (!is_iap(m)) continue;
      for (int k = 0; k < k_count; ++k) {
        LinRow u_row;
        if (opts.fix_modes)
          u_row.c0 = 0.5 * opts.fixed_a(m);
        else
          u_row.add(lay.a[m], 0.5);
        as.cone(conic::ConeKind::Rsoc,
                {u_row,
                 {0.0, {{lay.eta_i[m * k_count + k], 1.0}}},
                 {0.0, {{hyp[m * k_count + k], 1.0}}}});
      }
    }

    // Epigraphs p_k >= sum_m nu_mk (a_m - eta_i_sum + eta_e_sum)^2.
    for (int k = 0; k < k_count; ++k) {
      std::vector<LinRow> rows;
      rows.push_back({0.0, {{p_se[k], 1.0}}});
      rows.push_back({0.5, {}});
      for (int m = 0; m < m_count; ++m) {
        LinRow yr;
        const double nu = std::max(0.0, net.beta_iu(m, k) - net.gamma_iu(m, k));
        add_y(m, yr, std::sqrt(nu));
        rows.push_back(std::move(yr));
      }
      as.cone(conic::ConeKind::Rsoc, std::move(rows));
    }
  }

  // Epigraphs w_l >= sum_m (a_m - u_ml)^2.
  for (int l = 0; l < l_count; ++l) {
    std::vector<LinRow> rows;
    rows.push_back({0.0, {{w_eu[l], 1.0}}});
    rows.push_back({0.5, {}});
    for (int m = 0; m < m_count; ++m) {
      LinRow ar;
      a_term(m, ar, 1.0);
      add_u(m, l, ar, -1.0);
      rows.push_back(std::move(ar));
    }
    as.cone(conic::ConeKind::Rsoc, std::move(rows));
  }

  // Epigraphs v_l >= -log(phi - omega_l) as supporting tangents: seeded at
  // the expansion point (keeps the surrogate tight there) and the window
  // ends, plus any cut points accumulated by the caller. Tangents of a
  // convex function under-estimate it, so the outer loop verifies and cuts
  // until the residual gap is negligible.
  for (int l = 0; l < l_count; ++l) {
    const double lo = std::max(psi_domain_target(params.he_target(l), eh), eps_phi);
    std::vector<double> pts = {state.omega(l), lo, 0.5 * (state.omega(l) + omega_hi)};
    if (static_cast<int>(opts.log_tangents.size()) > l)
      pts.insert(pts.end(), opts.log_tangents[l].begin(), opts.log_tangents[l].end());
    for (double w0 : pts) {
      const double wc = std::clamp(w0, eps_phi, omega_hi);
      const double slope = 1.0 / (eh.phi - wc);
      // v - g(w0) - g'(w0)(omega - w0) >= 0
      LinRow r;
      r.c0 = std::log(eh.phi - wc) + slope * wc;
      r.add(v_exp[l], 1.0);
      r.add(lay.omega[l], -slope);
      as.ge0(std::move(r));
    }
  }

  if (layout_out) *layout_out = lay;
  return as.finalize();
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIter: return "max_iter";
    case Status::Infeasible: return "infeasible";
    case Status::Numerical: return "numerical";
  }
  return "unknown";
}

}  // namespace cfswipt::sca
