#include "danc/controllers.hpp"

#include <algorithm>
#include <cmath>

#include "danc/error.hpp"

namespace danc {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kA:
      return "A";
    case Scheme::kB:
      return "B";
    case Scheme::kC:
      return "C";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "A" || name == "a") return Scheme::kA;
  if (name == "B" || name == "b") return Scheme::kB;
  if (name == "C" || name == "c") return Scheme::kC;
  throw ConfigError("unknown controller scheme '" + name + "' (expected A, B or C)");
}

void validate_gains(const ControllerGains& gains, Eigen::Index n_nodes) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("controller gain ") + name +
                        " must be strictly positive");
    }
  };
  positive(gains.kappa, "kappa");
  positive(gains.eps_rho, "eps_rho");
  positive(gains.eta, "eta");
  positive(gains.eta_f, "eta_f");
  positive(gains.eta_g, "eta_g");
  positive(gains.sigma_f, "sigma_f");
  positive(gains.sigma_g, "sigma_g");
  positive(gains.gamma_lf, "gamma_lf");
  positive(gains.gamma_lg, "gamma_lg");
  positive(gains.sigma_lf, "sigma_lf");
  positive(gains.sigma_lg, "sigma_lg");
  positive(gains.tau, "tau");
  if (gains.gamma_f.size() != n_nodes || gains.gamma_g.size() != n_nodes) {
    throw ConfigError("Gamma diagonals must have one entry per network node (" +
                      std::to_string(n_nodes) + ")");
  }
  if (!(gains.gamma_f.array() > 0.0).all() || !(gains.gamma_g.array() > 0.0).all()) {
    throw ConfigError("Gamma diagonals must be strictly positive");
  }
}

ControllerState::ControllerState(Eigen::Index n_nodes, std::size_t delay_steps)
    : w_f(Eigen::VectorXd::Zero(n_nodes)),
      w_g(Eigen::VectorXd::Zero(n_nodes)),
      w_f_history(delay_steps, Eigen::VectorXd::Zero(n_nodes)),
      w_g_history(delay_steps, Eigen::VectorXd::Zero(n_nodes)),
      l_f_history(delay_steps, 0.0),
      l_g_history(delay_steps, 0.0) {}

double robust_gain_rho(double lf_b, double lg_b, double nu, double e_tilde,
                       double eta) {
  return lf_b + lg_b * std::abs(nu) + std::abs(e_tilde) * (1.0 + nu * nu) / (4.0 * eta);
}

double smooth_robust_term(double e_tilde, double rho, double eps) {
  const double er = e_tilde * rho;
  const double denom = std::sqrt(er * er + eps * eps);
  if (denom == 0.0) return 0.0;
  return e_tilde * rho * rho / denom;
}

ControlOutput control_u_da(double e_tilde, double rho, double nu,
                           const Eigen::VectorXd& s_f, const Eigen::VectorXd& s_g,
                           const Eigen::VectorXd& w_f, const Eigen::VectorXd& w_g,
                           const ControllerGains& gains) {
  require_same_size(static_cast<std::size_t>(s_f.size()),
                    static_cast<std::size_t>(w_f.size()), "u_DA f-network");
  require_same_size(static_cast<std::size_t>(s_g.size()),
                    static_cast<std::size_t>(w_g.size()), "u_DA g-network");
  ControlOutput out;
  out.gain = rho;
  out.smooth = smooth_robust_term(e_tilde, rho, gains.eps_rho);
  out.u = -out.smooth - gains.kappa * e_tilde - w_f.dot(s_f) - w_g.dot(s_g) * nu;
  return out;
}

ControlOutput control_u_da(double e_tilde, double rho, double nu,
                           const Eigen::VectorXd& s_f, const Eigen::VectorXd& s_g,
                           const ControllerState& state,
                           const ControllerGains& gains) {
  return control_u_da(e_tilde, rho, nu, s_f, s_g, state.w_f, state.w_g, gains);
}

Eigen::VectorXd integral_adaptation_rhs(const Eigen::VectorXd& w_hat,
                                        const Eigen::VectorXd& s, double e_tilde,
                                        double nu_or_one,
                                        const Eigen::VectorXd& gamma,
                                        double sigma) {
  require_same_size(static_cast<std::size_t>(w_hat.size()),
                    static_cast<std::size_t>(s.size()), "adaptation basis");
  require_same_size(static_cast<std::size_t>(w_hat.size()),
                    static_cast<std::size_t>(gamma.size()), "adaptation gain");
  return gamma.cwiseProduct(s * (e_tilde * nu_or_one) - sigma * w_hat);
}

Eigen::VectorXd incremental_weight_update(const Eigen::VectorXd& w_delayed,
                                          const Eigen::VectorXd& s,
                                          double e_tilde, double nu_or_one,
                                          const Eigen::VectorXd& gamma,
                                          double sigma) {
  require_same_size(static_cast<std::size_t>(w_delayed.size()),
                    static_cast<std::size_t>(s.size()), "incremental basis");
  require_same_size(static_cast<std::size_t>(w_delayed.size()),
                    static_cast<std::size_t>(gamma.size()), "incremental gain");
  const double drive = e_tilde * nu_or_one;
  Eigen::VectorXd w(w_delayed.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w[i] = (w_delayed[i] + gamma[i] * drive * s[i]) / (1.0 + sigma * gamma[i]);
  }
  return w;
}

double incremental_residual(const Eigen::VectorXd& w, const Eigen::VectorXd& w_delayed,
                            const Eigen::VectorXd& s, double e_tilde,
                            double nu_or_one, const Eigen::VectorXd& gamma,
                            double sigma) {
  const double drive = e_tilde * nu_or_one;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double r = (1.0 + sigma * gamma[i]) * w[i] - w_delayed[i] -
                     gamma[i] * drive * s[i];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

IncrementalStep incremental_adaptation_step(ControllerState& state,
                                            const Eigen::VectorXd& s_f,
                                            const Eigen::VectorXd& s_g,
                                            double e_tilde, double nu,
                                            const ControllerGains& gains) {
  const Eigen::VectorXd& wf_old = state.w_f_history.delayed();
  const Eigen::VectorXd& wg_old = state.w_g_history.delayed();
  if (wf_old.size() != state.w_f.size() || wg_old.size() != state.w_g.size()) {
    throw InternalError("incremental adaptation history is not populated");
  }
  Eigen::VectorXd wf = incremental_weight_update(wf_old, s_f, e_tilde, 1.0,
                                                 gains.gamma_f, gains.sigma_f);
  Eigen::VectorXd wg = incremental_weight_update(wg_old, s_g, e_tilde, nu,
                                                 gains.gamma_g, gains.sigma_g);
  IncrementalStep step;
  step.residual = std::max(
      incremental_residual(wf, wf_old, s_f, e_tilde, 1.0, gains.gamma_f, gains.sigma_f),
      incremental_residual(wg, wg_old, s_g, e_tilde, nu, gains.gamma_g, gains.sigma_g));
  state.w_f = std::move(wf);
  state.w_g = std::move(wg);
  state.w_f_history.push(state.w_f);
  state.w_g_history.push(state.w_g);
  return step;
}

double lipschitz_update(double l_delayed, double correction, double gamma,
                        double sigma) {
  return (l_delayed + gamma * correction) / (1.0 + sigma * gamma);
}

LipschitzStep lipschitz_gain_step(ControllerState& state, double e_tilde,
                                  double e_norm, double nu, double hbar_f,
                                  double hbar_g, const ControllerGains& gains) {
  const double lf_old = state.l_f_history.delayed();
  const double lg_old = state.l_g_history.delayed();
  const double corr_f = std::abs(e_tilde) * e_norm * hbar_f;
  const double corr_g = std::abs(nu) * std::abs(e_tilde) * e_norm * hbar_g;
  LipschitzStep out;
  out.l_f_hat = lipschitz_update(lf_old, corr_f, gains.gamma_lf, gains.sigma_lf);
  out.l_g_hat = lipschitz_update(lg_old, corr_g, gains.gamma_lg, gains.sigma_lg);
  out.residual = std::max(
      std::abs((1.0 + gains.sigma_lf * gains.gamma_lf) * out.l_f_hat - lf_old -
               gains.gamma_lf * corr_f),
      std::abs((1.0 + gains.sigma_lg * gains.gamma_lg) * out.l_g_hat - lg_old -
               gains.gamma_lg * corr_g));
  state.l_f_hat = out.l_f_hat;
  state.l_g_hat = out.l_g_hat;
  state.l_f_history.push(out.l_f_hat);
  state.l_g_history.push(out.l_g_hat);
  return out;
}

ControlOutput control_u_da2(double e_tilde, double nu, const Eigen::VectorXd& s_f,
                            const Eigen::VectorXd& s_g, double e_norm,
                            double hbar_f, double hbar_g,
                            const ControllerState& state,
                            const ControllerGains& gains) {
  require_same_size(static_cast<std::size_t>(s_f.size()),
                    static_cast<std::size_t>(state.w_f.size()), "u_DA2 f-network");
  require_same_size(static_cast<std::size_t>(s_g.size()),
                    static_cast<std::size_t>(state.w_g.size()), "u_DA2 g-network");
  ControlOutput out;
  out.gain = state.l_f_hat * hbar_f + state.l_g_hat * std::abs(nu) * hbar_g;
  out.smooth = smooth_robust_term(e_tilde, out.gain * e_norm, gains.eps_rho);
  const double linear = gains.kappa + 1.0 / (4.0 * gains.eta_f) +
                        nu * nu / (4.0 * gains.eta_g);
  out.u = -out.smooth - linear * e_tilde - state.w_f.dot(s_f) -
          state.w_g.dot(s_g) * nu;
  return out;
}

}  // namespace danc
