#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace danc {

/// A: u_DA with integral (ODE) adaptation.
/// B: u_DA with incremental (delay-difference) adaptation.
/// C: u_DA2 with incremental weight and Lipschitz-gain adaptation.
enum class Scheme { kA, kB, kC };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct ControllerGains {
  double kappa = 4.0;
  double eps_rho = 0.01;  // epsilon_rho for u_DA, epsilon_varsigma for u_DA2
  double eta = 0.5;
  double eta_f = 0.5;  // u_DA2 only
  double eta_g = 0.5;
  Eigen::VectorXd gamma_f;  // diagonal of Gamma_f
  Eigen::VectorXd gamma_g;
  double sigma_f = 0.01;
  double sigma_g = 0.01;
  double gamma_lf = 1.0;
  double gamma_lg = 1.0;
  double sigma_lf = 0.01;
  double sigma_lg = 0.01;
  double tau = 0.01;  // s
};

/// Throws ConfigError unless every gain is strictly positive and the Gamma
/// diagonals have length n_nodes.
void validate_gains(const ControllerGains& gains, Eigen::Index n_nodes);

/// Fixed-depth history giving the value one full delay back. Until the delay
/// has elapsed the lookup returns the initial value (constant pre-history).
template <class T>
class DelayLine {
 public:
  DelayLine(std::size_t delay_steps, T initial)
      : slots_(delay_steps + 1, std::move(initial)) {}

  std::size_t depth() const { return slots_.size(); }

  /// Value stored delay_steps pushes ago.
  const T& delayed() const { return slots_[(count_ + 1) % slots_.size()]; }

  void push(const T& value) {
    slots_[count_ % slots_.size()] = value;
    ++count_;
  }

 private:
  std::vector<T> slots_;
  std::size_t count_ = 0;
};

struct ControllerState {
  ControllerState(Eigen::Index n_nodes, std::size_t delay_steps);

  Eigen::VectorXd w_f;
  Eigen::VectorXd w_g;
  double l_f_hat = 0.0;
  double l_g_hat = 0.0;
  DelayLine<Eigen::VectorXd> w_f_history;
  DelayLine<Eigen::VectorXd> w_g_history;
  DelayLine<double> l_f_history;
  DelayLine<double> l_g_history;
};

/// rho = l_f + l_g |nu| + |e~_f| (1 + nu^2) / (4 eta).
double robust_gain_rho(double lf_b, double lg_b, double nu, double e_tilde,
                       double eta);

/// e rho^2 / sqrt(e^2 rho^2 + eps^2), the smooth surrogate of rho sign(e).
double smooth_robust_term(double e_tilde, double rho, double eps);

struct ControlOutput {
  double u = 0.0;
  double gain = 0.0;    // rho (u_DA) or varsigma (u_DA2)
  double smooth = 0.0;  // smooth robust term as used in u
};

/// u = -e~_f (rho^2 / sqrt(e~_f^2 rho^2 + eps^2) + kappa) - W_f'S_f - W_g'S_g nu.
ControlOutput control_u_da(double e_tilde, double rho, double nu,
                           const Eigen::VectorXd& s_f, const Eigen::VectorXd& s_g,
                           const Eigen::VectorXd& w_f, const Eigen::VectorXd& w_g,
                           const ControllerGains& gains);

ControlOutput control_u_da(double e_tilde, double rho, double nu,
                           const Eigen::VectorXd& s_f, const Eigen::VectorXd& s_g,
                           const ControllerState& state,
                           const ControllerGains& gains);

/// W' = Gamma (S e~_f drive - sigma W); drive = 1 for f, nu for g.
Eigen::VectorXd integral_adaptation_rhs(const Eigen::VectorXd& w_hat,
                                        const Eigen::VectorXd& s, double e_tilde,
                                        double nu_or_one,
                                        const Eigen::VectorXd& gamma,
                                        double sigma);

/// W(t) = (1 + sigma Gamma)^{-1} (W(t - tau) + Gamma e~_f drive S),
/// elementwise because Gamma is diagonal.
Eigen::VectorXd incremental_weight_update(const Eigen::VectorXd& w_delayed,
                                          const Eigen::VectorXd& s,
                                          double e_tilde, double nu_or_one,
                                          const Eigen::VectorXd& gamma,
                                          double sigma);

/// Max |(1 + sigma Gamma) W - W_delayed - Gamma e~_f drive S| over components.
double incremental_residual(const Eigen::VectorXd& w, const Eigen::VectorXd& w_delayed,
                            const Eigen::VectorXd& s, double e_tilde,
                            double nu_or_one, const Eigen::VectorXd& gamma,
                            double sigma);

struct IncrementalStep {
  double residual = 0.0;  // max over both networks
};

/// Advances W_f, W_g one step using the values one delay back, then pushes
/// the new estimates into the history.
IncrementalStep incremental_adaptation_step(ControllerState& state,
                                            const Eigen::VectorXd& s_f,
                                            const Eigen::VectorXd& s_g,
                                            double e_tilde, double nu,
                                            const ControllerGains& gains);

/// l(t) = (l(t - tau) + gamma * correction) / (1 + sigma gamma).
double lipschitz_update(double l_delayed, double correction, double gamma,
                        double sigma);

struct LipschitzStep {
  double l_f_hat = 0.0;
  double l_g_hat = 0.0;
  double residual = 0.0;
};

/// Corrections gamma_f |e~_f| |e| hbar_f and gamma_g |nu| |e~_f| |e| hbar_g.
LipschitzStep lipschitz_gain_step(ControllerState& state, double e_tilde,
                                  double e_norm, double nu, double hbar_f,
                                  double hbar_g, const ControllerGains& gains);

/// u = -e~_f (vs^2 |e|^2 / sqrt(vs^2 e~_f^2 |e|^2 + eps^2) + kappa
///            + 1/(4 eta_f) + nu^2/(4 eta_g)) - W_f'S_f - W_g'S_g nu,
/// vs = l_f_hat hbar_f + l_g_hat |nu| hbar_g.
ControlOutput control_u_da2(double e_tilde, double nu, const Eigen::VectorXd& s_f,
                            const Eigen::VectorXd& s_g, double e_norm,
                            double hbar_f, double hbar_g,
                            const ControllerState& state,
                            const ControllerGains& gains);

}  // namespace danc
