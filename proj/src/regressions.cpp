#include "gcs/regressions.hpp"

#include <cmath>
#include <functional>

namespace gcs {

namespace {

Real get(const ParamMap& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw Error("regression: missing parameter '" + key + "'");
  return it->second;
}

Real get_or(const ParamMap& p, const std::string& key, Real fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

// ---- Stern-Gerlach interferometer (linear coupling, momentum diffusion) ----
// Model: H_m = 1, r_m = (f_u, 0), r_q = (f_q, 0), D = diag(0, 2 Gamma_x),
// qubit splitting omega_q, dephasing Gamma_z, initial squeezed thermal
// (N_p, s) with |+> qubit.

Real sg_contrast(const ParamMap& p, Real tau) {
  const Real f_q = get(p, "f_q");
  const Real n_p = get_or(p, "N_p", 0.0);
  const Real s = get_or(p, "s", 1.0);
  const Real gx = get_or(p, "Gamma_x", 0.0);
  const Real gz = get_or(p, "Gamma_z", 0.0);
  const Real sh = std::sin(0.5 * tau);
  return f_q * f_q *
             (2.0 * (1.0 + 2.0 * n_p) * sh * sh * ((s - 1.0 / s) * std::cos(tau) + s + 1.0 / s) +
              gx * (3.0 * tau + std::sin(tau) * (std::cos(tau) - 4.0))) +
         gz * tau;
}

// QRDM phase of the (+,-) element. The oscillatory term enters with the
// opposite sign to the secular one (phase rate tracks the instantaneous
// branch separation, which starts at zero for a centred initial state);
// the splitting omega_q contributes -omega_q tau.
Real sg_phase(const ParamMap& p, Real tau) {
  const Real f_q = get(p, "f_q");
  const Real f_u = get_or(p, "f_u", 0.0);
  const Real wq = get_or(p, "omega_q", 0.0);
  return 2.0 * f_q * f_u * (tau - std::sin(tau)) - wq * tau;
}

Real sg_px(const ParamMap& p, Real tau, int sign) {
  return 0.5 * (1.0 + sign * std::exp(-sg_contrast(p, tau)) * std::cos(sg_phase(p, tau)));
}

RealMatrix sg_sigma(const ParamMap& p, Real tau) {
  const Real n_p = get_or(p, "N_p", 0.0);
  const Real s = get_or(p, "s", 1.0);
  const Real gx = get_or(p, "Gamma_x", 0.0);
  const Real nu = 1.0 + 2.0 * n_p;
  const Real c = std::cos(tau), sn = std::sin(tau);
  RealMatrix out(2, 2);
  out(0, 0) = nu * (s * c * c + sn * sn / s) + gx * (tau - sn * c);
  out(0, 1) = nu * (1.0 / s - s) * sn * c + gx * sn * sn;
  out(1, 0) = out(0, 1);
  out(1, 1) = nu * (s * sn * sn + c * c / s) + gx * (tau + sn * c);
  return out;
}

// Off-diagonal first moment of the (+,-) element.
ComplexVector sg_r_off(const ParamMap& p, Real tau) {
  const Real f_q = get(p, "f_q");
  const Real f_u = get_or(p, "f_u", 0.0);
  const Real n_p = get_or(p, "N_p", 0.0);
  const Real s = get_or(p, "s", 1.0);
  const Real gx = get_or(p, "Gamma_x", 0.0);
  const Real nu = 1.0 + 2.0 * n_p;
  const Real c = std::cos(tau), sn = std::sin(tau);
  const Real sh2 = std::sin(0.5 * tau) * std::sin(0.5 * tau);
  ComplexVector r(2);
  // Imaginary parts are the conjugates of the drift-free displays: the
  // stored (+,-) element carries Im x = +4 f_q Gx sin^4(tau/2)-type terms.
  const Real im_x = nu * sn * ((1.0 / s - s) * c - 1.0 / s) + gx * (-4.0 * sh2 * sh2);
  const Real im_p = nu * 2.0 * sh2 * ((s - 1.0 / s) * c + s) + gx * (tau + sn * (c - 2.0));
  r[0] = Complex(f_u * (1.0 - c), -f_q * im_x);
  r[1] = Complex(f_u * sn, -f_q * im_p);
  return r;
}

// Interference term of the post-sigma_x-measurement Wigner function at
// tau = pi: W_q(x, p) = (2 / (pi sqrt(a b))) e^{-C(pi) - Q(x,p)}
// cos(phi(pi) + theta(x,p)) with the decay/phase profiles below.
Real sg_wigner_fringe(const ParamMap& p, Real x, Real pp) {
  const Real f_q = get(p, "f_q");
  const Real f_u = get_or(p, "f_u", 0.0);
  const Real n_p = get_or(p, "N_p", 0.0);
  const Real s = get_or(p, "s", 1.0);
  const Real gx = get_or(p, "Gamma_x", 0.0);
  const Real nu = 1.0 + 2.0 * n_p;
  const Real a = s * nu + kPi * gx;
  const Real b = nu / s + kPi * gx;
  const Real mu_x = 4.0 * f_q * gx;                    // Im x of r_off(pi)
  const Real mu_p = -f_q * (2.0 * nu / s + kPi * gx);  // Im p of r_off(pi)
  const Real q_decay = ((x - 2.0 * f_u) * (x - 2.0 * f_u) - mu_x * mu_x) / a +
                       (pp * pp - mu_p * mu_p) / b;
  const Real theta = 2.0 * mu_x * (x - 2.0 * f_u) / a + 2.0 * mu_p * pp / b;
  const Real c_pi = sg_contrast(p, kPi);
  const Real phi_pi = sg_phase(p, kPi);
  return 2.0 / (kPi * std::sqrt(a * b)) * std::exp(-c_pi - q_decay) * std::cos(phi_pi + theta);
}

// ---- Dispersive qubits-resonator example ----

Real disp_tau_max(const ParamMap& p) {
  const Real chi = get(p, "chi");
  const Real kappa = get(p, "kappa");
  return std::atan(2.0 * chi / kappa) / chi;
}

Real disp_sigma_odd(const ParamMap& p, Real tau) {
  const Real s = get(p, "s");
  const Real eta = get(p, "eta");
  const Real kappa = get(p, "kappa");
  return (s + std::exp(-kappa * tau) * eta * (1.0 - s)) / (s * eta);
}

Real disp_sigma_even(const ParamMap& p, Real tau) {
  const Real s = get(p, "s");
  const Real eta = get(p, "eta");
  const Real kappa = get(p, "kappa");
  const Real chi = get(p, "chi");
  const Real c = std::cos(tau * chi), sn = std::sin(tau * chi);
  return (s + std::exp(-kappa * tau) * eta * (c * c - s + s * s * sn * sn)) / (s * eta);
}

Real disp_rp(const ParamMap& p, Real tau) {
  const Real x0 = get(p, "x0");
  const Real kappa = get(p, "kappa");
  const Real chi = get(p, "chi");
  return x0 * std::exp(-0.5 * kappa * tau) * std::sin(chi * tau);
}

// Momentum homodyne density at time `tau` (parameter, default tau_max):
// the odd/even three-Gaussian mixture.
Real disp_prob(const ParamMap& p, Real p_m) {
  const Real tau = get_or(p, "tau", disp_tau_max(p));
  const Real so = disp_sigma_odd(p, tau);
  const Real se = disp_sigma_even(p, tau);
  const Real rp = disp_rp(p, tau);
  const Real odd = std::exp(-p_m * p_m / so) / (2.0 * std::sqrt(kPi * so));
  const Real even = (std::exp(-(p_m + rp) * (p_m + rp) / se) +
                     std::exp(-(p_m - rp) * (p_m - rp) / se)) /
                    (4.0 * std::sqrt(kPi * se));
  return odd + even;
}

struct Entry {
  std::function<Real(const ParamMap&, Real)> fn;
  std::string description;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> reg = {
      {"sg-contrast",
       {[](const ParamMap& p, Real x) { return sg_contrast(p, x); },
        "Stern-Gerlach QRDM contrast C(tau); params f_q, N_p, s, Gamma_x, Gamma_z"}},
      {"sg-phase",
       {[](const ParamMap& p, Real x) { return sg_phase(p, x); },
        "Stern-Gerlach QRDM phase of the (+,-) element; params f_q, f_u, omega_q"}},
      {"sg-px-plus",
       {[](const ParamMap& p, Real x) { return sg_px(p, x, +1); },
        "P(sigma_x = +1) at time tau for the Stern-Gerlach scenario"}},
      {"sg-px-minus",
       {[](const ParamMap& p, Real x) { return sg_px(p, x, -1); },
        "P(sigma_x = -1) at time tau for the Stern-Gerlach scenario"}},
      {"sg-delta-x",
       {[](const ParamMap& p, Real) { return 4.0 * get(p, "f_q"); },
        "Maximum branch separation, reached at tau = pi"}},
      {"sg-sigma-xx",
       {[](const ParamMap& p, Real x) { return sg_sigma(p, x)(0, 0); },
        "Shared covariance sigma_xx(tau) of the Stern-Gerlach scenario"}},
      {"sg-sigma-xp",
       {[](const ParamMap& p, Real x) { return sg_sigma(p, x)(0, 1); },
        "Shared covariance sigma_xp(tau)"}},
      {"sg-sigma-pp",
       {[](const ParamMap& p, Real x) { return sg_sigma(p, x)(1, 1); },
        "Shared covariance sigma_pp(tau)"}},
      {"sg-roff-re-x",
       {[](const ParamMap& p, Real x) { return sg_r_off(p, x)[0].real(); },
        "Re x of the (+,-) first moment"}},
      {"sg-roff-im-x",
       {[](const ParamMap& p, Real x) { return sg_r_off(p, x)[0].imag(); },
        "Im x of the (+,-) first moment"}},
      {"sg-roff-re-p",
       {[](const ParamMap& p, Real x) { return sg_r_off(p, x)[1].real(); },
        "Re p of the (+,-) first moment"}},
      {"sg-roff-im-p",
       {[](const ParamMap& p, Real x) { return sg_r_off(p, x)[1].imag(); },
        "Im p of the (+,-) first moment"}},
      {"sg-wigner-fringe",
       {[](const ParamMap& p, Real x) { return sg_wigner_fringe(p, x, get(p, "p")); },
        "Interference Wigner term W_q(x, p) at tau = pi; pass p as a parameter"}},
      {"disp-tau-max",
       {[](const ParamMap& p, Real) { return disp_tau_max(p); },
        "Time of maximal branch separation, arctan(2 chi / kappa) / chi"}},
      {"disp-sigma-odd",
       {[](const ParamMap& p, Real x) { return disp_sigma_odd(p, x); },
        "Odd-subspace homodyne variance at time tau"}},
      {"disp-sigma-even",
       {[](const ParamMap& p, Real x) { return disp_sigma_even(p, x); },
        "Even-subspace homodyne variance at time tau"}},
      {"disp-rp",
       {[](const ParamMap& p, Real x) { return disp_rp(p, x); },
        "Even-branch momentum displacement at time tau"}},
      {"disp-prob",
       {[](const ParamMap& p, Real x) { return disp_prob(p, x); },
        "Momentum homodyne density P(p_m); param tau defaults to tau_max"}},
  };
  return reg;
}

}  // namespace

Real regression_eval(const std::string& name, const ParamMap& params, Real x) {
  auto it = registry().find(name);
  if (it == registry().end()) throw Error("unknown regression '" + name + "'");
  return it->second.fn(params, x);
}

std::vector<std::string> regression_names() {
  std::vector<std::string> names;
  for (const auto& [name, entry] : registry()) names.push_back(name);
  return names;
}

std::string regression_describe(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw Error("unknown regression '" + name + "'");
  return it->second.description;
}

}  // namespace gcs
