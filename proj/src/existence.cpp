#include "fracsee/existence.hpp"

#include <algorithm>
#include <cmath>

#include "fracsee/errors.hpp"

namespace fracsee {

namespace {
void check_scalar(std::vector<std::string>& out, const char* name, double v) {
  if (!std::isfinite(v) || v < 0.0) out.push_back(std::string(name) + " must be finite and >= 0");
}
void check_array(std::vector<std::string>& out, const char* name, const std::vector<double>& v, std::size_t n) {
  if (v.size() != n) {
    out.push_back(std::string(name) + " has " + std::to_string(v.size()) + " entries, expected one per impulse (" +
                  std::to_string(n) + ")");
  }
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      out.push_back(std::string(name) + " entries must be finite and >= 0");
      break;
    }
  }
}
double sq(double x) { return x * x; }
}  // namespace

std::vector<std::string> HypothesisConstants::problems() const {
  std::vector<std::string> p;
  check_scalar(p, "M", M);
  check_scalar(p, "N1", N1);
  check_scalar(p, "N2_star", N2_star);
  check_scalar(p, "N3_star", N3_star);
  check_scalar(p, "J_star", J_star);
  check_scalar(p, "L_k1", L_k1);
  check_scalar(p, "L_k2", L_k2);
  check_scalar(p, "l1_star", l1_star);
  check_scalar(p, "l2_star", l2_star);
  check_scalar(p, "M_b", M_b);
  check_scalar(p, "l_b_star", l_b_star);
  check_scalar(p, "lambda_h", lambda_h);
  check_scalar(p, "M_h", M_h);
  check_scalar(p, "sup_m", sup_m);
  check_scalar(p, "lambda_f", lambda_f);
  check_scalar(p, "sup_n", sup_n);
  check_scalar(p, "mho", mho);
  check_scalar(p, "chi_L2", chi_L2);
  check_scalar(p, "trace_Q", trace_Q);
  check_scalar(p, "a", a);
  check_scalar(p, "psi_norm", psi_norm);
  check_scalar(p, "xi1_sq", xi1_sq);
  check_array(p, "M_i", M_i, n_impulses);
  check_array(p, "l_mi_star", l_mi_star, n_impulses);
  check_array(p, "lambda_i", lambda_i, n_impulses);
  check_array(p, "L_i", L_i, n_impulses);
  return p;
}

void HypothesisConstants::validate() const {
  auto p = problems();
  if (!p.empty()) throw ValidationError(std::move(p));
}

C0C1 compute_C0_C1(const HypothesisConstants& c) {
  const double head = sq(c.N2_star) * sq(c.M) * sq(c.N1);
  const double psi = sq(c.psi_norm);
  return {(head + sq(c.N3_star + c.J_star)) * psi, (head + sq(c.N3_star)) * psi};
}

RStar compute_r_star(const HypothesisConstants& c, double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  const auto [C0, C1] = compute_C0_C1(c);
  const double slope = 4.0 * sq(c.N2_star);
  return {slope * alpha + C0, slope * alpha + C1};
}

double compute_delta1(const HypothesisConstants& c) {
  const double n2 = sq(c.N2_star);
  const double shared = 8.0 * c.N1 * n2 * (c.L_k1 + c.L_k2) + c.a * c.lambda_f * c.sup_n +
                        2.0 * sq(c.a) * c.lambda_h * c.trace_Q * c.sup_m;
  auto term = [&](double lambda, double Mi) {
    const double brace = shared + 3.0 * lambda + 4.0 * n2 * (3.0 * Mi + 3.0 * c.M_b);
    return 5.0 * sq(c.M) * brace + 4.0 * n2 * (3.0 * Mi + 5.0 * c.M_b);
  };
  if (c.n_impulses == 0) return term(0.0, 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.n_impulses; ++i) worst = std::max(worst, term(c.lambda_i.at(i), c.M_i.at(i)));
  return worst;
}

double compute_delta2(const HypothesisConstants& c) {
  const double shared = c.l1_star + c.l2_star + c.l_b_star + 4.0 * c.M * c.mho +
                        4.0 * c.M * std::sqrt(c.a) * std::sqrt(c.trace_Q) * c.chi_L2;
  auto term = [&](double Li, double lmi) { return shared + Li + lmi + c.M * (Li + lmi + c.l_b_star); };
  if (c.n_impulses == 0) return term(0.0, 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.n_impulses; ++i) worst = std::max(worst, term(c.L_i.at(i), c.l_mi_star.at(i)));
  return worst;
}

ExistenceReport check_existence(const HypothesisConstants& c) {
  c.validate();
  ExistenceReport r;
  r.delta1 = compute_delta1(c);
  r.delta2 = compute_delta2(c);
  r.max = std::max(r.delta1, r.delta2);
  r.satisfied = r.max < 1.0;
  const auto cc = compute_C0_C1(c);
  r.C0 = cc.C0;
  r.C1 = cc.C1;
  const double psi = sq(c.psi_norm);
  double worst_mi = 0.0;
  for (double v : c.M_i) worst_mi = std::max(worst_mi, v);
  const double n1 = sq(c.N1);
  r.m_hat = 5.0 * sq(c.M) *
                (2.0 * c.M_b * (1.0 + psi) + c.L_k1 * (1.0 + n1 * r.C1) + c.xi1_sq + c.L_k2 * (1.0 + n1 * r.C1) +
                 psi + (3.0 * c.M_b + 3.0 * worst_mi) * (r.C0 + 1.0)) +
            3.0 * worst_mi * (r.C0 + 1.0);
  return r;
}

HypothesisConstants scale_growth_constants(const HypothesisConstants& c, double s) {
  HypothesisConstants out = c;
  for (double* v : {&out.L_k1, &out.L_k2, &out.l1_star, &out.l2_star, &out.M_b, &out.l_b_star, &out.lambda_h,
                    &out.lambda_f, &out.mho, &out.chi_L2}) {
    *v *= s;
  }
  for (auto* arr : {&out.M_i, &out.l_mi_star, &out.lambda_i, &out.L_i}) {
    for (double& v : *arr) v *= s;
  }
  return out;
}

}  // namespace fracsee
