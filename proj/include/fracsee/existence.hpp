#pragma once

// Hypothesis constants and the existence condition max{Delta1, Delta2} < 1.

#include <cstddef>
#include <string>
#include <vector>

namespace fracsee {

struct HypothesisConstants {
  double M = 0.0;  ///< resolvent bound
  double N1 = 0.0, N2_star = 0.0, N3_star = 0.0, J_star = 0.0;
  double L_k1 = 0.0, L_k2 = 0.0, l1_star = 0.0, l2_star = 0.0;
  double M_b = 0.0, l_b_star = 0.0;
  std::vector<double> M_i, l_mi_star;
  std::vector<double> lambda_i, L_i;
  double lambda_h = 0.0, M_h = 0.0, sup_m = 0.0;
  double lambda_f = 0.0, sup_n = 0.0;
  double mho = 0.0;
  double chi_L2 = 0.0;
  double trace_Q = 0.0;
  double a = 0.0;
  std::size_t n_impulses = 0;
  double psi_norm = 0.0;
  double xi1_sq = 0.0;

  /// Every violated invariant (negative or non-finite constants, per-impulse
  /// arrays of the wrong length).
  std::vector<std::string> problems() const;
  void validate() const;
};

struct C0C1 {
  double C0 = 0.0;
  double C1 = 0.0;
};
C0C1 compute_C0_C1(const HypothesisConstants& c);

struct RStar {
  double r_star = 0.0;
  double r_star_star = 0.0;
};
RStar compute_r_star(const HypothesisConstants& c, double alpha);

double compute_delta1(const HypothesisConstants& c);
double compute_delta2(const HypothesisConstants& c);

struct ExistenceReport {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double max = 0.0;
  bool satisfied = false;
  double C0 = 0.0;
  double C1 = 0.0;
  double m_hat = 0.0;  ///< diagnostic only; plays no role in `satisfied`
};

ExistenceReport check_existence(const HypothesisConstants& c);

/// Multiply every constant that enters the brace terms of Delta1 and every
/// MNC constant of Delta2 by s (M, the phase constants, a, Tr Q and the
/// impulse count are left alone).
HypothesisConstants scale_growth_constants(const HypothesisConstants& c, double s);

}  // namespace fracsee
