#pragma once

#include <json.hpp>

#include <fstream>
#include <string>

#include "fracsee/existence.hpp"

namespace fracsee::testing {

inline nlohmann::json load_fixture(const std::string& name) {
  std::ifstream in(std::string(FRACSEE_FIXTURE_DIR) + "/" + name);
  return nlohmann::json::parse(in);
}

inline HypothesisConstants constants_from_json(const nlohmann::json& j) {
  HypothesisConstants c;
  c.M = j.at("M");
  c.N1 = j.at("N1");
  c.N2_star = j.at("N2_star");
  c.N3_star = j.at("N3_star");
  c.J_star = j.at("J_star");
  c.L_k1 = j.at("L_k1");
  c.L_k2 = j.at("L_k2");
  c.l1_star = j.at("l1_star");
  c.l2_star = j.at("l2_star");
  c.M_b = j.at("M_b");
  c.l_b_star = j.at("l_b_star");
  c.M_i = j.at("M_i").get<std::vector<double>>();
  c.l_mi_star = j.at("l_mi_star").get<std::vector<double>>();
  c.lambda_i = j.at("lambda_i").get<std::vector<double>>();
  c.L_i = j.at("L_i").get<std::vector<double>>();
  c.lambda_h = j.at("lambda_h");
  c.M_h = j.at("M_h");
  c.sup_m = j.at("sup_m");
  c.lambda_f = j.at("lambda_f");
  c.sup_n = j.at("sup_n");
  c.mho = j.at("mho");
  c.chi_L2 = j.at("chi_L2");
  c.trace_Q = j.at("trace_Q");
  c.a = j.at("a");
  c.n_impulses = j.at("n_impulses");
  c.psi_norm = j.at("psi_norm");
  c.xi1_sq = j.at("xi1_sq");
  return c;
}

}  // namespace fracsee::testing
