#include "fracsee/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "fracsee/errors.hpp"

namespace fracsee {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (seps.find(ch) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class Reader {
 public:
  Reader(const std::string& key, const Entry& e) : key_(key), e_(e) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("line " + std::to_string(e_.line) + ", key '" + key_ + "': " + what, e_.line, key_);
  }

  double number(const std::string& text) const {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail("expected a finite number, got '" + text + "'");
    return v;
  }
  double number() const { return number(trim(e_.value)); }

  std::uint64_t unsigned_int() const {
    const std::string t = trim(e_.value);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) fail("expected a non-negative integer, got '" + t + "'");
    return v;
  }

  std::vector<double> list() const {
    std::vector<double> out;
    for (const auto& tok : split(e_.value, ", \t")) out.push_back(number(tok));
    return out;
  }

  SeparableKernel kernel() const {
    const auto tok = split(e_.value, ", \t");
    if (tok.size() != 4) fail("expected 'amplitude kappa weight shape'");
    SeparableKernel k;
    k.c = number(tok[0]);
    k.kappa = number(tok[1]);
    const std::string w = lower(tok[2]), s = lower(tok[3]);
    if (w == "one") k.w = KernelWeight::One;
    else if (w == "sine") k.w = KernelWeight::Sine;
    else fail("weight must be one|sine");
    if (s == "tanh") k.s = KernelShape::Tanh;
    else if (s == "sine") k.s = KernelShape::Sine;
    else if (s == "linear") k.s = KernelShape::Linear;
    else fail("shape must be tanh|sine|linear");
    return k;
  }

  std::pair<Profile, double> profile() const {
    const auto tok = split(e_.value, ", \t");
    if (tok.size() != 2) fail("expected 'shape amplitude'");
    const std::string s = lower(tok[0]);
    Profile p;
    if (s == "zero") p = Profile::Zero;
    else if (s == "sine") p = Profile::Sine;
    else if (s == "parabola") p = Profile::Parabola;
    else fail("profile must be zero|sine|parabola");
    return {p, number(tok[1])};
  }

  std::vector<Mark> marks() const {
    std::vector<Mark> out;
    for (const auto& tok : split(e_.value, ", \t")) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) fail("marks are written value:intensity");
      out.push_back({number(tok.substr(0, colon)), number(tok.substr(colon + 1))});
    }
    return out;
  }

 private:
  const std::string& key_;
  const Entry& e_;
};

const char* weight_name(KernelWeight w) { return w == KernelWeight::One ? "one" : "sine"; }
const char* shape_name(KernelShape s) {
  switch (s) {
    case KernelShape::Tanh:
      return "tanh";
    case KernelShape::Sine:
      return "sine";
    case KernelShape::Linear:
      return "linear";
  }
  return "linear";
}
const char* profile_name(Profile p) {
  switch (p) {
    case Profile::Zero:
      return "zero";
    case Profile::Sine:
      return "sine";
    case Profile::Parabola:
      return "parabola";
  }
  return "zero";
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_number(v[i]);
  return out;
}
std::string kernel_text(const SeparableKernel& k) {
  return format_number(k.c) + " " + format_number(k.kappa) + " " + weight_name(k.w) + " " + shape_name(k.s);
}

using Echo = std::vector<std::pair<std::string, std::string>>;

Echo collect(const HeatExampleConfig& h, const RunSettings& run, bool with_model) {
  Echo e;
  e.emplace_back("run.seed", std::to_string(run.seed));
  e.emplace_back("run.n_paths", std::to_string(run.n_paths));
  e.emplace_back("run.dt", format_number(run.dt));
  e.emplace_back("run.threads", std::to_string(run.threads));
  e.emplace_back("run.picard_tol", format_number(run.picard.tol));
  e.emplace_back("run.picard_max_iter", std::to_string(run.picard.max_iter));
  if (!with_model) return e;
  e.emplace_back("model.n_modes", std::to_string(h.n_modes));
  e.emplace_back("model.q", format_number(h.q));
  e.emplace_back("model.a", format_number(h.a));
  e.emplace_back("schedule.r", join_numbers(h.r));
  e.emplace_back("schedule.s", join_numbers(h.s));
  e.emplace_back("kernels.g1", kernel_text(h.g1));
  e.emplace_back("kernels.g2", kernel_text(h.g2));
  e.emplace_back("kernels.g3", kernel_text(h.g3));
  e.emplace_back("kernels.impulse_alpha", join_numbers(h.impulse_alpha));
  e.emplace_back("kernels.impulse_kappa", join_numbers(h.impulse_kappa));
  for (std::size_t i = 0; i < h.impulse_memory.size(); ++i) {
    e.emplace_back("kernels.impulse_memory_" + std::to_string(i + 1), kernel_text(h.impulse_memory[i]));
  }
  e.emplace_back("kernels.nonlocal_eps1", format_number(h.nonlocal_eps1));
  e.emplace_back("kernels.nonlocal_eps2", format_number(h.nonlocal_eps2));
  e.emplace_back("kernels.nonlocal_time", format_number(h.nonlocal_time < 0.0 ? h.a : h.nonlocal_time));
  e.emplace_back("kernels.delay_scale", format_number(h.delay_scale));
  e.emplace_back("initial.psi", std::string(profile_name(h.psi_shape)) + " " + format_number(h.psi_amp));
  e.emplace_back("initial.xi1", std::string(profile_name(h.xi1_shape)) + " " + format_number(h.xi1_amp));
  e.emplace_back("phase.tail_rate", format_number(h.tail_rate));
  e.emplace_back("phase.tail_cutoff", format_number(h.tail_cutoff));
  e.emplace_back("phase.tail_points", std::to_string(h.tail_points));
  e.emplace_back("noise.q_eigenvalues", join_numbers(h.q_eigenvalues));
  std::string marks;
  for (std::size_t i = 0; i < h.marks.size(); ++i) {
    marks += (i ? ", " : "") + format_number(h.marks[i].value) + ":" + format_number(h.marks[i].intensity);
  }
  e.emplace_back("noise.marks", marks);
  e.emplace_back("noise.jump_rate_scale", format_number(h.jump_rate_scale));
  e.emplace_back("noise.prehistory_noise", format_number(h.prehistory_noise));
  e.emplace_back("constants.l1_star", format_number(h.l1_star));
  e.emplace_back("constants.l2_star", format_number(h.l2_star));
  e.emplace_back("constants.l_b_star", format_number(h.l_b_star));
  e.emplace_back("constants.mho", format_number(h.mho));
  e.emplace_back("constants.chi_L2", format_number(h.chi_L2));
  e.emplace_back("constants.l_mi_star", join_numbers(h.l_mi_star));
  e.emplace_back("constants.L_i", join_numbers(h.L_i));
  return e;
}

const std::set<std::string> kScalarConstants = {
    "M",      "N1",     "N2_star",  "N3_star", "J_star",  "L_k1",    "L_k2", "l1_star", "l2_star",
    "M_b",    "l_b_star", "lambda_h", "M_h",   "sup_m",   "lambda_f", "sup_n", "mho",     "chi_L2",
    "trace_Q", "a",      "psi_norm", "xi1_sq", "n_impulses"};
const std::set<std::string> kListConstants = {"M_i", "l_mi_star", "lambda_i", "L_i"};

double* scalar_slot(HypothesisConstants& c, const std::string& k) {
  static const std::map<std::string, double HypothesisConstants::*> slots = {
      {"M", &HypothesisConstants::M},           {"N1", &HypothesisConstants::N1},
      {"N2_star", &HypothesisConstants::N2_star}, {"N3_star", &HypothesisConstants::N3_star},
      {"J_star", &HypothesisConstants::J_star}, {"L_k1", &HypothesisConstants::L_k1},
      {"L_k2", &HypothesisConstants::L_k2},     {"l1_star", &HypothesisConstants::l1_star},
      {"l2_star", &HypothesisConstants::l2_star}, {"M_b", &HypothesisConstants::M_b},
      {"l_b_star", &HypothesisConstants::l_b_star}, {"lambda_h", &HypothesisConstants::lambda_h},
      {"M_h", &HypothesisConstants::M_h},       {"sup_m", &HypothesisConstants::sup_m},
      {"lambda_f", &HypothesisConstants::lambda_f}, {"sup_n", &HypothesisConstants::sup_n},
      {"mho", &HypothesisConstants::mho},       {"chi_L2", &HypothesisConstants::chi_L2},
      {"trace_Q", &HypothesisConstants::trace_Q}, {"a", &HypothesisConstants::a},
      {"psi_norm", &HypothesisConstants::psi_norm}, {"xi1_sq", &HypothesisConstants::xi1_sq}};
  const auto it = slots.find(k);
  return it == slots.end() ? nullptr : &(c.*(it->second));
}

std::vector<double>* list_slot(HypothesisConstants& c, const std::string& k) {
  if (k == "M_i") return &c.M_i;
  if (k == "l_mi_star") return &c.l_mi_star;
  if (k == "lambda_i") return &c.lambda_i;
  if (k == "L_i") return &c.L_i;
  return nullptr;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split(text, ", \t")) out.push_back(std::stod(tok));
  return out;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

LoadedConfig parse_config(std::istream& in) {
  std::map<std::string, Entry> entries;
  std::vector<std::string> order;
  std::set<std::string> sections;
  std::string section;
  std::string raw;
  int line_no = 0;
  const std::set<std::string> known_sections = {"run",   "model", "schedule", "kernels",
                                                "initial", "phase", "noise",    "constants"};
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("line " + std::to_string(line_no) + ": unterminated section header", line_no, "");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(section)) {
        throw ParseError("line " + std::to_string(line_no) + ": unknown section [" + section + "]", line_no, section);
      }
      sections.insert(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no, "");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key", line_no, "");
    if (section.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": key outside any section", line_no, key);
    }
    const std::string full = section + "." + key;
    if (entries.count(full)) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key " + full, line_no, full);
    }
    entries[full] = {trim(line.substr(eq + 1)), line_no};
    order.push_back(full);
  }

  LoadedConfig cfg;
  cfg.has_model = sections.count("model") > 0;
  HeatExampleConfig& h = cfg.heat;
  h = default_heat_config();
  RunSettings& run = cfg.run;

  using Handler = std::function<void(const Reader&)>;
  std::map<std::string, Handler> handlers = {
      {"run.seed", [&](const Reader& r) { run.seed = r.unsigned_int(); }},
      {"run.n_paths", [&](const Reader& r) { run.n_paths = r.unsigned_int(); }},
      {"run.dt", [&](const Reader& r) { run.dt = r.number(); }},
      {"run.threads", [&](const Reader& r) { run.threads = r.unsigned_int(); }},
      {"run.picard_tol", [&](const Reader& r) { run.picard.tol = r.number(); }},
      {"run.picard_max_iter", [&](const Reader& r) { run.picard.max_iter = r.unsigned_int(); }},
      {"model.n_modes", [&](const Reader& r) { h.n_modes = r.unsigned_int(); }},
      {"model.q", [&](const Reader& r) { h.q = r.number(); }},
      {"model.a", [&](const Reader& r) { h.a = r.number(); }},
      {"schedule.r", [&](const Reader& r) { h.r = r.list(); }},
      {"schedule.s", [&](const Reader& r) { h.s = r.list(); }},
      {"kernels.g1", [&](const Reader& r) { h.g1 = r.kernel(); }},
      {"kernels.g2", [&](const Reader& r) { h.g2 = r.kernel(); }},
      {"kernels.g3", [&](const Reader& r) { h.g3 = r.kernel(); }},
      {"kernels.impulse_alpha", [&](const Reader& r) { h.impulse_alpha = r.list(); }},
      {"kernels.impulse_kappa", [&](const Reader& r) { h.impulse_kappa = r.list(); }},
      {"kernels.nonlocal_eps1", [&](const Reader& r) { h.nonlocal_eps1 = r.number(); }},
      {"kernels.nonlocal_eps2", [&](const Reader& r) { h.nonlocal_eps2 = r.number(); }},
      {"kernels.nonlocal_time", [&](const Reader& r) { h.nonlocal_time = r.number(); }},
      {"kernels.delay_scale", [&](const Reader& r) { h.delay_scale = r.number(); }},
      {"initial.psi", [&](const Reader& r) { std::tie(h.psi_shape, h.psi_amp) = r.profile(); }},
      {"initial.xi1", [&](const Reader& r) { std::tie(h.xi1_shape, h.xi1_amp) = r.profile(); }},
      {"phase.tail_rate", [&](const Reader& r) { h.tail_rate = r.number(); }},
      {"phase.tail_cutoff", [&](const Reader& r) { h.tail_cutoff = r.number(); }},
      {"phase.tail_points", [&](const Reader& r) { h.tail_points = r.unsigned_int(); }},
      {"noise.q_eigenvalues", [&](const Reader& r) { h.q_eigenvalues = r.list(); }},
      {"noise.marks", [&](const Reader& r) { h.marks = r.marks(); }},
      {"noise.jump_rate_scale", [&](const Reader& r) { h.jump_rate_scale = r.number(); }},
      {"noise.prehistory_noise", [&](const Reader& r) { h.prehistory_noise = r.number(); }},
  };

  // impulse memory kernels are numbered: impulse_memory_1, impulse_memory_2, ...
  std::map<std::size_t, SeparableKernel> memory;
  for (const auto& full : order) {
    const Entry& e = entries[full];
    const Reader r(full, e);
    if (auto it = handlers.find(full); it != handlers.end()) {
      it->second(r);
      continue;
    }
    const std::string prefix = "kernels.impulse_memory_";
    if (full.rfind(prefix, 0) == 0) {
      const std::string idx = full.substr(prefix.size());
      std::size_t i = 0;
      auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), i);
      if (ec != std::errc() || ptr != idx.data() + idx.size() || i == 0) r.fail("impulse memory index must be >= 1");
      memory[i] = r.kernel();
      continue;
    }
    if (full.rfind("constants.", 0) == 0) {
      const std::string key = full.substr(10);
      if (kScalarConstants.count(key)) {
        const double v = key == "n_impulses" ? static_cast<double>(r.unsigned_int()) : r.number();
        cfg.constant_overrides[key] = format_number(v);
        if (key == "l1_star") h.l1_star = v;
        if (key == "l2_star") h.l2_star = v;
        if (key == "l_b_star") h.l_b_star = v;
        if (key == "mho") h.mho = v;
        if (key == "chi_L2") h.chi_L2 = v;
      } else if (kListConstants.count(key)) {
        const auto v = r.list();
        cfg.constant_overrides[key] = join_numbers(v);
        if (key == "l_mi_star") h.l_mi_star = v;
        if (key == "L_i") h.L_i = v;
      } else {
        r.fail("unknown constant");
      }
      continue;
    }
    r.fail("unknown key");
  }
  if (!memory.empty()) {
    const std::size_t n = std::max(h.r.size(), memory.rbegin()->first);
    h.impulse_memory.assign(n, SeparableKernel{});
    for (const auto& [i, k] : memory) h.impulse_memory[i - 1] = k;
  }

  std::vector<std::string> problems;
  if (!(run.dt > 0.0)) problems.push_back("run.dt must be > 0");
  if (run.n_paths == 0) problems.push_back("run.n_paths must be >= 1");
  if (!(run.picard.tol > 0.0)) problems.push_back("run.picard_tol must be > 0");
  if (run.picard.max_iter == 0) problems.push_back("run.picard_max_iter must be >= 1");
  if (cfg.has_model) {
    for (auto& p : h.problems()) problems.push_back(std::move(p));
    if (h.a > 0.0 && run.dt > 0.0 && run.dt > h.a) problems.push_back("run.dt must not exceed the horizon a");
  } else {
    for (const auto* s : {"schedule", "kernels", "initial", "phase", "noise"}) {
      if (sections.count(s)) problems.push_back(std::string("section [") + s + "] needs a [model] section");
    }
    try {
      for (auto& p : resolve_constants(cfg).problems()) problems.push_back(std::move(p));
    } catch (const ValidationError& e) {
      for (const auto& p : e.problems()) problems.push_back(p);
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  cfg.echo = collect(h, run, cfg.has_model);
  if (!cfg.has_model) {
    for (const auto& [k, v] : cfg.constant_overrides) cfg.echo.emplace_back("constants." + k, v);
  }
  return cfg;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

HypothesisConstants resolve_constants(const LoadedConfig& cfg) {
  HypothesisConstants c = cfg.has_model ? suggested_constants(cfg.heat, cfg.run.dt) : HypothesisConstants{};
  bool explicit_count = false;
  for (const auto& [k, v] : cfg.constant_overrides) {
    if (k == "n_impulses") {
      c.n_impulses = static_cast<std::size_t>(std::stod(v));
      explicit_count = true;
    } else if (double* slot = scalar_slot(c, k)) {
      *slot = std::stod(v);
    } else if (auto* list = list_slot(c, k)) {
      *list = parse_list(v);
    }
  }
  if (!cfg.has_model && !explicit_count) {
    c.n_impulses = std::max({c.M_i.size(), c.l_mi_star.size(), c.lambda_i.size(), c.L_i.size()});
  }
  return c;
}

std::string render_config(const HeatExampleConfig& heat, const RunSettings& run) {
  std::ostringstream os;
  std::string section;
  for (const auto& [key, value] : collect(heat, run, true)) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) os << "\n";
      os << "[" << s << "]\n";
      section = s;
    }
    os << key.substr(dot + 1) << " = " << value << "\n";
  }
  return os.str();
}

}  // namespace fracsee
