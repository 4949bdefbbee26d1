#include "commands.hpp"

#include "fepp/errors.hpp"
#include "fepp/montecarlo.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace fepp::cli {
namespace {

using nlohmann::ordered_json;

// Full precision; negative zero prints as 0.
std::string num(double v) { return fmt::format("{:.17g}", v == 0.0 ? 0.0 : v); }

// CSV document: header plus rows of already-formatted cells, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) { add(header); }

  void add(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

ordered_json complex_json(Cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

ordered_json matrix_json(const CMatrix& m) {
  ordered_json re = ordered_json::array();
  ordered_json im = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json rr = ordered_json::array();
    ordered_json ir = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ir.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json cavity_json(const CavityParams& p) {
  return {{"omega_c", p.omega_c}, {"omega_0", p.omega_0}, {"omega_p", p.omega_p},
          {"kappa", p.kappa},     {"gamma", p.gamma},     {"lambda", p.lambda}};
}

ordered_json mixture_json(const BellMixture& m) {
  return {{"phi_plus", m.p_phi_plus},
          {"psi_plus", m.p_psi_plus},
          {"phi_minus", m.p_phi_minus},
          {"psi_minus", m.p_psi_minus}};
}

ordered_json loss_json(const LossParams& lp) {
  return {{"eta_d", lp.eta_d},
          {"t_f", lp.t_f},
          {"t_o", lp.t_o},
          {"pair_rate", lp.pair_rate ? ordered_json(*lp.pair_rate) : ordered_json(nullptr)}};
}

BellMixture mixture_from(const std::optional<double>& f, const std::optional<std::array<double, 4>>& w,
                         const char* which) {
  if (f && w) throw UsageError(std::string("give either --f or --weights for ") + which + ", not both");
  if (w) return {(*w)[0], (*w)[1], (*w)[2], (*w)[3]};
  if (f) {
    if (!(*f >= 0.0 && *f <= 1.0)) throw UsageError("--f must lie in [0, 1]");
    return BellMixture::bit_flip(*f);
  }
  throw UsageError(std::string("missing --f or --weights for ") + which);
}

std::pair<BellMixture, BellMixture> input_pairs(const RunSpec& spec) {
  const BellMixture first = mixture_from(spec.f, spec.weights, "pair 1");
  const BellMixture second =
      (spec.f2 || spec.weights2) ? mixture_from(spec.f2, spec.weights2, "pair 2") : first;
  first.validate();
  second.validate();
  return {first, second};
}

RoundConfig round_config(const RunSpec& spec) {
  return spec.cavity_gate ? RoundConfig::from_cavity(spec.cavity) : RoundConfig::ideal();
}

// ---------------------------------------------------------------------------

std::string cmd_reflection(const RunSpec& spec) {
  std::vector<double> probes;
  if (spec.grid) {
    const Grid& g = *spec.grid;
    if (g.steps < 1) throw UsageError("--grid needs at least one step");
    if (g.steps == 1) {
      probes.push_back(g.min);
    } else {
      const double step = (g.max - g.min) / (g.steps - 1);
      for (int k = 0; k < g.steps; ++k) probes.push_back(k == g.steps - 1 ? g.max : g.min + k * step);
    }
  } else {
    probes.push_back(spec.cavity.omega_p);
  }
  spec.cavity.validate();

  struct Row {
    double omega_p;
    Cplx r, r0;
    FaradayPhases ph;
  };
  std::vector<Row> rows;
  for (double w : probes) {
    CavityParams p = spec.cavity;
    p.omega_p = w;
    rows.push_back({w, reflection(p), empty_reflection(p), phases(p)});
  }

  if (effective_format(spec) == OutputFormat::Csv) {
    CsvWriter csv({"omega_p", "re_r", "im_r", "abs_r", "theta", "re_r0", "im_r0", "theta_0",
                   "faraday_rotation"});
    for (const Row& r : rows) {
      csv.add({num(r.omega_p), num(r.r.real()), num(r.r.imag()), num(r.ph.mag_r), num(r.ph.theta),
               num(r.r0.real()), num(r.r0.imag()), num(r.ph.theta_0), num(r.ph.rotation())});
    }
    return csv.str();
  }
  ordered_json params = cavity_json(spec.cavity);
  if (spec.grid) {
    params["grid"] = {{"min", spec.grid->min}, {"max", spec.grid->max}, {"steps", spec.grid->steps}};
  }
  ordered_json out{{"command", "reflection"}, {"parameters", params}, {"rows", ordered_json::array()}};
  for (const Row& r : rows) {
    out["rows"].push_back({{"omega_p", r.omega_p},
                           {"r", complex_json(r.r)},
                           {"abs_r", r.ph.mag_r},
                           {"theta", r.ph.theta},
                           {"r0", complex_json(r.r0)},
                           {"theta_0", r.ph.theta_0},
                           {"faraday_rotation", r.ph.rotation()}});
  }
  return dump(out);
}

std::string cmd_gate(const RunSpec& spec) {
  const PhotonAtomGate single = spec.cavity_gate ? single_cavity_gate(spec.cavity) : ideal_gate();
  const PhotonAtomGate composite = two_cavity_gate(single, single);
  const ParityReport parity = parity_action_check(composite);

  if (effective_format(spec) == OutputFormat::Csv) {
    CsvWriter csv({"photon", "atom1", "atom2", "re", "im", "abs"});
    for (std::size_t k = 0; k < composite.dim(); ++k) {
      const Cplx z = composite.entry(k);
      csv.add({k < 4 ? "L" : "R", std::to_string((k >> 1) & 1u), std::to_string(k & 1u), num(z.real()),
               num(z.imag()), num(std::abs(z))});
    }
    return csv.str();
  }
  ordered_json params{{"gate", spec.cavity_gate ? "cavity" : "ideal"}};
  if (spec.cavity_gate) params["cavity"] = cavity_json(spec.cavity);

  ordered_json single_rows = ordered_json::array();
  for (std::size_t k = 0; k < single.dim(); ++k) {
    single_rows.push_back({{"photon", k < 2 ? "L" : "R"}, {"atom", static_cast<int>(k & 1u)},
                           {"value", complex_json(single.entry(k))}});
  }
  ordered_json composite_rows = ordered_json::array();
  for (std::size_t k = 0; k < composite.dim(); ++k) {
    composite_rows.push_back({{"photon", k < 4 ? "L" : "R"},
                              {"atoms", fmt::format("{}{}", (k >> 1) & 1u, k & 1u)},
                              {"value", complex_json(composite.entry(k))}});
  }
  ordered_json cases = ordered_json::array();
  for (const ParityCaseReport& c : parity.cases) {
    cases.push_back({{"atoms", fmt::format("{}{}", c.atoms[0], c.atoms[1])},
                     {"even_parity", c.even_parity},
                     {"expect_flip", c.expect_flip},
                     {"global_phase", complex_json(c.global_phase)},
                     {"residual", c.residual},
                     {"output_norm", c.output_norm},
                     {"passed", c.passed}});
  }
  ordered_json out{{"command", "gate"},
                   {"parameters", params},
                   {"single_cavity", single_rows},
                   {"unitary", single.is_unitary()},
                   {"two_cavity", composite_rows},
                   {"parity_check", {{"passed", parity.passed}, {"cases", cases}}}};
  return dump(out);
}

std::string cmd_round(const RunSpec& spec) {
  const auto [pair1, pair2] = input_pairs(spec);
  const RoundConfig cfg = round_config(spec);
  const RoundResult result = run_round_exact(pair1, pair2, cfg);
  const PureState phi_plus = bell_state(BellLabel::PhiPlus);

  auto atoms_text = [](const RoundOutcome& o) {
    return o.atoms ? fmt::format("{}{}", (*o.atoms)[0], (*o.atoms)[1]) : std::string();
  };
  auto branch_fidelity = [&](const RoundOutcome& o) -> std::optional<double> {
    if (!o.post_state) return std::nullopt;
    return fidelity_with(*o.post_state, phi_plus);
  };

  if (effective_format(spec) == OutputFormat::Csv) {
    CsvWriter csv({"alice", "bob", "atoms", "kept", "probability", "correction", "fidelity"});
    for (const RoundOutcome& o : result.outcomes) {
      const auto f = branch_fidelity(o);
      csv.add({std::string(1, to_char(o.detectors[0])), std::string(1, to_char(o.detectors[1])),
               atoms_text(o), o.kept ? "1" : "0", num(o.probability), o.correction_applied ? "1" : "0",
               f ? num(*f) : std::string()});
    }
    return csv.str();
  }

  ordered_json params{{"pair1", mixture_json(pair1)},
                      {"pair2", mixture_json(pair2)},
                      {"gate", spec.cavity_gate ? "cavity" : "ideal"}};
  if (spec.cavity_gate) params["cavity"] = cavity_json(spec.cavity);

  ordered_json outcomes = ordered_json::array();
  for (const RoundOutcome& o : result.outcomes) {
    ordered_json j{{"detectors", fmt::format("{}{}", to_char(o.detectors[0]), to_char(o.detectors[1]))},
                   {"atoms", o.atoms ? ordered_json(atoms_text(o)) : ordered_json(nullptr)},
                   {"kept", o.kept},
                   {"probability", o.probability},
                   {"correction_applied", o.correction_applied},
                   {"fidelity", optional_json(branch_fidelity(o))}};
    j["post_state"] = o.post_state ? matrix_json(o.post_state->matrix()) : ordered_json(nullptr);
    outcomes.push_back(std::move(j));
  }

  // Closed-form reference, meaningful for identical rank-2 bit-flip inputs.
  const bool bit_flip_inputs = pair1 == pair2 && pair1.p_phi_minus == 0.0 && pair1.p_psi_minus == 0.0;
  ordered_json reference{{"identical_bit_flip_inputs", bit_flip_inputs}};
  const double f = pair1.p_phi_plus;
  if (f > 0.0 && f < 1.0) {
    reference["success_prob_ideal"] = success_prob_ideal(f);
    reference["fidelity_map"] = fidelity_map(f);
  } else {
    reference["success_prob_ideal"] = 1.0 - 2.0 * f * (1.0 - f);
    reference["fidelity_map"] = f;
  }
  const auto kept_f = result.kept_fidelity();
  reference["kept_probability_deviation"] =
      result.kept_probability() - reference["success_prob_ideal"].get<double>();
  reference["fidelity_deviation"] =
      kept_f ? ordered_json(*kept_f - reference["fidelity_map"].get<double>()) : ordered_json(nullptr);

  ordered_json out{{"command", "round"},
                   {"parameters", params},
                   {"outcomes", outcomes},
                   {"total_probability", result.total_probability()},
                   {"kept_probability", result.kept_probability()},
                   {"kept_fidelity", optional_json(kept_f)},
                   {"absorption_loss", result.absorption_loss()},
                   {"reference", reference}};
  return dump(out);
}

std::string cmd_iterate(const RunSpec& spec) {
  if (spec.weights) throw UsageError("iterate takes --f, not --weights");
  if (!spec.f) throw UsageError("missing --f");
  if (spec.rounds < 1) throw UsageError("--rounds must be at least 1");
  const IterationTrace trace = iterate_rounds(*spec.f, spec.rounds, spec.alternate_errors);

  if (effective_format(spec) == OutputFormat::Csv) {
    CsvWriter csv({"round", "fidelity", "success_prob", "cumulative_pairs"});
    for (std::size_t k = 0; k < trace.fidelities.size(); ++k) {
      csv.add({std::to_string(k), num(trace.fidelities[k]), k ? num(trace.success_probs[k - 1]) : "",
               num(trace.cumulative_pairs[k])});
    }
    return csv.str();
  }
  ordered_json rows = ordered_json::array();
  for (std::size_t k = 0; k < trace.fidelities.size(); ++k) {
    ordered_json row{{"round", k},
                     {"fidelity", trace.fidelities[k]},
                     {"success_prob", k ? ordered_json(trace.success_probs[k - 1]) : ordered_json(nullptr)},
                     {"cumulative_pairs", trace.cumulative_pairs[k]}};
    row["input_mixture"] = k ? mixture_json(trace.round_inputs[k - 1]) : ordered_json(nullptr);
    rows.push_back(std::move(row));
  }
  ordered_json out{{"command", "iterate"},
                   {"parameters",
                    {{"f", *spec.f}, {"rounds", spec.rounds}, {"alternate_errors", spec.alternate_errors}}},
                   {"warning", trace.warning ? ordered_json(*trace.warning) : ordered_json(nullptr)},
                   {"rows", rows}};
  return dump(out);
}

std::string cmd_montecarlo(const RunSpec& spec) {
  if (!spec.seed) throw UsageError("montecarlo requires --seed");
  if (spec.trials == 0) throw UsageError("--trials must be at least 1");
  const auto [pair1, pair2] = input_pairs(spec);
  const RoundConfig cfg = round_config(spec);

  const MonteCarloReport mc = monte_carlo_round(pair1, pair2, cfg, {spec.trials, *spec.seed, spec.threads});
  const RoundResult exact = run_round_exact(pair1, pair2, cfg);
  const MonteCarloComparison cmp = compare_with_exact(mc, exact);

  if (effective_format(spec) == OutputFormat::Csv) {
    CsvWriter csv({"seed", "trials", "surviving", "kept", "keep_rate", "keep_rate_se", "kept_fidelity",
                   "kept_fidelity_se", "exact_keep_rate", "exact_kept_fidelity", "keep_rate_z",
                   "kept_fidelity_z", "degenerate_se"});
    auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
    csv.add({std::to_string(mc.seed), std::to_string(mc.trials), std::to_string(mc.surviving_trials),
             std::to_string(mc.kept_trials), num(mc.keep_rate), num(mc.keep_rate_se), opt(mc.kept_fidelity),
             opt(mc.kept_fidelity_se), num(cmp.exact_keep_rate), opt(cmp.exact_kept_fidelity),
             opt(cmp.keep_rate_z), opt(cmp.kept_fidelity_z), mc.degenerate_se ? "1" : "0"});
    return csv.str();
  }

  ordered_json params{{"pair1", mixture_json(pair1)},
                      {"pair2", mixture_json(pair2)},
                      {"trials", spec.trials},
                      {"seed", *spec.seed},
                      {"gate", spec.cavity_gate ? "cavity" : "ideal"}};
  if (spec.cavity_gate) params["cavity"] = cavity_json(spec.cavity);
  ordered_json out{{"command", "montecarlo"},
                   {"parameters", params},
                   {"surviving_trials", mc.surviving_trials},
                   {"kept_trials", mc.kept_trials},
                   {"keep_rate", mc.keep_rate},
                   {"keep_rate_se", mc.keep_rate_se},
                   {"kept_fidelity", optional_json(mc.kept_fidelity)},
                   {"kept_fidelity_se", optional_json(mc.kept_fidelity_se)},
                   {"degenerate_se", mc.degenerate_se},
                   {"exact", {{"keep_rate", cmp.exact_keep_rate}, {"kept_fidelity", optional_json(cmp.exact_kept_fidelity)}}},
                   {"z", {{"keep_rate", optional_json(cmp.keep_rate_z)}, {"kept_fidelity", optional_json(cmp.kept_fidelity_z)}}}};
  return dump(out);
}

std::string cmd_losssweep(const RunSpec& spec) {
  const Grid g = spec.grid.value_or(Grid{0.501, 0.999, 101});
  const std::vector<SweepRow> rows = sweep_success_prob(g.min, g.max, g.steps, spec.loss);
  const bool with_time = spec.loss.pair_rate.has_value();

  if (effective_format(spec) == OutputFormat::Csv) {
    std::vector<std::string> header{"F", "P_p", "P_T"};
    if (with_time) header.push_back("expected_time_s");
    CsvWriter csv(header);
    for (const SweepRow& r : rows) {
      std::vector<std::string> cells{num(r.fidelity), num(r.ideal_prob), num(r.total_prob)};
      if (with_time) cells.push_back(num(expected_time_to_success(r.total_prob, spec.loss).seconds));
      csv.add(cells);
    }
    return csv.str();
  }
  ordered_json out{{"command", "losssweep"},
                   {"parameters", {{"loss", loss_json(spec.loss)},
                                   {"grid", {{"min", g.min}, {"max", g.max}, {"steps", g.steps}}}}},
                   {"rows", ordered_json::array()}};
  for (const SweepRow& r : rows) {
    ordered_json row{{"F", r.fidelity}, {"P_p", r.ideal_prob}, {"P_T", r.total_prob}};
    if (with_time) row["expected_time_s"] = expected_time_to_success(r.total_prob, spec.loss).seconds;
    out["rows"].push_back(std::move(row));
  }
  return dump(out);
}

void write_output(const std::string& content, const std::optional<std::string>& path, std::ostream& out) {
  if (!path) {
    out << content;
    out.flush();
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(*path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open output file " + *path);
    f << content;
    if (!f.flush()) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw UsageError("failed writing output file " + *path);
    }
  }
  fs::rename(tmp, target);
}

std::string one_line(std::string msg) {
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!msg.empty() && msg.back() == ' ') msg.pop_back();
  return msg;
}

}  // namespace

Grid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("--grid expects min:max:steps, got '" + text + "'");
  try {
    std::size_t used = 0;
    Grid g{};
    g.min = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("min");
    g.max = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("max");
    g.steps = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("steps");
    if (!std::isfinite(g.min) || !std::isfinite(g.max)) throw std::invalid_argument("finite");
    if (g.steps < 1) throw UsageError("--grid steps must be positive");
    if (g.steps > 1 && !(g.min < g.max)) throw UsageError("--grid requires min < max");
    return g;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("--grid expects min:max:steps, got '" + text + "'");
  }
}

std::array<double, 4> parse_weights(const std::string& text) {
  std::array<double, 4> w{};
  std::stringstream ss(text);
  std::string item;
  std::size_t n = 0;
  try {
    while (std::getline(ss, item, ',')) {
      if (n == 4) throw std::invalid_argument("count");
      std::size_t used = 0;
      w[n] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument("trailing");
      ++n;
    }
  } catch (const std::exception&) {
    throw UsageError("--weights expects four comma-separated numbers, got '" + text + "'");
  }
  if (n != 4) throw UsageError("--weights expects four comma-separated numbers, got '" + text + "'");
  return w;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Reflection: return "reflection";
    case Command::Gate: return "gate";
    case Command::Round: return "round";
    case Command::Iterate: return "iterate";
    case Command::MonteCarlo: return "montecarlo";
    case Command::LossSweep: return "losssweep";
  }
  return "?";
}

OutputFormat effective_format(const RunSpec& spec) {
  if (spec.format) return *spec.format;
  switch (spec.command) {
    case Command::Round:
    case Command::MonteCarlo:
    case Command::Gate:
      return OutputFormat::Json;
    default:
      return OutputFormat::Csv;
  }
}

std::string run_command(const RunSpec& spec) {
  switch (spec.command) {
    case Command::Reflection: return cmd_reflection(spec);
    case Command::Gate: return cmd_gate(spec);
    case Command::Round: return cmd_round(spec);
    case Command::Iterate: return cmd_iterate(spec);
    case Command::MonteCarlo: return cmd_montecarlo(spec);
    case Command::LossSweep: return cmd_losssweep(spec);
  }
  throw UsageError("unknown command");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Faraday-rotation entanglement purification simulator", "fepp"};
  app.require_subcommand(1);

  RunSpec spec;
  std::string format_text;
  std::string grid_text, weights_text, weights2_text, gate_text = "ideal";
  double pair_rate = 0.0;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format_text, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", spec.out_path, "Write output to PATH instead of stdout");
  };
  auto add_cavity = [&](CLI::App* sub) {
    sub->add_option("--omega-c", spec.cavity.omega_c, "Cavity frequency (units of kappa)");
    sub->add_option("--omega-0", spec.cavity.omega_0, "Atomic frequency (units of kappa)");
    sub->add_option("--omega-p", spec.cavity.omega_p, "Photon frequency (units of kappa)");
    sub->add_option("--kappa", spec.cavity.kappa, "Cavity damping rate");
    sub->add_option("--gamma", spec.cavity.gamma, "Atomic damping rate (units of kappa)");
    sub->add_option("--lambda", spec.cavity.lambda, "Atom-cavity coupling (units of kappa)");
  };
  auto add_gate_choice = [&](CLI::App* sub) {
    sub->add_option("--gate", gate_text, "Round gate: ideal table or built from cavity parameters")
        ->check(CLI::IsMember({"ideal", "cavity"}));
    add_cavity(sub);
  };
  auto add_pairs = [&](CLI::App* sub) {
    sub->add_option("--f", spec.f, "Fidelity F of the bit-flip mixture F phi+ + (1-F) psi+");
    sub->add_option("--weights", weights_text, "Bell weights phi+,psi+,phi-,psi-");
    sub->add_option("--f2", spec.f2, "Fidelity of the second pair (defaults to the first)");
    sub->add_option("--weights2", weights2_text, "Bell weights of the second pair");
  };

  auto* reflection_cmd = app.add_subcommand("reflection", "Reflection coefficients and Faraday phases");
  add_cavity(reflection_cmd);
  reflection_cmd->add_option("--grid", grid_text, "Sweep omega_p over min:max:steps");
  add_format(reflection_cmd);

  auto* gate_cmd = app.add_subcommand("gate", "Photon-atom gate tables and parity check");
  add_gate_choice(gate_cmd);
  add_format(gate_cmd);

  auto* round_cmd = app.add_subcommand("round", "One exact purification round");
  add_pairs(round_cmd);
  add_gate_choice(round_cmd);
  add_format(round_cmd);

  auto* iterate_cmd = app.add_subcommand("iterate", "Fidelity trace over repeated rounds");
  iterate_cmd->add_option("--f", spec.f, "Initial fidelity")->required();
  iterate_cmd->add_option("--rounds", spec.rounds, "Number of rounds");
  iterate_cmd->add_flag("--alternate-errors", spec.alternate_errors,
                        "Treat residual errors as phase flips, converted before each round");
  add_format(iterate_cmd);

  auto* mc_cmd = app.add_subcommand("montecarlo", "Sampled purification round against the exact engine");
  add_pairs(mc_cmd);
  add_gate_choice(mc_cmd);
  mc_cmd->add_option("--trials", spec.trials, "Number of trials");
  mc_cmd->add_option("--seed", spec.seed, "Random seed (required)");
  mc_cmd->add_option("--threads", spec.threads, "Worker threads (0 = all cores); does not change results");
  add_format(mc_cmd);

  auto* loss_cmd = app.add_subcommand("losssweep", "Success probability with photon loss over an F grid");
  loss_cmd->add_option("--eta-d", spec.loss.eta_d, "Detector efficiency");
  loss_cmd->add_option("--t-f", spec.loss.t_f, "Fiber transmission per photon");
  loss_cmd->add_option("--t-o", spec.loss.t_o, "Other-optics transmission per photon");
  auto* rate_opt = loss_cmd->add_option("--pair-rate", pair_rate, "Pair attempts per second");
  loss_cmd->add_option("--grid", grid_text, "F grid min:max:steps");
  add_format(loss_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "fepp: error: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (reflection_cmd->parsed()) spec.command = Command::Reflection;
    if (gate_cmd->parsed()) spec.command = Command::Gate;
    if (round_cmd->parsed()) spec.command = Command::Round;
    if (iterate_cmd->parsed()) spec.command = Command::Iterate;
    if (mc_cmd->parsed()) spec.command = Command::MonteCarlo;
    if (loss_cmd->parsed()) spec.command = Command::LossSweep;

    if (!format_text.empty()) spec.format = format_text == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    if (!grid_text.empty()) spec.grid = parse_grid(grid_text);
    if (!weights_text.empty()) spec.weights = parse_weights(weights_text);
    if (!weights2_text.empty()) spec.weights2 = parse_weights(weights2_text);
    if (rate_opt->count() > 0) spec.loss.pair_rate = pair_rate;
    spec.cavity_gate = gate_text == "cavity";

    const std::string content = run_command(spec);
    write_output(content, spec.out_path, out);
  } catch (const std::exception& e) {
    err << "fepp: error: " << one_line(e.what()) << '\n';
    return 2;
  }
  return 0;
}

}  // namespace fepp::cli
