#include "fracprog/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "fracprog/averages.hpp"
#include "fracprog/detect.hpp"
#include "fracprog/errors.hpp"
#include "fracprog/fourier.hpp"
#include "fracprog/grid.hpp"
#include "fracprog/measures.hpp"
#include "fracprog/parallel.hpp"
#include "fracprog/pigeonhole.hpp"
#include "fracprog/polynomial.hpp"
#include "fracprog/roth.hpp"

namespace fracprog::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class Kind { integer, real, text, flag };

struct Param {
  std::string name;
  Kind kind;
  std::vector<std::string> subcommands;  // empty: global
  std::string help;
};

const std::vector<std::string> kSubcommands{"measure", "decay", "sobolev-probe", "pigeonhole", "roth", "detect"};

const std::map<std::string, std::string> kSubcommandHelp{
    {"measure", "build a fractal measure on the grid with its Frostman certificate"},
    {"decay", "Littlewood-Paley annulus norms and the fitted decay exponent"},
    {"sobolev-probe", "L1 norm of polynomial averages against the frequency cutoff"},
    {"pigeonhole", "scan for a good scale and extract energy where the pairing is small"},
    {"roth", "three-term forms, level decomposition, diagonal mass and certificate"},
    {"detect", "search a set for a polynomial progression witness"},
};

const std::vector<Param>& params() {
  static const std::vector<Param> table{
      {"J", Kind::integer, {}, "grid resolution, 2^J cells (4..22)"},
      {"seed", Kind::integer, {}, "random seed"},
      {"threads", Kind::integer, {}, "worker threads (results do not depend on it)"},
      {"out", Kind::text, {}, "output path (stdout when absent; required by measure)"},
      {"format", Kind::text, {}, "json or csv"},
      {"timing", Kind::flag, {}, "record wall time in the manifest"},

      {"cantor", Kind::text, {"measure"}, "digit construction b:d1,d2,..."},
      {"random", Kind::text, {"measure"}, "random digit construction b:keep (uses --seed)"},
      {"lebesgue", Kind::flag, {"measure"}, "uniform density"},
      {"depth", Kind::integer, {"measure"}, "construction depth"},
      {"set-out", Kind::text, {"measure"}, "also write the support as a FRACDSET file"},

      {"measure", Kind::text, {"decay", "roth"}, "FRACGRID file or 'lebesgue'"},
      {"lmax", Kind::integer, {"decay", "roth"}, "largest annulus of the decay profile"},
      {"beta", Kind::real, {"decay"}, "Frostman exponent (estimated when absent)"},

      {"family", Kind::text, {"sobolev-probe", "pigeonhole", "detect"}, "polynomial family, e.g. \"t,t^2\""},
      {"cutoffs", Kind::text, {"sobolev-probe"}, "cutoff exponents a:b or a,b,c"},
      {"trials", Kind::integer, {"sobolev-probe"}, "random trials per cutoff"},
      {"scale", Kind::integer, {"sobolev-probe"}, "dilation exponent of the average"},
      {"inputs", Kind::text, {"sobolev-probe"}, "random or modulated"},
      {"nodes", Kind::integer, {"sobolev-probe", "pigeonhole", "detect"}, "quadrature nodes (0: 4*2^J)"},

      {"set", Kind::text, {"pigeonhole", "detect"}, "FRACDSET file"},
      {"f0", Kind::text, {"pigeonhole"}, "FRACDSET file for f_0 (default: --set)"},
      {"epsilon", Kind::real, {"pigeonhole"}, "density lower bound"},
      {"kmax", Kind::integer, {"pigeonhole"}, "largest scale scanned (default J-1)"},
      {"t", Kind::text, {"pigeonhole"}, "mollification scales per polynomial, e.g. inf,6"},

      {"theta", Kind::text, {"roth"}, "theta pair p1/q1,p2/q2"},
      {"M", Kind::integer, {"roth"}, "bound for the theta pair"},
      {"l0", Kind::integer, {"roth"}, "split level"},

      {"kappa", Kind::real, {"detect"}, "smallest admissible t (default 2^(-J/2))"},
      {"tgrid", Kind::integer, {"detect"}, "number of t nodes on [kappa, 1]"},
  };
  return table;
}

bool applies(const Param& p, const std::string& sub) {
  return p.subcommands.empty() || std::find(p.subcommands.begin(), p.subcommands.end(), sub) != p.subcommands.end();
}

const Param* find_param(const std::string& name) {
  for (const auto& p : params())
    if (p.name == name) return &p;
  return nullptr;
}

json convert(const Param& p, const std::string& raw) {
  try {
    std::size_t used = 0;
    switch (p.kind) {
      case Kind::integer: {
        const long long v = std::stoll(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::real: {
        const double v = std::stod(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::text:
        return raw;
      case Kind::flag:
        if (raw == "true" || raw == "1" || raw.empty()) return true;
        if (raw == "false" || raw == "0") return false;
        break;
    }
  } catch (const std::logic_error&) {
  }
  throw ConfigError("--" + p.name + ": cannot parse '" + raw + "'");
}

void check_json_type(const Param& p, const json& v) {
  bool ok = false;
  switch (p.kind) {
    case Kind::integer: ok = v.is_number_integer(); break;
    case Kind::real: ok = v.is_number(); break;
    case Kind::text: ok = v.is_string(); break;
    case Kind::flag: ok = v.is_boolean(); break;
  }
  if (!ok) throw ConfigError("config key '" + p.name + "' has the wrong type");
}

// --- typed access -----------------------------------------------------------

template <class T>
T get_or(const json& p, const char* key, T fallback) {
  return p.contains(key) ? p.at(key).get<T>() : fallback;
}

std::string require_text(const json& p, const char* key, const std::string& sub) {
  if (!p.contains(key)) throw ConfigError(sub + " requires --" + std::string(key));
  return p.at(key).get<std::string>();
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int resolution(const json& p, int fallback) {
  const int J = get_or<int>(p, "J", fallback);
  if (J < kMinResolution || J > 22) throw ConfigError("J=" + std::to_string(J) + " outside [4, 22]");
  return J;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  const auto colon = text.find(':');
  try {
    if (colon != std::string::npos) {
      const int a = std::stoi(text.substr(0, colon));
      const int b = std::stoi(text.substr(colon + 1));
      if (b < a) throw ConfigError(std::string(what) + ": empty range '" + text + "'");
      for (int v = a; v <= b; ++v) out.push_back(v);
      return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::logic_error&) {
    throw ConfigError(std::string(what) + ": cannot parse '" + text + "'");
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

// "b:rest" -> (b, rest)
std::pair<int, std::string> split_base(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError(std::string(what) + " must look like b:...");
  try {
    std::size_t used = 0;
    const int b = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(text);
    return {b, text.substr(colon + 1)};
  } catch (const std::logic_error&) {
    throw ConfigError(std::string(what) + ": cannot parse base in '" + text + "'");
  }
}

GridFunction load_measure(const json& p, int default_J) {
  const std::string src = require_text(p, "measure", "this subcommand");
  if (src == "lebesgue") return lebesgue_density(resolution(p, default_J));
  GridFunction mu = read_grid(src);
  if (p.contains("J") && p.at("J").get<int>() != mu.resolution())
    throw ConfigError("--J " + std::to_string(p.at("J").get<int>()) + " disagrees with the measure file (J=" +
                      std::to_string(mu.resolution()) + ")");
  return mu;
}

// --- output -----------------------------------------------------------------

json manifest(const ExperimentConfig& cfg) {
  json canonical = cfg.params;
  // Neither the destination nor the thread count changes the results.
  canonical.erase("out");
  canonical.erase("threads");
  canonical.erase("timing");
  canonical["subcommand"] = cfg.subcommand;
  return {{"tool", "fracprog"}, {"version", kVersion}, {"subcommand", cfg.subcommand},
          {"config", canonical}, {"config_hash", config_hash(canonical)}};
}

std::string csv_rows(const std::vector<std::vector<std::string>>& rows) {
  std::string s;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ',';
      s += r[i];
    }
    s += '\n';
  }
  return s;
}

struct Output {
  json report;
  std::vector<std::vector<std::string>> csv;  // header first
};

// --- subcommands ------------------------------------------------------------

Output run_measure(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  const int J = resolution(p, kDefaultResolution);
  const int depth = get_or<int>(p, "depth", 8);
  const int chosen = static_cast<int>(p.contains("cantor")) + static_cast<int>(p.contains("random")) +
                     static_cast<int>(get_or<bool>(p, "lebesgue", false));
  if (chosen != 1) throw ConfigError("measure needs exactly one of --cantor, --random, --lebesgue");
  if (!p.contains("out")) throw ConfigError("measure requires --out for the FRACGRID file");
  if (get_or<std::string>(p, "format", "json") != "json")
    throw ConfigError("measure writes a FRACGRID file and a JSON sidecar; --format csv is not available");

  json info;
  GridFunction mu(J, 0.0);
  std::optional<double> similarity;
  if (p.contains("cantor")) {
    const auto [b, rest] = split_base(p.at("cantor").get<std::string>(), "--cantor");
    DigitConstruction c{b, parse_int_list(rest, "--cantor digits"), depth, std::nullopt};
    mu = cantor_measure(c, J);
    similarity = c.similarity_dimension();
    info = {{"kind", "cantor"}, {"base", b}, {"digits", c.digits}, {"depth", depth}};
  } else if (p.contains("random")) {
    const auto [b, rest] = split_base(p.at("random").get<std::string>(), "--random");
    const auto keep = parse_int_list(rest, "--random keep");
    if (keep.size() != 1) throw ConfigError("--random must look like b:keep");
    const auto seed = get_or<std::uint64_t>(p, "seed", 0);
    mu = random_digit_measure(b, keep[0], depth, seed, J);
    similarity = std::log(static_cast<double>(keep[0])) / std::log(static_cast<double>(b));
    info = {{"kind", "random"}, {"base", b}, {"keep", keep[0]}, {"depth", depth}, {"seed", seed}};
  } else {
    mu = lebesgue_density(J);
    similarity = 1.0;
    info = {{"kind", "lebesgue"}};
  }
  info["J"] = J;
  const FrostmanEstimate fr = certify_frostman(mu);

  const std::string out = p.at("out").get<std::string>();
  const auto grid_bytes = encode_grid(mu);
  write_atomically(out, std::string(grid_bytes.begin(), grid_bytes.end()));
  json rep = {{"measure", info},
              {"similarity_dimension", number(*similarity)},
              {"total_mass", integrate(mu)},
              {"frostman", {{"beta", fr.beta}, {"lambda", fr.lambda}, {"lambda_padded", fr.lambda_padded}}},
              {"grid_file", fs::path(out).filename().string()}};
  if (p.contains("set-out")) {
    const DyadicSet support = DyadicSet::support(mu);
    const auto set_bytes = encode_set(support);
    const std::string set_out = p.at("set-out").get<std::string>();
    write_atomically(set_out, std::string(set_bytes.begin(), set_bytes.end()));
    rep["set_file"] = fs::path(set_out).filename().string();
    rep["set_cells"] = support.count();
  }
  return {rep, {}};
}

Output run_decay(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  const GridFunction mu = load_measure(p, kDefaultResolution);
  const int J = mu.resolution();
  const int lmax = get_or<int>(p, "lmax", J - 2);
  const double beta = p.contains("beta") ? p.at("beta").get<double>() : certify_frostman(mu).beta;
  const DecayProfile prof = decay_profile(mu, lmax, beta);
  json rows = json::array();
  Output o;
  o.csv.push_back({"l", "sup", "l2", "l4"});
  for (const auto& r : prof.rows) {
    rows.push_back({{"l", r.l}, {"sup", r.sup}, {"l2", r.l2}, {"l4", r.l4}});
    o.csv.push_back({std::to_string(r.l), format_double(r.sup), format_double(r.l2), format_double(r.l4)});
  }
  o.csv.push_back({"fitted_c0_l4", format_double(prof.c0_l4), "", ""});
  o.csv.push_back({"threshold_(1-beta)/4", format_double(*prof.threshold), "", ""});
  o.report = {{"J", J},
              {"rows", rows},
              {"c0_sup", number(prof.c0_sup)},
              {"c0_l2", number(prof.c0_l2)},
              {"c0_l4", number(prof.c0_l4)},
              {"no_decay_detected", !std::isfinite(prof.c0_l4)},
              {"r_squared_l4", prof.r_squared_l4},
              {"beta", beta},
              {"threshold", *prof.threshold},
              {"exceeds_threshold", *prof.exceeds_threshold}};
  return o;
}

Output run_sobolev(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  const PolynomialFamily fam = parse_family(require_text(p, "family", "sobolev-probe"));
  SobolevProbeOptions opt;
  opt.J = resolution(p, 12);
  opt.cutoffs = parse_int_list(get_or<std::string>(p, "cutoffs", "2:8"), "--cutoffs");
  opt.trials = get_or<int>(p, "trials", 8);
  opt.seed = get_or<std::uint64_t>(p, "seed", 7);
  opt.scale = get_or<int>(p, "scale", 1);
  opt.nodes = get_or<std::size_t>(p, "nodes", 0);
  const std::string inputs = get_or<std::string>(p, "inputs", "random");
  if (inputs == "random") {
    opt.inputs = ProbeInputs::random;
  } else if (inputs == "modulated") {
    opt.inputs = ProbeInputs::modulated;
  } else {
    throw ConfigError("--inputs must be random or modulated");
  }
  const SobolevProbeResult r = sobolev_probe(fam, opt);
  Output o;
  o.csv.push_back({"cutoff", "l1_norm"});
  for (std::size_t i = 0; i < r.cutoffs.size(); ++i)
    o.csv.push_back({std::to_string(r.cutoffs[i]), format_double(r.l1_norms[i])});
  o.csv.push_back({"sigma_fit", format_double(r.sigma_fit)});
  o.csv.push_back({"r_squared", format_double(r.r_squared)});
  json skipped = json::array();
  for (auto [n, slot] : r.skipped) skipped.push_back({{"cutoff", n}, {"slot", slot}});
  o.report = {{"family", r.family},     {"relatively_curved", r.relatively_curved},
              {"J", opt.J},             {"inputs", inputs},
              {"scale", opt.scale},     {"trials", opt.trials},
              {"cutoffs", r.cutoffs},   {"l1_norms", r.l1_norms},
              {"sigma_fit", r.sigma_fit}, {"c_fit", r.c_fit},
              {"r_squared", r.r_squared}, {"skipped", skipped}};
  return o;
}

json event_json(const EnergyEvent& e) {
  return {{"k", e.k}, {"i", e.i}, {"shift", e.shift}, {"level", e.level}, {"norm", e.norm}};
}

Output run_pigeonhole(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  const PolynomialFamily fam = parse_family(get_or<std::string>(p, "family", "t,t^2"));
  const DyadicSet E = read_set(require_text(p, "set", "pigeonhole"));
  const DyadicSet E0 = p.contains("f0") ? read_set(p.at("f0").get<std::string>()) : E;
  if (E0.resolution() != E.resolution()) throw ConfigError("--f0 and --set have different resolutions");
  if (p.contains("J") && p.at("J").get<int>() != E.resolution())
    throw ConfigError("--J disagrees with the set file (J=" + std::to_string(E.resolution()) + ")");
  if (!p.contains("epsilon")) throw ConfigError("pigeonhole requires --epsilon");
  const double eps = p.at("epsilon").get<double>();
  const int J = E.resolution();
  std::vector<int> ts(fam.size(), kNoMollification);
  if (p.contains("t")) {
    std::stringstream ss(p.at("t").get<std::string>());
    std::string item;
    ts.clear();
    while (std::getline(ss, item, ',')) {
      if (item == "inf") {
        ts.push_back(kNoMollification);
      } else {
        const auto v = parse_int_list(item, "--t");
        ts.push_back(v.front());
      }
    }
  }
  const auto rep = find_good_scale(fam, E.indicator(), E0.indicator(), ts, eps, get_or<int>(p, "kmax", J - 1),
                                   get_or<std::size_t>(p, "nodes", 0));
  Output o;
  o.csv.push_back({"k", "pairing"});
  json trace = json::array();
  for (auto [k, v] : rep.trace) {
    trace.push_back({{"k", k}, {"pairing", v}});
    o.csv.push_back({std::to_string(k), format_double(v)});
  }
  json events = json::array();
  for (const auto& e : rep.energy_events) events.push_back(event_json(e));
  o.report = {{"family", fam.to_string()},
              {"J", J},
              {"epsilon", rep.epsilon},
              {"m", rep.m},
              {"k_found", rep.k_found ? json(*rep.k_found) : json(nullptr)},
              {"pairing_value", rep.pairing_value},
              {"scan_limit", rep.scan_limit},
              {"constants",
               {{"c_suite", rep.constants.c_suite}, {"c_small", rep.constants.c_small}, {"c_e", rep.constants.c_e}}},
              {"trace", trace},
              {"energy_events", events},
              {"warnings", rep.warnings}};
  return o;
}

Output run_roth(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  const GridFunction mu = load_measure(p, kDefaultResolution);
  const int J = mu.resolution();
  const std::optional<int> M = p.contains("M") ? std::optional<int>(p.at("M").get<int>()) : std::nullopt;
  const ThetaPair th = parse_theta_pair(get_or<std::string>(p, "theta", "1,2"), M);
  const int l0 = get_or<int>(p, "l0", std::min(4, J - 1));
  RothOptions opt;
  if (p.contains("lmax")) opt.lmax = p.at("lmax").get<int>();
  const FrostmanEstimate fr = certify_frostman(mu);
  const RothReport r = roth_certificate(mu, fr, th, l0, opt);
  Output o;
  o.csv.push_back({"l", "lambda_l"});
  json tail = json::array();
  for (auto [l, v] : r.tail) {
    tail.push_back({{"l", l}, {"value", v}});
    o.csv.push_back({std::to_string(l), format_double(v)});
  }
  o.csv.push_back({"lambda_low", format_double(r.lambda_low)});
  o.csv.push_back({"lambda_total", format_double(r.lambda_total)});
  json diag = json::array();
  for (const auto& d : r.diagonal) {
    json dt = json::array();
    for (auto [l, v] : d.tail) dt.push_back({{"l", l}, {"value", v}});
    diag.push_back({{"delta", d.delta}, {"l0", d.l0}, {"mass", d.total}, {"low", d.low}, {"tail", dt}});
  }
  auto opt_num = [](const std::optional<double>& v) { return v ? number(*v) : json(nullptr); };
  o.report = {{"J", J},
              {"theta", r.theta},
              {"M", th.M},
              {"l0", r.l0},
              {"lambda_total", r.lambda_total},
              {"lambda_low", r.lambda_low},
              {"low_sup_norm", r.low_sup_norm},
              {"tail", tail},
              {"tail_abs_sum", r.tail_abs_sum},
              {"diagonal", diag},
              {"certificate",
               {{"pass", r.pass},
                {"beta", r.beta},
                {"c0_fit", number(r.c0_fit)},
                {"decay_threshold", r.decay_threshold},
                {"tail_slope", opt_num(r.tail_slope)},
                {"diagonal_slope", opt_num(r.diagonal_slope)},
                {"decay_ok", r.decay_ok},
                {"tail_ok", r.tail_ok},
                {"diagonal_ok", r.diagonal_ok},
                {"failures", r.failures}}}};
  return o;
}

Output run_detect(const ExperimentConfig& cfg) {
  const json& p = cfg.params;
  const DyadicSet E = read_set(require_text(p, "set", "detect"));
  if (p.contains("J") && p.at("J").get<int>() != E.resolution())
    throw ConfigError("--J disagrees with the set file (J=" + std::to_string(E.resolution()) + ")");
  const PolynomialFamily fam = parse_family(get_or<std::string>(p, "family", "t,t^2"));
  const double kappa = get_or<double>(p, "kappa", default_kappa(E.resolution()));
  const auto tgrid = get_or<std::size_t>(p, "tgrid", 65536);
  const auto w = detect(E, fam, kappa, tgrid);
  const double cert = E.empty() ? 0.0 : average_certificate(E, fam, kappa, get_or<std::size_t>(p, "nodes", 0));
  Output o;
  o.csv.push_back({"point", "value", "cell"});
  json wj = nullptr;
  if (w) {
    wj = {{"x", w->x},
          {"t", w->t},
          {"points", w->points},
          {"cells", w->cells},
          {"resolution", w->resolution},
          {"margin_cells", w->margin_cells},
          {"margin", w->margin},
          {"nontrivial", w->nontrivial},
          {"verified", verify_witness(E, fam, *w, kappa)}};
    o.csv.push_back({"t", format_double(w->t), ""});
    for (std::size_t i = 0; i < w->points.size(); ++i)
      o.csv.push_back({std::to_string(i), format_double(w->points[i]), std::to_string(w->cells[i])});
  }
  o.report = {{"family", fam.to_string()}, {"J", E.resolution()}, {"set_cells", E.count()}, {"kappa", kappa},
              {"tgrid", tgrid},            {"witness", wj},         {"certificate", cert}};
  return o;
}

}  // namespace

std::vector<std::string> accepted_keys(const std::string& subcommand) {
  std::vector<std::string> keys;
  for (const auto& p : params())
    if (applies(p, subcommand)) keys.push_back(p.name);
  return keys;
}

ExperimentConfig parse_arguments(const std::vector<std::string>& args) {
  CLI::App app{"Polynomial progressions in fractal sets: numerical experiments", "fracprog"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.set_version_flag("--version", kVersion);

  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::vector<std::pair<std::string, CLI::Option*>> global_opts;
  std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> sub_opts;

  auto add = [&](CLI::App* target, const Param& p) {
    const std::string name = "--" + p.name;
    if (p.kind == Kind::flag) return target->add_flag(name, flags[p.name], p.help);
    return target->add_option(name, values[p.name], p.help);
  };
  for (const auto& p : params())
    if (p.subcommands.empty()) global_opts.emplace_back(p.name, add(&app, p));
  std::map<std::string, CLI::App*> subs;
  for (const auto& s : kSubcommands) {
    CLI::App* sub = app.add_subcommand(s, kSubcommandHelp.at(s));
    sub->fallthrough();
    subs[s] = sub;
    for (const auto& p : params())
      if (!p.subcommands.empty() && applies(p, s)) sub_opts[s].emplace_back(p.name, add(sub, p));
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  ExperimentConfig cfg;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    cfg.show_help = true;
    cfg.help_text = app.help();
    for (auto& [name, sub] : subs)
      if (sub->parsed()) cfg.help_text = sub->help();
    return cfg;
  } catch (const CLI::CallForVersion&) {
    cfg.show_help = true;
    cfg.help_text = std::string(kVersion) + "\n";
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  json file_cfg = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    try {
      file_cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + config_path + ": " + e.what());
    }
    if (!file_cfg.is_object()) throw ConfigError("config file must hold a JSON object");
  }

  for (auto& [name, sub] : subs)
    if (sub->parsed()) cfg.subcommand = name;
  if (file_cfg.contains("subcommand")) {
    if (!file_cfg["subcommand"].is_string()) throw ConfigError("config key 'subcommand' must be a string");
    if (cfg.subcommand.empty()) cfg.subcommand = file_cfg["subcommand"].get<std::string>();
    file_cfg.erase("subcommand");
  }
  if (cfg.subcommand.empty()) throw ConfigError("no subcommand given (one of measure, decay, sobolev-probe, pigeonhole, roth, detect)");
  if (std::find(kSubcommands.begin(), kSubcommands.end(), cfg.subcommand) == kSubcommands.end())
    throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");

  for (auto& [key, value] : file_cfg.items()) {
    const Param* p = find_param(key);
    if (!p || !applies(*p, cfg.subcommand))
      throw ConfigError("unknown config key '" + key + "' for " + cfg.subcommand);
    check_json_type(*p, value);
    cfg.params[key] = value;
  }
  auto overlay = [&](const std::vector<std::pair<std::string, CLI::Option*>>& opts) {
    for (const auto& [name, opt] : opts) {
      if (opt->count() == 0) continue;
      const Param& p = *find_param(name);
      cfg.params[name] = p.kind == Kind::flag ? json(flags[name]) : convert(p, values[name]);
    }
  };
  overlay(global_opts);
  overlay(sub_opts[cfg.subcommand]);

  // Validation that needs no computation.
  const json& p = cfg.params;
  if (p.contains("J")) resolution(p, 0);
  if (p.contains("threads") && p.at("threads").get<long long>() < 1) throw ConfigError("--threads must be >= 1");
  if (p.contains("seed") && p.at("seed").get<long long>() < 0) throw ConfigError("--seed must be >= 0");
  if (p.contains("format")) {
    const auto f = p.at("format").get<std::string>();
    if (f != "json" && f != "csv") throw ConfigError("--format must be json or csv");
  }
  for (const char* key : {"set", "f0"})
    if (p.contains(key) && !fs::is_regular_file(p.at(key).get<std::string>()))
      throw ConfigError(std::string("--") + key + ": no such file " + p.at(key).get<std::string>());
  if (p.contains("measure")) {
    const auto m = p.at("measure").get<std::string>();
    if (m != "lebesgue" && !fs::is_regular_file(m)) throw ConfigError("--measure: no such file " + m);
  }
  for (const char* key : {"out", "set-out"}) {
    if (!p.contains(key)) continue;
    const fs::path dir = fs::path(p.at(key).get<std::string>()).parent_path();
    if (!dir.empty() && !fs::is_directory(dir)) throw ConfigError(std::string("--") + key + ": directory " + dir.string() + " does not exist");
  }
  return cfg;
}

int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  (void)err;
  if (cfg.show_help) {
    out << cfg.help_text;
    return kOk;
  }
  const json& p = cfg.params;
  set_thread_count(static_cast<unsigned>(get_or<long long>(p, "threads", 1)));
  const auto start = std::chrono::steady_clock::now();

  Output o;
  if (cfg.subcommand == "measure") {
    o = run_measure(cfg);
  } else if (cfg.subcommand == "decay") {
    o = run_decay(cfg);
  } else if (cfg.subcommand == "sobolev-probe") {
    o = run_sobolev(cfg);
  } else if (cfg.subcommand == "pigeonhole") {
    o = run_pigeonhole(cfg);
  } else if (cfg.subcommand == "roth") {
    o = run_roth(cfg);
  } else if (cfg.subcommand == "detect") {
    o = run_detect(cfg);
  } else {
    throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
  }

  json doc = {{"manifest", manifest(cfg)}};
  if (get_or<bool>(p, "timing", false))
    doc["manifest"]["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  doc.update(o.report);

  if (cfg.subcommand == "measure") {
    const std::string text = doc.dump(2) + "\n";
    write_atomically(p.at("out").get<std::string>() + ".json", text);
    out << text;
    return kOk;
  }
  const bool csv = get_or<std::string>(p, "format", "json") == "csv";
  const std::string text = csv ? csv_rows(o.csv) : doc.dump(2) + "\n";
  if (p.contains("out")) {
    write_atomically(p.at("out").get<std::string>(), text);
  } else {
    out << text;
  }
  return kOk;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(parse_arguments(args), out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const RangeError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return kPreconditionError;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return kResourceError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

std::string config_hash(const json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomically(const std::string& path, const std::string& bytes) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + tmp.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw ConfigError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot move output into place at " + path + ": " + ec.message());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace fracprog::cli
