#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dtl/closure.hpp"
#include "dtl/finite_model.hpp"
#include "dtl/formula.hpp"
#include "dtl/json_io.hpp"
#include "dtl/quasimodel.hpp"
#include "dtl/search.hpp"
#include "dtl/temporal.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kUnknown = 2;
constexpr int kUsage = 64;
constexpr int kDataError = 65;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

dtl::Formula parse_formula(const std::string& text) {
  try {
    return dtl::parse(text);
  } catch (const dtl::ParseError& e) {
    throw InputError(e.what());
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void emit(const json& j) { std::cout << j.dump() << "\n"; }

json report_json(const dtl::ValidationReport& r) { return json::parse(dtl::to_json(r)); }

json type_json(const dtl::PhiType& t) {
  json members = json::array();
  for (const auto& m : t.members()) members.push_back(m.to_string());
  return members;
}

struct Limits {
  std::uint64_t units = 10'000'000;
  std::uint64_t ms = 0;
  unsigned workers = 1;

  dtl::Budget budget() const {
    dtl::Budget b;
    b.units = units;
    if (ms) b.wall = std::chrono::milliseconds(ms);
    b.workers = workers == 0 ? 1 : workers;
    return b;
  }
};

void add_limits(CLI::App* cmd, Limits& lim) {
  cmd->add_option("--budget-units", lim.units, "Work-unit budget, 0 for none")->capture_default_str();
  cmd->add_option("--budget-ms", lim.ms, "Wall-clock limit in ms, 0 for none (results then depend on timing)");
}

int cmd_parse(const std::string& text) {
  const auto phi = parse_formula(text);
  const auto c = dtl::Closure::of(phi);
  json vars = json::array();
  for (const auto& v : dtl::variables(phi)) vars.push_back(v);
  emit({{"formula", phi.to_string()}, {"length", c->length()}, {"closure_size", c->size()}, {"variables", vars}});
  return kOk;
}

int cmd_types(const std::string& text) {
  const auto phi = parse_formula(text);
  const auto c = dtl::Closure::of(phi);
  std::vector<dtl::PhiType> types;
  try {
    types = dtl::enumerate_types(c);
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnknown;
  }
  json closure = json::array();
  for (const auto& f : c->entries()) closure.push_back(f.to_string());
  json out = json::array();
  for (const auto& t : types) out.push_back(type_json(t));
  emit({{"closure", closure}, {"count", types.size()}, {"types", out}});
  return kOk;
}

int cmd_check_quasimodel(const std::string& file, const std::string& text) {
  const auto phi = parse_formula(text);
  const auto c = dtl::Closure::of(phi);
  std::vector<std::string> warnings;
  dtl::Quasimodel q;
  try {
    q = dtl::quasimodel_from_json(read_file(file), c, &warnings);
  } catch (const dtl::FormatError& e) {
    throw InputError(e.what());
  }
  print_warnings(warnings);
  const auto report = dtl::validate_quasimodel(q);
  json out = {{"verdict", report.empty() ? "valid" : "invalid"}, {"report", report_json(report)}};
  if (report.empty()) {
    const auto at = dtl::satisfies(q, phi);
    out["satisfied_at"] = at ? json(*at) : json(nullptr);
  }
  emit(out);
  return report.empty() ? kOk : kDataError;
}

int cmd_eval(const std::string& file, const std::string& text) {
  const auto phi = parse_formula(text);
  dtl::FiniteDynModel m;
  try {
    m = dtl::model_from_json(read_file(file));
  } catch (const dtl::FormatError& e) {
    throw InputError(e.what());
  }
  const auto report = dtl::validate_model(m);
  if (!report.empty()) {
    emit({{"verdict", "invalid-model"}, {"report", report_json(report)}});
    return kDataError;
  }
  const auto ext = dtl::evaluate(m, phi);
  const dtl::Row set = ext.at(phi);
  json points = json::array();
  dtl::for_each_bit(set, [&](std::size_t x) { points.push_back(x); });
  const dtl::Row all = m.points == 64 ? ~dtl::Row{0} : (dtl::Row{1} << m.points) - 1;
  emit({{"verdict", set == all ? "true-everywhere" : "not-true-everywhere"}, {"extension", points}});
  return kOk;
}

int cmd_oracle(const std::string& text, std::size_t max_points, const Limits& lim) {
  const auto phi = parse_formula(text);
  const auto r = dtl::oracle_refute(phi, max_points, lim.budget());
  json out;
  out["work"] = r.work;
  switch (r.status) {
    case dtl::OracleStatus::Found:
      out["verdict"] = "COUNTERMODEL";
      out["certificate"] = json::parse(dtl::to_json(*r.model));
      out["point"] = *r.point;
      break;
    case dtl::OracleStatus::Exhausted:
      // Finite models validate more than DTL does; this is not a validity claim.
      out["verdict"] = "NO_FINITE_COUNTERMODEL";
      out["max_points"] = max_points;
      out["certificate"] = nullptr;
      break;
    case dtl::OracleStatus::Budget:
      out["verdict"] = "UNKNOWN";
      out["certificate"] = nullptr;
      break;
  }
  emit(out);
  return r.status == dtl::OracleStatus::Budget ? kUnknown : kOk;
}

int cmd_sat(const std::string& text, std::size_t max_worlds, const Limits& lim) {
  const auto phi = parse_formula(text);
  const auto r = dtl::find_satisfying_quasimodel(phi, max_worlds, lim.budget());
  json out;
  out["work"] = r.work;
  switch (r.status) {
    case dtl::SearchStatus::Found:
      out["verdict"] = "SATISFIABLE";
      out["certificate"] = json::parse(dtl::to_json(*r.model));
      out["satisfied_at"] = *dtl::satisfies(*r.model, phi);
      break;
    case dtl::SearchStatus::Exhausted:
      out["verdict"] = "NO_QUASIMODEL";
      out["max_worlds"] = max_worlds;
      out["certificate"] = nullptr;
      break;
    case dtl::SearchStatus::Budget:
      out["verdict"] = "UNKNOWN";
      out["certificate"] = nullptr;
      break;
  }
  emit(out);
  return r.status == dtl::SearchStatus::Budget ? kUnknown : kOk;
}

int cmd_valid(const std::string& text, std::size_t max_depth, const Limits& lim) {
  const auto phi = parse_formula(text);
  const auto r = dtl::decide_validity(phi, max_depth, lim.budget());
  json out;
  out["verdict"] = dtl::to_string(r.verdict);
  out["certificate"] = r.certificate ? json::parse(dtl::to_json(*r.certificate)) : json(nullptr);
  if (r.depth) out["depth"] = *r.depth;
  json depths = json::array();
  for (const auto& d : r.depths) {
    depths.push_back({{"depth", d.depth},
                      {"certifier", dtl::to_string(d.certifier)},
                      {"families", d.families.empty() ? "not-run" : d.families},
                      {"work", d.work}});
  }
  out["depths"] = depths;
  out["work"] = r.work;
  emit(out);
  return r.verdict == dtl::Verdict::Unknown ? kUnknown : kOk;
}

int cmd_export_dot(const std::string& file) {
  dtl::RawFrame raw;
  try {
    raw = dtl::parse_raw_frame(read_file(file));
  } catch (const dtl::FormatError& e) {
    throw InputError(e.what());
  }
  if (!raw.order_was_closed) print_warnings({"order was not a preorder; drawing its reflexive-transitive closure"});
  std::cout << dtl::raw_frame_to_dot(raw);
  return kOk;
}

int cmd_check_relation(const std::string& file, const std::string& text) {
  const auto phi = parse_formula(text);
  const auto c = dtl::Closure::of(phi);
  std::vector<std::string> warnings;
  std::optional<dtl::FrameRelation> rel;
  try {
    rel = dtl::relation_from_json(read_file(file), c, &warnings);
  } catch (const dtl::FormatError& e) {
    throw InputError(e.what());
  }
  print_warnings(warnings);
  const bool root = rel->contains(rel->source.root(), rel->target.root());
  json cond = {{"total", dtl::is_total(*rel)},
               {"sensible", dtl::is_sensible(*rel)},
               {"continuous", dtl::is_continuous(*rel)},
               {"non_confluent", dtl::is_non_confluent(*rel)},
               {"root_to_root", root}};
  const bool ok = dtl::is_successor_witness(*rel);
  const bool exists = dtl::temporal_successor(rel->source, rel->target).has_value();
  emit({{"verdict", ok ? "witness" : "not-a-witness"}, {"conditions", cond}, {"successor_exists", exists}});
  return ok ? kOk : kDataError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic topological logic: quasimodels, finite models and validity search"};
  app.require_subcommand(1);
  unsigned workers = 1;
  app.add_option("--workers", workers, "Worker threads for parallel searches")->capture_default_str();

  std::string formula, file;
  std::size_t max_points = 3, max_worlds = 3, max_depth = 2;
  Limits lim;

  auto* parse_cmd = app.add_subcommand("parse", "Parse a formula and print its canonical form");
  parse_cmd->add_option("formula", formula)->required();

  auto* types_cmd = app.add_subcommand("types", "List the closure and all types of a formula");
  types_cmd->add_option("formula", formula)->required();

  auto* check_cmd = app.add_subcommand("check-quasimodel", "Validate a quasimodel JSON file");
  check_cmd->add_option("file", file)->required();
  check_cmd->add_option("formula", formula)->required();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a formula on a finite dynamic model");
  eval_cmd->add_option("model", file)->required();
  eval_cmd->add_option("formula", formula)->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "Search finite Aleksandroff countermodels");
  oracle_cmd->add_option("formula", formula)->required();
  oracle_cmd->add_option("--max-points", max_points)->capture_default_str()->check(CLI::Range(1, 7));
  add_limits(oracle_cmd, lim);

  auto* sat_cmd = app.add_subcommand("sat", "Search a quasimodel satisfying a formula");
  sat_cmd->add_option("formula", formula)->required();
  sat_cmd->add_option("--max-worlds", max_worlds)->capture_default_str()->check(CLI::Range(1, 7));
  add_limits(sat_cmd, lim);

  auto* valid_cmd = app.add_subcommand("valid", "Semi-decide validity by iterative deepening");
  valid_cmd->add_option("formula", formula)->required();
  valid_cmd->add_option("--max-depth", max_depth)->capture_default_str();
  add_limits(valid_cmd, lim);

  auto* dot_cmd = app.add_subcommand("export-dot", "Render a frame or quasimodel JSON file as DOT");
  dot_cmd->add_option("file", file)->required();

  auto* rel_cmd = app.add_subcommand("check-relation", "Check a temporal successor witness JSON file");
  rel_cmd->add_option("file", file)->required();
  rel_cmd->add_option("formula", formula)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  lim.workers = workers;

  try {
    if (*parse_cmd) return cmd_parse(formula);
    if (*types_cmd) return cmd_types(formula);
    if (*check_cmd) return cmd_check_quasimodel(file, formula);
    if (*eval_cmd) return cmd_eval(file, formula);
    if (*oracle_cmd) return cmd_oracle(formula, max_points, lim);
    if (*sat_cmd) return cmd_sat(formula, max_worlds, lim);
    if (*valid_cmd) return cmd_valid(formula, max_depth, lim);
    if (*dot_cmd) return cmd_export_dot(file);
    if (*rel_cmd) return cmd_check_relation(file, formula);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}
