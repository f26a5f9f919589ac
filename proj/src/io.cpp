#include "gausskraft/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gausskraft {

namespace {

void emit(const Json& v, int indent, int level, std::string& out) {
  const auto pad = [&](int l) { out.append(static_cast<std::size_t>(indent * l), ' '); };
  switch (v.type()) {
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", d);
        out += buf;
      }
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const Json& e : v) flat = flat && !e.is_structured();
      out += '[';
      bool first = true;
      for (const Json& e : v) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) {
          out += '\n';
          pad(level + 1);
        }
        emit(e, indent, level + 1, out);
      }
      if (!flat) {
        out += '\n';
        pad(level);
      }
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, val] : v.items()) {
        if (!first) out += ',';
        first = false;
        out += '\n';
        pad(level + 1);
        out += Json(key).dump();
        out += ": ";
        emit(val, indent, level + 1, out);
      }
      out += '\n';
      pad(level);
      out += '}';
      return;
    }
    default:
      out += v.dump();
  }
}

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

double finite_number(const Json& j, const std::string& what) {
  if (!j.is_number()) parse_fail(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(what + " must be finite");
  return v;
}

std::vector<double> number_array(const Json& j, const std::string& what) {
  if (!j.is_array()) parse_fail(what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const Json& e : j) out.push_back(finite_number(e, what + " entry"));
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Json vec_json(const Vec3& v, int dimension) {
  if (dimension == 1) return Json::array({v.x, v.y});
  return Json::array({v.x, v.y, v.z});
}

Json doubles(const std::vector<double>& v) { return Json(v); }

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  emit(value, indent, 0, out);
  out += '\n';
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    parse_fail(path.string() + ": " + e.what());
  }
}

ProblemInstance instance_from_json(const Json& j) {
  const Json& dim = field(j, "dimension");
  if (!dim.is_number_integer()) parse_fail("dimension must be an integer");
  const int n = dim.get<int>();
  if (n != 1 && n != 2) parse_fail("dimension must be 1 or 2");
  const Json& pts = field(j, "points");
  if (!pts.is_array()) parse_fail("points must be an array");
  const std::vector<double> mu = number_array(field(j, "mu"), "mu");
  if (pts.size() != mu.size()) parse_fail("points and mu differ in length");
  std::vector<UnitVec> dirs;
  dirs.reserve(pts.size());
  for (const Json& p : pts) {
    const std::vector<double> c = number_array(p, "point");
    if (c.size() != static_cast<std::size_t>(n) + 1 && !(n == 1 && c.size() == 3)) {
      parse_fail("point has " + std::to_string(c.size()) + " coordinates");
    }
    try {
      dirs.push_back(normalize(c));
    } catch (const Error& e) {
      parse_fail(e.what());
    }
  }
  try {
    return ProblemInstance::create(n, std::move(dirs), mu);
  } catch (const Error& e) {
    parse_fail(e.what());
  }
}

Json instance_to_json(const ProblemInstance& instance) {
  Json pts = Json::array();
  for (const UnitVec& d : instance.directions()) pts.push_back(vec_json(d, instance.dimension()));
  Json j;
  j["dimension"] = instance.dimension();
  j["points"] = std::move(pts);
  j["mu"] = doubles(instance.mu());
  return j;
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(read_json_file(path));
}

DensitySpec density_from_json(const Json& j) {
  const Json& kind = field(j, "kind");
  if (!kind.is_string()) parse_fail("kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "uniform") return UniformDensity{};
  if (k == "cosine_power_bump") {
    CosinePowerBump b;
    if (j.contains("axis")) {
      try {
        b.axis = normalize(number_array(j.at("axis"), "axis"));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        parse_fail(e.what());
      }
    }
    b.power = finite_number(field(j, "power"), "power");
    b.floor = finite_number(field(j, "floor"), "floor");
    return b;
  }
  if (k == "tabulated") {
    const Json& level = field(j, "level");
    if (!level.is_number_integer()) parse_fail("level must be an integer");
    return TabulatedDensity{level.get<int>(), number_array(field(j, "values"), "values")};
  }
  parse_fail("unknown density kind \"" + k + "\"");
}

Json density_to_json(const DensitySpec& density) {
  Json j;
  if (std::holds_alternative<UniformDensity>(density)) {
    j["kind"] = "uniform";
  } else if (const auto* b = std::get_if<CosinePowerBump>(&density)) {
    j["kind"] = "cosine_power_bump";
    j["axis"] = vec_json(b->axis, 2);
    j["power"] = b->power;
    j["floor"] = b->floor;
  } else {
    const auto& t = std::get<TabulatedDensity>(density);
    j["kind"] = "tabulated";
    j["level"] = t.level;
    j["values"] = doubles(t.values);
  }
  return j;
}

DensitySpec load_density(const std::string& path_or_name) {
  if (path_or_name == "uniform") return UniformDensity{};
  if (path_or_name == "bump") return CosinePowerBump{UnitVec::trusted({0, 0, 1}), 2.0, 0.1};
  return density_from_json(read_json_file(path_or_name));
}

Json report_to_json(const AdmissibilityReport& report) {
  Json j;
  j["ok"] = report.ok();
  j["mass_balance"] = {{"ok", report.mass_balance.ok}, {"residual", report.mass_balance.residual}};
  Json pos = {{"ok", report.positivity.ok}};
  if (report.positivity.worst_index) pos["worst_index"] = *report.positivity.worst_index;
  j["positivity"] = std::move(pos);
  Json hemi = {{"ok", report.hemisphere.ok}};
  if (report.hemisphere.witness) hemi["witness"] = vec_json(*report.hemisphere.witness, 2);
  j["hemisphere"] = std::move(hemi);
  j["vertex_bound"] = {{"ok", report.vertex_bound.ok},
                       {"worst_index", report.vertex_bound.worst_index}};
  const auto& cone = report.cone_check;
  Json c;
  c["status"] = cone.status == ConeStatus::NotRun   ? "NotRun"
                : cone.status == ConeStatus::Passed ? "Passed"
                                                    : "FailedWithCone";
  if (cone.status == ConeStatus::FailedWithCone) c["generators"] = cone.generators;
  c["cones_checked"] = cone.cones_checked;
  j["cone_check"] = std::move(c);
  return j;
}

Json config_to_json(const SolveConfig& config) {
  Json j;
  j["max_iters"] = config.max_iters;
  j["mass_tol"] = config.mass_tol;
  j["quad_tol"] = config.quad_tol;
  j["policy"] = std::string(to_string(config.policy));
  j["lbfgs_memory"] = config.lbfgs_memory;
  j["degeneration_threshold"] = config.degeneration_threshold;
  j["max_step"] = config.max_step;
  j["skip_validation"] = config.skip_validation;
  return j;
}

Json solution_to_json(const SolveReport& report, const SolveConfig& config, double duality_gap) {
  std::vector<double> radii;
  radii.reserve(report.log_radii.size());
  for (double r : report.log_radii) radii.push_back(std::exp(r));
  Json j;
  j["log_radii"] = doubles(report.log_radii);
  j["radii"] = std::move(radii);
  j["Q"] = report.Q_star;
  j["residual"] = report.residual;
  j["cell_areas"] = doubles(report.cell_areas);
  j["duality_gap"] = duality_gap;
  j["status"] = std::string(to_string(report.status));
  j["iterations"] = report.iterations;
  if (report.status == SolveStatus::Degenerated) {
    j["witness"] = report.witness;
    j["collapsing"] = report.collapsing;
  }
  j["config"] = config_to_json(config);
  return j;
}

Json plan_to_json(const LpResult& result) {
  const int dim = result.plan.dimension;
  Json samples = Json::array();
  for (const UnitVec& s : result.plan.samples) samples.push_back(vec_json(s, dim));
  Json entries = Json::array();
  for (const PlanEntry& e : result.plan.entries) entries.push_back(Json::array({e.source, e.sample, e.mass}));
  Json j;
  j["value"] = result.value;
  j["samples"] = std::move(samples);
  j["weights"] = doubles(result.plan.weights);
  j["entries"] = std::move(entries);
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::InvalidInput, "failed writing " + path.string());
}

}  // namespace gausskraft
