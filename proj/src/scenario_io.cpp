#include "snapbeam/scenario_io.hpp"

#include "snapbeam/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace snapbeam {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError("schema violation at " + where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void require_array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; }))
      fail(where, "unknown key '" + item.key() + "'");
  }
}

const json& field(const json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& where, const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_number()) fail(where, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

int integer(const json& j, const std::string& where, const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_number_integer()) fail(where, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::string text(const json& j, const std::string& where, const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_string()) fail(where, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

DofRef dof_ref(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  require_object(j, where);
  only_keys(j, where, keys);
  DofRef d;
  d.node = integer(j, where, "node");
  auto kind = parse_dof_kind(text(j, where, "dof"));
  if (!kind) fail(where, "dof must be one of u, w, theta");
  d.kind = *kind;
  return d;
}

json dof_json(const DofRef& d) { return json{{"node", d.node}, {"dof", to_string(d.kind)}}; }

ContinuationSettings parse_settings(const json& j) {
  const std::string where = "solver";
  require_object(j, where);
  only_keys(j, where,
            {"method", "control_dof", "initial_step", "min_step", "max_step", "max_steps", "newton_tol",
             "max_newton_iters", "target_lambda", "target_displacement"});
  ContinuationSettings s;
  if (j.contains("method")) {
    auto m = parse_method(text(j, where, "method"));
    if (!m) fail(where, "method must be load_control, displacement_control or arc_length");
    s.method = *m;
  }
  if (j.contains("control_dof")) s.control_dof = dof_ref(j["control_dof"], "solver.control_dof", {"node", "dof"});
  if (j.contains("initial_step")) s.initial_step = number(j, where, "initial_step");
  if (j.contains("min_step")) s.min_step = number(j, where, "min_step");
  if (j.contains("max_step")) s.max_step = number(j, where, "max_step");
  if (j.contains("max_steps")) s.max_steps = integer(j, where, "max_steps");
  if (j.contains("newton_tol")) s.newton_tol = number(j, where, "newton_tol");
  if (j.contains("max_newton_iters")) s.max_newton_iters = integer(j, where, "max_newton_iters");
  if (j.contains("target_lambda")) s.target_lambda = number(j, where, "target_lambda");
  if (j.contains("target_displacement")) s.target_displacement = number(j, where, "target_displacement");
  return s;
}

json settings_json(const ContinuationSettings& s) {
  json j;
  j["method"] = to_string(s.method);
  if (s.control_dof) j["control_dof"] = dof_json(*s.control_dof);
  j["initial_step"] = s.initial_step;
  j["min_step"] = s.min_step;
  j["max_step"] = s.max_step;
  j["max_steps"] = s.max_steps;
  j["newton_tol"] = s.newton_tol;
  j["max_newton_iters"] = s.max_newton_iters;
  if (s.target_lambda) j["target_lambda"] = *s.target_lambda;
  if (s.target_displacement) j["target_displacement"] = *s.target_displacement;
  return j;
}

}  // namespace

Scenario parse_scenario(const std::string& document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("schema violation: not valid JSON: ") + e.what());
  }
  require_object(root, "document");
  only_keys(root, "document", {"name", "nodes", "elements", "materials", "bcs", "load", "solver"});

  Scenario sc;
  if (root.contains("name")) sc.name = text(root, "document", "name");
  Model& m = sc.model;

  // Nodes, sorted by id; ids must be unique and contiguous from 0.
  const json& nodes = field(root, "document", "nodes");
  require_array(nodes, "nodes");
  std::set<int> seen;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    require_object(nodes[i], where);
    only_keys(nodes[i], where, {"id", "x", "y"});
    NodeGeom n{integer(nodes[i], where, "id"), number(nodes[i], where, "x"), number(nodes[i], where, "y")};
    if (!seen.insert(n.id).second) fail("node " + std::to_string(n.id), "duplicate node id");
    m.nodes.push_back(n);
  }
  std::sort(m.nodes.begin(), m.nodes.end(), [](const NodeGeom& a, const NodeGeom& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    if (m.nodes[i].id != static_cast<int>(i))
      fail("node " + std::to_string(m.nodes[i].id), "node ids must be contiguous from 0");
  }

  const json& materials = field(root, "document", "materials");
  require_object(materials, "materials");
  for (const auto& item : materials.items()) {
    const std::string where = "material " + item.key();
    require_object(item.value(), where);
    only_keys(item.value(), where, {"E", "A", "I", "rho"});
    Material mat;
    mat.name = item.key();
    mat.youngs_modulus = number(item.value(), where, "E");
    mat.area = number(item.value(), where, "A");
    mat.second_moment = number(item.value(), where, "I");
    mat.mass_density = item.value().contains("rho") ? number(item.value(), where, "rho") : 0.0;
    m.materials.push_back(mat);
  }

  const json& elements = field(root, "document", "elements");
  require_array(elements, "elements");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const std::string where = "element " + std::to_string(i);
    require_object(elements[i], where);
    only_keys(elements[i], where, {"a", "b", "material"});
    const int a = integer(elements[i], where, "a");
    const int b = integer(elements[i], where, "b");
    const std::string mat = text(elements[i], where, "material");
    auto it = std::find_if(m.materials.begin(), m.materials.end(), [&](const Material& x) { return x.name == mat; });
    if (it == m.materials.end()) fail(where, "unknown material '" + mat + "'");
    const auto count = static_cast<int>(m.nodes.size());
    if (a < 0 || a >= count || b < 0 || b >= count) fail(where, "references a missing node");
    m.elements.push_back(make_element(m.nodes, a, b, static_cast<std::size_t>(it - m.materials.begin())));
  }

  const json& bcs = field(root, "document", "bcs");
  require_object(bcs, "bcs");
  only_keys(bcs, "bcs", {"fixed", "prescribed"});
  if (bcs.contains("fixed")) {
    require_array(bcs["fixed"], "bcs.fixed");
    for (std::size_t i = 0; i < bcs["fixed"].size(); ++i)
      m.bcs.fixed.push_back(dof_ref(bcs["fixed"][i], "bcs.fixed[" + std::to_string(i) + "]", {"node", "dof"}));
  }
  if (bcs.contains("prescribed")) {
    require_array(bcs["prescribed"], "bcs.prescribed");
    for (std::size_t i = 0; i < bcs["prescribed"].size(); ++i) {
      const std::string where = "bcs.prescribed[" + std::to_string(i) + "]";
      const json& p = bcs["prescribed"][i];
      m.bcs.prescribed.push_back(PrescribedDof{dof_ref(p, where, {"node", "dof", "value"}), number(p, where, "value")});
    }
  }

  const json& load = field(root, "document", "load");
  require_object(load, "load");
  only_keys(load, "load", {"forces", "gravity", "gravity_vector"});
  if (load.contains("forces")) {
    require_array(load["forces"], "load.forces");
    for (std::size_t i = 0; i < load["forces"].size(); ++i) {
      const std::string where = "load.forces[" + std::to_string(i) + "]";
      const json& f = load["forces"][i];
      m.load.reference_forces.push_back(NodalForce{dof_ref(f, where, {"node", "dof", "value"}), number(f, where, "value")});
    }
  }
  if (load.contains("gravity")) {
    if (!load["gravity"].is_boolean()) fail("load", "field 'gravity' must be a boolean");
    m.load.gravity_enabled = load["gravity"].get<bool>();
  }
  if (load.contains("gravity_vector")) {
    const json& g = load["gravity_vector"];
    if (!g.is_array() || g.size() != 2 || !g[0].is_number() || !g[1].is_number())
      fail("load", "gravity_vector must be [gx, gy]");
    m.load.gravity = {g[0].get<double>(), g[1].get<double>()};
  }

  if (root.contains("solver")) sc.solver = parse_settings(root["solver"]);

  const auto diagnostics = validate(m);
  if (!diagnostics.empty()) {
    std::ostringstream msg;
    msg << "validation failed:";
    for (const Diagnostic& d : diagnostics) msg << " [" << d.entity << ": " << d.message << "]";
    throw ScenarioError(msg.str());
  }
  if (const std::string bad = check_settings(sc.solver, m); !bad.empty())
    throw ScenarioError("validation failed: [solver: " + bad + "]");
  return sc;
}

Model load_scenario(const std::string& document) { return parse_scenario(document).model; }

namespace {

json model_json(const Model& m) {
  json root;
  json nodes = json::array();
  for (const NodeGeom& n : m.nodes) nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
  root["nodes"] = nodes;

  json materials = json::object();
  for (const Material& mat : m.materials)
    materials[mat.name] = {{"E", mat.youngs_modulus}, {"A", mat.area}, {"I", mat.second_moment}, {"rho", mat.mass_density}};
  root["materials"] = materials;

  json elements = json::array();
  for (const Element& e : m.elements)
    elements.push_back({{"a", e.node_a}, {"b", e.node_b}, {"material", m.materials.at(e.material).name}});
  root["elements"] = elements;

  json fixed = json::array();
  for (const DofRef& d : m.bcs.fixed) fixed.push_back(dof_json(d));
  json prescribed = json::array();
  for (const PrescribedDof& p : m.bcs.prescribed) {
    json j = dof_json(p.dof);
    j["value"] = p.value;
    prescribed.push_back(j);
  }
  root["bcs"] = {{"fixed", fixed}, {"prescribed", prescribed}};

  json forces = json::array();
  for (const NodalForce& f : m.load.reference_forces) {
    json j = dof_json(f.dof);
    j["value"] = f.value;
    forces.push_back(j);
  }
  root["load"] = {{"forces", forces},
                  {"gravity", m.load.gravity_enabled},
                  {"gravity_vector", {m.load.gravity[0], m.load.gravity[1]}}};
  return root;
}

}  // namespace

std::string serialize(const Scenario& scenario) {
  json root;
  root["name"] = scenario.name;
  const json model = model_json(scenario.model);
  for (const auto& item : model.items()) root[item.key()] = item.value();
  root["solver"] = settings_json(scenario.solver);
  return root.dump(2) + "\n";
}

std::string serialize(const Model& model) { return model_json(model).dump(2) + "\n"; }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

Scenario read_scenario_file(const std::string& path) { return parse_scenario(read_text_file(path)); }

}  // namespace snapbeam
