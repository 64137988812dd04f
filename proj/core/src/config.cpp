#include "ensflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace ensflow {

ManifestError::ManifestError(const std::string& what, std::string key, int line)
    : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      key_(std::move(key)),
      line_(line) {}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::green_taylor_convergence: return "green_taylor_convergence";
    case Experiment::offset_cylinders_stability: return "offset_cylinders_stability";
    case Experiment::custom: return "custom";
  }
  return "custom";
}

std::string_view to_string(RunMode m) { return m == RunMode::ensemble ? "ensemble" : "independent"; }

std::string_view to_string(InitialKind k) {
  switch (k) {
    case InitialKind::green_taylor: return "green_taylor";
    case InitialKind::stokes: return "stokes";
    case InitialKind::zero: return "zero";
  }
  return "zero";
}

std::string_view to_string(ForcingKind k) {
  switch (k) {
    case ForcingKind::green_taylor: return "green_taylor";
    case ForcingKind::offset_cylinders: return "offset_cylinders";
    case ForcingKind::zero: return "zero";
  }
  return "zero";
}

RunMode parse_run_mode(std::string_view text) {
  if (text == "ensemble") return RunMode::ensemble;
  if (text == "independent") return RunMode::independent;
  throw ManifestError("mode must be ensemble or independent, got '" + std::string(text) + "'", "mode");
}

double RunManifest::nu_bar() const {
  if (nu.empty()) throw ManifestError("nu is empty", "nu");
  double sum = 0.0;
  for (double v : nu) sum += v;
  return sum / static_cast<double>(nu.size());
}

namespace {

enum class Kind { number, integer, boolean, string, number_list, integer_list };

struct KeySpec {
  const char* name;
  Kind kind;
};

constexpr KeySpec kKeys[] = {
    {"experiment", Kind::string},      {"J", Kind::integer},
    {"nu", Kind::number_list},         {"mu", Kind::number},
    {"epsilon", Kind::number},         {"dt", Kind::number},
    {"dt_over_h", Kind::number},       {"T", Kind::number},
    {"mesh.m", Kind::integer},         {"mesh.file", Kind::string},
    {"mesh.sequence", Kind::integer_list}, {"ic.kind", Kind::string},
    {"ic.scale", Kind::number_list},   {"ic.stokes_nu", Kind::number},
    {"forcing.kind", Kind::string},    {"green_taylor.omega", Kind::integer},
    {"green_taylor.tau", Kind::number}, {"adapt_dt", Kind::boolean},
    {"mode", Kind::string},            {"parallel_members", Kind::integer},
    {"output.dir", Kind::string},      {"output.store_fields", Kind::boolean},
    {"output.vtk_every", Kind::integer}, {"output.energy_bound", Kind::boolean},
};

const KeySpec* find_key(std::string_view key) {
  for (const auto& k : kKeys)
    if (key == k.name) return &k;
  return nullptr;
}

struct RawValue {
  std::string text;
  int line;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class Entries {
 public:
  explicit Entries(std::map<std::string, RawValue> raw) : raw_(std::move(raw)) {}

  bool has(const std::string& key) const { return raw_.count(key) != 0; }

  double number(const std::string& key) const { return parse_number(key, text(key)); }

  int integer(const std::string& key) const { return parse_integer(key, text(key)); }

  bool boolean(const std::string& key) const {
    const std::string_view v = text(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw error(key, "expected true or false, got '" + std::string(v) + "'");
  }

  std::string string(const std::string& key) const {
    std::string_view v = text(key);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    if (v.empty()) throw error(key, "expected a non-empty string");
    return std::string(v);
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (auto item : items(key)) out.push_back(parse_number(key, item));
    return out;
  }

  std::vector<int> integers(const std::string& key) const {
    std::vector<int> out;
    for (auto item : items(key)) out.push_back(parse_integer(key, item));
    return out;
  }

  ManifestError error(const std::string& key, const std::string& what) const {
    const auto it = raw_.find(key);
    return ManifestError(key + ": " + what, key, it == raw_.end() ? 0 : it->second.line);
  }

 private:
  std::string_view text(const std::string& key) const { return raw_.at(key).text; }

  std::vector<std::string_view> items(const std::string& key) const {
    std::string_view v = text(key);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
      throw error(key, "expected a bracketed list, got '" + std::string(v) + "'");
    v = trim(v.substr(1, v.size() - 2));
    std::vector<std::string_view> out;
    if (v.empty()) return out;
    std::size_t start = 0;
    while (true) {
      const auto comma = v.find(',', start);
      const auto item = trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start));
      if (item.empty()) throw error(key, "empty list element");
      out.push_back(item);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }

  double parse_number(const std::string& key, std::string_view v) const {
    double value = 0.0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
      throw error(key, "expected a number, got '" + std::string(v) + "'");
    return value;
  }

  int parse_integer(const std::string& key, std::string_view v) const {
    int value = 0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, value);
    if (ec != std::errc() || ptr != end) throw error(key, "expected an integer, got '" + std::string(v) + "'");
    return value;
  }

  std::map<std::string, RawValue> raw_;
};

std::map<std::string, RawValue> split_lines(std::string_view text) {
  std::map<std::string, RawValue> raw;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ManifestError("expected 'key = value'", {}, line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ManifestError("missing key before '='", {}, line_no);
    if (!find_key(key)) throw ManifestError("unknown key '" + key + "'", key, line_no);
    if (value.empty()) throw ManifestError(key + ": missing value", key, line_no);
    if (raw.count(key)) throw ManifestError("duplicate key '" + key + "'", key, line_no);
    raw.emplace(key, RawValue{value, line_no});
  }
  return raw;
}

Experiment parse_experiment(const Entries& e) {
  const std::string v = e.string("experiment");
  if (v == "green_taylor_convergence") return Experiment::green_taylor_convergence;
  if (v == "offset_cylinders_stability") return Experiment::offset_cylinders_stability;
  if (v == "custom") return Experiment::custom;
  throw e.error("experiment",
                "expected green_taylor_convergence, offset_cylinders_stability or custom, got '" + v + "'");
}

InitialKind parse_initial(const Entries& e) {
  const std::string v = e.string("ic.kind");
  if (v == "green_taylor") return InitialKind::green_taylor;
  if (v == "stokes") return InitialKind::stokes;
  if (v == "zero") return InitialKind::zero;
  throw e.error("ic.kind", "expected green_taylor, stokes or zero, got '" + v + "'");
}

ForcingKind parse_forcing(const Entries& e) {
  const std::string v = e.string("forcing.kind");
  if (v == "green_taylor") return ForcingKind::green_taylor;
  if (v == "offset_cylinders") return ForcingKind::offset_cylinders;
  if (v == "zero") return ForcingKind::zero;
  throw e.error("forcing.kind", "expected green_taylor, offset_cylinders or zero, got '" + v + "'");
}

void require_positive(const Entries& e, const std::string& key, double v) {
  if (!(v > 0.0)) throw e.error(key, "must be positive");
}

}  // namespace

RunManifest parse_config(std::string_view text) {
  const Entries e(split_lines(text));
  std::vector<std::string> missing;
  for (const char* key : {"experiment", "nu"})
    if (!e.has(key)) missing.emplace_back(key);
  if (!missing.empty()) {
    std::string list;
    for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
    throw ManifestError("missing required keys: " + list, missing.front());
  }

  RunManifest m;
  m.experiment = parse_experiment(e);
  m.nu = e.numbers("nu");
  if (m.nu.empty()) throw e.error("nu", "needs at least one viscosity");
  for (double v : m.nu) require_positive(e, "nu", v);
  if (e.has("J") && e.integer("J") != m.members())
    throw e.error("J", "is " + std::to_string(e.integer("J")) + " but nu lists " + std::to_string(m.members()) +
                           " viscosities");
  const int J = m.members();

  // Experiment-dependent defaults.
  switch (m.experiment) {
    case Experiment::green_taylor_convergence:
      m.ic_kind = InitialKind::green_taylor;
      m.forcing_kind = ForcingKind::green_taylor;
      m.T = 1.0;
      m.ic_scale.resize(J);
      for (int j = 0; j < J; ++j) m.ic_scale[j] = j % 2 == 0 ? 1.0 + 1e-3 : 1.0 - 1e-3;
      break;
    case Experiment::offset_cylinders_stability:
      m.ic_kind = InitialKind::stokes;
      m.forcing_kind = ForcingKind::offset_cylinders;
      m.dt = 0.01;
      m.T = 5.0;
      m.ic_scale.assign(J, 1.0);
      break;
    case Experiment::custom:
      m.ic_scale.assign(J, 1.0);
      break;
  }

  if (e.has("mu")) {
    m.mu = e.number("mu");
    if (!(*m.mu >= 0.0 && *m.mu < 1.0)) throw e.error("mu", "must lie in [0, 1)");
  }
  if (e.has("epsilon")) {
    m.epsilon = e.number("epsilon");
    require_positive(e, "epsilon", *m.epsilon);
  }
  if (e.has("dt")) {
    m.dt = e.number("dt");
    require_positive(e, "dt", *m.dt);
  }
  if (e.has("dt_over_h")) {
    m.dt_over_h = e.number("dt_over_h");
    require_positive(e, "dt_over_h", m.dt_over_h);
  }
  if (e.has("T")) {
    m.T = e.number("T");
    require_positive(e, "T", m.T);
  }

  if (e.has("mesh.m")) {
    m.mesh_m = e.integer("mesh.m");
    if (*m.mesh_m < 1) throw e.error("mesh.m", "must be at least 1");
  }
  if (e.has("mesh.file")) m.mesh_file = e.string("mesh.file");
  if (e.has("mesh.sequence")) {
    m.mesh_sequence = e.integers("mesh.sequence");
    if (m.mesh_sequence.empty()) throw e.error("mesh.sequence", "is empty");
    for (std::size_t i = 0; i < m.mesh_sequence.size(); ++i) {
      if (m.mesh_sequence[i] < 1) throw e.error("mesh.sequence", "entries must be at least 1");
      if (i > 0 && m.mesh_sequence[i] <= m.mesh_sequence[i - 1])
        throw e.error("mesh.sequence", "must be strictly refining (increasing m)");
    }
  }
  if (m.mesh_m && !m.mesh_file.empty()) throw e.error("mesh.file", "cannot be combined with mesh.m");
  if (!m.mesh_sequence.empty() && !m.mesh_file.empty())
    throw e.error("mesh.file", "cannot be combined with mesh.sequence");

  if (e.has("ic.kind")) m.ic_kind = parse_initial(e);
  if (e.has("ic.scale")) {
    m.ic_scale = e.numbers("ic.scale");
    if (static_cast<int>(m.ic_scale.size()) != J)
      throw e.error("ic.scale", "lists " + std::to_string(m.ic_scale.size()) + " values for " + std::to_string(J) +
                                    " members");
  }
  if (e.has("ic.stokes_nu")) {
    m.ic_stokes_nu = e.number("ic.stokes_nu");
    require_positive(e, "ic.stokes_nu", *m.ic_stokes_nu);
  }
  if (e.has("forcing.kind")) m.forcing_kind = parse_forcing(e);
  if (e.has("green_taylor.omega")) {
    m.gt_omega = e.integer("green_taylor.omega");
    if (m.gt_omega < 1) throw e.error("green_taylor.omega", "must be at least 1");
  }
  if (e.has("green_taylor.tau")) {
    m.gt_tau = e.number("green_taylor.tau");
    require_positive(e, "green_taylor.tau", *m.gt_tau);
  }
  if (e.has("adapt_dt")) m.adapt_dt = e.boolean("adapt_dt");
  if (e.has("mode")) {
    try {
      m.mode = parse_run_mode(e.string("mode"));
    } catch (const ManifestError& err) {
      throw e.error("mode", err.what());
    }
  }
  if (e.has("parallel_members")) {
    m.parallel_members = e.integer("parallel_members");
    if (m.parallel_members < 1) throw e.error("parallel_members", "must be at least 1");
  }
  if (e.has("output.dir")) m.output_dir = e.string("output.dir");
  if (e.has("output.store_fields")) m.store_fields = e.boolean("output.store_fields");
  if (e.has("output.vtk_every")) {
    m.vtk_every = e.integer("output.vtk_every");
    if (m.vtk_every < 0) throw e.error("output.vtk_every", "must be non-negative");
  }
  if (e.has("output.energy_bound")) m.energy_bound = e.boolean("output.energy_bound");

  switch (m.experiment) {
    case Experiment::green_taylor_convergence:
      if (!m.mesh_file.empty()) throw e.error("mesh.file", "the vortex study runs on generated unit-square meshes");
      if (!m.mesh_m && m.mesh_sequence.empty()) m.mesh_sequence = {20, 40, 80};
      break;
    case Experiment::offset_cylinders_stability:
      if (m.mesh_file.empty()) throw ManifestError("mesh.file is required for the offset-cylinder experiment",
                                                   "mesh.file");
      break;
    case Experiment::custom:
      if (m.mesh_file.empty() && !m.mesh_m && m.mesh_sequence.empty())
        throw ManifestError("one of mesh.m, mesh.sequence or mesh.file is required", "mesh.m");
      break;
  }
  if (m.dt && m.T < *m.dt) throw e.error("T", "must be at least dt");
  return m;
}

RunManifest read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  RunManifest m = parse_config(text.str());
  if (!m.mesh_file.empty()) {
    std::filesystem::path mesh(m.mesh_file);
    if (mesh.is_relative()) mesh = path.parent_path() / mesh;
    mesh = mesh.lexically_normal();
    if (!std::filesystem::exists(mesh)) throw ManifestError("mesh file " + mesh.string() + " does not exist",
                                                            "mesh.file");
    m.mesh_file = mesh.string();
  }
  return m;
}

namespace {

std::string number_text(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T, typename Fmt>
std::string list_text(const std::vector<T>& values, Fmt fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + fmt(values[i]);
  return out + "]";
}

std::string string_text(const std::string& s) {
  const bool plain = s.find_first_of(" \t#\"") == std::string::npos;
  return plain ? s : "\"" + s + "\"";
}

}  // namespace

std::string serialize(const RunManifest& m) {
  std::ostringstream out;
  auto bool_text = [](bool b) { return b ? "true" : "false"; };
  out << "experiment = " << to_string(m.experiment) << '\n';
  out << "J = " << m.members() << '\n';
  out << "nu = " << list_text(m.nu, number_text) << '\n';
  if (m.mu) out << "mu = " << number_text(*m.mu) << '\n';
  if (m.epsilon) out << "epsilon = " << number_text(*m.epsilon) << '\n';
  if (m.dt) out << "dt = " << number_text(*m.dt) << '\n';
  out << "dt_over_h = " << number_text(m.dt_over_h) << '\n';
  out << "T = " << number_text(m.T) << '\n';
  if (m.mesh_m) out << "mesh.m = " << *m.mesh_m << '\n';
  if (!m.mesh_file.empty()) out << "mesh.file = " << string_text(m.mesh_file) << '\n';
  if (!m.mesh_sequence.empty())
    out << "mesh.sequence = " << list_text(m.mesh_sequence, [](int v) { return std::to_string(v); }) << '\n';
  out << "ic.kind = " << to_string(m.ic_kind) << '\n';
  out << "ic.scale = " << list_text(m.ic_scale, number_text) << '\n';
  if (m.ic_stokes_nu) out << "ic.stokes_nu = " << number_text(*m.ic_stokes_nu) << '\n';
  out << "forcing.kind = " << to_string(m.forcing_kind) << '\n';
  out << "green_taylor.omega = " << m.gt_omega << '\n';
  if (m.gt_tau) out << "green_taylor.tau = " << number_text(*m.gt_tau) << '\n';
  out << "adapt_dt = " << bool_text(m.adapt_dt) << '\n';
  out << "mode = " << to_string(m.mode) << '\n';
  out << "parallel_members = " << m.parallel_members << '\n';
  out << "output.dir = " << string_text(m.output_dir) << '\n';
  out << "output.store_fields = " << bool_text(m.store_fields) << '\n';
  out << "output.vtk_every = " << m.vtk_every << '\n';
  out << "output.energy_bound = " << bool_text(m.energy_bound) << '\n';
  return out.str();
}

}  // namespace ensflow
