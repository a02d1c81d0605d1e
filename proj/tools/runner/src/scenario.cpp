#include "wwsim/runner/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace wwsim::runner {

namespace {

enum class Type { real, integer, complex, boolean, text };

enum Kinds : unsigned { for_mz = 1u, for_sg = 2u, for_both = 3u };

struct KeySpec {
  std::string_view key;
  Type type;
  unsigned kinds;
  bool sweepable;
};

constexpr KeySpec schema[] = {
    {"scenario.kind", Type::text, for_both, false},
    {"scenario.seed", Type::integer, for_both, false},
    {"interferometer.phase", Type::real, for_mz, true},
    {"interferometer.recoil", Type::real, for_mz, true},
    {"interferometer.input_port", Type::integer, for_mz, false},
    {"interferometer.absolute_units", Type::boolean, for_mz, false},
    {"interferometer.n_phase", Type::integer, for_mz, false},
    {"bs_in.t", Type::complex, for_mz, false},
    {"bs_in.r", Type::complex, for_mz, false},
    {"bs_in.recoil", Type::real, for_mz, true},
    {"bs_in.p0", Type::real, for_mz, true},
    {"bs_in.sigma", Type::real, for_mz, true},
    {"bs_in.half_span", Type::real, for_mz, false},
    {"bs_in.n_points", Type::integer, for_mz, false},
    {"bs_out.enabled", Type::boolean, for_mz, false},
    {"bs_out.t", Type::complex, for_mz, false},
    {"bs_out.r", Type::complex, for_mz, false},
    {"bs_out.recoil", Type::real, for_mz, true},
    {"bs_out.p0", Type::real, for_mz, true},
    {"bs_out.sigma", Type::real, for_mz, true},
    {"bs_out.half_span", Type::real, for_mz, false},
    {"bs_out.n_points", Type::integer, for_mz, false},
    {"ww.enabled", Type::boolean, for_mz, false},
    {"ww.arm", Type::text, for_mz, false},
    {"ww.gamma", Type::real, for_mz, true},
    {"stern_gerlach.a1", Type::complex, for_sg, false},
    {"stern_gerlach.a2", Type::complex, for_sg, false},
    {"stern_gerlach.shots", Type::integer, for_sg, true},
    {"output.path", Type::text, for_both, false},
    {"output.format", Type::text, for_both, false},
};

constexpr KeySpec sweep_fields[] = {
    {"parameter", Type::text, for_both, false},
    {"start", Type::real, for_both, false},
    {"stop", Type::real, for_both, false},
    {"steps", Type::integer, for_both, false},
};

std::pair<std::string_view, std::string_view> split_key(std::string_view key) {
  const auto dot = key.find('.');
  if (dot == std::string_view::npos) return {key, {}};
  return {key.substr(0, dot), key.substr(dot + 1)};
}

// "sweep", "sweep2", ... -> 1, 2, ...; nullopt for other sections.
std::optional<int> sweep_ordinal(std::string_view section) {
  if (!section.starts_with("sweep")) return std::nullopt;
  const auto suffix = section.substr(5);
  if (suffix.empty()) return 1;
  int n = 0;
  auto [end, ec] = std::from_chars(suffix.data(), suffix.data() + suffix.size(), n);
  if (ec != std::errc() || end != suffix.data() + suffix.size() || n < 2) return std::nullopt;
  return n;
}

const KeySpec* find_spec(std::string_view key) {
  for (const auto& s : schema)
    if (s.key == key) return &s;
  const auto [section, field] = split_key(key);
  if (sweep_ordinal(section))
    for (const auto& s : sweep_fields)
      if (s.key == field) return &s;
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_real(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size())
    throw ParseError("'" + key + "': expected a number, got '" + std::string(text) + "'");
  return v;
}

long long parse_integer(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  long long v = 0;
  auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size())
    throw ParseError("'" + key + "': expected an integer, got '" + std::string(text) + "'");
  return v;
}

Complex parse_complex(const std::string& key, std::string_view text) {
  std::string t = trim(text);
  if (t.size() >= 2 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
  const auto comma = t.find(',');
  if (comma == std::string::npos) return parse_real(key, t);
  return {parse_real(key, std::string_view(t).substr(0, comma)), parse_real(key, std::string_view(t).substr(comma + 1))};
}

bool parse_boolean(const std::string& key, std::string_view text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ParseError("'" + key + "': expected true or false, got '" + std::string(text) + "'");
}

void check_type(const std::string& key, const std::string& value, Type type) {
  switch (type) {
    case Type::real: parse_real(key, value); break;
    case Type::integer: parse_integer(key, value); break;
    case Type::complex: parse_complex(key, value); break;
    case Type::boolean: parse_boolean(key, value); break;
    case Type::text: break;
  }
}

// Typed accessors over the flat map with defaults.
class Reader {
 public:
  explicit Reader(const ScenarioFile& file) : file_(file) {}

  std::optional<std::string> text(const std::string& key) const {
    auto v = file_.get(key);
    if (v) return trim(*v);
    return std::nullopt;
  }
  double real(const std::string& key, double fallback) const {
    auto v = file_.get(key);
    return v ? parse_real(key, *v) : fallback;
  }
  std::optional<double> real(const std::string& key) const {
    auto v = file_.get(key);
    if (!v) return std::nullopt;
    return parse_real(key, *v);
  }
  long long integer(const std::string& key, long long fallback) const {
    auto v = file_.get(key);
    return v ? parse_integer(key, *v) : fallback;
  }
  Complex complex(const std::string& key, Complex fallback) const {
    auto v = file_.get(key);
    return v ? parse_complex(key, *v) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) const {
    auto v = file_.get(key);
    return v ? parse_boolean(key, *v) : fallback;
  }

 private:
  const ScenarioFile& file_;
};

BeamSplitterSpec read_beam_splitter(const Reader& in, const std::string& section) {
  BeamSplitterSpec bs;
  bs.t = in.complex(section + ".t", bs.t);
  bs.r = in.complex(section + ".r", bs.r);
  bs.recoil = in.real(section + ".recoil");
  bs.packet.p0 = in.real(section + ".p0", bs.packet.p0);
  bs.packet.sigma = in.real(section + ".sigma", bs.packet.sigma);
  bs.packet.half_span = in.real(section + ".half_span", bs.packet.half_span);
  const long long n = in.integer(section + ".n_points", static_cast<long long>(bs.packet.n_points));
  bs.packet.n_points = n < 0 ? 0 : static_cast<std::size_t>(n);
  return bs;
}

// Builds the typed scenario, appending every domain violation found.
Scenario build(const ScenarioFile& file, std::vector<std::string>& diagnostics) {
  const Reader in(file);
  Scenario s;

  const auto kind = in.text("scenario.kind");
  if (kind == "stern_gerlach") s.kind = ScenarioKind::stern_gerlach;
  else if (kind && *kind != "mz") diagnostics.push_back("scenario.kind must be 'mz' or 'stern_gerlach', got '" + *kind + "'");

  const long long seed = in.integer("scenario.seed", 0);
  if (seed < 0) diagnostics.emplace_back("scenario.seed must be non-negative");
  s.seed = static_cast<std::uint64_t>(std::max(0LL, seed));

  if (auto path = in.text("output.path"); path && !path->empty()) s.output_path = *path;
  if (auto format = in.text("output.format")) {
    if (*format == "json") s.format = OutputFormat::json;
    else if (*format != "csv") diagnostics.push_back("output.format must be 'csv' or 'json', got '" + *format + "'");
  }

  if (s.kind == ScenarioKind::mz) {
    InterferometerConfig& c = s.interferometer;
    c.phase = in.real("interferometer.phase", 0.0);
    c.input_port = static_cast<int>(in.integer("interferometer.input_port", 1));
    s.n_phase = static_cast<int>(in.integer("interferometer.n_phase", 360));
    if (s.n_phase < 8) diagnostics.emplace_back("interferometer.n_phase must be at least 8");

    c.bs_in = read_beam_splitter(in, "bs_in");
    if (in.boolean("bs_out.enabled", true)) c.bs_out = read_beam_splitter(in, "bs_out");
    else c.bs_out.reset();

    // Recoil in units of each splitter's own sigma unless absolute.
    const bool absolute = in.boolean("interferometer.absolute_units", false);
    const double shared = in.real("interferometer.recoil", 0.0);
    const auto scale = [&](const BeamSplitterSpec& bs) { return absolute ? 1.0 : bs.packet.sigma; };
    c.recoil = shared * scale(c.bs_in);
    c.bs_in.recoil = c.bs_in.recoil.value_or(shared) * scale(c.bs_in);
    if (c.bs_out) c.bs_out->recoil = c.bs_out->recoil.value_or(shared) * scale(*c.bs_out);

    if (in.boolean("ww.enabled", file.has_section("ww"))) {
      WhichWayDetectorSpec ww;
      const auto arm = in.text("ww.arm").value_or("reflected");
      if (arm == "transmitted") ww.arm = Arm::transmitted;
      else if (arm != "reflected") diagnostics.push_back("ww.arm must be 'reflected' or 'transmitted', got '" + arm + "'");
      ww.gamma = in.real("ww.gamma", 0.0);
      c.ww = ww;
    }
    for (auto& v : c.violations()) diagnostics.push_back(std::move(v));
  } else {
    s.a1 = in.complex("stern_gerlach.a1", 1.0);
    s.a2 = in.complex("stern_gerlach.a2", 0.0);
    const long long shots = in.integer("stern_gerlach.shots", 1000);
    if (shots < 1) diagnostics.emplace_back("stern_gerlach.shots must be at least 1");
    s.shots = static_cast<std::uint64_t>(std::max(1LL, shots));
    for (auto& v : stern_gerlach_spec(s.a1, s.a2).violations()) diagnostics.push_back("stern_gerlach: " + v);
  }
  return s;
}

std::vector<std::pair<int, std::string>> sweep_sections(const ScenarioFile& file) {
  std::vector<std::pair<int, std::string>> out;
  for (const auto& [key, value] : file.values()) {
    const auto section = std::string(split_key(key).first);
    if (auto n = sweep_ordinal(section);
        n && std::none_of(out.begin(), out.end(), [&](const auto& p) { return p.second == section; }))
      out.emplace_back(*n, section);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double Sweep::value(int step) const {
  if (steps <= 1) return start;
  return start + (stop - start) * static_cast<double>(step) / static_cast<double>(steps - 1);
}

ScenarioFile ScenarioFile::parse(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream stream{std::string(text)};
  try {
    pt::ini_parser::read_ini(stream, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("line " + std::to_string(e.line()) + ": " + e.message());
  }

  // The INI reader only knows whole-line comments; drop trailing " ; ..." too.
  const auto value = [](const std::string& raw) {
    for (std::size_t i = raw.find(';'); i != std::string::npos; i = raw.find(';', i + 1))
      if (i == 0 || raw[i - 1] == ' ' || raw[i - 1] == '\t') return trim(std::string_view(raw).substr(0, i));
    return trim(raw);
  };

  ScenarioFile file;
  for (const auto& [section, node] : tree) {
    if (node.empty()) {
      // Keys before the first section belong to [scenario].
      file.values_["scenario." + section] = value(node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) file.values_[section + "." + key] = value(leaf.data());
  }
  return file;
}

ScenarioFile ScenarioFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void ScenarioFile::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ParseError("override '" + std::string(assignment) + "' is not key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (!known_key(key)) throw ParseError("override names unknown key '" + key + "'");
  values_[key] = trim(assignment.substr(eq + 1));
}

std::optional<std::string> ScenarioFile::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

bool ScenarioFile::has_section(std::string_view section) const {
  return std::any_of(values_.begin(), values_.end(),
                     [&](const auto& kv) { return split_key(kv.first).first == section; });
}

bool known_key(std::string_view key) { return find_spec(key) != nullptr; }

std::string format_value(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::vector<std::string> validate(const ScenarioFile& file) {
  std::vector<std::string> diagnostics;

  const auto kind_text = file.get("scenario.kind");
  if (!kind_text) diagnostics.emplace_back("scenario.kind is required (mz or stern_gerlach)");
  const unsigned kind_bit = kind_text && trim(*kind_text) == "stern_gerlach" ? for_sg : for_mz;

  for (const auto& [key, value] : file.values()) {
    const KeySpec* spec = find_spec(key);
    if (!spec) {
      diagnostics.push_back("unknown key '" + key + "'");
      continue;
    }
    check_type(key, value, spec->type);
    if (!(spec->kinds & kind_bit)) diagnostics.push_back("key '" + key + "' does not apply to this scenario kind");
  }

  std::vector<Sweep> sweeps;
  for (const auto& [ordinal, section] : sweep_sections(file)) {
    const Reader in(file);
    Sweep sw;
    sw.parameter = in.text(section + ".parameter").value_or("");
    const KeySpec* target = find_spec(sw.parameter);
    if (sw.parameter.empty()) diagnostics.push_back(section + ": missing parameter");
    else if (!target || sweep_ordinal(split_key(sw.parameter).first))
      diagnostics.push_back(section + ": unknown parameter '" + sw.parameter + "'");
    else if (!target->sweepable || !(target->kinds & kind_bit))
      diagnostics.push_back(section + ": parameter '" + sw.parameter + "' cannot be swept in this scenario");
    if (!file.get(section + ".start") || !file.get(section + ".stop"))
      diagnostics.push_back(section + ": start and stop are required");
    sw.start = in.real(section + ".start", 0.0);
    sw.stop = in.real(section + ".stop", 0.0);
    sw.steps = static_cast<int>(in.integer(section + ".steps", 0));
    if (sw.steps < 2) diagnostics.push_back(section + ": steps must be at least 2");
    if (std::any_of(sweeps.begin(), sweeps.end(), [&](const Sweep& o) { return o.parameter == sw.parameter; }))
      diagnostics.push_back(section + ": parameter '" + sw.parameter + "' is swept twice");
    sweeps.push_back(sw);
  }
  if (!diagnostics.empty()) return diagnostics;

  build(file, diagnostics);

  // Both ends of every sweep must be runnable too.
  for (const auto& sw : sweeps)
    for (double v : {sw.start, sw.stop}) {
      ScenarioFile point = file;
      const KeySpec* target = find_spec(sw.parameter);
      point.set(sw.parameter, target->type == Type::integer ? std::to_string(std::llround(v)) : format_value(v));
      std::vector<std::string> at_point;
      build(point, at_point);
      for (auto& d : at_point)
        if (std::find(diagnostics.begin(), diagnostics.end(), d) == diagnostics.end())
          diagnostics.push_back(sw.parameter + " = " + format_value(v) + ": " + d);
    }
  return diagnostics;
}

Scenario interpret(const ScenarioFile& file) {
  const auto diagnostics = validate(file);
  if (!diagnostics.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& d : diagnostics) msg += "\n  " + d;
    throw DomainError(msg);
  }
  std::vector<std::string> unused;
  Scenario s = build(file, unused);
  const Reader in(file);
  for (const auto& [ordinal, section] : sweep_sections(file))
    s.sweeps.push_back({*in.text(section + ".parameter"), in.real(section + ".start", 0.0),
                        in.real(section + ".stop", 0.0), static_cast<int>(in.integer(section + ".steps", 2))});
  return s;
}

bool integer_key(std::string_view key) {
  const KeySpec* s = find_spec(key);
  return s && s->type == Type::integer;
}

}  // namespace wwsim::runner
