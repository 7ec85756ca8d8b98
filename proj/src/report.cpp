#include "buckle/report.hpp"

#include "buckle/disc_oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace buckle {

std::string version_string() { return "buckle 0.1.0"; }

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double RunConfig::finest_h() const { return h / std::pow(2.0, levels - 1); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  return x;
}

long long parse_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

std::vector<double> parse_vector(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) out.push_back(parse_double(key, tok));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

// One entry per config key: text form, JSON form, and the two readers.
struct KeySpec {
  const char* name;
  std::function<std::string(const RunConfig&)> to_text;
  std::function<nlohmann::json(const RunConfig&)> to_json;
  std::function<void(RunConfig&, const std::string&)> from_text;
  std::function<void(RunConfig&, const nlohmann::json&)> from_json;
};

template <class T>
T json_number(const char* key, const nlohmann::json& j) {
  if (!j.is_number()) throw ConfigError(std::string("config: '") + key + "' expects a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw ConfigError(std::string("config: '") + key + "' expects an integer");
  }
  return j.get<T>();
}

KeySpec real_key(const char* name, double RunConfig::*m) {
  return {name, [m](const RunConfig& c) { return format_double(c.*m); },
          [m](const RunConfig& c) { return nlohmann::json(c.*m); },
          [name, m](RunConfig& c, const std::string& v) { c.*m = parse_double(name, v); },
          [name, m](RunConfig& c, const nlohmann::json& j) { c.*m = json_number<double>(name, j); }};
}

KeySpec int_key(const char* name, int RunConfig::*m) {
  return {name, [m](const RunConfig& c) { return std::to_string(c.*m); },
          [m](const RunConfig& c) { return nlohmann::json(c.*m); },
          [name, m](RunConfig& c, const std::string& v) {
            const long long x = parse_integer(name, v);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
              throw ConfigError(std::string("config: '") + name + "' out of range");
            c.*m = static_cast<int>(x);
          },
          [name, m](RunConfig& c, const nlohmann::json& j) { c.*m = json_number<int>(name, j); }};
}

KeySpec string_key(const char* name, std::string RunConfig::*m) {
  return {name, [m](const RunConfig& c) { return c.*m; }, [m](const RunConfig& c) { return nlohmann::json(c.*m); },
          [m](RunConfig& c, const std::string& v) { c.*m = v; },
          [name, m](RunConfig& c, const nlohmann::json& j) {
            if (!j.is_string()) throw ConfigError(std::string("config: '") + name + "' expects a string");
            c.*m = j.get<std::string>();
          }};
}

KeySpec vector_key(const char* name, std::vector<double> RunConfig::*m) {
  return {name, [m](const RunConfig& c) { return join(c.*m); },
          [m](const RunConfig& c) { return nlohmann::json(c.*m); },
          [name, m](RunConfig& c, const std::string& v) { c.*m = parse_vector(name, v); },
          [name, m](RunConfig& c, const nlohmann::json& j) {
            if (!j.is_array()) throw ConfigError(std::string("config: '") + name + "' expects an array");
            std::vector<double> out;
            for (const auto& x : j) out.push_back(json_number<double>(name, x));
            c.*m = std::move(out);
          }};
}

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = [] {
    std::vector<KeySpec> s;
    s.push_back(string_key("curve", &RunConfig::curve));
    s.push_back(real_key("radius", &RunConfig::radius));
    s.push_back(real_key("semi_a", &RunConfig::semi_a));
    s.push_back(real_key("semi_b", &RunConfig::semi_b));
    s.push_back(vector_key("cos_coeffs", &RunConfig::cos_coeffs));
    s.push_back(vector_key("sin_coeffs", &RunConfig::sin_coeffs));
    s.push_back(real_key("scale", &RunConfig::scale));
    s.push_back(real_key("h", &RunConfig::h));
    s.push_back(int_key("levels", &RunConfig::levels));
    s.push_back(int_key("degree", &RunConfig::degree));
    s.push_back(real_key("penalty", &RunConfig::penalty));
    s.push_back(real_key("tolerance", &RunConfig::tolerance));
    s.push_back(real_key("shift", &RunConfig::shift));
    s.push_back(string_key("field", &RunConfig::field));
    s.push_back(int_key("mode", &RunConfig::mode));
    s.push_back(real_key("amplitude", &RunConfig::amplitude));
    s.push_back(real_key("fd_step", &RunConfig::fd_step));
    s.push_back(real_key("fd_step_second", &RunConfig::fd_step_second));
    s.push_back(string_key("out", &RunConfig::out));
    s.push_back({"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
                 [](const RunConfig& c) { return nlohmann::json(c.seed); },
                 [](RunConfig& c, const std::string& v) {
                   const long long x = parse_integer("seed", v);
                   if (x < 0 || x > 0xffffffffLL) throw ConfigError("config: 'seed' must fit in 32 bits");
                   c.seed = static_cast<std::uint32_t>(x);
                 },
                 [](RunConfig& c, const nlohmann::json& j) {
                   const long long x = json_number<long long>("seed", j);
                   if (x < 0 || x > 0xffffffffLL) throw ConfigError("config: 'seed' must fit in 32 bits");
                   c.seed = static_cast<std::uint32_t>(x);
                 }});
    return s;
  }();
  return specs;
}

const KeySpec& find_key(const std::string& name) {
  for (const auto& k : key_specs())
    if (name == k.name) return k;
  throw ConfigError("config: unknown key '" + name + "'");
}

}  // namespace

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  require(c.curve == "disc" || c.curve == "ellipse" || c.curve == "fourier",
          "curve must be disc, ellipse or fourier");
  require(std::isfinite(c.radius) && c.radius > 0, "radius must be positive");
  require(std::isfinite(c.semi_a) && c.semi_a > 0 && std::isfinite(c.semi_b) && c.semi_b > 0,
          "semi axes must be positive");
  require(std::isfinite(c.scale) && c.scale > 0, "scale must be positive");
  require(std::isfinite(c.h) && c.h > 0, "h must be positive");
  require(c.levels >= 1 && c.levels <= 6, "levels must lie in [1, 6]");
  require(c.degree == 2, "only degree 2 elements are implemented");
  require(std::isfinite(c.penalty) && c.penalty > 0, "penalty must be positive");
  require(std::isfinite(c.tolerance) && c.tolerance > 0, "tolerance must be positive");
  require(std::isfinite(c.shift), "shift must be finite");
  require(c.field == "normal" || c.field == "mode" || c.field == "translation",
          "field must be normal, mode or translation");
  if (c.field == "translation") require(c.mode == 1 || c.mode == 2, "translation axis (mode) must be 1 or 2");
  if (c.field == "mode") require(c.mode >= 1, "mode must be >= 1");
  require(std::isfinite(c.amplitude) && c.amplitude != 0.0, "amplitude must be nonzero");
  require(std::isfinite(c.fd_step) && c.fd_step > 0, "fd_step must be positive");
  require(std::isfinite(c.fd_step_second) && c.fd_step_second > 0, "fd_step_second must be positive");
  require(!c.out.empty(), "out must not be empty");
  try {
    (void)build_curve(c);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: JSON config must be an object");
    c = config_from_json(j);
  } else {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config: line " + std::to_string(lineno) + ": expected 'key = value'");
      find_key(trim(line.substr(0, eq))).from_text(c, trim(line.substr(eq + 1)));
    }
  }
  validate(c);
  return c;
}

std::string config_to_text(const RunConfig& config) {
  std::string s;
  for (const auto& k : key_specs()) s += std::string(k.name) + " = " + k.to_text(config) + "\n";
  return s;
}

nlohmann::json config_to_json(const RunConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : key_specs()) j[k.name] = k.to_json(config);
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  for (const auto& [key, value] : j.items()) find_key(key).from_json(c, value);
  return c;
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : config_to_text(config)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

BoundaryCurve build_curve(const RunConfig& c) {
  if (c.curve == "disc") return make_disc(c.radius);
  if (c.curve == "ellipse") return make_ellipse(c.semi_a, c.semi_b);
  if (c.curve == "fourier") return make_fourier_domain(c.cos_coeffs, c.sin_coeffs, c.scale);
  throw ConfigError("config: unknown curve '" + c.curve + "'");
}

PerturbationField build_field(const RunConfig& c, const BoundaryCurve& curve) {
  if (c.field == "translation") {
    const Vec2 e = c.mode == 1 ? Vec2(c.amplitude, 0.0) : Vec2(0.0, c.amplitude);
    return PerturbationField(curve, e, TrigSeries{});
  }
  if (c.field == "normal") {
    TrigSeries g;
    g.constant = c.amplitude;
    return make_normal_field(curve, g);
  }
  return project_volume_preserving(make_normal_field(curve, TrigSeries::mode(c.mode, c.amplitude)));
}

PipelineOptions build_pipeline(const RunConfig& c) {
  PipelineOptions p;
  p.penalty = c.penalty;
  p.buckling_solver.tolerance = c.tolerance;
  p.buckling_solver.shift = c.shift;
  p.buckling_solver.seed = c.seed;
  p.dirichlet_solver.seed = c.seed;
  return p;
}

nlohmann::json report_header(const std::string& command, const RunConfig& config) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = version_string();
  j["config_hash"] = config_hash(config);
  j["config"] = config_to_json(config);
  return j;
}

// ---------------------------------------------------------------------------
// CSV and SVG

std::string convergence_csv(const std::vector<LevelRow>& rows, double reference) {
  const bool with_error = std::isfinite(reference);
  std::string s = "level,h,nodes,dofs,lambda,lambda1,lambda2,residual";
  if (with_error) s += ",relative_error";
  s += "\n";
  for (const auto& r : rows) {
    s += std::to_string(r.level) + "," + format_double(r.h) + "," + std::to_string(r.nodes) + "," +
         std::to_string(r.dofs) + "," + format_double(r.lambda) + "," + format_double(r.lambda1) + "," +
         format_double(r.lambda2) + "," + format_double(r.residual);
    if (with_error) s += "," + format_double(std::abs(r.lambda - reference) / reference);
    s += "\n";
  }
  return s;
}

namespace {

// Minimal plotting canvas: data box mapped to a fixed pixel frame.
class Plot {
 public:
  Plot(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (x1_ <= x0_) x1_ = x0_ + 1.0;
    if (y1_ <= y0_) {
      const double pad = std::max(1e-12, std::abs(y0_) * 1e-6);
      y0_ -= pad;
      y1_ += pad;
    }
  }

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * kWidth; }
  double py(double y) const { return kTop + (y1_ - y) / (y1_ - y0_) * kHeight; }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, bool dashed = false) {
    os_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (const auto& [x, y] : pts) os_ << format_double(px(x)) << ',' << format_double(py(y)) << ' ';
    os_ << "\"/>\n";
  }
  void marker(double x, double y, const std::string& color) {
    os_ << "<circle cx=\"" << format_double(px(x)) << "\" cy=\"" << format_double(py(y))
        << "\" r=\"4\" fill=\"" << color << "\"/>\n";
  }
  void legend(int row, const std::string& color, const std::string& text) {
    const double y = kTop + 14 + 18 * row;
    os_ << "<rect x=\"" << kLeft + kWidth - 200 << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"4\" fill=\""
        << color << "\"/>\n<text x=\"" << kLeft + kWidth - 182 << "\" y=\"" << y - 3
        << "\" font-size=\"12\">" << text << "</text>\n";
  }

  std::string finish(const std::string& title, const std::string& xlabel, const std::string& ylabel) const {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kLeft + kWidth + 30 << "\" height=\""
      << kTop + kHeight + 50 << "\" font-family=\"sans-serif\">\n";
    s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\" stroke=\"black\"/>\n";
    s << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
    s << "<text x=\"" << kLeft + kWidth / 2 << "\" y=\"" << kTop + kHeight + 40 << "\" font-size=\"12\">" << xlabel
      << "</text>\n";
    s << "<text x=\"10\" y=\"" << kTop + kHeight / 2 << "\" font-size=\"12\">" << ylabel << "</text>\n";
    auto tick = [&](double v, bool horizontal) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", v);
      if (horizontal)
        s << "<text x=\"" << format_double(px(v)) << "\" y=\"" << kTop + kHeight + 16
          << "\" font-size=\"10\" text-anchor=\"middle\">" << buf << "</text>\n";
      else
        s << "<text x=\"" << kLeft - 4 << "\" y=\"" << format_double(py(v))
          << "\" font-size=\"10\" text-anchor=\"end\">" << buf << "</text>\n";
    };
    tick(x0_, true);
    tick(x1_, true);
    tick(y0_, false);
    tick(y1_, false);
    s << os_.str() << "</svg>\n";
    return s.str();
  }

 private:
  static constexpr double kLeft = 90, kTop = 30, kWidth = 560, kHeight = 360;
  double x0_, x1_, y0_, y1_;
  std::ostringstream os_;
};

}  // namespace

std::string convergence_svg(const std::vector<LevelRow>& rows, double reference) {
  double x0 = 0.0, x1 = 0.0, y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& r : rows) {
    x1 = std::max(x1, r.h);
    y0 = std::min(y0, r.lambda);
    y1 = std::max(y1, r.lambda);
  }
  if (std::isfinite(reference)) {
    y0 = std::min(y0, reference);
    y1 = std::max(y1, reference);
  }
  const double pad = 0.05 * (y1 - y0);
  Plot plot(x0, 1.05 * x1, y0 - pad, y1 + pad);
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) pts.emplace_back(r.h, r.lambda);
  plot.polyline(pts, "steelblue");
  for (const auto& [x, y] : pts) plot.marker(x, y, "steelblue");
  plot.legend(0, "steelblue", "computed");
  if (std::isfinite(reference)) {
    plot.polyline({{x0, reference}, {1.05 * x1, reference}}, "firebrick", true);
    plot.legend(1, "firebrick", "analytic");
  }
  return plot.finish("buckling eigenvalue under refinement", "mesh size h", "Lambda_h");
}

std::string variation_svg(const VariationReport& first, const VariationReport* second) {
  std::vector<std::pair<double, double>> samples = first.samples;
  if (second) samples.insert(samples.end(), second->samples.begin(), second->samples.end());
  double lambda0 = 0.0;
  bool have_center = false;
  for (const auto& [t, l] : samples)
    if (t == 0.0) {
      lambda0 = l;
      have_center = true;
    }
  if (!have_center && !samples.empty()) {
    for (const auto& s : first.samples) lambda0 += s.second;
    lambda0 /= static_cast<double>(first.samples.size());
  }
  double tmax = 0.0;
  for (const auto& s : samples) tmax = std::max(tmax, std::abs(s.first));
  if (tmax == 0.0) tmax = 1.0;
  const double slope = first.formula;
  const double curvature = second ? second->second_formula : 0.0;
  std::vector<std::pair<double, double>> tangent, parabola;
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  const int n = 64;
  for (int i = 0; i <= n; ++i) {
    const double t = -tmax + 2.0 * tmax * i / n;
    tangent.emplace_back(t, lambda0 + slope * t);
    parabola.emplace_back(t, lambda0 + slope * t + 0.5 * curvature * t * t);
  }
  for (const auto* set : {&samples, &tangent, &parabola})
    for (const auto& p : *set) {
      y0 = std::min(y0, p.second);
      y1 = std::max(y1, p.second);
    }
  const double pad = 0.05 * (y1 - y0);
  Plot plot(-1.05 * tmax, 1.05 * tmax, y0 - pad, y1 + pad);
  plot.polyline(tangent, "gray", true);
  plot.legend(0, "gray", "tangent");
  if (second) {
    plot.polyline(parabola, "firebrick");
    plot.legend(1, "firebrick", "second-order model");
  }
  for (const auto& [t, l] : samples) plot.marker(t, l, "steelblue");
  plot.legend(second ? 2 : 1, "steelblue", "Lambda(t), remeshed");
  return plot.finish("eigenvalue along the perturbation", "t", "Lambda");
}

// ---------------------------------------------------------------------------
// commands

namespace {

nlohmann::json criticality_json(const CriticalityReport& c) {
  return {{"lambda", c.lambda},           {"c0", c.c0},
          {"trace_mean", c.trace_mean},   {"trace_max_deviation", c.trace_max_deviation},
          {"w_residual", c.w_residual},   {"rel_value", c.rel_value},
          {"samples", c.samples},         {"critical", c.critical()}};
}

std::shared_ptr<const FeSpace> finest_space(const RunConfig& c, const BoundaryCurve& curve) {
  return std::make_shared<const FeSpace>(triangulate_refined(curve, c.h, c.levels - 1), curve);
}

bool is_kernel(double value, double lambda) { return std::abs(value) <= 0.02 * lambda; }

}  // namespace

CommandResult cmd_solve(const RunConfig& config) {
  CommandResult r;
  r.report = report_header("solve", config);
  const BoundaryCurve curve = build_curve(config);
  const PipelineOptions pipeline = build_pipeline(config);
  std::vector<LevelRow> rows;
  Mesh mesh = triangulate(curve, config.h);
  std::shared_ptr<const FeSpace> space;
  BucklingSolution sol;
  DirichletSolution dir;
  for (int level = 0; level < config.levels; ++level) {
    if (level > 0) mesh = refine(mesh, curve);
    space = std::make_shared<const FeSpace>(mesh, curve);
    sol = solve_buckling(space, pipeline);
    dir = solve_dirichlet(space, 3, pipeline);
    LevelRow row;
    row.level = level;
    row.h = config.h / std::pow(2.0, level);
    row.nodes = static_cast<int>(mesh.nodes.size());
    row.dofs = space->size();
    row.lambda = sol.lambda;
    row.lambda1 = dir.lambda[0];
    row.lambda2 = dir.lambda[1];
    row.residual = sol.residual;
    rows.push_back(row);
  }
  const double reference =
      config.curve == "disc" ? disc_buckling(config.radius).eigenvalue : std::numeric_limits<double>::quiet_NaN();

  nlohmann::json levels = nlohmann::json::array();
  for (const auto& row : rows)
    levels.push_back({{"level", row.level}, {"h", row.h}, {"nodes", row.nodes}, {"dofs", row.dofs},
                      {"lambda", row.lambda}, {"lambda1", row.lambda1}, {"lambda2", row.lambda2},
                      {"residual", row.residual}});
  r.report["levels"] = levels;
  r.report["lambda"] = sol.lambda;
  r.report["lambda1"] = dir.lambda[0];
  r.report["lambda2"] = dir.lambda[1];
  r.report["residual"] = sol.residual;
  r.report["payne_gap"] = sol.lambda - dir.lambda[1];
  r.report["criticality"] = criticality_json(criticality_report(sol));
  if (std::isfinite(reference)) {
    r.report["reference"] = reference;
    r.report["relative_error"] = std::abs(sol.lambda - reference) / reference;
    if (rows.size() >= 2) {
      const double e1 = std::abs(rows[rows.size() - 2].lambda - reference);
      const double e2 = std::abs(rows.back().lambda - reference);
      r.report["observed_order"] = std::log2(e1 / e2);
    }
  }
  r.files["convergence.csv"] = convergence_csv(rows, reference);
  r.files["convergence.svg"] = convergence_svg(rows, reference);
  return r;
}

CommandResult cmd_variations(const RunConfig& config) {
  CommandResult r;
  r.report = report_header("variations", config);
  const BoundaryCurve curve = build_curve(config);
  const PerturbationField field = build_field(config, curve);
  SweepOptions so;
  so.h = config.finest_h();
  so.pipeline = build_pipeline(config);
  r.report["volume_first_order"] = volume_first_order(field);
  r.report["volume_second_order"] = volume_second_order(field);

  const VariationReport first = fd_first_variation_check(curve, field, config.fd_step, so);
  const double lambda_scale = 0.5 * (first.samples.front().second + first.samples.back().second);
  r.report["first"] = {{"formula", first.formula},
                       {"fd", first.fd},
                       {"step", first.step},
                       {"h", first.h},
                       {"discrepancy", first.first_discrepancy()},
                       {"kernel", is_kernel(first.formula, lambda_scale) && is_kernel(first.fd, lambda_scale)},
                       {"samples", first.samples}};
  try {
    const VariationReport second = second_variation_check(curve, field, config.fd_step_second, so);
    r.report["second"] = {
        {"status", "ok"},
        {"formula", second.second_formula},
        {"fd", second.second_fd},
        {"step", second.step},
        {"h", second.h},
        {"discrepancy", second.second_discrepancy()},
        {"kernel", is_kernel(second.second_formula, lambda_scale) && is_kernel(second.second_fd, lambda_scale)},
        {"samples", second.samples}};
    r.files["variations.svg"] = variation_svg(first, &second);
  } catch (const GateRefusal& e) {
    r.report["second"] = {{"status", "refused"}, {"reason", e.what()}};
    r.files["variations.svg"] = variation_svg(first, nullptr);
    r.status = exit_refused;
  }
  return r;
}

CommandResult cmd_psi(const RunConfig& config) {
  CommandResult r;
  r.report = report_header("psi", config);
  const BoundaryCurve curve = build_curve(config);
  const PipelineOptions pipeline = build_pipeline(config);
  const auto space = finest_space(config, curve);
  const BucklingSolution sol = solve_buckling(space, pipeline);
  const CriticalityReport crit = criticality_report(sol);
  r.report["criticality"] = criticality_json(crit);
  if (!crit.critical())
    throw GateRefusal("criticality gate: the closed form for E(psi) presumes a constant boundary trace of Delta u");
  const DirichletSolution dir = solve_dirichlet(space, 6, pipeline);
  const EnergyFunctional energy(sol);
  auto describe = [&](std::optional<double> forced) {
    const PsiResult psi = build_psi(sol, dir, forced);
    const PsiEnergy pe = psi_energy_identity(psi, sol, energy);
    const ZFunction z = z_membership(psi.psi, sol);
    return nlohmann::json{{"t", psi.t},
                          {"c", psi.c},
                          {"forced", psi.forced},
                          {"lambda1", psi.lambda1},
                          {"lambda2", psi.lambda2},
                          {"energy", pe.quadrature},
                          {"energy_hessian_form", energy.E2(psi.psi)},
                          {"closed_form", pe.closed_form},
                          {"expansion", pe.expansion},
                          {"mean_term", pe.mean_term},
                          {"z_member", z.member},
                          {"z_flux", z.flux},
                          {"z_orthogonality", z.orthogonality}};
  };
  r.report["psi"] = describe(std::nullopt);
  r.report["forced"] = describe(0.5);
  return r;
}

CommandResult cmd_payne(const RunConfig& config) {
  CommandResult r;
  r.report = report_header("payne", config);
  const BoundaryCurve curve = build_curve(config);
  const PayneResult p = payne_check(finest_space(config, curve), build_pipeline(config));
  r.report["lambda"] = p.lambda;
  r.report["lambda2"] = p.lambda2;
  r.report["gap"] = p.gap;
  r.report["relative_gap"] = p.gap / p.lambda;
  return r;
}

CommandResult cmd_oracle(const RunConfig& config) {
  if (config.curve != "disc") throw ConfigError("oracle: analytic values exist for the disc only");
  CommandResult r;
  r.report = report_header("oracle", config);
  const double R = config.radius;
  const RadialSolution u = disc_buckling(R);
  const RadialSolution d1 = disc_dirichlet(R, 1), d2 = disc_dirichlet(R, 2);
  r.report["j01"] = bessel_root(0, 1);
  r.report["j11"] = bessel_root(1, 1);
  r.report["lambda"] = u.eigenvalue;
  r.report["lambda1"] = d1.eigenvalue;
  r.report["lambda2"] = d2.eigenvalue;
  r.report["c0"] = disc_c0(R);
  r.report["area"] = std::numbers::pi * R * R;
  nlohmann::json profile = nlohmann::json::array();
  for (int i = 0; i <= 8; ++i) {
    const Vec2 x(R * i / 8.0, 0.0);
    profile.push_back({{"r", x.x()},
                       {"u", u.value(x)},
                       {"du_dr", u.gradient(x).x()},
                       {"laplacian", u.laplacian(x)},
                       {"w_identity", disc_w_identity(R, x.x())}});
  }
  r.report["profile"] = profile;
  return r;
}

CommandResult run_guarded(const std::string& command, const RunConfig& config,
                          CommandResult (*fn)(const RunConfig&)) {
  auto failure = [&](int status, const std::string& kind, const std::string& what) {
    CommandResult r;
    r.status = status;
    r.report = report_header(command, config);
    r.report["error"] = {{"kind", kind}, {"message", what}};
    return r;
  };
  try {
    return fn(config);
  } catch (const GateRefusal& e) {
    return failure(exit_refused, "gate_refusal", e.what());
  } catch (const std::domain_error& e) {
    return failure(exit_refused, "gate_refusal", e.what());
  } catch (const ConfigError& e) {
    return failure(exit_input, "input", e.what());
  } catch (const GeometryError& e) {
    return failure(exit_input, "geometry", e.what());
  } catch (const MeshError& e) {
    return failure(exit_input, "mesh", e.what());
  } catch (const std::exception& e) {
    return failure(exit_failure, "pipeline", e.what());
  }
}

}  // namespace buckle
