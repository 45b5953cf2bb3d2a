#include "viscontact/run_config.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "viscontact/errors.hpp"

namespace viscontact {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

class KeyTable {
 public:
  explicit KeyTable(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError("expected 'key = value', got '" + line + "'", number);
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw ParseError("empty key", number);
      entries_[key] = Entry{trim(line.substr(eq + 1)), number, false};
    }
  }

  const Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  int line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  void reject_unused() const {
    for (const auto& [key, entry] : entries_)
      if (!entry.used) throw ParseError("unknown key '" + key + "'", entry.line);
  }

 private:
  std::map<std::string, Entry> entries_;
};

double to_double(const std::string& key, const Entry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument(e.value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("value of " + key + " is not a number: '" + e.value + "'", e.line);
  }
}

long to_long(const std::string& key, const Entry& e) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument(e.value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("value of " + key + " is not an integer: '" + e.value + "'", e.line);
  }
}

// "(a, b)", "a, b", or "a b".
Vec2 to_vec2(const std::string& key, const Entry& e) {
  std::string s = e.value;
  std::replace(s.begin(), s.end(), '(', ' ');
  std::replace(s.begin(), s.end(), ')', ' ');
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  Vec2 v;
  std::string extra;
  if (!(in >> v.x() >> v.y()) || (in >> extra))
    throw ParseError("value of " + key + " is not a 2-vector: '" + e.value + "'", e.line);
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text, bool require_mesh) {
  KeyTable table(text);
  RunConfig cfg;

  auto get_double = [&](const char* key, double fallback, auto&& check, const char* what) {
    const Entry* e = table.find(key);
    if (!e) return fallback;
    const double v = to_double(key, *e);
    if (!check(v)) throw ParseError(std::string(key) + " " + what + ", got " + e->value, e->line);
    return v;
  };
  auto positive = [](double v) { return v > 0.0; };
  auto nonnegative = [](double v) { return v >= 0.0; };

  if (const Entry* e = table.find("mesh.file")) cfg.mesh_file = e->value;

  cfg.youngs = get_double("material.youngs", cfg.youngs, positive, "must be positive");
  cfg.poisson = get_double(
      "material.poisson", cfg.poisson,
      [](double v) { return v > -1.0 && v < 0.5; }, "must lie in (-1, 0.5)");
  if (const Entry* e = table.find("material.mode")) {
    if (e->value == "strain")
      cfg.mode = PlaneMode::Strain;
    else if (e->value == "stress")
      cfg.mode = PlaneMode::Stress;
    else
      throw ParseError("material.mode must be strain or stress, got '" + e->value + "'",
                       e->line);
  }

  int law_line = 0;
  if (const Entry* e = table.find("law.kind")) {
    law_line = e->line;
    if (e->value == "zero")
      cfg.law_kind = ViscoplasticLaw::Kind::Zero;
    else if (e->value == "linear_relaxation")
      cfg.law_kind = ViscoplasticLaw::Kind::LinearRelaxation;
    else if (e->value == "perzyna")
      cfg.law_kind = ViscoplasticLaw::Kind::TruncatedPerzyna;
    else
      throw ParseError(
          "law.kind must be zero, linear_relaxation, or perzyna; got '" + e->value + "'",
          e->line);
  }
  const bool needs_kappa = cfg.law_kind != ViscoplasticLaw::Kind::Zero;
  const bool needs_sigma_y = cfg.law_kind == ViscoplasticLaw::Kind::TruncatedPerzyna;
  if (needs_kappa && !table.has("law.kappa"))
    throw ParseError("law.kind requires law.kappa", law_line);
  if (needs_sigma_y && !table.has("law.sigma_y"))
    throw ParseError("law.kind = perzyna requires law.sigma_y", law_line);
  if (!needs_kappa && table.has("law.kappa"))
    throw ParseError("law.kappa given but law.kind = zero", table.line_of("law.kappa"));
  if (!needs_sigma_y && table.has("law.sigma_y"))
    throw ParseError("law.sigma_y given but law.kind is not perzyna",
                     table.line_of("law.sigma_y"));
  cfg.kappa = get_double("law.kappa", 0.0, nonnegative, "must be >= 0");
  cfg.sigma_y = get_double("law.sigma_y", 0.0, nonnegative, "must be >= 0");

  if (const Entry* e = table.find("load.body")) cfg.load.body = to_vec2("load.body", *e);
  if (const Entry* e = table.find("load.traction"))
    cfg.load.traction = to_vec2("load.traction", *e);
  if (const Entry* e = table.find("load.profile")) {
    try {
      cfg.load.profile = TimeProfile::parse(e->value);
    } catch (const Error& err) {
      throw ParseError(err.what(), e->line);
    }
  }

  if (const Entry* e = table.find("init.sigma")) {
    std::string s = e->value;
    std::replace(s.begin(), s.end(), '(', ' ');
    std::replace(s.begin(), s.end(), ')', ' ');
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::string extra;
    if (!(in >> cfg.init_sigma_diag.x() >> cfg.init_sigma_diag.y() >> cfg.init_sigma_shear) ||
        (in >> extra))
      throw ParseError("init.sigma wants three components (s11, s22, s12), got '" + e->value +
                           "'",
                       e->line);
  }

  cfg.time_dt = get_double("time.dt", cfg.time_dt, positive, "must be positive");
  cfg.time_horizon = get_double("time.T", cfg.time_horizon, positive, "must be positive");

  cfg.solver.vi_tol = get_double("vi.tol", cfg.solver.vi_tol, positive, "must be positive");
  if (const Entry* e = table.find("vi.max_iters")) {
    if (e->value == "auto") {
      cfg.solver.vi_max_iters = 0;
    } else {
      const long v = to_long("vi.max_iters", *e);
      if (v < 1) throw ParseError("vi.max_iters must be >= 1 or auto", e->line);
      cfg.solver.vi_max_iters = static_cast<int>(v);
    }
  }
  if (const Entry* e = table.find("vi.step")) {
    if (e->value == "auto") {
      cfg.solver.vi_step = 0.0;
    } else {
      const double v = to_double("vi.step", *e);
      if (v <= 0.0) throw ParseError("vi.step must be positive or auto", e->line);
      cfg.solver.vi_step = v;
    }
  }

  cfg.solver.fp_tol = get_double("fp.tol", cfg.solver.fp_tol, positive, "must be positive");
  if (const Entry* e = table.find("fp.max_iters")) {
    const long v = to_long("fp.max_iters", *e);
    if (v < 1) throw ParseError("fp.max_iters must be >= 1", e->line);
    cfg.solver.fp_max_iters = static_cast<int>(v);
  }
  if (const Entry* e = table.find("fp.quadrature")) {
    if (e->value == "rectangle")
      cfg.solver.quadrature = Quadrature::Rectangle;
    else if (e->value == "trapezoid")
      cfg.solver.quadrature = Quadrature::Trapezoid;
    else
      throw ParseError("fp.quadrature must be rectangle or trapezoid, got '" + e->value + "'",
                       e->line);
  }
  if (const Entry* e = table.find("fp.scheme")) {
    if (e->value == "picard")
      cfg.solver.scheme = Scheme::Picard;
    else if (e->value == "march")
      cfg.solver.scheme = Scheme::March;
    else
      throw ParseError("fp.scheme must be picard or march, got '" + e->value + "'", e->line);
  }

  if (const Entry* e = table.find("contact.gap")) {
    const double v = to_double("contact.gap", *e);
    if (v < 0.0) throw ParseError("contact.gap must be >= 0", e->line);
    cfg.contact_gap_override = v;
  }

  if (const Entry* e = table.find("out.dir")) cfg.out_dir = e->value;
  if (const Entry* e = table.find("out.fields")) {
    cfg.fields = OutputFields{false, false, false, false};
    std::string s = e->value;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::string name;
    bool any = false;
    while (in >> name) {
      any = true;
      if (name == "u")
        cfg.fields.u = true;
      else if (name == "sigma")
        cfg.fields.sigma = true;
      else if (name == "eta")
        cfg.fields.eta = true;
      else if (name == "lambda")
        cfg.fields.lambda = true;
      else
        throw ParseError("out.fields entries must be among u, sigma, eta, lambda; got '" +
                             name + "'",
                         e->line);
    }
    if (!any) throw ParseError("out.fields is empty", e->line);
  }

  if (const Entry* e = table.find("seed")) {
    const long v = to_long("seed", *e);
    if (v < 0) throw ParseError("seed must be >= 0", e->line);
    cfg.seed = static_cast<std::uint64_t>(v);
  }

  table.reject_unused();

  if (require_mesh && cfg.mesh_file.empty())
    throw ParseError("missing mesh reference: set mesh.file or pass --mesh", 0);
  return cfg;
}

std::string effective_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "# effective configuration\n";
  if (!cfg.mesh_file.empty()) out << "mesh.file = " << cfg.mesh_file << "\n";
  out << "material.youngs = " << fmt(cfg.youngs) << "\n";
  out << "material.poisson = " << fmt(cfg.poisson) << "\n";
  out << "material.mode = " << (cfg.mode == PlaneMode::Strain ? "strain" : "stress") << "\n";
  switch (cfg.law_kind) {
    case ViscoplasticLaw::Kind::Zero:
      out << "law.kind = zero\n";
      break;
    case ViscoplasticLaw::Kind::LinearRelaxation:
      out << "law.kind = linear_relaxation\n";
      out << "law.kappa = " << fmt(cfg.kappa) << "\n";
      break;
    case ViscoplasticLaw::Kind::TruncatedPerzyna:
      out << "law.kind = perzyna\n";
      out << "law.kappa = " << fmt(cfg.kappa) << "\n";
      out << "law.sigma_y = " << fmt(cfg.sigma_y) << "\n";
      break;
  }
  out << "load.body = (" << fmt(cfg.load.body.x()) << ", " << fmt(cfg.load.body.y()) << ")\n";
  out << "load.traction = (" << fmt(cfg.load.traction.x()) << ", "
      << fmt(cfg.load.traction.y()) << ")\n";
  out << "load.profile = " << cfg.load.profile.describe() << "\n";
  out << "init.sigma = (" << fmt(cfg.init_sigma_diag.x()) << ", "
      << fmt(cfg.init_sigma_diag.y()) << ", " << fmt(cfg.init_sigma_shear) << ")\n";
  out << "time.dt = " << fmt(cfg.time_dt) << "\n";
  out << "time.T = " << fmt(cfg.time_horizon) << "\n";
  out << "vi.tol = " << fmt(cfg.solver.vi_tol) << "\n";
  if (cfg.solver.vi_max_iters > 0)
    out << "vi.max_iters = " << cfg.solver.vi_max_iters << "\n";
  else
    out << "vi.max_iters = auto\n";
  if (cfg.solver.vi_step > 0.0)
    out << "vi.step = " << fmt(cfg.solver.vi_step) << "\n";
  else
    out << "vi.step = auto\n";
  out << "fp.tol = " << fmt(cfg.solver.fp_tol) << "\n";
  out << "fp.max_iters = " << cfg.solver.fp_max_iters << "\n";
  out << "fp.quadrature = " << to_string(cfg.solver.quadrature) << "\n";
  out << "fp.scheme = " << to_string(cfg.solver.scheme) << "\n";
  if (cfg.contact_gap_override >= 0.0)
    out << "contact.gap = " << fmt(cfg.contact_gap_override) << "\n";
  out << "out.dir = " << cfg.out_dir << "\n";
  out << "out.fields =";
  bool first = true;
  for (const auto& [on, name] :
       {std::pair{cfg.fields.u, "u"}, {cfg.fields.sigma, "sigma"}, {cfg.fields.eta, "eta"},
        {cfg.fields.lambda, "lambda"}}) {
    if (!on) continue;
    out << (first ? " " : ",") << name;
    first = false;
  }
  out << "\n";
  out << "seed = " << cfg.seed << "\n";
  return out.str();
}

const char* to_string(Quadrature q) {
  return q == Quadrature::Rectangle ? "rectangle" : "trapezoid";
}

const char* to_string(Scheme s) { return s == Scheme::Picard ? "picard" : "march"; }

ElasticTensor make_elastic(const RunConfig& cfg) {
  return ElasticTensor::isotropic(cfg.youngs, cfg.poisson, cfg.mode);
}

ViscoplasticLaw make_law(const RunConfig& cfg) {
  switch (cfg.law_kind) {
    case ViscoplasticLaw::Kind::Zero:
      return ViscoplasticLaw::zero();
    case ViscoplasticLaw::Kind::LinearRelaxation:
      return ViscoplasticLaw::linear_relaxation(cfg.kappa);
    case ViscoplasticLaw::Kind::TruncatedPerzyna:
      return ViscoplasticLaw::truncated_perzyna(cfg.kappa, cfg.sigma_y);
  }
  return ViscoplasticLaw::zero();
}

ProblemSpec make_problem_spec(const RunConfig& cfg, Mesh2D mesh) {
  ProblemSpec spec;
  spec.mesh = std::move(mesh);
  spec.elastic = make_elastic(cfg);
  spec.law = make_law(cfg);
  spec.load = cfg.load;
  spec.grid = TimeGrid::from_horizon(cfg.time_dt, cfg.time_horizon);
  spec.config = cfg.solver;
  spec.contact_gap_override = cfg.contact_gap_override;

  const Vec3 packed = to_packed((Mat2() << cfg.init_sigma_diag.x(), cfg.init_sigma_shear,
                                 cfg.init_sigma_shear, cfg.init_sigma_diag.y())
                                    .finished());
  if (!packed.isZero())
    spec.sigma0 = packed.replicate(1, spec.mesh.triangle_count());
  return spec;
}

}  // namespace viscontact
