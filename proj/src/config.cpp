#include "mfgt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/core.h>

#include "mfgt/error.hpp"

namespace mfgt {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Input iterator that counts the newlines it has stepped over.
struct LineCountingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  int* line = nullptr;

  reference operator*() const { return *p; }
  LineCountingIterator& operator++() {
    if (*p == '\n') ++*line;
    ++p;
    return *this;
  }
  LineCountingIterator operator++(int) {
    LineCountingIterator old = *this;
    ++*this;
    return old;
  }
  bool operator==(const LineCountingIterator& o) const { return p == o.p; }
  bool operator!=(const LineCountingIterator& o) const { return p != o.p; }
};

// Records the source line of every JSON pointer in the document.
class LineLocator : public nlohmann::json_sax<json> {
 public:
  explicit LineLocator(const int* line) : line_(line) {}

  std::map<std::string, int> lines;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override { return open(false); }
  bool start_array(std::size_t) override { return open(true); }
  bool end_object() override { return close(); }
  bool end_array() override { return close(); }
  bool key(string_t& k) override {
    pending_ = stack_.back().path + "/" + k;
    lines[pending_] = *line_;
    return true;
  }
  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  struct Frame {
    std::string path;
    bool array;
    std::size_t index;
  };

  std::string child() {
    if (stack_.empty()) return "";
    Frame& top = stack_.back();
    if (top.array) return top.path + "/" + std::to_string(top.index++);
    return pending_;
  }
  bool value() {
    lines.emplace(child(), *line_);
    return true;
  }
  bool open(bool array) {
    std::string p = child();
    lines.emplace(p, *line_);
    stack_.push_back({p, array, 0});
    return true;
  }
  bool close() {
    stack_.pop_back();
    return true;
  }

  const int* line_;
  std::vector<Frame> stack_;
  std::string pending_;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, int> lines) : lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    const std::string where = path.empty() ? "<root>" : path;
    throw Error(ErrorCode::kConfig, fmt::format("{} (line {}): {}", where, line_of(path), msg));
  }

  int line_of(std::string path) const {
    while (true) {
      auto it = lines_.find(path);
      if (it != lines_.end()) return it->second;
      if (path.empty()) return 1;
      path.erase(path.rfind('/'));
    }
  }

  void object(const json& j, const std::string& path) const {
    if (!j.is_object()) fail(path, "expected an object");
  }

  void allowed(const json& j, const std::string& path,
               std::initializer_list<const char*> keys) const {
    object(j, path);
    for (const auto& [k, v] : j.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
        fail(path + "/" + k, "unknown key '" + k + "'");
      }
    }
  }

  const json* find(const json& obj, const std::string& key) const {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
  }

  long long integer(const json& j, const std::string& path) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long long>();
  }

  double number_or(const json& obj, const std::string& path, const std::string& key,
                   double fallback) const {
    const json* v = find(obj, key);
    return v ? number(*v, path + "/" + key) : fallback;
  }

  long long integer_or(const json& obj, const std::string& path,
                       const std::string& key, long long fallback) const {
    const json* v = find(obj, key);
    return v ? integer(*v, path + "/" + key) : fallback;
  }

  const json& required(const json& obj, const std::string& path,
                       const std::string& key) const {
    const json* v = find(obj, key);
    if (!v) fail(path + "/" + key, "missing required field '" + key + "'");
    return *v;
  }

  std::vector<double> numbers(const json& j, const std::string& path) const {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(number(j[i], path + "/" + std::to_string(i)));
    }
    return out;
  }

 private:
  std::map<std::string, int> lines_;
};

TrigPolynomial read_trig(const Reader& rd, const json& j, const std::string& path,
                         int dim) {
  rd.allowed(j, path, {"constant", "terms"});
  TrigPolynomial p;
  p.constant = rd.number_or(j, path, "constant", 0.0);
  if (const json* terms = rd.find(j, "terms")) {
    const std::string tp = path + "/terms";
    if (!terms->is_array()) rd.fail(tp, "expected an array of terms");
    for (std::size_t i = 0; i < terms->size(); ++i) {
      const std::string ip = tp + "/" + std::to_string(i);
      const json& t = (*terms)[i];
      rd.allowed(t, ip, {"freq", "cos", "sin"});
      const json& fq = rd.required(t, ip, "freq");
      if (!fq.is_array() || fq.empty() || fq.size() > static_cast<std::size_t>(dim)) {
        rd.fail(ip + "/freq", fmt::format("expected 1 to {} integer frequencies", dim));
      }
      TrigTerm term;
      for (std::size_t d = 0; d < fq.size(); ++d) {
        term.freq[d] = static_cast<int>(rd.integer(fq[d], ip + "/freq/" + std::to_string(d)));
      }
      term.cos_coef = rd.number_or(t, ip, "cos", 0.0);
      term.sin_coef = rd.number_or(t, ip, "sin", 0.0);
      p.terms.push_back(term);
    }
  }
  return p;
}

GridConfig read_grid(const Reader& rd, const json& j) {
  const std::string path = "/grid";
  rd.allowed(j, path, {"dim", "n_x", "n_t", "horizon", "q_max"});
  GridConfig g;
  g.dim = static_cast<int>(rd.integer_or(j, path, "dim", 1));
  if (g.dim != 1 && g.dim != 2) rd.fail(path + "/dim", "dim must be 1 or 2");
  const long long nx = rd.integer(rd.required(j, path, "n_x"), path + "/n_x");
  if (nx < 1 || nx > 4096) rd.fail(path + "/n_x", "n_x must lie in [1, 4096]");
  const long long nt = rd.integer(rd.required(j, path, "n_t"), path + "/n_t");
  if (nt < 1 || nt > 100000) rd.fail(path + "/n_t", "n_t must lie in [1, 100000]");
  g.n_x = static_cast<int>(nx);
  g.n_t = static_cast<int>(nt);
  g.horizon = rd.number_or(j, path, "horizon", 1.0);
  if (!(g.horizon > 0.0)) rd.fail(path + "/horizon", "horizon must be positive");
  if (const json* q = rd.find(j, "q_max"); q && !q->is_null()) {
    g.q_max = rd.number(*q, path + "/q_max");
    if (!(*g.q_max > 0.0)) rd.fail(path + "/q_max", "q_max must be positive");
  }
  return g;
}

ModelSpec read_model(const Reader& rd, const json& j, int dim) {
  const std::string path = "/model";
  rd.allowed(j, path, {"r", "eps0", "f", "kappa", "kappa_g", "c_F", "c_g", "g_base"});
  ModelSpec m;
  m.r = rd.number_or(j, path, "r", 2.0);
  m.eps0 = rd.number_or(j, path, "eps0", 0.5);
  m.c_F = rd.number_or(j, path, "c_F", 0.0);
  m.c_g = rd.number_or(j, path, "c_g", 0.0);
  auto trig = [&](const char* key, TrigPolynomial& out) {
    if (const json* t = rd.find(j, key)) out = read_trig(rd, *t, path + "/" + key, dim);
  };
  trig("f", m.f);
  trig("kappa", m.kappa);
  trig("kappa_g", m.kappa_g);
  trig("g_base", m.g_base);
  try {
    m.validate();
  } catch (const Error& e) {
    rd.fail(path, e.what());
  }
  return m;
}

Mu0Config read_mu0(const Reader& rd, const json& j, const GridConfig& g) {
  const std::string path = "/mu0";
  rd.allowed(j, path, {"uniform", "atoms", "density"});
  if (j.size() != 1) rd.fail(path, "give exactly one of 'uniform', 'atoms', 'density'");
  Mu0Config mu;
  if (const json* u = rd.find(j, "uniform")) {
    if (!u->is_boolean() || !u->get<bool>()) rd.fail(path + "/uniform", "expected true");
    mu.kind = Mu0Config::Kind::kUniform;
  } else if (const json* d = rd.find(j, "density")) {
    mu.kind = Mu0Config::Kind::kDensity;
    mu.density = read_trig(rd, *d, path + "/density", g.dim);
  } else {
    const json& atoms = j["atoms"];
    const std::string ap = path + "/atoms";
    if (!atoms.is_array() || atoms.empty()) rd.fail(ap, "expected a nonempty array of atoms");
    mu.kind = Mu0Config::Kind::kAtoms;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string ip = ap + "/" + std::to_string(i);
      rd.allowed(atoms[i], ip, {"cell", "weight"});
      const json& cell = rd.required(atoms[i], ip, "cell");
      if (!cell.is_array() || cell.size() != static_cast<std::size_t>(g.dim)) {
        rd.fail(ip + "/cell", fmt::format("expected {} cell indices", g.dim));
      }
      CellIndex idx{0, 0};
      for (std::size_t d = 0; d < cell.size(); ++d) {
        const std::string cp = ip + "/cell/" + std::to_string(d);
        const long long c = rd.integer(cell[d], cp);
        if (c < 0 || c >= g.n_x) rd.fail(cp, "cell index outside [0, n_x)");
        idx[d] = static_cast<int>(c);
      }
      const double w = rd.number(rd.required(atoms[i], ip, "weight"), ip + "/weight");
      if (!(w > 0.0)) rd.fail(ip + "/weight", "weight must be positive");
      mu.atoms.push_back({idx, w});
    }
  }
  return mu;
}

SolverConfig read_solver(const Reader& rd, const json& j) {
  const std::string path = "/solver";
  rd.allowed(j, path, {"alpha", "tol", "max_iter", "seed"});
  SolverConfig s;
  s.alpha = rd.number_or(j, path, "alpha", s.alpha);
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) rd.fail(path + "/alpha", "alpha must lie in (0, 1]");
  s.tol = rd.number_or(j, path, "tol", s.tol);
  if (!(s.tol >= 0.0)) rd.fail(path + "/tol", "tol must be nonnegative");
  const long long it = rd.integer_or(j, path, "max_iter", s.max_iter);
  if (it < 0 || it > 100000) rd.fail(path + "/max_iter", "max_iter must lie in [0, 100000]");
  s.max_iter = static_cast<int>(it);
  const long long seed = rd.integer_or(j, path, "seed", 0);
  if (seed < 0) rd.fail(path + "/seed", "seed must be nonnegative");
  s.seed = static_cast<unsigned long long>(seed);
  return s;
}

OutputConfig read_output(const Reader& rd, const json& j) {
  const std::string path = "/output";
  rd.allowed(j, path, {"directory", "formats"});
  OutputConfig o;
  if (const json* d = rd.find(j, "directory")) {
    if (!d->is_string() || d->get<std::string>().empty()) {
      rd.fail(path + "/directory", "expected a nonempty string");
    }
    o.directory = d->get<std::string>();
  }
  if (const json* f = rd.find(j, "formats")) {
    if (!f->is_array()) rd.fail(path + "/formats", "expected an array of strings");
    o.formats.clear();
    for (std::size_t i = 0; i < f->size(); ++i) {
      const std::string fp = path + "/formats/" + std::to_string(i);
      const json& s = (*f)[i];
      if (!s.is_string() || (s != "csv" && s != "json")) rd.fail(fp, "format must be 'csv' or 'json'");
      o.formats.push_back(s.get<std::string>());
    }
  }
  return o;
}

FenchelConfig read_fenchel(const Reader& rd, const json& j, int dim) {
  const std::string path = "/fenchel";
  rd.allowed(j, path, {"x", "betas", "probe_fractions", "q_radius", "q_spacing", "window"});
  FenchelConfig f;
  if (const json* x = rd.find(j, "x")) {
    std::vector<double> v = rd.numbers(*x, path + "/x");
    if (v.size() != static_cast<std::size_t>(dim)) rd.fail(path + "/x", "point has wrong dimension");
    for (int d = 0; d < dim; ++d) f.x[d] = v[static_cast<std::size_t>(d)];
  }
  auto positive_list = [&](const char* key, std::vector<double>& out) {
    if (const json* v = rd.find(j, key)) {
      out = rd.numbers(*v, path + "/" + key);
      if (out.empty() || std::any_of(out.begin(), out.end(), [](double b) { return !(b > 0.0); })) {
        rd.fail(path + "/" + key, "expected a nonempty list of positive numbers");
      }
    }
  };
  positive_list("betas", f.betas);
  positive_list("probe_fractions", f.probe_fractions);
  f.q_radius = rd.number_or(j, path, "q_radius", f.q_radius);
  f.q_spacing = rd.number_or(j, path, "q_spacing", f.q_spacing);
  f.window = rd.number_or(j, path, "window", f.window);
  if (!(f.q_radius > 0.0)) rd.fail(path + "/q_radius", "q_radius must be positive");
  if (!(f.q_spacing > 0.0)) rd.fail(path + "/q_spacing", "q_spacing must be positive");
  if (!(f.window >= 0.0)) rd.fail(path + "/window", "window must be nonnegative");
  return f;
}

}  // namespace

bool OutputConfig::wants(std::string_view format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

TorusGrid RunConfig::make_grid() const {
  return TorusGrid(grid.dim, grid.n_x, grid.n_t, grid.horizon);
}

AtomicTorusMeasure RunConfig::make_mu0(const TorusGrid& g) const {
  switch (mu0.kind) {
    case Mu0Config::Kind::kUniform:
      return AtomicTorusMeasure::uniform(g);
    case Mu0Config::Kind::kDensity: {
      std::vector<double> d;
      for (int i = 0; i < g.num_cells(); ++i) d.push_back(mu0.density(g.center(i)));
      return AtomicTorusMeasure::from_density(d);
    }
    case Mu0Config::Kind::kAtoms:
      break;
  }
  std::vector<CellAtom> atoms;
  for (const auto& [idx, w] : mu0.atoms) atoms.push_back({g.flat_index(idx), w});
  return AtomicTorusMeasure(std::move(atoms));
}

double RunConfig::q_max(const Model& model) const {
  return grid.q_max ? *grid.q_max : model.default_q_max();
}

RunConfig RunConfig::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::kInvalidArgument, "resolution scale must be positive");
  }
  RunConfig out = *this;
  out.grid.n_x = static_cast<int>(std::lround(grid.n_x * s));
  out.grid.n_t = static_cast<int>(std::lround(grid.n_t * s));
  if (out.grid.n_x < 1 || out.grid.n_t < 1) {
    throw Error(ErrorCode::kInvalidArgument, "resolution scale leaves an empty grid");
  }
  const TorusGrid before = make_grid();
  const TorusGrid after = out.make_grid();
  for (auto& [idx, w] : out.mu0.atoms) {
    idx = after.multi_index(after.locate(before.center(before.flat_index(idx))));
  }
  return out;
}

ordered_json trig_to_json(const TrigPolynomial& p) {
  ordered_json terms = ordered_json::array();
  for (const TrigTerm& t : p.terms) {
    terms.push_back({{"freq", {t.freq[0], t.freq[1]}}, {"cos", t.cos_coef}, {"sin", t.sin_coef}});
  }
  return {{"constant", p.constant}, {"terms", terms}};
}

ordered_json RunConfig::echo() const {
  ordered_json j;
  j["grid"] = {{"dim", grid.dim},
               {"n_x", grid.n_x},
               {"n_t", grid.n_t},
               {"horizon", grid.horizon},
               {"q_max", grid.q_max ? ordered_json(*grid.q_max) : ordered_json(nullptr)}};
  j["model"] = {{"r", model.r},
                {"eps0", model.eps0},
                {"f", trig_to_json(model.f)},
                {"kappa", trig_to_json(model.kappa)},
                {"kappa_g", trig_to_json(model.kappa_g)},
                {"c_F", model.c_F},
                {"c_g", model.c_g},
                {"g_base", trig_to_json(model.g_base)}};
  switch (mu0.kind) {
    case Mu0Config::Kind::kUniform:
      j["mu0"] = {{"uniform", true}};
      break;
    case Mu0Config::Kind::kDensity:
      j["mu0"] = {{"density", trig_to_json(mu0.density)}};
      break;
    case Mu0Config::Kind::kAtoms: {
      ordered_json atoms = ordered_json::array();
      for (const auto& [idx, w] : mu0.atoms) {
        ordered_json cell = ordered_json::array();
        for (int d = 0; d < grid.dim; ++d) cell.push_back(idx[static_cast<std::size_t>(d)]);
        atoms.push_back({{"cell", cell}, {"weight", w}});
      }
      j["mu0"] = {{"atoms", atoms}};
      break;
    }
  }
  j["solver"] = {{"alpha", solver.alpha},
                 {"tol", solver.tol},
                 {"max_iter", solver.max_iter},
                 {"seed", solver.seed}};
  j["output"] = {{"directory", output.directory}, {"formats", output.formats}};
  ordered_json x = ordered_json::array();
  for (int d = 0; d < grid.dim; ++d) x.push_back(fenchel.x[d]);
  j["fenchel"] = {{"x", x},
                  {"betas", fenchel.betas},
                  {"probe_fractions", fenchel.probe_fractions},
                  {"q_radius", fenchel.q_radius},
                  {"q_spacing", fenchel.q_spacing},
                  {"window", fenchel.window}};
  return j;
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw Error(ErrorCode::kConfig, fmt::format("line {}: malformed JSON", line));
  }
  int line = 1;
  LineLocator locator(&line);
  LineCountingIterator first{text.data(), &line};
  LineCountingIterator last{text.data() + text.size(), &line};
  json::sax_parse(first, last, &locator);
  Reader rd(std::move(locator.lines));

  rd.allowed(root, "", {"grid", "model", "mu0", "solver", "output", "fenchel"});
  RunConfig cfg;
  cfg.grid = read_grid(rd, rd.required(root, "", "grid"));
  if (const json* m = rd.find(root, "model")) cfg.model = read_model(rd, *m, cfg.grid.dim);
  if (const json* m = rd.find(root, "mu0")) cfg.mu0 = read_mu0(rd, *m, cfg.grid);
  if (const json* s = rd.find(root, "solver")) cfg.solver = read_solver(rd, *s);
  if (const json* o = rd.find(root, "output")) cfg.output = read_output(rd, *o);
  if (const json* f = rd.find(root, "fenchel")) cfg.fenchel = read_fenchel(rd, *f, cfg.grid.dim);

  // Catch measures that do not normalize before any solve starts.
  try {
    cfg.make_mu0(cfg.make_grid());
  } catch (const Error& e) {
    rd.fail("/mu0", e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mfgt
