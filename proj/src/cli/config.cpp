#include "istab/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace istab::cli {

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Cgn: return "cgn";
    case ModelKind::LinearDelayed: return "linear-delayed";
    case ModelKind::SwitchedControl: return "switched-control";
    case ModelKind::Generic: return "generic";
  }
  return "unknown";
}

const char* to_string(DelayKind k) {
  switch (k) {
    case DelayKind::None: return "none";
    case DelayKind::Constant: return "constant";
    case DelayKind::Periodic: return "periodic";
    case DelayKind::Stochastic: return "stochastic";
  }
  return "unknown";
}

const char* to_string(SwitchKind k) {
  switch (k) {
    case SwitchKind::Constant: return "constant";
    case SwitchKind::Cyclic: return "cyclic";
    case SwitchKind::Random: return "random";
    case SwitchKind::Sequence: return "sequence";
  }
  return "unknown";
}

namespace {

template <class T>
bool same(const T& a, const T& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same(const LinearMode& a, const LinearMode& b) { return same(a.A, b.A) && same(a.B, b.B); }

template <class T>
bool same_list(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same(a[i], b[i])) return false;
  }
  return true;
}

bool same(const std::optional<Vector>& a, const std::optional<Vector>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same(*a, *b);
}

bool is_linear(ModelKind k) {
  return k == ModelKind::LinearDelayed || k == ModelKind::SwitchedControl;
}

}  // namespace

bool operator==(const ModelConfig& a, const ModelConfig& b) {
  return a.kind == b.kind && a.networks == b.networks && same_list(a.modes, b.modes) &&
         same(a.q, b.q) && same_list(a.controls, b.controls) && same_list(a.matrices, b.matrices) &&
         a.labels == b.labels;
}

bool operator==(const DelayConfig& a, const DelayConfig& b) {
  return a.kind == b.kind && a.L == b.L && same(a.matrix, b.matrix) && a.taus == b.taus &&
         a.low == b.low && a.high == b.high && a.seed == b.seed;
}

bool operator==(const SimulationConfig& a, const SimulationConfig& b) {
  return a.steps == b.steps && same(a.x0, b.x0) && same(a.y0, b.y0) &&
         a.divergence_bound == b.divergence_bound;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.name == b.name && a.model == b.model && a.delay == b.delay &&
         a.switching == b.switching && a.simulation == b.simulation &&
         a.tolerances == b.tolerances && a.compare == b.compare;
}

// ---------------------------------------------------------------------------
// CSV sidecars

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path + ": cannot open matrix file");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError,
                    path + ":" + std::to_string(lineno) + ": '" + cell + "' is not a number");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::ConfigError,
                  path + ":" + std::to_string(lineno) + ": row has " + std::to_string(row.size()) +
                      " entries, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ConfigError, path + ": matrix file is empty");
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) M(i, j) = rows[i][j];
  }
  return M;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string origin, std::string base_dir)
      : origin_(std::move(origin)), base_dir_(std::move(base_dir)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const YAML::Mark m = node.Mark();
    fail_at(m.is_null() ? -1 : m.line, m.is_null() ? -1 : m.column, msg);
  }

  [[noreturn]] void fail_at(int line, int column, const std::string& msg) const {
    std::string where = origin_;
    if (line >= 0) where += ":" + std::to_string(line + 1) + ":" + std::to_string(column + 1);
    throw Error(ErrorCode::ConfigError, where + ": " + msg);
  }

  void only_keys(const YAML::Node& map, const std::string& section,
                 std::initializer_list<const char*> allowed) const {
    if (!map.IsMap()) fail(map, "section '" + section + "' must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::none_of(allowed.begin(), allowed.end(),
                       [&](const char* a) { return key == a; })) {
        fail(kv.first, "unknown key '" + key + "' in section '" + section + "'");
      }
    }
  }

  YAML::Node require(const YAML::Node& map, const char* key, const std::string& section) const {
    const YAML::Node v = map[key];
    if (!v) fail(map, "section '" + section + "' is missing '" + key + "'");
    return v;
  }

  double number(const YAML::Node& n) const {
    if (!n.IsScalar()) fail(n, "expected a number");
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(n, "expected a finite number");
      return v;
    } catch (const YAML::Exception&) {
      fail(n, "'" + n.Scalar() + "' is not a number");
    }
  }

  long long integer(const YAML::Node& n, long long lo = std::numeric_limits<long long>::min()) const {
    if (!n.IsScalar()) fail(n, "expected an integer");
    long long v = 0;
    try {
      v = n.as<long long>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + n.Scalar() + "' is not an integer");
    }
    if (v < lo) fail(n, "value must be >= " + std::to_string(lo));
    return v;
  }

  std::uint64_t seed(const YAML::Node& n) const {
    if (!n.IsScalar()) fail(n, "expected a seed (nonnegative integer)");
    try {
      return n.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + n.Scalar() + "' is not a valid seed");
    }
  }

  std::string text(const YAML::Node& n) const {
    if (!n.IsScalar()) fail(n, "expected a string");
    return n.Scalar();
  }

  Vector vector(const YAML::Node& n) const {
    if (!n.IsSequence() || n.size() == 0) fail(n, "expected a nonempty list of numbers");
    Vector v(static_cast<Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) v[static_cast<Index>(i)] = number(n[i]);
    return v;
  }

  /// Inline list of rows, or a string naming a CSV sidecar relative to the
  /// config file.
  Matrix matrix(const YAML::Node& n) const {
    if (n.IsScalar()) {
      const std::filesystem::path p = std::filesystem::path(base_dir_) / n.Scalar();
      if (!std::filesystem::exists(p)) fail(n, "matrix file '" + p.string() + "' does not exist");
      try {
        return read_csv_matrix(p.string());
      } catch (const Error& e) {
        fail(n, e.what());
      }
    }
    if (!n.IsSequence() || n.size() == 0) {
      fail(n, "expected a matrix as a list of rows or a CSV file name");
    }
    std::size_t cols = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (!n[i].IsSequence() || n[i].size() == 0) fail(n[i], "matrix row must be a list of numbers");
      if (i == 0) cols = n[i].size();
      if (n[i].size() != cols) {
        fail(n[i], "matrix row has " + std::to_string(n[i].size()) + " entries, expected " +
                       std::to_string(cols));
      }
    }
    Matrix M(static_cast<Index>(n.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < n.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        M(static_cast<Index>(i), static_cast<Index>(j)) = number(n[i][j]);
      }
    }
    return M;
  }

  Matrix square(const YAML::Node& n, const char* what) const {
    Matrix M = matrix(n);
    if (M.rows() != M.cols()) {
      fail(n, std::string(what) + " must be square, got " + std::to_string(M.rows()) + "x" +
                  std::to_string(M.cols()));
    }
    return M;
  }

  IntMatrix int_matrix(const YAML::Node& n, int lo) const {
    const Matrix M = matrix(n);
    if (M.rows() != M.cols()) fail(n, "delay matrix must be square");
    IntMatrix out(M.rows(), M.cols());
    for (Index i = 0; i < M.rows(); ++i) {
      for (Index j = 0; j < M.cols(); ++j) {
        const double v = M(i, j);
        if (v != std::floor(v) || v < lo) {
          fail(n, "delay matrix entries must be integers >= " + std::to_string(lo));
        }
        out(i, j) = static_cast<int>(v);
      }
    }
    return out;
  }

  void check_dim(const YAML::Node& n, Index got, Index want, const std::string& what) const {
    if (got != want) {
      fail(n, what + " has dimension " + std::to_string(got) + ", expected " + std::to_string(want));
    }
  }

  CgnNetwork network(const YAML::Node& n, const std::string& section, std::string& label) const {
    only_keys(n, section, {"label", "W", "epsilon", "activation", "c"});
    CgnNetwork net;
    const auto w = require(n, "W", section);
    net.W = square(w, "W");
    net.epsilon = number(require(n, "epsilon", section));
    if (n["activation"]) {
      net.activation = text(n["activation"]);
      if (net.activation != "tanh" && net.activation != "logistic") {
        fail(n["activation"], "activation must be 'tanh' or 'logistic'");
      }
    }
    if (n["c"]) {
      net.c = vector(n["c"]);
      check_dim(n["c"], net.c.size(), net.W.rows(), "c");
    } else {
      net.c = Vector::Zero(net.W.rows());
    }
    label = n["label"] ? text(n["label"]) : "";
    return net;
  }

  LinearMode mode(const YAML::Node& n, const std::string& section) const {
    LinearMode m;
    const auto a = require(n, "A", section);
    const auto b = require(n, "B", section);
    m.A = square(a, "A");
    m.B = square(b, "B");
    check_dim(b, m.B.rows(), m.A.rows(), "B");
    return m;
  }

  ModelConfig model(const YAML::Node& root) const {
    static const char* kinds[] = {"cgn", "linear-delayed", "switched-control", "generic"};
    std::vector<const char*> present;
    for (const char* k : kinds) {
      if (root[k]) present.push_back(k);
    }
    if (present.size() != 1) {
      fail(root, "exactly one model section (cgn, linear-delayed, switched-control, generic) "
                 "is required, found " + std::to_string(present.size()));
    }
    const std::string kind = present.front();
    const YAML::Node n = root[kind];
    ModelConfig m;
    if (kind == "cgn") {
      m.kind = ModelKind::Cgn;
      if (n.IsMap() && n["networks"]) {
        only_keys(n, "cgn", {"networks"});
        const auto nets = n["networks"];
        if (!nets.IsSequence() || nets.size() == 0) fail(nets, "networks must be a nonempty list");
        for (const auto& item : nets) {
          std::string label;
          m.networks.push_back(network(item, "cgn.networks", label));
          m.labels.push_back(label);
          check_dim(item, m.networks.back().W.rows(), m.networks.front().W.rows(), "network");
        }
      } else {
        std::string label;
        m.networks.push_back(network(n, "cgn", label));
        m.labels.push_back(label);
      }
    } else if (kind == "linear-delayed") {
      m.kind = ModelKind::LinearDelayed;
      only_keys(n, kind, {"A", "B"});
      m.modes.push_back(mode(n, kind));
    } else if (kind == "switched-control") {
      m.kind = ModelKind::SwitchedControl;
      only_keys(n, kind, {"modes", "q", "controls"});
      const auto modes = require(n, "modes", kind);
      if (!modes.IsSequence() || modes.size() == 0) fail(modes, "modes must be a nonempty list");
      for (const auto& item : modes) {
        only_keys(item, "switched-control.modes", {"A", "B"});
        m.modes.push_back(mode(item, "switched-control.modes"));
        check_dim(item, m.modes.back().A.rows(), m.modes.front().A.rows(), "mode");
      }
      const Index dim = m.modes.front().A.rows();
      if (n["q"]) {
        m.q = vector(n["q"]);
        check_dim(n["q"], m.q.size(), dim, "q");
      }
      if (n["controls"]) {
        const auto cs = n["controls"];
        if (!cs.IsSequence()) fail(cs, "controls must be a list of vectors");
        for (const auto& c : cs) {
          m.controls.push_back(vector(c));
          check_dim(c, m.controls.back().size(), dim, "control vector");
        }
      }
      if (!m.controls.empty() && m.q.size() == 0) {
        fail(n, "controls need a feedback gain 'q'");
      }
    } else {
      m.kind = ModelKind::Generic;
      only_keys(n, kind, {"matrix", "matrices", "labels"});
      if (n["matrix"] && n["matrices"]) fail(n, "give either 'matrix' or 'matrices', not both");
      if (n["matrix"]) {
        m.matrices.push_back(square(n["matrix"], "matrix"));
      } else {
        const auto ms = require(n, "matrices", kind);
        if (!ms.IsSequence() || ms.size() == 0) fail(ms, "matrices must be a nonempty list");
        for (const auto& item : ms) {
          m.matrices.push_back(square(item, "matrix"));
          check_dim(item, m.matrices.back().rows(), m.matrices.front().rows(), "matrix");
        }
      }
      if (n["labels"]) {
        const auto ls = n["labels"];
        if (!ls.IsSequence() || ls.size() != m.matrices.size()) {
          fail(ls, "labels must list one name per matrix");
        }
        for (const auto& l : ls) m.labels.push_back(text(l));
      } else {
        m.labels.assign(m.matrices.size(), "");
      }
    }
    return m;
  }

  DelayConfig delay(const YAML::Node& n, const ModelConfig& model, Index dim) const {
    DelayConfig d;
    if (!n) return d;
    only_keys(n, "delay", {"kind", "L", "matrix", "moduli", "tau", "taus", "low", "high", "seed"});
    const std::string kind = text(require(n, "kind", "delay"));
    const bool linear = is_linear(model.kind);
    if (n["L"]) d.L = static_cast<int>(integer(n["L"], linear ? 1 : 0));
    if (n["seed"]) d.seed = seed(n["seed"]);
    auto reject = [&](std::initializer_list<const char*> keys) {
      for (const char* k : keys) {
        if (n[k]) fail(n[k], std::string("'") + k + "' does not apply to delay kind '" + kind + "'");
      }
    };
    const int lowest = linear ? 1 : 0;
    if (kind == "none") {
      d.kind = DelayKind::None;
      reject({"matrix", "moduli", "tau", "taus", "low", "high", "seed"});
    } else if (kind == "constant") {
      d.kind = DelayKind::Constant;
      if (linear) {
        reject({"matrix", "moduli", "taus", "low", "high", "seed"});
        d.taus.push_back(static_cast<int>(integer(require(n, "tau", "delay"), 1)));
      } else {
        reject({"moduli", "tau", "taus", "low", "high", "seed"});
        const auto m = require(n, "matrix", "delay");
        d.matrix = int_matrix(m, 0);
        check_dim(m, d.matrix.rows(), dim, "delay matrix");
      }
    } else if (kind == "periodic") {
      d.kind = DelayKind::Periodic;
      if (linear) {
        reject({"matrix", "moduli", "tau", "low", "high", "seed"});
        const auto t = require(n, "taus", "delay");
        if (!t.IsSequence() || t.size() == 0) fail(t, "taus must be a nonempty list");
        for (const auto& v : t) d.taus.push_back(static_cast<int>(integer(v, 1)));
      } else {
        reject({"matrix", "tau", "taus", "low", "high", "seed"});
        const auto m = require(n, "moduli", "delay");
        d.matrix = int_matrix(m, 1);
        check_dim(m, d.matrix.rows(), dim, "moduli matrix");
      }
    } else if (kind == "stochastic") {
      d.kind = DelayKind::Stochastic;
      reject({"matrix", "moduli", "tau", "taus"});
      d.low = static_cast<int>(integer(require(n, "low", "delay"), lowest));
      d.high = static_cast<int>(integer(require(n, "high", "delay"), d.low));
      if (d.L && *d.L != d.high) fail(n["L"], "stochastic delays need L equal to 'high'");
    } else {
      fail(n["kind"], "delay kind must be none, constant, periodic or stochastic");
    }
    if (d.L) {
      const int need = implied_bound(d, linear);
      if (*d.L < need) {
        fail(n["L"], "L = " + std::to_string(*d.L) + " is below the largest scheduled delay " +
                         std::to_string(need));
      }
    }
    return d;
  }

  static int implied_bound(const DelayConfig& d, bool linear) {
    switch (d.kind) {
      case DelayKind::None: return linear ? 1 : 0;
      case DelayKind::Constant: return linear ? d.taus.front() : d.matrix.maxCoeff();
      case DelayKind::Periodic:
        return linear ? *std::max_element(d.taus.begin(), d.taus.end()) : d.matrix.maxCoeff() - 1;
      case DelayKind::Stochastic: return d.high;
    }
    return 0;
  }

  SwitchConfig switching(const YAML::Node& n, std::size_t count) const {
    SwitchConfig s;
    if (!n) return s;
    only_keys(n, "switch", {"kind", "index", "block", "seed", "sequence"});
    const std::string kind = text(require(n, "kind", "switch"));
    if (n["seed"]) s.seed = seed(n["seed"]);
    if (kind == "constant") {
      s.kind = SwitchKind::Constant;
      if (n["index"]) s.index = static_cast<std::size_t>(integer(n["index"], 0));
      if (s.index >= count) fail(n["index"], "switch index is out of range");
    } else if (kind == "cyclic") {
      s.kind = SwitchKind::Cyclic;
      if (n["block"]) s.block = static_cast<std::size_t>(integer(n["block"], 1));
    } else if (kind == "random") {
      s.kind = SwitchKind::Random;
    } else if (kind == "sequence") {
      s.kind = SwitchKind::Sequence;
      const auto seq = require(n, "sequence", "switch");
      if (!seq.IsSequence() || seq.size() == 0) fail(seq, "sequence must be a nonempty list");
      for (const auto& v : seq) {
        const auto idx = static_cast<std::size_t>(integer(v, 0));
        if (idx >= count) fail(v, "switch index is out of range");
        s.sequence.push_back(idx);
      }
    } else {
      fail(n["kind"], "switch kind must be constant, cyclic, random or sequence");
    }
    return s;
  }

  std::optional<SimulationConfig> simulation(const YAML::Node& n, Index dim) const {
    if (!n || n.IsNull()) return std::nullopt;
    if (n.IsMap() && n.size() == 0) return std::nullopt;
    only_keys(n, "simulation", {"steps", "x0", "y0", "divergence_bound"});
    SimulationConfig s;
    if (n["steps"]) s.steps = static_cast<std::size_t>(integer(n["steps"], 1));
    if (n["x0"]) {
      s.x0 = vector(n["x0"]);
      check_dim(n["x0"], s.x0->size(), dim, "x0");
    }
    if (n["y0"]) {
      s.y0 = vector(n["y0"]);
      check_dim(n["y0"], s.y0->size(), dim, "y0");
    }
    if (n["divergence_bound"]) {
      s.divergence_bound = number(n["divergence_bound"]);
      if (!(s.divergence_bound > 0)) fail(n["divergence_bound"], "divergence_bound must be > 0");
    }
    return s;
  }

  Tolerances tolerances(const YAML::Node& n) const {
    Tolerances t;
    if (!n) return t;
    only_keys(n, "tolerances", {"power", "certificate", "max_iter", "closure_cap"});
    if (n["power"]) t.power = number(n["power"]);
    if (n["certificate"]) t.certificate = number(n["certificate"]);
    if (!(t.power > 0) || !(t.certificate >= 0)) fail(n, "tolerances must be positive");
    if (n["max_iter"]) t.max_iter = static_cast<std::size_t>(integer(n["max_iter"], 1));
    if (n["closure_cap"]) t.closure_cap = static_cast<std::size_t>(integer(n["closure_cap"], 1));
    return t;
  }

  RunConfig run(const YAML::Node& root) const {
    if (!root.IsMap()) fail(root, "configuration must be a mapping");
    only_keys(root, "top level",
              {"name", "cgn", "linear-delayed", "switched-control", "generic", "delay", "switch",
               "simulation", "tolerances", "compare"});
    RunConfig c;
    if (root["name"]) c.name = text(root["name"]);
    c.model = model(root);
    const Index dim = base_dimension(c.model);
    c.delay = delay(root["delay"], c.model, dim);
    c.switching = switching(root["switch"], map_count(c.model));
    c.simulation = simulation(root["simulation"], dim);
    c.tolerances = tolerances(root["tolerances"]);
    if (root["compare"]) c.compare = text(root["compare"]);
    return c;
  }

  static Index base_dimension(const ModelConfig& m) {
    switch (m.kind) {
      case ModelKind::Cgn: return m.networks.front().W.rows();
      case ModelKind::LinearDelayed:
      case ModelKind::SwitchedControl: return m.modes.front().A.rows();
      case ModelKind::Generic: return m.matrices.front().rows();
    }
    return 0;
  }

  static std::size_t map_count(const ModelConfig& m) {
    switch (m.kind) {
      case ModelKind::Cgn: return m.networks.size();
      case ModelKind::LinearDelayed: return 1;
      case ModelKind::SwitchedControl:
        return m.modes.size() * std::max<std::size_t>(1, m.controls.size());
      case ModelKind::Generic: return m.matrices.size();
    }
    return 0;
  }

 private:
  std::string origin_;
  std::string base_dir_;
};

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin,
                       const std::string& base_dir) {
  Parser parser(origin, base_dir);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    parser.fail_at(e.mark.line, e.mark.column, e.msg);
  }
  try {
    return parser.run(root);
  } catch (const YAML::Exception& e) {
    parser.fail_at(e.mark.is_null() ? -1 : e.mark.line, e.mark.column, e.msg);
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path + ": cannot open configuration");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(buffer.str(), path, dir.empty() ? "." : dir.string());
}

// ---------------------------------------------------------------------------
// Emitting

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string vec(const Vector& v) {
  std::string s = "[";
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

std::string mat(const Matrix& M) {
  std::string s = "[";
  for (Index i = 0; i < M.rows(); ++i) s += (i ? ", " : "") + vec(M.row(i).transpose());
  return s + "]";
}

std::string imat(const IntMatrix& M) { return mat(M.cast<double>()); }

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

void emit_network(std::ostream& os, const CgnNetwork& n, const std::string& label,
                  const std::string& indent, const std::string& first) {
  std::string lead = first;
  auto line = [&](const std::string& s) {
    os << lead << s << "\n";
    lead = indent;
  };
  if (!label.empty()) line("label: " + quoted(label));
  line("W: " + mat(n.W));
  line("epsilon: " + num(n.epsilon));
  line("activation: " + n.activation);
  line("c: " + vec(n.c));
}

}  // namespace

std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  if (!c.name.empty()) os << "name: " << quoted(c.name) << "\n";
  const auto& m = c.model;
  switch (m.kind) {
    case ModelKind::Cgn:
      os << "cgn:\n";
      if (m.networks.size() == 1) {
        emit_network(os, m.networks.front(), m.labels.front(), "  ", "  ");
      } else {
        os << "  networks:\n";
        for (std::size_t i = 0; i < m.networks.size(); ++i) {
          emit_network(os, m.networks[i], m.labels[i], "      ", "    - ");
        }
      }
      break;
    case ModelKind::LinearDelayed:
      os << "linear-delayed:\n  A: " << mat(m.modes.front().A) << "\n  B: " << mat(m.modes.front().B)
         << "\n";
      break;
    case ModelKind::SwitchedControl:
      os << "switched-control:\n  modes:\n";
      for (const auto& mode : m.modes) {
        os << "    - A: " << mat(mode.A) << "\n      B: " << mat(mode.B) << "\n";
      }
      if (m.q.size() > 0) os << "  q: " << vec(m.q) << "\n";
      if (!m.controls.empty()) {
        os << "  controls:\n";
        for (const auto& ctl : m.controls) os << "    - " << vec(ctl) << "\n";
      }
      break;
    case ModelKind::Generic:
      os << "generic:\n  matrices:\n";
      for (const auto& M : m.matrices) os << "    - " << mat(M) << "\n";
      if (std::any_of(m.labels.begin(), m.labels.end(), [](const auto& l) { return !l.empty(); })) {
        os << "  labels: [";
        for (std::size_t i = 0; i < m.labels.size(); ++i) os << (i ? ", " : "") << quoted(m.labels[i]);
        os << "]\n";
      }
      break;
  }

  const auto& d = c.delay;
  const bool linear = is_linear(m.kind);
  os << "delay:\n  kind: " << to_string(d.kind) << "\n";
  if (d.L) os << "  L: " << *d.L << "\n";
  switch (d.kind) {
    case DelayKind::None: break;
    case DelayKind::Constant:
      if (linear) os << "  tau: " << d.taus.front() << "\n";
      else os << "  matrix: " << imat(d.matrix) << "\n";
      break;
    case DelayKind::Periodic:
      if (linear) {
        os << "  taus: [";
        for (std::size_t i = 0; i < d.taus.size(); ++i) os << (i ? ", " : "") << d.taus[i];
        os << "]\n";
      } else {
        os << "  moduli: " << imat(d.matrix) << "\n";
      }
      break;
    case DelayKind::Stochastic:
      os << "  low: " << d.low << "\n  high: " << d.high << "\n";
      break;
  }
  if (d.seed) os << "  seed: " << *d.seed << "\n";

  const auto& s = c.switching;
  os << "switch:\n  kind: " << to_string(s.kind) << "\n";
  if (s.kind == SwitchKind::Constant) os << "  index: " << s.index << "\n";
  if (s.kind == SwitchKind::Cyclic) os << "  block: " << s.block << "\n";
  if (s.kind == SwitchKind::Sequence) {
    os << "  sequence: [";
    for (std::size_t i = 0; i < s.sequence.size(); ++i) os << (i ? ", " : "") << s.sequence[i];
    os << "]\n";
  }
  if (s.seed) os << "  seed: " << *s.seed << "\n";

  if (c.simulation) {
    const auto& sim = *c.simulation;
    os << "simulation:\n  steps: " << sim.steps << "\n";
    if (sim.x0) os << "  x0: " << vec(*sim.x0) << "\n";
    if (sim.y0) os << "  y0: " << vec(*sim.y0) << "\n";
    os << "  divergence_bound: " << num(sim.divergence_bound) << "\n";
  }
  const auto& t = c.tolerances;
  os << "tolerances:\n  power: " << num(t.power) << "\n  certificate: " << num(t.certificate)
     << "\n  max_iter: " << t.max_iter << "\n  closure_cap: " << t.closure_cap << "\n";
  if (!c.compare.empty()) os << "compare: " << quoted(c.compare) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Bundled examples

namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

Vector v2(double a, double b) { return Vector{{a, b}}; }

IntMatrix i2(int a, int b, int c, int d) {
  IntMatrix M(2, 2);
  M << a, b, c, d;
  return M;
}

RunConfig cgn_base(const std::string& name, double epsilon, const Matrix& W, const Vector& c) {
  RunConfig r;
  r.name = name;
  r.model.kind = ModelKind::Cgn;
  r.model.networks.push_back({W, epsilon, "tanh", c});
  r.model.labels.push_back("C");
  r.switching.kind = SwitchKind::Constant;
  r.simulation = SimulationConfig{};
  return r;
}

// The attracting network: weights arranged so that the fixed point is
// (-0.386, 1.595).
RunConfig cgn_attracting(const std::string& name) {
  auto r = cgn_base(name, 0.8, m2(0, 0.75, -0.75, 0), v2(-1, 1));
  r.simulation->x0 = v2(0, 0);
  return r;
}

RunConfig linear_base(const std::string& name, const Matrix& A, const Matrix& B) {
  RunConfig r;
  r.name = name;
  r.model.kind = ModelKind::LinearDelayed;
  r.model.modes.push_back({A, B});
  r.switching.kind = SwitchKind::Constant;
  r.simulation = SimulationConfig{};
  r.simulation->x0 = v2(1, 1);
  return r;
}

}  // namespace

std::vector<std::string> example_names() {
  return {"cgn-oscillating", "cgn-attracting",  "cgn-periodic",    "cgn-stochastic",
          "linear-intrinsic", "linear-marginal", "switched-rows",   "switched-control",
          "switched-cgn",     "switched-counter", "singleton"};
}

RunConfig example_config(const std::string& name) {
  if (name == "cgn-oscillating") {
    auto r = cgn_base(name, 0.4, m2(0, -0.75, 0.75, 0), v2(0, 0));
    r.delay.kind = DelayKind::Constant;
    r.delay.matrix = i2(1, 2, 1, 3);
    r.simulation->x0 = v2(1, 1);
    r.compare = "cgn-oscillating";
    return r;
  }
  if (name == "cgn-attracting") {
    auto r = cgn_attracting(name);
    r.delay.kind = DelayKind::Constant;
    r.delay.matrix = i2(1, 2, 1, 3);
    return r;
  }
  if (name == "cgn-periodic") {
    auto r = cgn_attracting(name);
    r.delay.kind = DelayKind::Periodic;
    r.delay.matrix = i2(5, 6, 6, 5);
    return r;
  }
  if (name == "cgn-stochastic") {
    auto r = cgn_attracting(name);
    r.delay.kind = DelayKind::Stochastic;
    r.delay.low = 0;
    r.delay.high = 10;
    r.delay.seed = 2024;
    return r;
  }
  if (name == "linear-intrinsic") {
    auto r = linear_base(name, m2(0.6, 0, 0.35, 0.7), m2(0.1, 0, 0.2, 0.1));
    r.delay.kind = DelayKind::Stochastic;
    r.delay.low = 1;
    r.delay.high = 20;
    r.delay.seed = 7;
    r.compare = "linear-intrinsic";
    return r;
  }
  if (name == "linear-marginal") {
    auto r = linear_base(name, m2(0.8, 0, 0.05, 0.9), m2(-0.1, 0, -0.2, -0.1));
    r.delay.kind = DelayKind::Constant;
    r.delay.taus = {4};
    r.simulation->steps = 1000;
    r.compare = "linear-marginal";
    return r;
  }
  if (name == "switched-rows") {
    RunConfig r;
    r.name = name;
    r.model.kind = ModelKind::SwitchedControl;
    const Matrix Ap = m2(0, 0.3, -0.2, 0.1);
    const Matrix Am = m2(0, 0.3, -0.2, -0.1);
    const Matrix Bf = m2(0, 0.1, 0, 0.2);
    const Matrix Bh = m2(0, 0.1, 0, 0);
    r.model.modes = {{Ap, Bf}, {Ap, Bh}, {Am, Bf}, {Am, Bh}};
    r.delay.kind = DelayKind::Stochastic;
    r.delay.low = 1;
    r.delay.high = 13;
    r.delay.seed = 13;
    r.switching.kind = SwitchKind::Random;
    r.switching.seed = 5;
    r.simulation = SimulationConfig{};
    r.simulation->x0 = v2(1, -1);
    r.compare = "switched-rows";
    return r;
  }
  if (name == "switched-control") {
    RunConfig r;
    r.name = name;
    r.model.kind = ModelKind::SwitchedControl;
    r.model.modes = {{m2(0.7, 0, 0.05, 0.8), m2(-0.1, 0, -0.3, -0.1)}};
    r.model.q = v2(0.1510, -0.2176);
    r.model.controls = {v2(0, 0.001), v2(0.001, 0), v2(0.001, 0.001)};
    r.delay.kind = DelayKind::Stochastic;
    r.delay.low = 1;
    r.delay.high = 2;
    r.delay.seed = 3;
    r.switching.kind = SwitchKind::Random;
    r.switching.seed = 9;
    r.simulation = SimulationConfig{};
    r.simulation->x0 = v2(1, 1);
    r.compare = "switched-control";
    return r;
  }
  if (name == "switched-cgn") {
    RunConfig r;
    r.name = name;
    r.model.kind = ModelKind::Cgn;
    r.model.networks = {{m2(0, -0.75, 0.75, 0), 0.8, "tanh", v2(-1, 1)},
                        {m2(0, 0.25, 0.25, 0), 0.3, "tanh", v2(1, -1)}};
    r.model.labels = {"G", "H"};
    r.switching.kind = SwitchKind::Cyclic;
    r.switching.block = 3;
    r.simulation = SimulationConfig{};
    r.simulation->steps = 1000;
    r.simulation->x0 = v2(2, 3);
    r.simulation->y0 = v2(-2, -3);
    return r;
  }
  if (name == "switched-counter") {
    RunConfig r;
    r.name = name;
    r.model.kind = ModelKind::Generic;
    r.model.matrices = {m2(0.1, 1, 0, 0.1), m2(0.1, 0, 1, 0.1)};
    r.model.labels = {"P", "Q"};
    r.switching.kind = SwitchKind::Cyclic;
    r.simulation = SimulationConfig{};
    r.simulation->steps = 5000;
    r.simulation->x0 = v2(1, 1);
    return r;
  }
  if (name == "singleton") {
    RunConfig r;
    r.name = name;
    r.model.kind = ModelKind::Generic;
    r.model.matrices = {m2(0.5, 0.2, 0.1, 0.3)};
    r.model.labels = {"A"};
    r.switching.kind = SwitchKind::Constant;
    return r;
  }
  throw Error(ErrorCode::ConfigError, "unknown example '" + name + "'");
}

// ---------------------------------------------------------------------------
// Model assembly

int configured_bound(const RunConfig& config) {
  if (config.delay.L) return *config.delay.L;
  return Parser::implied_bound(config.delay, is_linear(config.model.kind));
}

int map_delay_bound(const RunConfig& config, int L) {
  return is_linear(config.model.kind) ? L - 1 : L;
}

SwitchSchedule build_switch(const RunConfig& config, std::size_t count,
                            std::optional<std::uint64_t> seed_override) {
  const auto& s = config.switching;
  switch (s.kind) {
    case SwitchKind::Constant:
      if (s.index >= count) throw Error(ErrorCode::ConfigError, "switch index is out of range");
      return SwitchSchedule::constant(s.index);
    case SwitchKind::Cyclic: return SwitchSchedule::cyclic(count, s.block);
    case SwitchKind::Random: {
      const auto seed = seed_override ? seed_override : s.seed;
      if (!seed) {
        throw Error(ErrorCode::ConfigError,
                    "random switching needs a seed (switch.seed or --seed)");
      }
      return SwitchSchedule::random(count, *seed);
    }
    case SwitchKind::Sequence: return SwitchSchedule::explicit_sequence(s.sequence);
  }
  throw Error(ErrorCode::ConfigError, "unknown switch kind");
}

namespace {

std::optional<std::uint64_t> delay_seed(const RunConfig& config,
                                        std::optional<std::uint64_t> seed_override) {
  if (config.delay.kind != DelayKind::Stochastic) return std::nullopt;
  const auto seed = seed_override ? seed_override : config.delay.seed;
  if (!seed) {
    throw Error(ErrorCode::ConfigError, "stochastic delays need a seed (delay.seed or --seed)");
  }
  return seed;
}

DelaySchedule network_delays(const RunConfig& config, Index n,
                             std::optional<std::uint64_t> seed) {
  const auto& d = config.delay;
  const int L = configured_bound(config);
  switch (d.kind) {
    case DelayKind::None: return DelaySchedule::constant(DelayDistribution::zero(n, L));
    case DelayKind::Constant: return DelaySchedule::constant(DelayDistribution(d.matrix, L));
    case DelayKind::Periodic: {
      const auto base = DelaySchedule::periodic_modulo(d.matrix);
      if (base.bound() == L) return base;
      return DelaySchedule::periodic(
          n, L, [base](std::size_t k) { return base.at(k).entries(); }, *base.period(),
          base.description());
    }
    case DelayKind::Stochastic: return DelaySchedule::stochastic_uniform(n, d.low, d.high, *seed);
  }
  throw Error(ErrorCode::ConfigError, "unknown delay kind");
}

std::function<int(std::size_t)> tau_rule(const DelayConfig& d, std::optional<std::uint64_t> seed,
                                         std::string& description) {
  switch (d.kind) {
    case DelayKind::None:
      description = "tau = 1";
      return [](std::size_t) { return 1; };
    case DelayKind::Constant: {
      const int t = d.taus.front();
      description = "tau = " + std::to_string(t);
      return [t](std::size_t) { return t; };
    }
    case DelayKind::Periodic: {
      const auto taus = d.taus;
      description = "tau cycles with period " + std::to_string(taus.size());
      return [taus](std::size_t k) { return taus[(k - 1) % taus.size()]; };
    }
    case DelayKind::Stochastic: {
      const int lo = d.low, hi = d.high;
      const std::uint64_t s = *seed;
      description = "tau uniform on {" + std::to_string(lo) + ".." + std::to_string(hi) + "}";
      return [lo, hi, s](std::size_t k) {
        std::mt19937_64 rng(step_seed(s, k));
        return std::uniform_int_distribution<int>(lo, hi)(rng);
      };
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown delay kind");
}

NetworkMap linear_map(const Matrix& M, const std::string& label) {
  return NetworkMap(M.rows(), [M](const Vector& x) { return Vector(M * x); }, label);
}

}  // namespace

BuiltModel build_model(const RunConfig& config, std::optional<std::uint64_t> seed_override) {
  try {
    const auto& m = config.model;
    const auto seed = delay_seed(config, seed_override);
    if (m.kind == ModelKind::Cgn || m.kind == ModelKind::Generic) {
      std::vector<NetworkMap> maps;
      std::vector<Matrix> lipschitz;
      std::vector<std::string> labels;
      const std::size_t count = m.kind == ModelKind::Cgn ? m.networks.size() : m.matrices.size();
      for (std::size_t i = 0; i < count; ++i) {
        std::string label = i < m.labels.size() ? m.labels[i] : "";
        if (label.empty()) label = "F" + std::to_string(i + 1);
        if (m.kind == ModelKind::Cgn) {
          const auto& net = m.networks[i];
          const auto sigma =
              net.activation == "logistic" ? Activation::logistic() : Activation::tanh();
          auto built = build_cgn({net.W, net.epsilon, sigma, net.c});
          lipschitz.push_back(built.lipschitz.dense());
          maps.emplace_back(net.W.rows(), [f = built.map](const Vector& x) { return f.apply(x); },
                            label);
        } else {
          lipschitz.push_back(m.matrices[i].cwiseAbs());
          maps.push_back(linear_map(m.matrices[i], label));
        }
        labels.push_back(label);
      }
      const Index n = maps.front().dimension();
      SwitchedSet set(std::move(maps), MatrixSet(std::move(lipschitz), std::move(labels)));

      std::optional<StateVector> fixed;
      if (m.kind == ModelKind::Generic) {
        fixed = StateVector(Vector::Zero(n));
      } else {
        FixedPointOptions fp;
        fp.max_iter = 100'000;
        const auto found = find_fixed_point(set.map(0), StateVector(m.networks.front().c), fp);
        if (found.converged && shared_fixed_point_check(set, found.point, 1e-9).shared) {
          fixed = found.point;
        }
      }
      return BuiltModel{std::move(set), network_delays(config, n, seed), n, false, fixed};
    }

    SwitchedControlSpec spec;
    spec.modes = m.modes;
    spec.q = m.q;
    spec.c_set = m.controls;
    auto built = build_switched_control(spec);
    const Index n = m.modes.front().A.rows();
    std::string description;
    auto tau = tau_rule(config.delay, seed, description);
    auto delays = lifted_delay_schedule(n, configured_bound(config), tau, description);
    return BuiltModel{std::move(built.set), std::move(delays), n, true,
                      StateVector(Vector::Zero(2 * n))};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError,
                config.name.empty() ? e.what() : config.name + ": " + e.what());
  }
}

}  // namespace istab::cli
