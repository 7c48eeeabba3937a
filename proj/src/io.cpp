#include "hopf/io.hpp"

#include <fstream>
#include <sstream>

namespace hopf::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::string type_of(const json& obj, const std::string& path) {
  const json& t = field(obj, "type", path);
  if (!t.is_string()) fail(path + ".type", "expected a string");
  return t.get<std::string>();
}

// A number (constant fill), an array of length n, or {"cycle": [...]}
// repeated to length n.
Vector<double> vector_field(const json& j, Index n, const std::string& path) {
  Vector<double> out(n);
  if (j.is_number()) {
    out.setConstant(j.get<double>());
    return out;
  }
  if (j.is_object() && j.contains("cycle")) {
    const json& c = j["cycle"];
    if (!c.is_array() || c.empty()) fail(path + ".cycle", "expected a nonempty array");
    for (Index i = 0; i < n; ++i)
      out(i) = number(c[static_cast<std::size_t>(i) % c.size()], path + ".cycle");
    return out;
  }
  if (!j.is_array()) fail(path, "expected a number, an array or {\"cycle\": [...]}");
  if (static_cast<Index>(j.size()) != n)
    fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  for (Index i = 0; i < n; ++i) out(i) = number(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return out;
}

Matrix<double> matrix_field(const json& j, Index n, const std::string& path) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n) fail(path, "expected " + std::to_string(n) + " rows");
  Matrix<double> m(n, n);
  for (Index r = 0; r < n; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    m.row(r) = vector_field(j[static_cast<std::size_t>(r)], n, row_path).transpose();
  }
  return m;
}

double scale_of(const json& obj, const std::string& path) {
  if (!obj.contains("scale")) return 1.0;
  const double s = number(obj["scale"], path + ".scale");
  if (!(s > 0)) fail(path + ".scale", "must be positive");
  return s;
}

// {"preset": "D"|"A"} | {"matrix": [[...]]} | {"eigenvalues": [...],
// "eigenvectors": [[...]]} (columns are eigenvectors), times "scale".
SpectralMatrix<double> spectral_field(const json& obj, Index n, const std::string& path) {
  const double scale = scale_of(obj, path);
  try {
    if (obj.contains("preset")) {
      const json& p = obj["preset"];
      if (!p.is_string()) fail(path + ".preset", "expected a string");
      const std::string name = p.get<std::string>();
      if (name == "D") return SpectralMatrix<double>::diagonal(preset_d(n) * scale);
      if (name == "A") return SpectralMatrix<double>::from_matrix(preset_a(n) * scale);
      fail(path + ".preset", "unknown preset '" + name + "' (expected \"D\" or \"A\")");
    }
    if (obj.contains("matrix"))
      return SpectralMatrix<double>::from_matrix(matrix_field(obj["matrix"], n, path + ".matrix") * scale);
    if (obj.contains("eigenvalues")) {
      Vector<double> ev = vector_field(obj["eigenvalues"], n, path + ".eigenvalues") * scale;
      if (!obj.contains("eigenvectors")) return SpectralMatrix<double>::diagonal(std::move(ev));
      return SpectralMatrix<double>(std::move(ev), matrix_field(obj["eigenvectors"], n, path + ".eigenvectors"));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(path, "expected one of 'preset', 'matrix' or 'eigenvalues'");
}

Hamiltonian<double> parse_hamiltonian(const json& obj, Index n, const std::string& path) {
  const std::string type = type_of(obj, path);
  if (type == "l1") return Hamiltonian<double>::l1();
  if (type == "l2") return Hamiltonian<double>::l2();
  if (type == "linf") return Hamiltonian<double>::linf();
  if (type == "norm_a") return Hamiltonian<double>::norm_a(spectral_field(obj, n, path));
  if (type == "min") {
    const json& m = field(obj, "members", path);
    if (!m.is_array()) fail(path + ".members", "expected an array");
    std::vector<Hamiltonian<double>> members;
    for (std::size_t i = 0; i < m.size(); ++i)
      members.push_back(parse_hamiltonian(m[i], n, path + ".members[" + std::to_string(i) + "]"));
    try {
      return Hamiltonian<double>::min_of(std::move(members));
    } catch (const Error& e) {
      fail(path, e.what());
    }
  }
  fail(path + ".type", "unknown Hamiltonian type '" + type + "' (expected l1, l2, linf, norm_a, min)");
}

InitialData<double> parse_initial(const json& obj, Index n, const std::string& path) {
  const std::string type = type_of(obj, path);
  try {
    if (type == "half_sq_l2") return InitialData<double>::half_sq_l2();
    if (type == "half_sq_l1") return InitialData<double>::half_sq_l1();
    if (type == "half_sq_linf") return InitialData<double>::half_sq_linf();
    if (type == "diag_quadratic") {
      if (obj.contains("preset")) {
        const auto s = spectral_field(obj, n, path);
        if (!s.is_diagonal()) fail(path + ".preset", "diag_quadratic needs a diagonal preset");
        return InitialData<double>::diag_quadratic(s.eigenvalues());
      }
      return InitialData<double>::diag_quadratic(
          vector_field(field(obj, "inverse_weights", path), n, path + ".inverse_weights"));
    }
    if (type == "ellipsoid_level")
      return InitialData<double>::ellipsoid_level(
          vector_field(field(obj, "semi_axes", path), n, path + ".semi_axes"));
    if (type == "shifted_quadratic") {
      const json& s = field(obj, "sign", path);
      if (!s.is_number_integer() || (s.get<int>() != 1 && s.get<int>() != -1))
        fail(path + ".sign", "expected +1 or -1");
      return InitialData<double>::shifted_quadratic(vector_field(field(obj, "shift", path), n, path + ".shift"),
                                                    s.get<int>());
    }
    if (type == "min") {
      const json& m = field(obj, "members", path);
      if (!m.is_array()) fail(path + ".members", "expected an array");
      std::vector<InitialData<double>> members;
      for (std::size_t i = 0; i < m.size(); ++i)
        members.push_back(parse_initial(m[i], n, path + ".members[" + std::to_string(i) + "]"));
      return InitialData<double>::min_of(std::move(members));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(path + ".type", "unknown initial data type '" + type +
                           "' (expected half_sq_l2, half_sq_l1, half_sq_linf, diag_quadratic, "
                           "ellipsoid_level, shifted_quadratic, min)");
}

SolverConfig<double> parse_solver(const json& obj, const std::string& path) {
  SolverConfig<double> cfg;
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "lambda")
      cfg.lambda = number(value, path + ".lambda");
    else if (key == "tol")
      cfg.tol = number(value, path + ".tol");
    else if (key == "max_iters") {
      if (!value.is_number_integer()) fail(path + ".max_iters", "expected an integer");
      cfg.max_iters = value.get<int>();
    } else
      fail(path + "." + key, "unknown solver field");
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return cfg;
}

Index dimension_of(const json& doc, std::optional<Index> dimension) {
  if (dimension) {
    if (*dimension < 1) fail("dimension", "must be >= 1");
    return *dimension;
  }
  const json& d = field(doc, "dimension", "$");
  if (!d.is_number_integer() || d.get<Index>() < 1) fail("dimension", "expected a positive integer");
  return d.get<Index>();
}

ConvexShape<double> parse_shape_at(const json& obj, Index n, const std::string& path) {
  const std::string type = type_of(obj, path);
  try {
    std::optional<ConvexShape<double>> shape;
    if (type == "p_ball") {
      const double radius = obj.contains("radius") ? number(obj["radius"], path + ".radius") : 1.0;
      shape = ConvexShape<double>::p_ball(number(field(obj, "p", path), path + ".p"), radius, n);
    } else if (type == "ellipsoid") {
      Vector<double> axes = vector_field(field(obj, "semi_axes", path), n, path + ".semi_axes");
      std::optional<Matrix<double>> factor;
      if (obj.contains("orthogonal_factor"))
        factor = matrix_field(obj["orthogonal_factor"], n, path + ".orthogonal_factor");
      shape = ConvexShape<double>::ellipsoid(std::move(axes), std::move(factor));
    } else if (type == "quad_over_norm") {
      const double m = obj.contains("m") ? number(obj["m"], path + ".m") : 2.0;
      shape = ConvexShape<double>::quad_over_norm(spectral_field(obj, n, path), m);
    } else if (type == "union") {
      const json& m = field(obj, "members", path);
      if (!m.is_array()) fail(path + ".members", "expected an array");
      std::vector<ConvexShape<double>> members;
      for (std::size_t i = 0; i < m.size(); ++i)
        members.push_back(parse_shape_at(m[i], n, path + ".members[" + std::to_string(i) + "]"));
      return ConvexShape<double>::union_of(std::move(members));
    } else {
      fail(path + ".type", "unknown shape type '" + type + "' (expected p_ball, ellipsoid, quad_over_norm, union)");
    }
    if (obj.contains("center")) return shape->translated(vector_field(obj["center"], n, path + ".center"));
    return *shape;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

}  // namespace

Vector<double> preset_d(Index n) {
  Vector<double> d(n);
  for (Index i = 0; i < n; ++i) d(i) = n > 1 ? 1.0 + double(i) / double(n - 1) : 1.0;
  return d;
}

Matrix<double> preset_a(Index n) {
  Matrix<double> a = Matrix<double>::Ones(n, n);
  a.diagonal().setConstant(2.0);
  return a;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Problem parse_problem(const json& doc, std::optional<Index> dimension) {
  if (!doc.is_object()) fail("$", "expected an object");
  const Index n = dimension_of(doc, dimension);
  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail("name", "expected a string");
    name = doc["name"].get<std::string>();
  }
  Hamiltonian<double> h = parse_hamiltonian(field(doc, "hamiltonian", "$"), n, "hamiltonian");
  InitialData<double> j = parse_initial(field(doc, "initial", "$"), n, "initial");
  SolverConfig<double> cfg = doc.contains("solver") ? parse_solver(doc["solver"], "solver") : SolverConfig<double>{};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "name" && key != "dimension" && key != "hamiltonian" && key != "initial" && key != "solver" &&
        key != "comment")
      fail(key, "unknown field");
  }
  return Problem{std::move(name), n, std::move(h), std::move(j), std::move(cfg)};
}

Problem load_problem(const std::filesystem::path& path, std::optional<Index> dimension) {
  const json doc = read_json(path);
  try {
    return parse_problem(doc, dimension);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

ConvexShape<double> parse_shape(const json& doc, std::optional<Index> dimension) {
  if (!doc.is_object()) fail("$", "expected an object");
  const Index n = dimension_of(doc, dimension);
  return parse_shape_at(field(doc, "shape", "$"), n, "shape");
}

ConvexShape<double> load_shape(const std::filesystem::path& path, std::optional<Index> dimension) {
  const json doc = read_json(path);
  try {
    return parse_shape(doc, dimension);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Vector<double> parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("cannot parse '" + item + "' as a number");
    }
  }
  if (values.empty()) throw ParseError("empty vector");
  return Eigen::Map<Vector<double>>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace hopf::io
