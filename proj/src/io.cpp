#include "crp/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace crp {

namespace {

std::vector<std::vector<double>> read_rows(std::istream& is, std::vector<std::string>& header) {
  std::string line;
  header.clear();
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (header.empty()) {
      while (std::getline(ss, cell, ',')) header.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("csv: cannot parse '" + cell + "'");
      }
    }
    if (row.size() != header.size()) throw std::invalid_argument("csv: row width does not match header");
    rows.push_back(std::move(row));
  }
  if (header.empty() || header[0] != "t") throw std::invalid_argument("csv: missing header starting with t");
  if (rows.empty()) throw std::invalid_argument("csv: no rows");
  return rows;
}

int count_prefix(const std::vector<std::string>& header, char prefix) {
  int n = 0;
  for (const auto& h : header) {
    if (h.size() > 1 && h[0] == prefix && std::isdigit(static_cast<unsigned char>(h[1]))) ++n;
  }
  return n;
}

void put(std::ostream& os, double v) { os << ',' << v; }

template <class Row>
void write_rows(std::ostream& os, const std::vector<double>& times, std::size_t n,
                const std::function<bool(std::size_t)>& is_jump, Row&& row) {
  for (std::size_t i = 0; i < n; ++i) {
    if (is_jump(i)) {
      os << times[i];
      row(i, true);
      os << ",0\n";
      os << times[i];
      row(i, false);
      os << ",1\n";
    } else {
      os << times[i];
      row(i, false);
      os << ",0\n";
    }
  }
}

}  // namespace

void write_path_csv(std::ostream& os, const Path& x) {
  const int d = x.dim();
  os << std::setprecision(17) << 't';
  for (int i = 1; i <= d; ++i) os << ",v" << i;
  os << ",jump\n";
  std::vector<double> times = x.times;
  std::size_t n = x.size();
  std::vector<Vec> values = x.values, left = x.left;
  if (x.horizon > x.times.back()) {
    times.push_back(x.horizon);
    values.push_back(x.values.back());
    left.push_back(x.values.back());
    ++n;
  }
  write_rows(os, times, n, [&](std::size_t i) { return i > 0 && left[i] != values[i]; },
             [&](std::size_t i, bool l) {
               const Vec& v = l ? left[i] : values[i];
               for (int k = 0; k < d; ++k) put(os, v(k));
             });
}

Path read_path_csv(std::istream& is) {
  std::vector<std::string> header;
  const auto rows = read_rows(is, header);
  const int d = count_prefix(header, 'v');
  if (d < 1) throw std::invalid_argument("path csv: no value columns");
  Path p;
  for (const auto& r : rows) {
    Vec v(d);
    for (int k = 0; k < d; ++k) v(k) = r[1 + static_cast<std::size_t>(k)];
    if (!p.times.empty() && r[0] == p.times.back()) {
      p.values.back() = v;
      continue;
    }
    p.times.push_back(r[0]);
    p.values.push_back(v);
    p.left.push_back(v);
  }
  p.horizon = p.times.back();
  p.validate();
  return p;
}

Path read_path_csv_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  return read_path_csv(in);
}

void write_path_csv_file(const std::string& file, const Path& x) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  write_path_csv(out, x);
}

void write_rough_csv(std::ostream& os, const RoughPath2& x) {
  const int d = x.dim();
  os << std::setprecision(17) << 't';
  for (int i = 1; i <= d; ++i) os << ",v" << i;
  for (int i = 1; i <= d; ++i) {
    for (int j = 1; j <= d; ++j) os << ",m" << i << '_' << j;
  }
  os << ",jump\n";
  write_rows(os, x.times, x.size(), [&](std::size_t i) { return x.is_jump(i); },
             [&](std::size_t i, bool l) {
               const G2Element& g = l ? x.left[i] : x.points[i];
               for (int k = 0; k < d; ++k) put(os, g.vec(k));
               for (int a = 0; a < d; ++a) {
                 for (int b = 0; b < d; ++b) put(os, g.mat(a, b));
               }
             });
}

RoughPath2 read_rough_csv(std::istream& is) {
  std::vector<std::string> header;
  const auto rows = read_rows(is, header);
  const int d = count_prefix(header, 'v');
  if (d < 1 || count_prefix(header, 'm') != d * d) throw std::invalid_argument("rough csv: bad header");
  RoughPath2 x;
  for (const auto& r : rows) {
    G2Element g;
    g.vec = Vec(d);
    g.mat = Mat(d, d);
    for (int k = 0; k < d; ++k) g.vec(k) = r[1 + static_cast<std::size_t>(k)];
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) g.mat(a, b) = r[1 + static_cast<std::size_t>(d + a * d + b)];
    }
    if (!is_geometric(g, 1e-9)) throw std::invalid_argument("rough csv: non-geometric row");
    if (!x.times.empty() && r[0] == x.times.back()) {
      x.points.back() = g;
      continue;
    }
    x.times.push_back(r[0]);
    x.points.push_back(g);
    x.left.push_back(g);
  }
  x.horizon = x.times.back();
  x.marcus_like = x.scan_marcus_like();
  x.validate();
  return x;
}

json rough_metadata(const RoughPath2& x) {
  return json{{"d", x.dim()}, {"n", x.size()}, {"marcus_like", x.marcus_like}, {"horizon", x.horizon}};
}

void write_solution_csv(std::ostream& os, const RdeSolution& sol) {
  const int e = static_cast<int>(sol.states.front().size());
  os << std::setprecision(17) << 't';
  for (int i = 1; i <= e; ++i) os << ",y" << i;
  os << ",jump\n";
  write_rows(os, sol.times, sol.times.size(), [&](std::size_t i) { return sol.left_states[i] != sol.states[i]; },
             [&](std::size_t i, bool l) {
               const Vec& v = l ? sol.left_states[i] : sol.states[i];
               for (int k = 0; k < e; ++k) put(os, v(k));
             });
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array for a vector");
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
  return v;
}

Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw std::invalid_argument("expected a JSON matrix");
  const int r = static_cast<int>(j.size()), c = static_cast<int>(j[0].size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(j[i].size()) != c) throw std::invalid_argument("ragged JSON matrix");
    for (int k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json to_json(const Vec& v) {
  json j = json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json to_json(const Mat& m) {
  json j = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    j.push_back(r);
  }
  return j;
}

Vec parse_vec(const std::string& csv) {
  std::vector<double> xs;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) xs.push_back(std::stod(cell));
  Vec v(static_cast<int>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<int>(i)) = xs[i];
  return v;
}

SemimartingaleModel model_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int d = j.value("d", 1);
  const double T = j.value("T", 1.0);
  auto vec_or = [&](const char* key, const Vec& dflt) { return j.contains(key) ? vec_from_json(j[key]) : dflt; };
  auto mat_or = [&](const char* key, const Mat& dflt) { return j.contains(key) ? mat_from_json(j[key]) : dflt; };
  const Vec zero = Vec::Zero(d);
  const Mat zmat = Mat::Zero(d, d);
  const double sigma = j.value("sigma", 1.0);
  const Mat diff = mat_or("diffusion", Mat::Identity(d, d) * sigma * sigma);
  auto law = [&]() {
    const std::string s = j.value("step_law", std::string("gaussian"));
    if (s == "gaussian") return SemimartingaleModel::StepLaw::Gaussian;
    if (s == "rademacher") return SemimartingaleModel::StepLaw::Rademacher;
    throw std::invalid_argument("model: unknown step_law " + s);
  };
  if (kind == "brownian") return SemimartingaleModel::brownian(diff, T);
  if (kind == "levy") {
    return SemimartingaleModel::levy(vec_or("drift", zero), mat_or("diffusion", zmat), j.value("intensity", 0.0),
                                     vec_or("jump_mean", zero), mat_or("jump_cov", Mat::Identity(d, d)), T,
                                     j.value("compensated", false));
  }
  if (kind == "random_walk") return SemimartingaleModel::random_walk(d, law(), j.value("scaling", 1.0), T);
  if (kind == "null_array") {
    return SemimartingaleModel::null_array(vec_or("drift", zero), j.value("intensity", 1.0), vec_or("jump_mean", zero),
                                           mat_or("jump_cov", Mat::Identity(d, d)), T);
  }
  if (kind == "martingale_clt") return SemimartingaleModel::martingale_clt(d, T);
  throw std::invalid_argument("model: unknown kind " + kind);
}

json model_to_json(const SemimartingaleModel& m) {
  json j{{"kind", m.name()}, {"d", m.d}, {"T", m.T}};
  if (m.kind == SemimartingaleModel::Kind::LevyFinite) j["kind"] = "levy";
  j["drift"] = to_json(m.drift);
  j["diffusion"] = to_json(m.diffusion);
  j["intensity"] = m.intensity;
  j["jump_mean"] = to_json(m.jump_mean);
  j["jump_cov"] = to_json(m.jump_cov);
  j["compensated"] = m.compensated;
  j["step_law"] = m.step_law == SemimartingaleModel::StepLaw::Gaussian ? "gaussian" : "rademacher";
  j["scaling"] = m.scaling;
  return j;
}

VectorFields fields_from_json(const json& j) {
  const std::string b = j.at("builtin").get<std::string>();
  if (b == "linear") {
    std::vector<Mat> ms;
    for (const auto& m : j.at("matrices")) ms.push_back(mat_from_json(m));
    return VectorFields::linear(std::move(ms));
  }
  if (b == "rotation") return VectorFields::rotation(j.value("d", 3));
  if (b == "zero") return VectorFields::zero(j.value("e", 1), j.value("d", 1));
  if (b == "quadratic") {
    std::vector<Vec> bs;
    std::vector<Mat> as;
    std::vector<std::vector<Mat>> qs;
    for (const auto& v : j.at("b")) bs.push_back(vec_from_json(v));
    for (const auto& m : j.at("A")) as.push_back(mat_from_json(m));
    for (const auto& qi : j.at("Q")) {
      std::vector<Mat> blocks;
      for (const auto& m : qi) blocks.push_back(mat_from_json(m));
      qs.push_back(std::move(blocks));
    }
    return VectorFields::quadratic(std::move(bs), std::move(as), std::move(qs));
  }
  throw std::invalid_argument("fields: unknown builtin " + b);
}

VectorFields fields_from_arg(const std::string& arg, int d) {
  const std::string prefix = "builtin:";
  if (arg.rfind(prefix, 0) != 0) {
    std::ifstream in(arg);
    if (!in) throw std::runtime_error("cannot open fields spec " + arg);
    return fields_from_json(json::parse(in));
  }
  const std::string name = arg.substr(prefix.size());
  if (name == "rotation") return VectorFields::rotation(d);
  if (name == "zero") return VectorFields::zero(d, d);
  if (name == "linear") {
    // nilpotent pair plus diagonal scalings for further directions
    std::vector<Mat> ms;
    for (int i = 0; i < d; ++i) {
      Mat a = Mat::Zero(2, 2);
      if (i % 3 == 0) a(0, 1) = 1.0;
      if (i % 3 == 1) a(1, 0) = 1.0;
      if (i % 3 == 2) a.diagonal() << 0.5, -0.5;
      ms.push_back(a);
    }
    return VectorFields::linear(std::move(ms));
  }
  if (name == "quadratic") {
    std::vector<Vec> bs;
    std::vector<Mat> as;
    std::vector<std::vector<Mat>> qs;
    for (int i = 0; i < d; ++i) {
      Vec b = Vec::Zero(2);
      b(i % 2) = 0.5;
      Mat a(2, 2);
      a << 0.0, -1.0, 1.0, 0.0;
      if (i % 2) a.transposeInPlace();
      Mat q0 = Mat::Zero(2, 2), q1 = Mat::Zero(2, 2);
      q0(1, 1) = -0.1;
      q1(0, 0) = -0.1;
      bs.push_back(b);
      as.push_back(a);
      qs.push_back({q0, q1});
    }
    return VectorFields::quadratic(std::move(bs), std::move(as), std::move(qs));
  }
  throw std::invalid_argument("fields: unknown builtin " + name);
}

PathFunction phi_from_name(const std::string& name) {
  if (name == "linear") return PathFunction::linear();
  if (name == "loglinear" || name == "log_linear") return PathFunction::log_linear();
  if (name == "hoff") return PathFunction::hoff();
  if (name == "hoff21" || name == "hoff_reversed") return PathFunction::hoff({1, 0});
  throw std::invalid_argument("unknown path function " + name);
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace crp
