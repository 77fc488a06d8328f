#include "roughkit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "roughkit/errors.hpp"

namespace roughkit {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) { throw InputError("cli", "io", where + ": " + what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing \"") + key + "\"");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "/" + std::to_string(i)));
  return out;
}

std::vector<int> integers(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], where + "/" + std::to_string(i)));
  return out;
}

const Json& array(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  return j;
}

Json word_json(const Word& w) {
  Json a = Json::array();
  for (int l : w) a.push_back(l);
  return a;
}

Json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError("cli", "io", what + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cli", "io", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cli", "io", "cannot write " + path);
  out << text;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- tensors

Json tensor_to_json(const TruncatedTensor& t) {
  Json terms = Json::array();
  for (std::size_t i = 0; i < t.size(); ++i) terms.push_back({{"word", word_json(t.shape().word(i))}, {"value", t.at(i)}});
  return {{"d", t.dim()}, {"level", t.level()}, {"terms", terms}};
}

TruncatedTensor tensor_from_json(const Json& j) {
  const int d = integer(field(j, "d", "tensor"), "tensor/d");
  const int level = integer(field(j, "level", "tensor"), "tensor/level");
  if (d < 1 || level < 0) bad("tensor", "d must be >= 1 and level >= 0");
  TruncatedTensor t(d, level);
  const auto& terms = array(field(j, "terms", "tensor"), "tensor/terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string where = "tensor/terms/" + std::to_string(i);
    const Word w(integers(field(terms[i], "word", where), where + "/word"));
    if (static_cast<int>(w.size()) > level) bad(where, "word longer than the level");
    for (int l : w)
      if (l < 1 || l > d) bad(where, "letter outside 1..d");
    t[w] = number(field(terms[i], "value", where), where + "/value");
  }
  return t;
}

// ---------------------------------------------------------------- rough paths

Json rough_path_to_json(const GeometricRoughPath& w) {
  Json bps = Json::array();
  for (const auto& b : w.basepoints()) bps.push_back(tensor_to_json(b.tensor()));
  return {{"gamma", w.gamma()}, {"level", w.level()}, {"times", w.times()}, {"basepoints", bps}};
}

GeometricRoughPath rough_path_from_json(const Json& j) {
  const double gamma = number(field(j, "gamma", "rough path"), "rough path/gamma");
  const int level = integer(field(j, "level", "rough path"), "rough path/level");
  const auto times = numbers(field(j, "times", "rough path"), "rough path/times");
  const auto& bps = array(field(j, "basepoints", "rough path"), "rough path/basepoints");
  std::vector<GroupTensor> g;
  for (std::size_t i = 0; i < bps.size(); ++i) {
    auto t = tensor_from_json(bps[i]);
    if (t.level() != level) bad("rough path/basepoints/" + std::to_string(i), "level differs from the path level");
    g.push_back(GroupTensor::checked(std::move(t)));
  }
  return GeometricRoughPath::from_basepoints(gamma, times, std::move(g));
}

Json controlled_to_json(const ControlledPath& x) {
  Json coeffs = Json::array();
  for (std::size_t q = 0; q < x.shape().size(); ++q) {
    Json vals = Json::array();
    for (std::size_t t = 0; t < x.size(); ++t) {
      const auto c = x.coeff(t, q);
      vals.push_back(std::vector<double>(c.begin(), c.end()));
    }
    coeffs.push_back({{"word", word_json(x.shape().word(q))}, {"values", vals}});
  }
  return {{"order", x.order()}, {"width", x.width()}, {"times", x.times()}, {"coeffs", coeffs}};
}

// ---------------------------------------------------------------- functions

Json function_to_json(const SmoothFunction& f) {
  const auto* d = f.description();
  if (!d) throw InputError("cli", "io", "function family \"" + f.family() + "\" has no serialized form");
  Json j{{"family", d->family}};
  if (d->family == "affine") {
    j["matrix"] = d->matrix;
    j["offset"] = d->offset;
    return j;
  }
  j["n_in"] = f.n_in();
  Json comps = Json::array();
  if (d->family == "polynomial") {
    for (const auto& c : d->polynomial) {
      Json terms = Json::array();
      for (const auto& m : c) terms.push_back({{"coeff", m.coeff}, {"powers", m.powers}});
      comps.push_back(terms);
    }
  } else if (d->family == "trig") {
    for (const auto& c : d->trig) {
      Json terms = Json::array();
      for (const auto& t : c) terms.push_back({{"coeff", t.coeff}, {"freq", t.freq}, {"phase", t.phase}});
      comps.push_back(terms);
    }
  } else if (d->family == "gaussian") {
    for (const auto& c : d->gaussian) {
      Json terms = Json::array();
      for (const auto& t : c) terms.push_back({{"coeff", t.coeff}, {"center", t.center}, {"width", t.width}});
      comps.push_back(terms);
    }
  } else {
    throw InputError("cli", "io", "unknown family " + d->family);
  }
  j["components"] = comps;
  return j;
}

SmoothFunction function_from_json(const Json& j) {
  const auto& fam = field(j, "family", "function");
  if (!fam.is_string()) bad("function/family", "expected a string");
  const auto family = fam.get<std::string>();
  if (family == "affine") {
    const auto& m = array(field(j, "matrix", "function"), "function/matrix");
    std::vector<std::vector<double>> matrix;
    for (std::size_t i = 0; i < m.size(); ++i) matrix.push_back(numbers(m[i], "function/matrix/" + std::to_string(i)));
    return SmoothFunction::affine(matrix, numbers(field(j, "offset", "function"), "function/offset"));
  }
  const int n_in = integer(field(j, "n_in", "function"), "function/n_in");
  const auto& comps = array(field(j, "components", "function"), "function/components");
  auto terms_of = [&](std::size_t c) -> const Json& {
    return array(comps[c], "function/components/" + std::to_string(c));
  };
  auto where = [](std::size_t c, std::size_t k) {
    return "function/components/" + std::to_string(c) + "/" + std::to_string(k);
  };
  if (family == "polynomial") {
    std::vector<std::vector<Monomial>> out;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      out.emplace_back();
      const auto& ts = terms_of(c);
      for (std::size_t k = 0; k < ts.size(); ++k)
        out.back().push_back({number(field(ts[k], "coeff", where(c, k)), where(c, k) + "/coeff"),
                              integers(field(ts[k], "powers", where(c, k)), where(c, k) + "/powers")});
    }
    return SmoothFunction::polynomial(n_in, out);
  }
  if (family == "trig") {
    std::vector<std::vector<TrigTerm>> out;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      out.emplace_back();
      const auto& ts = terms_of(c);
      for (std::size_t k = 0; k < ts.size(); ++k)
        out.back().push_back({number(field(ts[k], "coeff", where(c, k)), where(c, k) + "/coeff"),
                              numbers(field(ts[k], "freq", where(c, k)), where(c, k) + "/freq"),
                              number(field(ts[k], "phase", where(c, k)), where(c, k) + "/phase")});
    }
    return SmoothFunction::trig(n_in, out);
  }
  if (family == "gaussian") {
    std::vector<std::vector<GaussianTerm>> out;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      out.emplace_back();
      const auto& ts = terms_of(c);
      for (std::size_t k = 0; k < ts.size(); ++k)
        out.back().push_back({number(field(ts[k], "coeff", where(c, k)), where(c, k) + "/coeff"),
                              numbers(field(ts[k], "center", where(c, k)), where(c, k) + "/center"),
                              number(field(ts[k], "width", where(c, k)), where(c, k) + "/width")});
    }
    return SmoothFunction::gaussian(n_in, out);
  }
  bad("function/family", "unknown family \"" + family + "\"");
}

Json fields_to_json(const VectorFieldSystem& v) {
  Json a = Json::array();
  for (const auto& f : v.fields()) a.push_back(function_to_json(f));
  return {{"fields", a}};
}

VectorFieldSystem fields_from_json(const Json& j) {
  const auto& a = array(field(j, "fields", "fields"), "fields/fields");
  std::vector<SmoothFunction> fs;
  for (const auto& f : a) fs.push_back(function_from_json(f));
  if (fs.empty()) bad("fields", "at least one field required");
  for (const auto& f : fs)
    if (f.n_in() != fs.front().n_in() || f.n_out() != f.n_in()) bad("fields", "fields must map R^n to R^n");
  return VectorFieldSystem(fs);
}

// ---------------------------------------------------------------- CSV

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cli", "io", "cannot open " + path);
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size())
      throw InputError("cli", "io", path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) + " columns");
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const char* b = c.data();
      while (b < c.data() + c.size() && *b == ' ') ++b;
      auto res = std::from_chars(b, c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw InputError("cli", "io", path + ":" + std::to_string(lineno) + ": not a number: \"" + c + "\"");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw InputError("cli", "io", path + ": empty file");
  return t;
}

std::string csv_text(const CsvTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_double(r[i]);
    out += "\n";
  }
  return out;
}

namespace {
void need_columns(const CsvTable& t, const std::string& first, const char* what) {
  if (t.header.size() < 2 || t.header.front() != first)
    throw InputError("cli", "io", std::string(what) + " CSV must have header " + first + ",x1,...");
  if (t.rows.empty()) throw InputError("cli", "io", std::string(what) + " CSV has no rows");
}
}  // namespace

PiecewiseLinearPath path_from_csv(const CsvTable& t) {
  need_columns(t, "t", "path");
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  for (const auto& r : t.rows) {
    times.push_back(r[0]);
    values.emplace_back(r.begin() + 1, r.end());
  }
  return PiecewiseLinearPath(times, values);
}

ParticleMeasure particles_from_csv(const CsvTable& t) {
  need_columns(t, "w", "particle");
  ParticleMeasure mu;
  for (const auto& r : t.rows) {
    mu.weights.push_back(r[0]);
    mu.points.emplace_back(r.begin() + 1, r.end());
  }
  mu.validate();
  return mu;
}

std::vector<TransportQuery> queries_from_csv(const CsvTable& t) {
  need_columns(t, "s", "query");
  std::vector<TransportQuery> out;
  for (const auto& r : t.rows) out.push_back({r[0], std::vector<double>(r.begin() + 1, r.end())});
  return out;
}

// ---------------------------------------------------------------- reports

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 15];
  return s;
}

Json order_fit_to_json(const OrderFit& f) {
  Json defects = Json::array();
  for (double d : f.defects) defects.push_back(finite_or_string(d));
  return {{"slope", finite_or_string(f.slope)},
          {"expected", f.expected},
          {"threshold", f.expected - f.tolerance},
          {"pass", f.pass},
          {"scales", f.scales},
          {"defects", defects}};
}

Json graded_to_json(const std::string& name, const GradedReport& r) {
  Json words = Json::array();
  for (const auto& w : r.words) {
    Json e = order_fit_to_json(w.fit);
    e["word"] = word_json(w.word);
    words.push_back(e);
  }
  return {{"name", name}, {"pass", r.pass}, {"words", words}};
}

}  // namespace roughkit
