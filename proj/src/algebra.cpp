#include "roughkit/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "roughkit/errors.hpp"

namespace roughkit {

// ---------------------------------------------------------------- Word

Word Word::prefix(std::size_t n) const {
  return Word(std::vector<int>(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(n)));
}

Word Word::suffix_from(std::size_t pos) const {
  return Word(std::vector<int>(letters_.begin() + static_cast<std::ptrdiff_t>(pos), letters_.end()));
}

Word Word::reversed() const { return Word(std::vector<int>(letters_.rbegin(), letters_.rend())); }

Word Word::prepended(int letter) const {
  std::vector<int> out;
  out.reserve(letters_.size() + 1);
  out.push_back(letter);
  out.insert(out.end(), letters_.begin(), letters_.end());
  return Word(std::move(out));
}

Word Word::appended(int letter) const {
  std::vector<int> out(letters_);
  out.push_back(letter);
  return Word(std::move(out));
}

int Word::max_letter() const {
  return letters_.empty() ? 0 : *std::max_element(letters_.begin(), letters_.end());
}

std::string Word::to_string() const {
  if (letters_.empty()) return "()";
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) os << ',';
    os << letters_[i];
  }
  os << ')';
  return os.str();
}

Word operator*(const Word& a, const Word& b) {
  std::vector<int> out(a.letters_);
  out.insert(out.end(), b.letters_.begin(), b.letters_.end());
  return Word(std::move(out));
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

// ---------------------------------------------------------------- TensorShape

TensorShape::TensorShape(int dim, int level) : dim_(dim), level_(level) {
  if (dim < 1) throw InputError("algebra", "TensorShape", "alphabet size must be >= 1");
  if (level < 0) throw InputError("algebra", "TensorShape", "level must be >= 0");
  powers_.assign(static_cast<std::size_t>(level) + 1, 1);
  for (int k = 1; k <= level; ++k)
    powers_[static_cast<std::size_t>(k)] = powers_[static_cast<std::size_t>(k - 1)] * static_cast<std::size_t>(dim);
  offsets_.assign(static_cast<std::size_t>(level) + 2, 0);
  for (int k = 0; k <= level; ++k)
    offsets_[static_cast<std::size_t>(k) + 1] = offsets_[static_cast<std::size_t>(k)] + powers_[static_cast<std::size_t>(k)];
}

bool TensorShape::contains(const Word& w) const {
  if (static_cast<int>(w.size()) > level_) return false;
  return std::all_of(w.begin(), w.end(), [&](int l) { return l >= 1 && l <= dim_; });
}

std::size_t TensorShape::index(const Word& w) const {
  if (!contains(w))
    throw InputError("algebra", "index", "word " + w.to_string() + " outside alphabet or level");
  std::size_t idx = 0;
  for (int l : w) idx = idx * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(l - 1);
  return offsets_[w.size()] + idx;
}

int TensorShape::length_of(std::size_t index) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return static_cast<int>(it - offsets_.begin()) - 1;
}

Word TensorShape::word(std::size_t index) const {
  const int len = length_of(index);
  std::size_t rem = index - offsets_[static_cast<std::size_t>(len)];
  std::vector<int> letters(static_cast<std::size_t>(len));
  for (int i = len - 1; i >= 0; --i) {
    letters[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(dim_)) + 1;
    rem /= static_cast<std::size_t>(dim_);
  }
  return Word(std::move(letters));
}

// ---------------------------------------------------------------- TruncatedTensor

TruncatedTensor::TruncatedTensor(int dim, int level) : TruncatedTensor(TensorShape(dim, level)) {}

TruncatedTensor::TruncatedTensor(const TensorShape& shape) : shape_(shape), coeffs_(shape.size(), 0.0) {}

TruncatedTensor TruncatedTensor::unit(int dim, int level) {
  TruncatedTensor t(dim, level);
  t.coeffs_[0] = 1.0;
  return t;
}

TruncatedTensor TruncatedTensor::basis(int dim, int level, const Word& w, double value) {
  TruncatedTensor t(dim, level);
  t[w] = value;
  return t;
}

TruncatedTensor TruncatedTensor::level_one(int dim, int level, std::span<const double> x) {
  if (static_cast<int>(x.size()) != dim)
    throw InputError("algebra", "level_one", "vector size does not match alphabet");
  TruncatedTensor t(dim, level);
  if (level >= 1)
    for (int i = 0; i < dim; ++i) t.coeffs_[1 + static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
  return t;
}

double TruncatedTensor::operator[](const Word& w) const { return coeffs_[shape_.index(w)]; }
double& TruncatedTensor::operator[](const Word& w) { return coeffs_[shape_.index(w)]; }

double TruncatedTensor::coefficient(const Word& w) const {
  return shape_.contains(w) ? coeffs_[shape_.index(w)] : 0.0;
}

TruncatedTensor TruncatedTensor::truncated(int level) const {
  if (level == this->level()) return *this;
  if (level > this->level()) return extended(level);
  TruncatedTensor t(dim(), level);
  std::copy_n(coeffs_.begin(), t.size(), t.coeffs_.begin());
  return t;
}

TruncatedTensor TruncatedTensor::extended(int level) const {
  if (level == this->level()) return *this;
  if (level < this->level()) return truncated(level);
  TruncatedTensor t(dim(), level);
  std::copy(coeffs_.begin(), coeffs_.end(), t.coeffs_.begin());
  return t;
}

double TruncatedTensor::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

TruncatedTensor& TruncatedTensor::operator+=(const TruncatedTensor& other) {
  if (!(shape_ == other.shape_)) throw InputError("algebra", "add", "shape mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

TruncatedTensor& TruncatedTensor::operator-=(const TruncatedTensor& other) {
  if (!(shape_ == other.shape_)) throw InputError("algebra", "subtract", "shape mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

TruncatedTensor& TruncatedTensor::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

std::vector<std::pair<Word, double>> TruncatedTensor::terms() const {
  std::vector<std::pair<Word, double>> out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0.0) out.emplace_back(shape_.word(i), coeffs_[i]);
  return out;
}

double max_abs_diff(const TruncatedTensor& a, const TruncatedTensor& b) {
  if (!(a.shape() == b.shape())) throw InputError("algebra", "max_abs_diff", "shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.at(i) - b.at(i)));
  return m;
}

// ---------------------------------------------------------------- shuffle

std::vector<std::pair<Word, int>> shuffle_words(const Word& u, const Word& v) {
  if (u.empty()) return {{v, 1}};
  if (v.empty()) return {{u, 1}};
  std::map<Word, int> acc;
  const int a = u[u.size() - 1];
  const int b = v[v.size() - 1];
  for (auto& [w, c] : shuffle_words(u.prefix(u.size() - 1), v)) acc[w.appended(a)] += c;
  for (auto& [w, c] : shuffle_words(u, v.prefix(v.size() - 1))) acc[w.appended(b)] += c;
  return {acc.begin(), acc.end()};
}

namespace {

struct ShuffleTable {
  struct Pair {
    std::size_t u, v, begin, end;
  };
  std::vector<Pair> pairs;
  std::vector<std::pair<std::size_t, double>> terms;
};

const ShuffleTable& shuffle_table(int dim, int level) {
  static std::shared_mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<ShuffleTable>> cache;
  const auto key = std::make_pair(dim, level);
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return *it->second;
  }
  auto table = std::make_unique<ShuffleTable>();
  const TensorShape shape(dim, level);
  for (std::size_t iu = 0; iu < shape.size(); ++iu) {
    const Word u = shape.word(iu);
    for (std::size_t iv = 0; iv < shape.size(); ++iv) {
      if (shape.length_of(iu) + shape.length_of(iv) > level) continue;
      const Word v = shape.word(iv);
      ShuffleTable::Pair p{iu, iv, table->terms.size(), 0};
      for (auto& [w, c] : shuffle_words(u, v)) table->terms.emplace_back(shape.index(w), static_cast<double>(c));
      p.end = table->terms.size();
      table->pairs.push_back(p);
    }
  }
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(table));
  return *it->second;
}

}  // namespace

TruncatedTensor shuffle(const TruncatedTensor& a, const TruncatedTensor& b) {
  if (a.dim() != b.dim()) throw InputError("algebra", "shuffle", "mismatched alphabet size");
  const int level = std::max(a.level(), b.level());
  const TruncatedTensor aa = a.extended(level);
  const TruncatedTensor bb = b.extended(level);
  TruncatedTensor out(a.dim(), level);
  for (const auto& p : shuffle_table(a.dim(), level).pairs) {
    const double cu = aa.at(p.u);
    const double cv = bb.at(p.v);
    if (cu == 0.0 || cv == 0.0) continue;
    const auto& terms = shuffle_table(a.dim(), level).terms;
    for (std::size_t k = p.begin; k < p.end; ++k) out.at(terms[k].first) += terms[k].second * cu * cv;
  }
  return out;
}

std::vector<std::pair<Word, Word>> deconcat(const Word& w) {
  std::vector<std::pair<Word, Word>> out;
  out.reserve(w.size() + 1);
  for (std::size_t i = 0; i <= w.size(); ++i) out.emplace_back(w.prefix(i), w.suffix_from(i));
  return out;
}

TruncatedTensor antipode(const TruncatedTensor& a) {
  const TensorShape& shape = a.shape();
  TruncatedTensor out(shape);
  for (int p = 0; p <= shape.level(); ++p) {
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    const std::size_t off = shape.offset(p);
    for (std::size_t i = 0; i < shape.count(p); ++i) {
      // reverse the base-d digits of i
      std::size_t rem = i, rev = 0;
      for (int k = 0; k < p; ++k) {
        rev = rev * static_cast<std::size_t>(shape.dim()) + rem % static_cast<std::size_t>(shape.dim());
        rem /= static_cast<std::size_t>(shape.dim());
      }
      out.at(off + rev) = sign * a.at(off + i);
    }
  }
  return out;
}

TruncatedTensor convolution(const TruncatedTensor& g, const TruncatedTensor& h) {
  if (!(g.shape() == h.shape())) throw InputError("algebra", "convolution", "mismatched alphabet size or level");
  const TensorShape& shape = g.shape();
  TruncatedTensor out(shape);
  const auto gc = g.coeffs();
  const auto hc = h.coeffs();
  auto oc = out.coeffs();
  for (int p = 0; p <= shape.level(); ++p) {
    const std::size_t off_p = shape.offset(p);
    for (int q = 0; q <= p; ++q) {
      const std::size_t off_q = shape.offset(q);
      const std::size_t off_r = shape.offset(p - q);
      const std::size_t nr = shape.count(p - q);
      for (std::size_t a = 0; a < shape.count(q); ++a) {
        const double ga = gc[off_q + a];
        if (ga == 0.0) continue;
        double* dst = &oc[off_p + a * nr];
        const double* src = &hc[off_r];
        for (std::size_t b = 0; b < nr; ++b) dst[b] += ga * src[b];
      }
    }
  }
  return out;
}

TruncatedTensor tensor_exp(const TruncatedTensor& a) {
  if (a.at(0) != 0.0) throw InputError("algebra", "tensor_exp", "argument must have zero scalar part");
  TruncatedTensor result = TruncatedTensor::unit(a.dim(), a.level());
  TruncatedTensor term = result;
  for (int k = 1; k <= a.level(); ++k) {
    term = convolution(term, a);
    term *= 1.0 / k;
    result += term;
  }
  return result;
}

TruncatedTensor tensor_log(const TruncatedTensor& g) {
  if (std::abs(g.at(0) - 1.0) > 1e-12) throw InputError("algebra", "tensor_log", "argument must have unit scalar part");
  TruncatedTensor x = g;
  x.at(0) = 0.0;
  TruncatedTensor result(g.shape());
  TruncatedTensor term = x;
  for (int k = 1; k <= g.level(); ++k) {
    TruncatedTensor scaled = term;
    scaled *= ((k % 2 == 1) ? 1.0 : -1.0) / k;
    result += scaled;
    term = convolution(term, x);
  }
  return result;
}

CharacterCheck is_character(const TruncatedTensor& a, double tol) {
  CharacterCheck out;
  out.violation = std::abs(a.at(0) - 1.0);
  const auto& table = shuffle_table(a.dim(), a.level());
  for (const auto& p : table.pairs) {
    if (p.u == 0 || p.v == 0) continue;
    double lhs = 0.0;
    for (std::size_t k = p.begin; k < p.end; ++k) lhs += table.terms[k].second * a.at(table.terms[k].first);
    const double viol = std::abs(lhs - a.at(p.u) * a.at(p.v));
    if (viol > out.violation) {
      out.violation = viol;
      out.worst_u = a.shape().word(p.u);
      out.worst_v = a.shape().word(p.v);
    }
  }
  out.is_character = out.violation <= tol;
  return out;
}

// ---------------------------------------------------------------- GroupTensor

GroupTensor GroupTensor::checked(TruncatedTensor t, double tol) {
  const auto check = is_character(t, tol);
  if (!check.is_character)
    throw InputError("algebra", "GroupTensor", "not a character: violation " + std::to_string(check.violation) +
                                                   " at u=" + check.worst_u.to_string() +
                                                   " v=" + check.worst_v.to_string());
  return GroupTensor(std::move(t));
}

GroupTensor GroupTensor::trusted(TruncatedTensor t) { return GroupTensor(std::move(t)); }

GroupTensor GroupTensor::inverse() const { return GroupTensor(antipode(tensor_)); }

GroupTensor group_inverse(const GroupTensor& g, double tol) {
  const auto check = is_character(g.tensor(), tol);
  if (!check.is_character)
    throw InputError("algebra", "group_inverse", "input violates the character property by " +
                                                     std::to_string(check.violation));
  return g.inverse();
}

double homogeneous_norm(const GroupTensor& g) {
  const TensorShape& shape = g.tensor().shape();
  double norm = 0.0;
  for (int k = 1; k <= shape.level(); ++k) {
    const double fk = factorial(k);
    for (std::size_t i = 0; i < shape.count(k); ++i) {
      const double c = std::abs(g.at(shape.offset(k) + i));
      if (c > 0.0) norm = std::max(norm, std::pow(fk * c, 1.0 / k));
    }
  }
  return norm;
}

double group_distance(const GroupTensor& g, const GroupTensor& h) { return homogeneous_norm(h.inverse() * g); }

// ---------------------------------------------------------------- deshuffles

namespace {

DeshuffleTable build_deshuffles(const Word& w, int k) {
  DeshuffleTable table;
  table.word = w;
  table.arity = k;
  const std::size_t n = w.size();
  std::map<std::vector<Word>, int> counts;
  // Every surjective labelling of positions by blocks 0..k-1 is one ordered
  // set partition; reading blocks as subsequences gives the tuple.
  std::vector<int> label(n, 0);
  while (true) {
    std::vector<int> used(static_cast<std::size_t>(k), 0);
    for (int l : label) used[static_cast<std::size_t>(l)] = 1;
    if (std::all_of(used.begin(), used.end(), [](int u) { return u == 1; })) {
      std::vector<std::vector<int>> parts(static_cast<std::size_t>(k));
      for (std::size_t i = 0; i < n; ++i) parts[static_cast<std::size_t>(label[i])].push_back(w[i]);
      std::vector<Word> tuple;
      tuple.reserve(parts.size());
      for (auto& p : parts) tuple.emplace_back(std::move(p));
      ++counts[tuple];
    }
    std::size_t pos = 0;
    while (pos < n && label[pos] == k - 1) label[pos++] = 0;
    if (pos == n) break;
    ++label[pos];
  }
  for (auto& [tuple, c] : counts) table.entries.push_back({tuple, c});
  return table;
}

}  // namespace

const DeshuffleTable& deshuffles(const Word& w, int k) {
  if (k < 1 || k > static_cast<int>(w.size()))
    throw InputError("algebra", "deshuffles", "arity " + std::to_string(k) + " out of range for word " + w.to_string());
  static std::shared_mutex mutex;
  static std::map<std::pair<Word, int>, std::unique_ptr<DeshuffleTable>> cache;
  auto key = std::make_pair(w, k);
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return *it->second;
  }
  auto table = std::make_unique<DeshuffleTable>(build_deshuffles(w, k));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(std::move(key), std::move(table));
  return *it->second;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace roughkit
