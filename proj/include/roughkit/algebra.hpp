#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace roughkit {

/// A finite sequence of letters from {1..d}. Ordered canonically: by length,
/// then lexicographically.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters) : letters_(letters) {}
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  int operator[](std::size_t i) const { return letters_[i]; }
  std::span<const int> letters() const { return letters_; }
  auto begin() const { return letters_.begin(); }
  auto end() const { return letters_.end(); }

  Word prefix(std::size_t n) const;
  Word suffix_from(std::size_t pos) const;
  Word reversed() const;
  Word prepended(int letter) const;
  Word appended(int letter) const;

  // Largest letter, 0 for the empty word.
  int max_letter() const;

  std::string to_string() const;

  friend Word operator*(const Word& a, const Word& b);
  friend bool operator==(const Word& a, const Word& b) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  std::vector<int> letters_;
};

/// Dense indexing of all words of length <= level over {1..dim}. The index
/// order coincides with the canonical word order.
class TensorShape {
 public:
  TensorShape() = default;
  TensorShape(int dim, int level);

  int dim() const { return dim_; }
  int level() const { return level_; }
  std::size_t size() const { return offsets_.back(); }
  std::size_t offset(int length) const { return offsets_[static_cast<std::size_t>(length)]; }
  std::size_t count(int length) const { return powers_[static_cast<std::size_t>(length)]; }
  std::size_t power(int k) const { return powers_[static_cast<std::size_t>(k)]; }

  bool contains(const Word& w) const;
  std::size_t index(const Word& w) const;
  Word word(std::size_t index) const;
  int length_of(std::size_t index) const;

  friend bool operator==(const TensorShape& a, const TensorShape& b) {
    return a.dim_ == b.dim_ && a.level_ == b.level_;
  }

 private:
  int dim_ = 1;
  int level_ = 0;
  std::vector<std::size_t> offsets_{0, 1};
  std::vector<std::size_t> powers_{1};
};

/// Element of the step-N truncated tensor algebra over R^d, stored densely in
/// canonical word order. The same representation serves H_N and its dual.
class TruncatedTensor {
 public:
  TruncatedTensor() = default;
  TruncatedTensor(int dim, int level);
  explicit TruncatedTensor(const TensorShape& shape);

  static TruncatedTensor unit(int dim, int level);
  static TruncatedTensor basis(int dim, int level, const Word& w, double value = 1.0);
  // sum_i x_i e_i
  static TruncatedTensor level_one(int dim, int level, std::span<const double> x);

  const TensorShape& shape() const { return shape_; }
  int dim() const { return shape_.dim(); }
  int level() const { return shape_.level(); }
  std::size_t size() const { return coeffs_.size(); }

  double operator[](const Word& w) const;
  double& operator[](const Word& w);
  double at(std::size_t i) const { return coeffs_[i]; }
  double& at(std::size_t i) { return coeffs_[i]; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }

  // Coefficient of e_w, zero when |w| exceeds the level.
  double coefficient(const Word& w) const;

  TruncatedTensor truncated(int level) const;
  TruncatedTensor extended(int level) const;
  double max_abs() const;

  TruncatedTensor& operator+=(const TruncatedTensor& other);
  TruncatedTensor& operator-=(const TruncatedTensor& other);
  TruncatedTensor& operator*=(double s);
  friend TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b) { return a += b; }
  friend TruncatedTensor operator-(TruncatedTensor a, const TruncatedTensor& b) { return a -= b; }
  friend TruncatedTensor operator*(TruncatedTensor a, double s) { return a *= s; }
  friend TruncatedTensor operator*(double s, TruncatedTensor a) { return a *= s; }

  // Nonzero terms in canonical order.
  std::vector<std::pair<Word, double>> terms() const;

 private:
  TensorShape shape_;
  std::vector<double> coeffs_{1.0};
  friend class GroupTensor;
};

double max_abs_diff(const TruncatedTensor& a, const TruncatedTensor& b);

TruncatedTensor shuffle(const TruncatedTensor& a, const TruncatedTensor& b);
// e_u ⧢ e_v as a sparse list of (word, multiplicity), canonical order.
std::vector<std::pair<Word, int>> shuffle_words(const Word& u, const Word& v);
std::vector<std::pair<Word, Word>> deconcat(const Word& w);
TruncatedTensor antipode(const TruncatedTensor& a);
TruncatedTensor convolution(const TruncatedTensor& g, const TruncatedTensor& h);
TruncatedTensor tensor_exp(const TruncatedTensor& a);
TruncatedTensor tensor_log(const TruncatedTensor& g);

struct CharacterCheck {
  bool is_character = true;
  double violation = 0.0;
  Word worst_u;
  Word worst_v;
};

CharacterCheck is_character(const TruncatedTensor& a, double tol);

/// A truncated character: <g, 1> = 1 and multiplicative for the shuffle.
class GroupTensor {
 public:
  GroupTensor() = default;
  GroupTensor(int dim, int level) : tensor_(TruncatedTensor::unit(dim, level)) {}

  // Validates the character property, throws InputError beyond tol.
  static GroupTensor checked(TruncatedTensor t, double tol = 1e-10);
  // For values produced by group-closed operations.
  static GroupTensor trusted(TruncatedTensor t);
  static GroupTensor exp_lie(const TruncatedTensor& lie) { return trusted(tensor_exp(lie)); }

  const TruncatedTensor& tensor() const { return tensor_; }
  int dim() const { return tensor_.dim(); }
  int level() const { return tensor_.level(); }
  double operator[](const Word& w) const { return tensor_[w]; }
  double at(std::size_t i) const { return tensor_.at(i); }

  GroupTensor inverse() const;
  TruncatedTensor log() const { return tensor_log(tensor_); }

  friend GroupTensor operator*(const GroupTensor& a, const GroupTensor& b) {
    return trusted(convolution(a.tensor_, b.tensor_));
  }

 private:
  explicit GroupTensor(TruncatedTensor t) : tensor_(std::move(t)) {}
  TruncatedTensor tensor_;
};

GroupTensor group_inverse(const GroupTensor& g, double tol = 1e-10);
double homogeneous_norm(const GroupTensor& g);
double group_distance(const GroupTensor& g, const GroupTensor& h);

/// Ordered k-tuples of non-empty words whose shuffle product contains e_w,
/// each with its multiplicity <e_w*, e_u1 ⧢ ... ⧢ e_uk>.
struct DeshuffleTable {
  struct Entry {
    std::vector<Word> parts;
    int multiplicity = 0;
  };
  Word word;
  int arity = 0;
  std::vector<Entry> entries;  // distinct tuples, lexicographic in canonical word order
};

// Memoized; safe to call concurrently.
const DeshuffleTable& deshuffles(const Word& w, int k);

double factorial(int k);

}  // namespace roughkit
