#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "roughkit/algebra.hpp"
#include "roughkit/errors.hpp"
#include "support.hpp"

using namespace roughkit;
using testing::Gen;

namespace {

// Shuffles of u and v by choosing which positions of the result come from u.
std::map<Word, int> brute_shuffle(const Word& u, const Word& v) {
  std::map<Word, int> out;
  const std::size_t n = u.size() + v.size();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != u.size()) continue;
    std::vector<int> l;
    std::size_t iu = 0, iv = 0;
    for (std::size_t p = 0; p < n; ++p) l.push_back((mask >> p) & 1u ? u[iu++] : v[iv++]);
    ++out[Word(l)];
  }
  return out;
}

std::map<Word, int> brute_shuffle_many(const std::vector<Word>& parts) {
  std::map<Word, int> acc{{Word{}, 1}};
  for (const auto& p : parts) {
    std::map<Word, int> next;
    for (const auto& [w, c] : acc)
      for (const auto& [x, m] : brute_shuffle(w, p)) next[x] += c * m;
    acc = std::move(next);
  }
  return acc;
}

TruncatedTensor brute_shuffle_tensor(const TruncatedTensor& a, const TruncatedTensor& b) {
  const int d = a.dim(), level = std::max(a.level(), b.level());
  TruncatedTensor out(d, level);
  for (const auto& u : testing::words_up_to(d, a.level()))
    for (const auto& v : testing::words_up_to(d, b.level())) {
      if (static_cast<int>(u.size() + v.size()) > level) continue;
      for (const auto& [w, m] : brute_shuffle(u, v)) out[w] += m * a[u] * b[v];
    }
  return out;
}

}  // namespace

TEST_CASE("word basics") {
  Word w{1, 2, 3};
  CHECK(w.size() == 3);
  CHECK((Word{} * w) == w);
  CHECK((w * Word{}) == w);
  CHECK((Word{1} * Word{2, 3}) == w);
  CHECK(w.reversed() == Word{3, 2, 1});
  CHECK(Word{2} < Word{1, 1});
  CHECK(Word{1, 2} < Word{2, 1});
}

TEST_CASE("tensor shape indexing follows canonical order") {
  TensorShape s(3, 3);
  CHECK(s.size() == 1 + 3 + 9 + 27);
  auto words = testing::words_up_to(3, 3);
  REQUIRE(words.size() == s.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    CHECK(s.index(words[i]) == i);
    CHECK(s.word(i) == words[i]);
  }
}

TEST_CASE("shuffle examples") {
  const int d = 3, N = 3;
  auto e = [&](Word w) { return TruncatedTensor::basis(d, N, w); };
  auto s = shuffle(e({1}), e({2}));
  CHECK(s[Word{1, 2}] == 1.0);
  CHECK(s[Word{2, 1}] == 1.0);
  CHECK(s.terms().size() == 2);
  auto s2 = shuffle(e({1}), e({1}));
  CHECK(s2[Word{1, 1}] == 2.0);
  auto s3 = shuffle(e({1, 2}), e({3}));
  auto oracle = brute_shuffle(Word{1, 2}, Word{3});
  CHECK(oracle.size() == 3);
  for (const auto& [w, m] : oracle) CHECK(s3[w] == m);
  CHECK(s3.terms().size() == 3);
}

TEST_CASE("shuffle matches brute force, commutative and associative") {
  Gen g(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = g.integer(1, 3), N = g.integer(1, d == 3 ? 4 : 5);
    auto a = g.tensor(d, N, 0.4), b = g.tensor(d, N, 0.4), c = g.tensor(d, N, 0.4);
    auto ab = shuffle(a, b);
    CHECK(max_abs_diff(ab, brute_shuffle_tensor(a, b)) <= 1e-12);
    CHECK(max_abs_diff(ab, shuffle(b, a)) <= 1e-12);
    CHECK(max_abs_diff(shuffle(ab, c), shuffle(a, shuffle(b, c))) <= 1e-12);
  }
}

TEST_CASE("shuffle grading and mismatched alphabets") {
  Gen g(5);
  auto a = g.tensor(2, 4), b = g.tensor(2, 4);
  auto ab = shuffle(a, b);
  // Perturbing level 3 of a must not change level <= 2 of the product.
  auto a2 = a;
  a2[Word{1, 2, 1}] += 5.0;
  auto ab2 = shuffle(a2, b);
  for (const auto& w : testing::words_up_to(2, 2)) CHECK(ab[w] == ab2[w]);
  CHECK_THROWS_AS(shuffle(TruncatedTensor(2, 2), TruncatedTensor(3, 2)), InputError);
}

TEST_CASE("deconcat") {
  auto dc = deconcat(Word{1, 2});
  REQUIRE(dc.size() == 3);
  CHECK(dc[0] == std::pair{Word{}, Word{1, 2}});
  CHECK(dc[1] == std::pair{Word{1}, Word{2}});
  CHECK(dc[2] == std::pair{Word{1, 2}, Word{}});
  CHECK(deconcat(Word{}).size() == 1);
  CHECK(deconcat(Word{1, 1, 2}).size() == 4);
}

TEST_CASE("antipode") {
  const int d = 2, N = 3;
  auto s = antipode(TruncatedTensor::basis(d, N, Word{1, 2}));
  CHECK(s[Word{2, 1}] == 1.0);
  CHECK(s.terms().size() == 1);
  CHECK(antipode(TruncatedTensor::basis(d, N, Word{1}))[Word{1}] == -1.0);
  CHECK(antipode(TruncatedTensor::unit(d, N))[Word{}] == 1.0);
  Gen g(3);
  auto a = g.tensor(d, N);
  CHECK(max_abs_diff(antipode(antipode(a)), a) == 0.0);
}

TEST_CASE("convolution") {
  const int d = 2, N = 3;
  auto c = convolution(TruncatedTensor::basis(d, N, Word{1}), TruncatedTensor::basis(d, N, Word{2}));
  CHECK(c[Word{1, 2}] == 1.0);
  CHECK(c.terms().size() == 1);
  Gen g(9);
  auto a = g.tensor(d, N);
  CHECK(max_abs_diff(convolution(TruncatedTensor::unit(d, N), a), a) == 0.0);
  auto b = g.tensor(d, N), e = g.tensor(d, N);
  CHECK(max_abs_diff(convolution(convolution(a, b), e), convolution(a, convolution(b, e))) <= 1e-12);
  CHECK_THROWS_AS(convolution(TruncatedTensor(2, 2), TruncatedTensor(2, 3)), InputError);

  // exp(e1) * exp(e1) = exp(2 e1), oracle (2)^k / k! on word 1^k
  auto ex = tensor_exp(TruncatedTensor::basis(1, 3, Word{1}));
  auto sq = convolution(ex, ex);
  for (int k = 0; k <= 3; ++k)
    CHECK(sq[Word(std::vector<int>(static_cast<std::size_t>(k), 1))] == doctest::Approx(std::pow(2.0, k) / factorial(k)).epsilon(1e-15));
}

TEST_CASE("exp and log") {
  auto ex = tensor_exp(TruncatedTensor::basis(1, 2, Word{1}, 0.7));
  CHECK(ex[Word{}] == 1.0);
  CHECK(ex[Word{1}] == doctest::Approx(0.7));
  CHECK(ex[Word{1, 1}] == doctest::Approx(0.49 / 2));
  CHECK(tensor_log(TruncatedTensor::unit(2, 3)).max_abs() == 0.0);
  auto lie = TruncatedTensor::basis(2, 4, Word{1}) + TruncatedTensor::basis(2, 4, Word{2});
  CHECK(max_abs_diff(tensor_log(tensor_exp(lie)), lie) <= 1e-14);
  CHECK(is_character(tensor_exp(lie), 1e-12).is_character);
  CHECK_THROWS_AS(tensor_exp(TruncatedTensor::unit(2, 2)), InputError);
  CHECK_THROWS_AS(tensor_log(TruncatedTensor(2, 2)), InputError);
  Gen g(4);
  auto t = g.tensor(3, 4);
  t.at(0) = 0.0;
  CHECK(max_abs_diff(tensor_log(tensor_exp(t)), t) <= 1e-12);
}

TEST_CASE("is_character") {
  auto one = TruncatedTensor::unit(2, 3);
  auto c = is_character(one, 1e-12);
  CHECK(c.is_character);
  CHECK(c.violation == 0.0);
  auto bad = TruncatedTensor::unit(1, 2) + TruncatedTensor::basis(1, 2, Word{1, 1});
  auto cb = is_character(bad, 1e-10);
  CHECK_FALSE(cb.is_character);
  CHECK(cb.violation == doctest::Approx(2.0));
  CHECK(cb.worst_u == Word{1});
  CHECK(cb.worst_v == Word{1});
}

TEST_CASE("group inverse") {
  CHECK(max_abs_diff(GroupTensor(2, 3).inverse().tensor(), TruncatedTensor::unit(2, 3)) == 0.0);
  auto g = GroupTensor::exp_lie(TruncatedTensor::basis(1, 4, Word{1}, 0.3));
  auto expected = tensor_exp(TruncatedTensor::basis(1, 4, Word{1}, -0.3));
  CHECK(max_abs_diff(group_inverse(g).tensor(), expected) <= 1e-15);
  Gen gen(21);
  for (int trial = 0; trial < 10; ++trial) {
    GroupTensor h(2, 5);
    for (int seg = 0; seg < 4; ++seg) {
      std::vector<double> dx{gen.normal(0.5), gen.normal(0.5)};
      h = h * GroupTensor::exp_lie(TruncatedTensor::level_one(2, 5, dx));
    }
    auto inv = group_inverse(h);
    CHECK(max_abs_diff(convolution(h.tensor(), inv.tensor()), TruncatedTensor::unit(2, 5)) <= 1e-12);
    CHECK(max_abs_diff(convolution(inv.tensor(), h.tensor()), TruncatedTensor::unit(2, 5)) <= 1e-12);
  }
  CHECK_THROWS_AS(group_inverse(GroupTensor::trusted(TruncatedTensor::unit(1, 2) + TruncatedTensor::basis(1, 2, Word{1, 1}))),
                  InputError);
}

TEST_CASE("homogeneous norm and distance") {
  CHECK(homogeneous_norm(GroupTensor(2, 3)) == 0.0);
  auto g = GroupTensor::exp_lie(TruncatedTensor::basis(2, 4, Word{1}, -0.8));
  CHECK(homogeneous_norm(g) == doctest::Approx(0.8).epsilon(1e-14));
  // roots amplify rounding residue in h^{-1} g: level k contributes (k! eps)^{1/k}
  CHECK(group_distance(g, g) <= std::pow(factorial(4) * 1e-15, 0.25));
  CHECK(group_distance(GroupTensor(2, 3), GroupTensor(2, 3)) == 0.0);
}

TEST_CASE("deshuffle examples") {
  auto t = deshuffles(Word{1, 2}, 2);
  REQUIRE(t.entries.size() == 2);
  std::set<std::vector<Word>> got;
  for (const auto& e : t.entries) got.insert(e.parts);
  CHECK(got == std::set<std::vector<Word>>{{Word{1}, Word{2}}, {Word{2}, Word{1}}});
  auto t11 = deshuffles(Word{1, 1}, 2);
  REQUIRE(t11.entries.size() == 1);
  CHECK(t11.entries[0].multiplicity == 2);
  CHECK(deshuffles(Word{1, 2, 3}, 2).entries.size() == 6);
  CHECK_THROWS_AS(deshuffles(Word{1, 2}, 3), InputError);
  CHECK_THROWS_AS(deshuffles(Word{1, 2}, 0), InputError);
}

TEST_CASE("deshuffle tuples are closed under permutation and multiplicities match shuffles") {
  Gen g(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Word w = g.word(3, g.integer(1, 5));
    const int k = g.integer(1, static_cast<int>(w.size()));
    const auto& t = deshuffles(w, k);
    std::set<std::vector<Word>> members;
    for (const auto& e : t.entries) members.insert(e.parts);
    for (const auto& e : t.entries) {
      std::size_t total = 0;
      for (const auto& p : e.parts) total += p.size();
      CHECK(total == w.size());
      auto perm = e.parts;
      std::reverse(perm.begin(), perm.end());
      CHECK(members.count(perm) == 1);
      CHECK(brute_shuffle_many(e.parts)[w] == e.multiplicity);
      CHECK(e.multiplicity >= 1);
    }
  }
}
