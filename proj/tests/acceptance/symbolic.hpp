#pragma once

// Expression DAGs with symbolic differentiation; an oracle independent of the jet engine.

#include <cmath>
#include <map>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "roughkit/smooth_function.hpp"

namespace sym {

enum class Op { Const, Var, Add, Mul, Sin, Cos, Exp };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Op op;
  double c = 0.0;
  int var = 0;
  Expr a, b;
};

inline Expr cst(double c) { return std::make_shared<const Node>(Node{Op::Const, c, 0, nullptr, nullptr}); }
inline Expr var(int i) { return std::make_shared<const Node>(Node{Op::Var, 0.0, i, nullptr, nullptr}); }

inline bool is_const(const Expr& e, double v) { return e->op == Op::Const && e->c == v; }

inline Expr add(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return cst(a->c + b->c);
  return std::make_shared<const Node>(Node{Op::Add, 0.0, 0, a, b});
}

inline Expr mul(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return cst(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return cst(a->c * b->c);
  return std::make_shared<const Node>(Node{Op::Mul, 0.0, 0, a, b});
}

inline Expr sin(const Expr& a) { return std::make_shared<const Node>(Node{Op::Sin, 0.0, 0, a, nullptr}); }
inline Expr cos(const Expr& a) { return std::make_shared<const Node>(Node{Op::Cos, 0.0, 0, a, nullptr}); }
inline Expr exp(const Expr& a) { return std::make_shared<const Node>(Node{Op::Exp, 0.0, 0, a, nullptr}); }

class Differentiator {
 public:
  explicit Differentiator(int v) : v_(v) {}

  Expr operator()(const Expr& e) {
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
    Expr d;
    switch (e->op) {
      case Op::Const: d = cst(0.0); break;
      case Op::Var: d = cst(e->var == v_ ? 1.0 : 0.0); break;
      case Op::Add: d = add((*this)(e->a), (*this)(e->b)); break;
      case Op::Mul: d = add(mul((*this)(e->a), e->b), mul(e->a, (*this)(e->b))); break;
      case Op::Sin: d = mul(cos(e->a), (*this)(e->a)); break;
      case Op::Cos: d = mul(mul(cst(-1.0), sin(e->a)), (*this)(e->a)); break;
      case Op::Exp: d = mul(e, (*this)(e->a)); break;
    }
    memo_[e.get()] = d;
    keep_.push_back(e);
    return d;
  }

 private:
  int v_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_;
};

inline Expr diff(const Expr& e, int v) { return Differentiator(v)(e); }

class Evaluator {
 public:
  explicit Evaluator(std::span<const double> x) : x_(x) {}

  double operator()(const Expr& e) {
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
    double r = 0.0;
    switch (e->op) {
      case Op::Const: r = e->c; break;
      case Op::Var: r = x_[static_cast<std::size_t>(e->var)]; break;
      case Op::Add: r = (*this)(e->a) + (*this)(e->b); break;
      case Op::Mul: r = (*this)(e->a) * (*this)(e->b); break;
      case Op::Sin: r = std::sin((*this)(e->a)); break;
      case Op::Cos: r = std::cos((*this)(e->a)); break;
      case Op::Exp: r = std::exp((*this)(e->a)); break;
    }
    memo_[e.get()] = r;
    return r;
  }

 private:
  std::span<const double> x_;
  std::unordered_map<const Node*, double> memo_;
};

inline double eval(const Expr& e, std::span<const double> x) { return Evaluator(x)(e); }

// Replaces Var(i) by args[i].
class Substituter {
 public:
  explicit Substituter(const std::vector<Expr>& args) : args_(args) {}

  Expr operator()(const Expr& e) {
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
    Expr r;
    switch (e->op) {
      case Op::Const: r = e; break;
      case Op::Var: r = args_[static_cast<std::size_t>(e->var)]; break;
      case Op::Add: r = add((*this)(e->a), (*this)(e->b)); break;
      case Op::Mul: r = mul((*this)(e->a), (*this)(e->b)); break;
      case Op::Sin: r = sin((*this)(e->a)); break;
      case Op::Cos: r = cos((*this)(e->a)); break;
      case Op::Exp: r = exp((*this)(e->a)); break;
    }
    memo_[e.get()] = r;
    return r;
  }

 private:
  const std::vector<Expr>& args_;
  std::unordered_map<const Node*, Expr> memo_;
};

// Per-component expressions of a polynomial or trig function, from its
// structural description.
inline std::vector<Expr> from_function(const roughkit::SmoothFunction& f) {
  const auto* d = f.description();
  std::vector<Expr> out;
  if (d->family == "polynomial") {
    for (const auto& comp : d->polynomial) {
      Expr sum = cst(0.0);
      for (const auto& m : comp) {
        Expr term = cst(m.coeff);
        for (std::size_t j = 0; j < m.powers.size(); ++j)
          for (int p = 0; p < m.powers[j]; ++p) term = mul(term, var(static_cast<int>(j)));
        sum = add(sum, term);
      }
      out.push_back(sum);
    }
  } else if (d->family == "trig") {
    for (const auto& comp : d->trig) {
      Expr sum = cst(0.0);
      for (const auto& t : comp) {
        Expr arg = cst(t.phase);
        for (std::size_t j = 0; j < t.freq.size(); ++j) arg = add(arg, mul(cst(t.freq[j]), var(static_cast<int>(j))));
        sum = add(sum, mul(cst(t.coeff), sin(arg)));
      }
      out.push_back(sum);
    }
  }
  return out;
}

}  // namespace sym
