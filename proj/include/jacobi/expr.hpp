#pragma once

#include <memory>
#include <string>
#include <vector>

namespace jacobi {

// One scalar expression in variables x1..xn. Immutable after parse; derivative()
// returns a new expression, so instances can be shared freely across threads.
class PotentialExpr {
 public:
  PotentialExpr() = default;

  int dims() const { return dims_; }
  bool empty() const { return root_ == nullptr; }

  double eval(const double* x) const;
  double eval(const std::vector<double>& x) const { return eval(x.data()); }

  // Exact partial derivative with respect to x_{i+1}, built symbolically.
  PotentialExpr derivative(int i) const;

  // Canonical text form (parenthesized); parsing it back yields an equal tree.
  std::string to_string() const;

  // Original source text as given to parse_potential (empty for derived trees).
  const std::string& source() const { return source_; }

  struct Node;
  const std::shared_ptr<const Node>& root() const { return root_; }

  PotentialExpr(std::shared_ptr<const Node> root, int dims, std::string source);

 private:
  std::shared_ptr<const Node> root_;
  int dims_ = 0;
  std::string source_;
};

// Parses the potential DSL: infix + - * / ^, functions exp/ln/sin/cos/sqrt,
// variables x1..xn, decimal/scientific literals, whitespace-insensitive.
// '^' exponents are integer literals or parenthesized integer ratios.
// Errors carry the character position of the offending token.
PotentialExpr parse_potential(const std::string& source, int n);

// Compiled postfix program for fast repeated evaluation of one expression.
class ExprTape {
 public:
  ExprTape() = default;
  explicit ExprTape(const PotentialExpr& e);

  double eval(const double* x) const;
  bool constant_zero() const;

 private:
  struct Instr {
    int op;
    int slot;     // variable index for PushVar
    double a, b;  // constant / exponent payload
  };
  std::vector<Instr> prog_;
  int max_stack_ = 0;
};

}  // namespace jacobi
