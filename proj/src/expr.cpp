#include "jacobi/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "jacobi/errors.hpp"

namespace jacobi {

enum class NodeKind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Fun };
enum class FunKind { Exp, Ln, Sin, Cos, Sqrt };

struct PotentialExpr::Node {
  NodeKind kind;
  double value = 0.0;                  // Const
  int var = 0;                         // Var, zero-based
  long long pnum = 1, pden = 1;        // Pow exponent as reduced ratio
  FunKind fun = FunKind::Exp;          // Fun
  std::shared_ptr<const Node> a, b;    // children
};

namespace {

using NodePtr = std::shared_ptr<const PotentialExpr::Node>;
using Node = PotentialExpr::Node;

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Const;
  n->value = v;
  return n;
}

NodePtr make_var(int i) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Var;
  n->var = i;
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == NodeKind::Const && n->value == v;
}

NodePtr make_add(NodePtr a, NodePtr b) {
  if (a->kind == NodeKind::Const && b->kind == NodeKind::Const)
    return make_const(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Add;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_neg(NodePtr a);

NodePtr make_sub(NodePtr a, NodePtr b) {
  if (a->kind == NodeKind::Const && b->kind == NodeKind::Const)
    return make_const(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make_neg(std::move(b));
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Sub;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_mul(NodePtr a, NodePtr b) {
  if (a->kind == NodeKind::Const && b->kind == NodeKind::Const)
    return make_const(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Mul;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_div(NodePtr a, NodePtr b) {
  if (a->kind == NodeKind::Const && b->kind == NodeKind::Const && b->value != 0.0)
    return make_const(a->value / b->value);
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Div;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_neg(NodePtr a) {
  if (a->kind == NodeKind::Const) return make_const(-a->value);
  if (a->kind == NodeKind::Neg) return a->a;
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Neg;
  n->a = std::move(a);
  return n;
}

NodePtr make_pow(NodePtr a, long long pnum, long long pden) {
  if (pden < 0) {
    pden = -pden;
    pnum = -pnum;
  }
  long long g = std::gcd(pnum < 0 ? -pnum : pnum, pden);
  if (g > 1) {
    pnum /= g;
    pden /= g;
  }
  if (pnum == 0) return make_const(1.0);
  if (pnum == 1 && pden == 1) return a;
  if (a->kind == NodeKind::Const) {
    double v = std::pow(a->value, static_cast<double>(pnum) / static_cast<double>(pden));
    if (std::isfinite(v)) return make_const(v);
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Pow;
  n->pnum = pnum;
  n->pden = pden;
  n->a = std::move(a);
  return n;
}

NodePtr make_fun(FunKind f, NodePtr a) {
  if (a->kind == NodeKind::Const) {
    double u = a->value, v = 0.0;
    switch (f) {
      case FunKind::Exp: v = std::exp(u); break;
      case FunKind::Ln: v = std::log(u); break;
      case FunKind::Sin: v = std::sin(u); break;
      case FunKind::Cos: v = std::cos(u); break;
      case FunKind::Sqrt: v = std::sqrt(u); break;
    }
    if (std::isfinite(v)) return make_const(v);
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Fun;
  n->fun = f;
  n->a = std::move(a);
  return n;
}

double eval_node(const Node* n, const double* x) {
  switch (n->kind) {
    case NodeKind::Const: return n->value;
    case NodeKind::Var: return x[n->var];
    case NodeKind::Add: return eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
    case NodeKind::Sub: return eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
    case NodeKind::Mul: return eval_node(n->a.get(), x) * eval_node(n->b.get(), x);
    case NodeKind::Div: return eval_node(n->a.get(), x) / eval_node(n->b.get(), x);
    case NodeKind::Neg: return -eval_node(n->a.get(), x);
    case NodeKind::Pow: {
      double u = eval_node(n->a.get(), x);
      if (n->pden == 1) {
        long long e = n->pnum;
        bool inv = e < 0;
        if (inv) e = -e;
        double r = 1.0, base = u;
        while (e > 0) {
          if (e & 1) r *= base;
          base *= base;
          e >>= 1;
        }
        return inv ? 1.0 / r : r;
      }
      return std::pow(u, static_cast<double>(n->pnum) / static_cast<double>(n->pden));
    }
    case NodeKind::Fun: {
      double u = eval_node(n->a.get(), x);
      switch (n->fun) {
        case FunKind::Exp: return std::exp(u);
        case FunKind::Ln: return std::log(u);
        case FunKind::Sin: return std::sin(u);
        case FunKind::Cos: return std::cos(u);
        case FunKind::Sqrt: return std::sqrt(u);
      }
      return 0.0;
    }
  }
  return 0.0;
}

NodePtr diff_node(const NodePtr& n, int i) {
  switch (n->kind) {
    case NodeKind::Const: return make_const(0.0);
    case NodeKind::Var: return make_const(n->var == i ? 1.0 : 0.0);
    case NodeKind::Add: return make_add(diff_node(n->a, i), diff_node(n->b, i));
    case NodeKind::Sub: return make_sub(diff_node(n->a, i), diff_node(n->b, i));
    case NodeKind::Mul:
      return make_add(make_mul(diff_node(n->a, i), n->b), make_mul(n->a, diff_node(n->b, i)));
    case NodeKind::Div:
      // (a/b)' = a'/b - a b'/b^2
      return make_sub(make_div(diff_node(n->a, i), n->b),
                      make_div(make_mul(n->a, diff_node(n->b, i)), make_pow(n->b, 2, 1)));
    case NodeKind::Neg: return make_neg(diff_node(n->a, i));
    case NodeKind::Pow: {
      // (u^r)' = r u^{r-1} u'
      double r = static_cast<double>(n->pnum) / static_cast<double>(n->pden);
      NodePtr um1 = make_pow(n->a, n->pnum - n->pden, n->pden);
      return make_mul(make_const(r), make_mul(um1, diff_node(n->a, i)));
    }
    case NodeKind::Fun: {
      NodePtr du = diff_node(n->a, i);
      switch (n->fun) {
        case FunKind::Exp: return make_mul(make_fun(FunKind::Exp, n->a), du);
        case FunKind::Ln: return make_div(du, n->a);
        case FunKind::Sin: return make_mul(make_fun(FunKind::Cos, n->a), du);
        case FunKind::Cos: return make_neg(make_mul(make_fun(FunKind::Sin, n->a), du));
        case FunKind::Sqrt:
          return make_div(du, make_mul(make_const(2.0), make_fun(FunKind::Sqrt, n->a)));
      }
      return make_const(0.0);
    }
  }
  return make_const(0.0);
}

void print_node(const Node* n, std::ostream& os) {
  switch (n->kind) {
    case NodeKind::Const: os << n->value; return;
    case NodeKind::Var: os << "x" << (n->var + 1); return;
    case NodeKind::Add:
      os << "(";
      print_node(n->a.get(), os);
      os << " + ";
      print_node(n->b.get(), os);
      os << ")";
      return;
    case NodeKind::Sub:
      os << "(";
      print_node(n->a.get(), os);
      os << " - ";
      print_node(n->b.get(), os);
      os << ")";
      return;
    case NodeKind::Mul:
      os << "(";
      print_node(n->a.get(), os);
      os << " * ";
      print_node(n->b.get(), os);
      os << ")";
      return;
    case NodeKind::Div:
      os << "(";
      print_node(n->a.get(), os);
      os << " / ";
      print_node(n->b.get(), os);
      os << ")";
      return;
    case NodeKind::Neg:
      os << "(-";
      print_node(n->a.get(), os);
      os << ")";
      return;
    case NodeKind::Pow:
      os << "(";
      print_node(n->a.get(), os);
      if (n->pden == 1)
        os << "^" << n->pnum;
      else
        os << "^(" << n->pnum << "/" << n->pden << ")";
      os << ")";
      return;
    case NodeKind::Fun: {
      const char* name = "";
      switch (n->fun) {
        case FunKind::Exp: name = "exp"; break;
        case FunKind::Ln: name = "ln"; break;
        case FunKind::Sin: name = "sin"; break;
        case FunKind::Cos: name = "cos"; break;
        case FunKind::Sqrt: name = "sqrt"; break;
      }
      os << name << "(";
      print_node(n->a.get(), os);
      os << ")";
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Lexer / recursive-descent parser

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  Tok tok = Tok::End;
  size_t tok_pos = 0;
  double number = 0.0;
  std::string ident;

  explicit Lexer(const std::string& s) : src(s) { advance(); }

  [[noreturn]] void fail(const std::string& msg, size_t at) const {
    throw ConfigError("potential syntax error at position " + std::to_string(at) + ": " + msg);
  }

  void advance() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    tok_pos = pos;
    if (pos >= src.size()) {
      tok = Tok::End;
      return;
    }
    char c = src[pos];
    switch (c) {
      case '+': tok = Tok::Plus; ++pos; return;
      case '-': tok = Tok::Minus; ++pos; return;
      case '*': tok = Tok::Star; ++pos; return;
      case '/': tok = Tok::Slash; ++pos; return;
      case '^': tok = Tok::Caret; ++pos; return;
      case '(': tok = Tok::LParen; ++pos; return;
      case ')': tok = Tok::RParen; ++pos; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = src.c_str() + pos;
      char* end = nullptr;
      number = std::strtod(start, &end);
      if (end == start) fail("malformed number", pos);
      pos += static_cast<size_t>(end - start);
      tok = Tok::Number;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
        ++pos;
      ident = src.substr(start, pos - start);
      tok = Tok::Ident;
      return;
    }
    fail(std::string("unexpected character '") + c + "'", pos);
  }
};

struct Parser {
  Lexer lex;
  int dims;

  Parser(const std::string& s, int n) : lex(s), dims(n) {}

  NodePtr parse() {
    NodePtr e = parse_expr();
    if (lex.tok != Tok::End) lex.fail("unexpected trailing input", lex.tok_pos);
    return e;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (lex.tok == Tok::Plus || lex.tok == Tok::Minus) {
      bool plus = lex.tok == Tok::Plus;
      lex.advance();
      NodePtr rhs = parse_term();
      lhs = plus ? make_add(lhs, rhs) : make_sub(lhs, rhs);
    }
    return lhs;
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    while (lex.tok == Tok::Star || lex.tok == Tok::Slash) {
      bool mul = lex.tok == Tok::Star;
      lex.advance();
      NodePtr rhs = parse_factor();
      lhs = mul ? make_mul(lhs, rhs) : make_div(lhs, rhs);
    }
    return lhs;
  }

  NodePtr parse_factor() {
    if (lex.tok == Tok::Plus) {
      lex.advance();
      return parse_factor();
    }
    if (lex.tok == Tok::Minus) {
      lex.advance();
      return make_neg(parse_factor());
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (lex.tok != Tok::Caret) return base;
    lex.advance();
    auto [num, den] = parse_exponent();
    return make_pow(base, num, den);
  }

  long long parse_signed_integer() {
    long long sign = 1;
    while (lex.tok == Tok::Plus || lex.tok == Tok::Minus) {
      if (lex.tok == Tok::Minus) sign = -sign;
      lex.advance();
    }
    if (lex.tok != Tok::Number) lex.fail("expected integer exponent", lex.tok_pos);
    double v = lex.number;
    long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v)
      lex.fail("exponent must be an integer or an integer ratio", lex.tok_pos);
    lex.advance();
    return sign * i;
  }

  std::pair<long long, long long> parse_exponent() {
    if (lex.tok == Tok::LParen) {
      lex.advance();
      long long num = parse_signed_integer();
      long long den = 1;
      if (lex.tok == Tok::Slash) {
        lex.advance();
        den = parse_signed_integer();
        if (den == 0) lex.fail("zero exponent denominator", lex.tok_pos);
      }
      if (lex.tok != Tok::RParen) lex.fail("expected ')' closing exponent", lex.tok_pos);
      lex.advance();
      return {num, den};
    }
    return {parse_signed_integer(), 1};
  }

  NodePtr parse_atom() {
    switch (lex.tok) {
      case Tok::Number: {
        double v = lex.number;
        lex.advance();
        return make_const(v);
      }
      case Tok::LParen: {
        lex.advance();
        NodePtr e = parse_expr();
        if (lex.tok != Tok::RParen) lex.fail("expected ')'", lex.tok_pos);
        lex.advance();
        return e;
      }
      case Tok::Ident: {
        std::string name = lex.ident;
        size_t at = lex.tok_pos;
        lex.advance();
        if (name.size() >= 2 && name[0] == 'x' &&
            std::isdigit(static_cast<unsigned char>(name[1]))) {
          char* end = nullptr;
          long idx = std::strtol(name.c_str() + 1, &end, 10);
          if (*end != '\0') lex.fail("unknown identifier '" + name + "'", at);
          if (idx < 1 || idx > dims)
            lex.fail("variable x" + std::to_string(idx) + " out of range [1, " +
                         std::to_string(dims) + "]",
                     at);
          return make_var(static_cast<int>(idx - 1));
        }
        FunKind f;
        if (name == "exp")
          f = FunKind::Exp;
        else if (name == "ln")
          f = FunKind::Ln;
        else if (name == "sin")
          f = FunKind::Sin;
        else if (name == "cos")
          f = FunKind::Cos;
        else if (name == "sqrt")
          f = FunKind::Sqrt;
        else
          lex.fail("unknown identifier '" + name + "'", at);
        if (lex.tok != Tok::LParen) lex.fail("expected '(' after '" + name + "'", lex.tok_pos);
        lex.advance();
        NodePtr arg = parse_expr();
        if (lex.tok != Tok::RParen) lex.fail("expected ')'", lex.tok_pos);
        lex.advance();
        return make_fun(f, arg);
      }
      default: lex.fail("expected expression", lex.tok_pos);
    }
  }
};

}  // namespace

PotentialExpr::PotentialExpr(std::shared_ptr<const Node> root, int dims, std::string source)
    : root_(std::move(root)), dims_(dims), source_(std::move(source)) {}

double PotentialExpr::eval(const double* x) const { return eval_node(root_.get(), x); }

PotentialExpr PotentialExpr::derivative(int i) const {
  return PotentialExpr(diff_node(root_, i), dims_, "");
}

std::string PotentialExpr::to_string() const {
  std::ostringstream os;
  os.precision(17);
  print_node(root_.get(), os);
  return os.str();
}

PotentialExpr parse_potential(const std::string& source, int n) {
  if (n < 1) throw ConfigError("dimension must be >= 1");
  Parser p(source, n);
  return PotentialExpr(p.parse(), n, source);
}

// ---------------------------------------------------------------------------
// Tape compilation

namespace {
enum TapeOp {
  kPushConst,
  kPushVar,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kPowInt,
  kPowReal,
  kExp,
  kLn,
  kSin,
  kCos,
  kSqrt
};
}

ExprTape::ExprTape(const PotentialExpr& e) {
  struct Walker {
    std::vector<Instr>& prog;
    int depth = 0, max_depth = 0;

    void push(int op, int slot, double a, double b, int stack_delta) {
      prog.push_back({op, slot, a, b});
      depth += stack_delta;
      if (depth > max_depth) max_depth = depth;
    }

    void walk(const Node* n) {
      switch (n->kind) {
        case NodeKind::Const: push(kPushConst, 0, n->value, 0, +1); break;
        case NodeKind::Var: push(kPushVar, n->var, 0, 0, +1); break;
        case NodeKind::Add:
          walk(n->a.get());
          walk(n->b.get());
          push(kAdd, 0, 0, 0, -1);
          break;
        case NodeKind::Sub:
          walk(n->a.get());
          walk(n->b.get());
          push(kSub, 0, 0, 0, -1);
          break;
        case NodeKind::Mul:
          walk(n->a.get());
          walk(n->b.get());
          push(kMul, 0, 0, 0, -1);
          break;
        case NodeKind::Div:
          walk(n->a.get());
          walk(n->b.get());
          push(kDiv, 0, 0, 0, -1);
          break;
        case NodeKind::Neg:
          walk(n->a.get());
          push(kNeg, 0, 0, 0, 0);
          break;
        case NodeKind::Pow:
          walk(n->a.get());
          if (n->pden == 1)
            push(kPowInt, 0, static_cast<double>(n->pnum), 0, 0);
          else
            push(kPowReal, 0,
                 static_cast<double>(n->pnum) / static_cast<double>(n->pden), 0, 0);
          break;
        case NodeKind::Fun: {
          walk(n->a.get());
          int op = kExp;
          switch (n->fun) {
            case FunKind::Exp: op = kExp; break;
            case FunKind::Ln: op = kLn; break;
            case FunKind::Sin: op = kSin; break;
            case FunKind::Cos: op = kCos; break;
            case FunKind::Sqrt: op = kSqrt; break;
          }
          push(op, 0, 0, 0, 0);
          break;
        }
      }
    }
  };
  Walker w{prog_};
  w.walk(e.root().get());
  max_stack_ = w.max_depth;
}

bool ExprTape::constant_zero() const {
  return prog_.size() == 1 && prog_[0].op == kPushConst && prog_[0].a == 0.0;
}

double ExprTape::eval(const double* x) const {
  double stack[64];
  double* heap = nullptr;
  double* s = stack;
  std::vector<double> big;
  if (max_stack_ > 64) {
    big.resize(max_stack_);
    heap = big.data();
    s = heap;
  }
  int top = 0;
  for (const Instr& in : prog_) {
    switch (in.op) {
      case kPushConst: s[top++] = in.a; break;
      case kPushVar: s[top++] = x[in.slot]; break;
      case kAdd: --top; s[top - 1] += s[top]; break;
      case kSub: --top; s[top - 1] -= s[top]; break;
      case kMul: --top; s[top - 1] *= s[top]; break;
      case kDiv: --top; s[top - 1] /= s[top]; break;
      case kNeg: s[top - 1] = -s[top - 1]; break;
      case kPowInt: {
        long long e = static_cast<long long>(in.a);
        bool inv = e < 0;
        if (inv) e = -e;
        double r = 1.0, base = s[top - 1];
        while (e > 0) {
          if (e & 1) r *= base;
          base *= base;
          e >>= 1;
        }
        s[top - 1] = inv ? 1.0 / r : r;
        break;
      }
      case kPowReal: s[top - 1] = std::pow(s[top - 1], in.a); break;
      case kExp: s[top - 1] = std::exp(s[top - 1]); break;
      case kLn: s[top - 1] = std::log(s[top - 1]); break;
      case kSin: s[top - 1] = std::sin(s[top - 1]); break;
      case kCos: s[top - 1] = std::cos(s[top - 1]); break;
      case kSqrt: s[top - 1] = std::sqrt(s[top - 1]); break;
    }
  }
  return s[0];
}

}  // namespace jacobi
