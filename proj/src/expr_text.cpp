#include <cctype>
#include <sstream>

#include "jetgeo/error.hpp"
#include "jetgeo/expr.hpp"

namespace jetgeo {

std::string_view expression_grammar() {
  return "expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*; "
         "unary := ('+'|'-') unary | power; power := primary ('^' unary)?; "
         "primary := number | coordinate | func '(' expr ')' | '(' expr ')'; "
         "func := sin|cos|exp|sqrt; exponents must be integer constants";
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const CoordinateFrame& frame) : text_(text), frame_(frame) {}

  Expression run() {
    Expression e = expr();
    skip_space();
    if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      if (accept('+')) {
        e = e + term();
      } else if (accept('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expression term() {
    Expression e = unary();
    for (;;) {
      if (accept('*')) {
        e = e * unary();
      } else if (accept('/')) {
        e = e / unary();
      } else {
        return e;
      }
    }
  }

  Expression unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expression power() {
    Expression base = primary();
    skip_space();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    Expression k = unary();
    if (!k.is_constant() || boost::multiprecision::denominator(k.constant()) != 1) {
      pos_ = at;
      fail("exponent must be an integer constant");
    }
    const auto& num = boost::multiprecision::numerator(k.constant());
    if (num > 1000 || num < -1000) {
      pos_ = at;
      fail("exponent out of range");
    }
    return pow(base, num.convert_to<int>());
  }

  Expression primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expression number() {
    const std::size_t start = pos_;
    using boost::multiprecision::cpp_int;
    cpp_int mantissa = 0;
    int scale = 0;
    bool digits = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      mantissa = mantissa * 10 + (text_[pos_++] - '0');
      digits = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        mantissa = mantissa * 10 + (text_[pos_++] - '0');
        --scale;
        digits = true;
      }
    }
    if (!digits) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      int sign = 1;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) sign = text_[pos_++] == '-' ? -1 : 1;
      int e = 0;
      bool exp_digits = false;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        e = e * 10 + (text_[pos_++] - '0');
        exp_digits = true;
        if (e > 400) fail("exponent of literal out of range");
      }
      if (!exp_digits) fail("malformed exponent in number");
      scale += sign * e;
    }
    cpp_int ten_pow = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
    if (scale >= 0) return Expression(Rational(mantissa * ten_pow));
    return Expression(Rational(mantissa, ten_pow));
  }

  Expression identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (frame_.contains(name)) return Expression::symbol(name);
    static const std::pair<const char*, Func> functions[] = {
        {"sin", Func::Sin}, {"cos", Func::Cos}, {"exp", Func::Exp}, {"sqrt", Func::Sqrt}};
    for (const auto& [fname, f] : functions) {
      if (name != fname) continue;
      expect('(');
      Expression arg = expr();
      expect(')');
      switch (f) {
        case Func::Sin:
          return sin(arg);
        case Func::Cos:
          return cos(arg);
        case Func::Exp:
          return exp(arg);
        case Func::Sqrt:
          return sqrt(arg);
      }
    }
    throw UnknownSymbol(name, start);
  }

  std::string_view text_;
  const CoordinateFrame& frame_;
  std::size_t pos_ = 0;
};

// Binding strength of the printed form of a node.
enum Prec { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

int precedence(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::Constant: {
      const auto& v = e.constant();
      if (boost::multiprecision::denominator(v) != 1) return kProduct;
      return v < 0 ? kUnary : kAtom;
    }
    case NodeKind::Symbol:
    case NodeKind::Function:
      return kAtom;
    case NodeKind::Power:
      return kPower;
    case NodeKind::Product: {
      const auto ops = e.operands();
      if (!ops.empty() && ops[0].is_constant() && ops[0].constant() < 0) return kUnary;
      return kProduct;
    }
    case NodeKind::Quotient:
      return kProduct;
    case NodeKind::Sum:
      return kSum;
  }
  return kAtom;
}

std::string print(const Expression& e);

std::string wrap_if(const Expression& e, bool paren) {
  std::string s = print(e);
  return paren ? "(" + s + ")" : s;
}

std::string print_constant(const Rational& v) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(v);
  if (boost::multiprecision::denominator(v) != 1) os << "/" << boost::multiprecision::denominator(v);
  return os.str();
}

// Product factors after an optional leading coefficient has been handled.
std::string print_factors(std::span<const Expression> factors) {
  std::string s;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) s += "*";
    // Quotients and sums bind looser than '*'; a quotient inside a product
    // must keep its parentheses to reparse as the same tree.
    s += wrap_if(factors[i], precedence(factors[i]) < kPower);
  }
  return s;
}

std::string print_product(const Expression& e) {
  auto ops = e.operands();
  if (!ops.empty() && ops[0].is_constant()) {
    const Rational& c = ops[0].constant();
    const auto rest = ops.subspan(1);
    if (c == -1) return "-" + print_factors(rest);
    if (boost::multiprecision::denominator(c) != 1) return "(" + print_constant(c) + ")*" + print_factors(rest);
    return print_constant(c) + "*" + print_factors(rest);
  }
  return print_factors(ops);
}

std::string print(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::Constant:
      return print_constant(e.constant());
    case NodeKind::Symbol:
      return e.name();
    case NodeKind::Function: {
      static const char* names[] = {"sin", "cos", "exp", "sqrt"};
      return std::string(names[static_cast<int>(e.function())]) + "(" + print(e.operands()[0]) + ")";
    }
    case NodeKind::Power: {
      const Expression& base = e.operands()[0];
      std::string s = wrap_if(base, precedence(base) < kAtom);
      const int k = e.exponent();
      return s + "^" + (k < 0 ? "(" + std::to_string(k) + ")" : std::to_string(k));
    }
    case NodeKind::Product:
      return print_product(e);
    case NodeKind::Quotient: {
      const Expression& num = e.operands()[0];
      const Expression& den = e.operands()[1];
      return wrap_if(num, precedence(num) < kProduct) + "/" + wrap_if(den, precedence(den) < kPower);
    }
    case NodeKind::Sum: {
      std::string s;
      auto ops = e.operands();
      for (std::size_t i = 0; i < ops.size(); ++i) {
        const Expression& t = ops[i];
        std::string piece = print(t);
        // a sum nested in a sum only appears in raw (unsimplified) trees
        if (t.kind() == NodeKind::Sum) piece = "(" + piece + ")";
        const bool negated_term = precedence(t) == kUnary ||
                                  (t.is_constant() && t.constant() < 0);
        if (i == 0) {
          s = piece;
        } else if (negated_term) {
          s += " - " + print(-t);
        } else {
          s += " + " + piece;
        }
      }
      return s;
    }
  }
  return {};
}

}  // namespace

Expression parse(std::string_view text, const CoordinateFrame& frame) { return Parser(text, frame).run(); }

std::string to_string(const Expression& e) { return print(e); }

}  // namespace jetgeo
