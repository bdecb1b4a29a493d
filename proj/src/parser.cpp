#include "kronred/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "kronred/errors.hpp"
#include "kronred/json_io.hpp"

namespace kronred {
namespace {

enum class Tok { Ident, Number, Colon, Semicolon, Comma, Plus, Equals, LParen, RParen,
                 Arrow, BiArrow, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 0;
  int col = 0;
};

class LineLexer {
 public:
  LineLexer(std::string_view line, int line_no) : line_(line), line_no_(line_no) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_no_, current_.col, msg);
  }

 private:
  void advance() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    current_ = Token{};
    current_.line = line_no_;
    current_.col = static_cast<int>(pos_) + 1;
    if (pos_ >= line_.size() || line_[pos_] == '#') {
      current_.kind = Tok::End;
      return;
    }
    char ch = line_[pos_];
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      size_t start = pos_;
      while (pos_ < line_.size() && (std::isalnum(static_cast<unsigned char>(line_[pos_])) ||
                                     line_[pos_] == '_'))
        ++pos_;
      current_.kind = Tok::Ident;
      current_.text = std::string(line_.substr(start, pos_ - start));
      return;
    }
    if (ch == '<' && line_.substr(pos_, 3) == "<->") {
      current_.kind = Tok::BiArrow;
      pos_ += 3;
      return;
    }
    if (ch == '-' && pos_ + 1 < line_.size() && line_[pos_ + 1] == '>') {
      current_.kind = Tok::Arrow;
      pos_ += 2;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' ||
        (ch == '-' && pos_ + 1 < line_.size() &&
         (std::isdigit(static_cast<unsigned char>(line_[pos_ + 1])) || line_[pos_ + 1] == '.'))) {
      size_t start = pos_;
      std::string rest(line_.substr(start));
      char* end = nullptr;
      double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) throw ParseError(line_no_, current_.col, "malformed number");
      pos_ = start + static_cast<size_t>(end - rest.c_str());
      current_.kind = Tok::Number;
      current_.number = v;
      current_.text = std::string(line_.substr(start, pos_ - start));
      return;
    }
    switch (ch) {
      case ':': current_.kind = Tok::Colon; break;
      case ';': current_.kind = Tok::Semicolon; break;
      case ',': current_.kind = Tok::Comma; break;
      case '+': current_.kind = Tok::Plus; break;
      case '=': current_.kind = Tok::Equals; break;
      case '(': current_.kind = Tok::LParen; break;
      case ')': current_.kind = Tok::RParen; break;
      default:
        throw ParseError(line_no_, current_.col, std::string("unexpected character '") + ch + "'");
    }
    ++pos_;
  }

  std::string_view line_;
  int line_no_;
  size_t pos_ = 0;
  Token current_;
};

class Parser {
 public:
  Parser(std::string_view source, const ParseOptions& options)
      : source_(source), options_(options) {}

  Network run() {
    int line_no = 0;
    size_t pos = 0;
    while (pos <= source_.size()) {
      size_t eol = source_.find('\n', pos);
      if (eol == std::string_view::npos) eol = source_.size();
      ++line_no;
      std::string_view line = source_.substr(pos, eol - pos);
      parse_line(line, line_no);
      pos = eol + 1;
      if (eol == source_.size()) break;
    }
    net_.validate();
    return std::move(net_);
  }

 private:
  void parse_line(std::string_view line, int line_no) {
    LineLexer lex(line, line_no);
    if (lex.peek().kind == Tok::End) return;
    Token head = lex.take();
    if (head.kind != Tok::Ident)
      throw ParseError(line_no, head.col, "expected statement keyword");
    if (head.text == "species") {
      parse_species(lex);
    } else if (head.text == "reaction") {
      parse_reaction(lex);
    } else if (head.text == "boundary") {
      parse_boundary(lex);
    } else {
      throw ParseError(line_no, head.col, "unknown statement '" + head.text + "'");
    }
    if (lex.peek().kind != Tok::End) lex.fail("trailing input after statement");
  }

  void parse_species(LineLexer& lex) {
    while (true) {
      Token name = expect(lex, Tok::Ident, "species name");
      if (declared_.count(name.text))
        throw ParseError(name.line, name.col, "duplicate species declaration '" + name.text + "'");
      declared_.insert(name.text);
      net_.add_species(name.text);
      if (lex.peek().kind != Tok::Comma) break;
      lex.take();
    }
  }

  int species_ref(const Token& name) {
    if (options_.strict && !declared_.count(name.text))
      throw ParseError(name.line, name.col,
                       "undeclared species '" + name.text + "' (strict mode)");
    return net_.add_species(name.text);
  }

  Composition parse_complex(LineLexer& lex) {
    std::map<int, int> acc;
    while (true) {
      long long coeff = 1;
      if (lex.peek().kind == Tok::Number) {
        Token n = lex.take();
        double v = n.number;
        if (v != std::floor(v) || v < 1 || v > kMaxStoichCoeff)
          throw ParseError(n.line, n.col, "stoichiometric coefficient must be an integer in [1, " +
                                              std::to_string(kMaxStoichCoeff) + "]");
        coeff = static_cast<long long>(v);
      }
      Token name = expect(lex, Tok::Ident, "species name");
      int sp = species_ref(name);
      acc[sp] += static_cast<int>(coeff);
      if (acc[sp] > kMaxStoichCoeff)
        throw ParseError(name.line, name.col, "accumulated coefficient exceeds " +
                                                  std::to_string(kMaxStoichCoeff));
      if (lex.peek().kind != Tok::Plus) break;
      lex.take();
    }
    return Composition(acc.begin(), acc.end());
  }

  void parse_reaction(LineLexer& lex) {
    Token id = expect(lex, Tok::Ident, "reaction id");
    expect(lex, Tok::Colon, "':'");
    Composition substrate = parse_complex(lex);
    Token arrow = lex.take();
    if (arrow.kind != Tok::Arrow && arrow.kind != Tok::BiArrow)
      throw ParseError(arrow.line, arrow.col, "expected '->' or '<->'");
    bool reversible = arrow.kind == Tok::BiArrow;
    Composition product = parse_complex(lex);
    expect(lex, Tok::Semicolon, "';'");
    RateLaw law = parse_law(lex, reversible, id);

    if (substrate == product)
      throw ParseError(id.line, id.col, "reaction '" + id.text + "': substrate equals product");
    int sub = net_.intern_complex(substrate);
    int prod = net_.intern_complex(product);
    try {
      net_.add_reaction(id.text, sub, prod, std::move(law));
    } catch (const ModelError& e) {
      throw ParseError(id.line, id.col, e.what());
    }
  }

  RateLaw parse_law(LineLexer& lex, bool reversible, const Token& id) {
    Token kind = expect(lex, Tok::Ident, "rate law kind");
    RateLaw law;
    if (kind.text == "massaction") {
      law.kind = LawKind::MassAction;
    } else if (kind.text == "mm") {
      law.kind = LawKind::MichaelisMenten;
    } else {
      throw ParseError(kind.line, kind.col, "unknown rate law '" + kind.text + "'");
    }
    bool saw_kf = false, saw_kr = false;
    while (lex.peek().kind == Tok::Ident) {
      Token key = lex.take();
      if (key.text == "kf" || key.text == "kr") {
        expect(lex, Tok::Equals, "'='");
        Token val = expect(lex, Tok::Number, "rate constant");
        if (key.text == "kf") {
          if (saw_kf) throw ParseError(key.line, key.col, "duplicate kf");
          if (!(val.number > 0.0))
            throw ParseError(val.line, val.col, "non-positive rate parameter kf");
          law.k_forward = val.number;
          saw_kf = true;
        } else {
          if (saw_kr) throw ParseError(key.line, key.col, "duplicate kr");
          if (!(val.number > 0.0))
            throw ParseError(val.line, val.col, "non-positive rate parameter kr");
          law.k_reverse = val.number;
          saw_kr = true;
        }
      } else if (key.text == "Km") {
        if (law.kind != LawKind::MichaelisMenten)
          throw ParseError(key.line, key.col, "Km is only valid for mm laws");
        expect(lex, Tok::LParen, "'('");
        Token sp = expect(lex, Tok::Ident, "species name");
        expect(lex, Tok::RParen, "')'");
        expect(lex, Tok::Equals, "'='");
        Token val = expect(lex, Tok::Number, "Michaelis constant");
        if (!(val.number > 0.0))
          throw ParseError(val.line, val.col, "non-positive rate parameter Km");
        int idx = species_ref(sp);
        if (law.km.count(idx))
          throw ParseError(sp.line, sp.col, "duplicate Km for species '" + sp.text + "'");
        law.km[idx] = val.number;
      } else {
        throw ParseError(key.line, key.col, "unknown law parameter '" + key.text + "'");
      }
    }
    if (!saw_kf) throw ParseError(id.line, id.col, "reaction '" + id.text + "': missing kf");
    if (reversible && !saw_kr)
      throw ParseError(id.line, id.col, "reaction '" + id.text + "': reversible reaction needs kr");
    if (!reversible && saw_kr)
      throw ParseError(id.line, id.col,
                       "reaction '" + id.text + "': kr given for irreversible reaction");
    return law;
  }

  void parse_boundary(LineLexer& lex) {
    Token at = lex.peek();
    Composition comp = parse_complex(lex);
    int ci = net_.find_complex(comp);
    if (ci < 0)
      throw ParseError(at.line, at.col, "boundary references unknown complex (complexes are "
                                        "introduced by reactions)");
    expect(lex, Tok::Colon, "':'");
    Token form = expect(lex, Tok::Ident, "'constant' or 'linear'");
    BoundaryFlux flux;
    flux.complex = ci;
    if (form.text == "constant") {
      Token val = expect(lex, Tok::Number, "flux value");
      flux.form = BoundaryFlux::Form::Constant;
      flux.value = val.number;
    } else if (form.text == "linear") {
      Token sp = expect(lex, Tok::Ident, "species name");
      Token gain = expect(lex, Tok::Number, "gain");
      flux.form = BoundaryFlux::Form::Linear;
      flux.species = species_ref(sp);
      flux.gain = gain.number;
    } else {
      throw ParseError(form.line, form.col, "expected 'constant' or 'linear'");
    }
    try {
      net_.add_boundary(flux);
    } catch (const ModelError& e) {
      throw ParseError(at.line, at.col, e.what());
    }
  }

  Token expect(LineLexer& lex, Tok kind, const std::string& what) {
    Token t = lex.take();
    if (t.kind != kind) throw ParseError(t.line, t.col, "expected " + what);
    return t;
  }

  std::string_view source_;
  ParseOptions options_;
  Network net_;
  std::set<std::string> declared_;
};

}  // namespace

Network parse_network(std::string_view source, const ParseOptions& options) {
  return Parser(source, options).run();
}

Network load_network_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open network file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    return network_from_json_text(buf.str());
  return parse_network(buf.str(), options);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Trim to the shortest representation that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

std::string serialize_dsl(const Network& net) {
  std::ostringstream out;
  if (!net.species.empty()) {
    out << "species ";
    for (size_t i = 0; i < net.species.size(); ++i) {
      if (i) out << ", ";
      out << net.species[i].name;
    }
    out << "\n";
  }
  for (const auto& r : net.reactions) {
    out << "reaction " << r.id << ": " << net.complex_name(r.substrate)
        << (r.reversible ? " <-> " : " -> ") << net.complex_name(r.product) << " ; ";
    out << (r.law.kind == LawKind::MassAction ? "massaction" : "mm");
    out << " kf=" << format_double(r.law.k_forward);
    if (r.reversible) out << " kr=" << format_double(r.law.k_reverse);
    for (const auto& [sp, v] : r.law.km)
      out << " Km(" << net.species[sp].name << ")=" << format_double(v);
    out << "\n";
  }
  for (const auto& b : net.boundary) {
    out << "boundary " << net.complex_name(b.complex) << ": ";
    if (b.form == BoundaryFlux::Form::Constant)
      out << "constant " << format_double(b.value);
    else
      out << "linear " << net.species[b.species].name << " " << format_double(b.gain);
    out << "\n";
  }
  return out.str();
}

}  // namespace kronred
