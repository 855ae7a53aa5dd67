#include "stlverify/stl.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace stlverify {

namespace {

StlPtr make_node(StlFormula f) { return std::make_shared<const StlFormula>(std::move(f)); }

} // namespace

StlPtr StlFormula::make_true() {
    static const StlPtr t = make_node({.kind = StlKind::True});
    return t;
}

StlPtr StlFormula::make_false() {
    static const StlPtr f = make_node({.kind = StlKind::False});
    return f;
}

StlPtr StlFormula::atom(Eigen::VectorXd a, double b, AtomRel rel) {
    StlFormula f;
    f.kind = StlKind::Atom;
    f.atom_a = std::move(a);
    f.atom_b = b;
    f.atom_rel = rel;
    return make_node(std::move(f));
}

StlPtr StlFormula::negation(StlPtr x) {
    StlFormula f;
    f.kind = StlKind::Not;
    f.lhs = std::move(x);
    return make_node(std::move(f));
}

StlPtr StlFormula::conjunction(StlPtr l, StlPtr r) {
    if (l->kind == StlKind::False || r->kind == StlKind::False) return make_false();
    if (l->kind == StlKind::True) return r;
    if (r->kind == StlKind::True) return l;
    StlFormula f;
    f.kind = StlKind::And;
    f.lhs = std::move(l);
    f.rhs = std::move(r);
    return make_node(std::move(f));
}

StlPtr StlFormula::disjunction(StlPtr l, StlPtr r) {
    if (l->kind == StlKind::True || r->kind == StlKind::True) return make_true();
    if (l->kind == StlKind::False) return r;
    if (r->kind == StlKind::False) return l;
    StlFormula f;
    f.kind = StlKind::Or;
    f.lhs = std::move(l);
    f.rhs = std::move(r);
    return make_node(std::move(f));
}

namespace {

StlPtr binary_temporal(StlKind kind, double a, double b, StlPtr l, StlPtr r) {
    if (b < a || a < 0) throw Error("temporal interval must satisfy 0 <= a <= b");
    StlFormula f;
    f.kind = kind;
    f.t_lo = a;
    f.t_hi = b;
    f.lhs = std::move(l);
    f.rhs = std::move(r);
    return make_node(std::move(f));
}

} // namespace

StlPtr StlFormula::until(double a, double b, StlPtr l, StlPtr r) {
    return binary_temporal(StlKind::Until, a, b, std::move(l), std::move(r));
}

StlPtr StlFormula::release(double a, double b, StlPtr l, StlPtr r) {
    return binary_temporal(StlKind::Release, a, b, std::move(l), std::move(r));
}

StlPtr StlFormula::finally_(double a, double b, StlPtr x) {
    return binary_temporal(StlKind::Finally, a, b, std::move(x), nullptr);
}

StlPtr StlFormula::globally(double a, double b, StlPtr x) {
    return binary_temporal(StlKind::Globally, a, b, std::move(x), nullptr);
}

StlPtr StlFormula::next(double a, StlPtr x) {
    if (a < 0) throw Error("next time must be nonnegative");
    StlFormula f;
    f.kind = StlKind::Next;
    f.t_lo = a;
    f.t_hi = a;
    f.lhs = std::move(x);
    return make_node(std::move(f));
}

bool StlFormula::is_atom_level() const {
    switch (kind) {
        case StlKind::True:
        case StlKind::False:
        case StlKind::Atom:
            return true;
        case StlKind::And:
        case StlKind::Or:
            return lhs->is_atom_level() && rhs->is_atom_level();
        default:
            return false;
    }
}

int max_state_index(const StlFormula& f) {
    int m = 0;
    if (f.kind == StlKind::Atom) {
        for (Eigen::Index i = 0; i < f.atom_a.size(); ++i)
            if (f.atom_a(i) != 0.0) m = std::max(m, static_cast<int>(i) + 1);
    }
    if (f.lhs) m = std::max(m, max_state_index(*f.lhs));
    if (f.rhs) m = std::max(m, max_state_index(*f.rhs));
    return m;
}

// --- parser -------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    StlPtr parse() {
        skip_ws();
        StlPtr f = parse_or();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        int line = 1, col = 1;
        for (size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(msg, line, col);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool lookahead_word(const char* w) const {
        size_t p = pos_;
        for (const char* q = w; *q; ++q, ++p) {
            if (p >= text_.size() || text_[p] != *q) return false;
        }
        // must not continue as an identifier
        if (p < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_'))
            return false;
        return true;
    }

    bool consume_word(const char* w) {
        if (!lookahead_word(w)) return false;
        pos_ += std::string(w).size();
        return true;
    }

    double parse_number() {
        skip_ws();
        size_t start = pos_;
        if (peek() == '+' || peek() == '-') ++pos_;
        bool digits = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            ++pos_;
            digits = true;
        }
        if (peek() == '.') {
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                ++pos_;
                digits = true;
            }
        }
        if (!digits) fail("expected a number");
        if (peek() == 'e' || peek() == 'E') {
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent");
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        return std::stod(text_.substr(start, pos_ - start));
    }

    std::pair<double, double> parse_window(bool single) {
        skip_ws();
        if (!consume('[')) fail("expected '[' after temporal operator");
        double a = parse_number();
        double b = a;
        skip_ws();
        if (!single) {
            if (!consume(',')) fail("expected ',' in temporal interval");
            b = parse_number();
            skip_ws();
        }
        if (!consume(']')) fail("expected ']' after temporal interval");
        if (a < 0) fail("temporal times must be nonnegative");
        if (b < a) fail("malformed interval: upper bound below lower bound");
        return {a, b};
    }

    StlPtr parse_or() {
        StlPtr f = parse_and();
        for (;;) {
            skip_ws();
            if (!consume('|')) return f;
            f = StlFormula::disjunction(f, parse_and());
        }
    }

    StlPtr parse_and() {
        StlPtr f = parse_until();
        for (;;) {
            skip_ws();
            if (!consume('&')) return f;
            f = StlFormula::conjunction(f, parse_until());
        }
    }

    StlPtr parse_until() {
        StlPtr f = parse_unary();
        for (;;) {
            skip_ws();
            if (lookahead_word("U") && peek_after_word("U") == '[') {
                consume_word("U");
                auto [a, b] = parse_window(false);
                f = StlFormula::until(a, b, f, parse_unary());
            } else if (lookahead_word("R") && peek_after_word("R") == '[') {
                consume_word("R");
                auto [a, b] = parse_window(false);
                f = StlFormula::release(a, b, f, parse_unary());
            } else {
                return f;
            }
        }
    }

    char peek_after_word(const char* w) const {
        size_t p = pos_ + std::string(w).size();
        while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        return p < text_.size() ? text_[p] : '\0';
    }

    StlPtr parse_unary() {
        skip_ws();
        if (consume('!')) return StlFormula::negation(parse_unary());
        if (lookahead_word("F") && peek_after_word("F") == '[') {
            consume_word("F");
            auto [a, b] = parse_window(false);
            return StlFormula::finally_(a, b, parse_unary());
        }
        if (lookahead_word("G") && peek_after_word("G") == '[') {
            consume_word("G");
            auto [a, b] = parse_window(false);
            return StlFormula::globally(a, b, parse_unary());
        }
        if (lookahead_word("N") && peek_after_word("N") == '[') {
            consume_word("N");
            auto [a, _] = parse_window(true);
            return StlFormula::next(a, parse_unary());
        }
        return parse_primary();
    }

    StlPtr parse_primary() {
        skip_ws();
        if (consume('(')) {
            StlPtr f = parse_or();
            skip_ws();
            if (!consume(')')) fail("expected ')'");
            return f;
        }
        if (consume_word("true")) return StlFormula::make_true();
        if (consume_word("false")) return StlFormula::make_false();
        return parse_atom();
    }

    int parse_var() {
        skip_ws();
        if (peek() != 'x') fail("unknown variable (state variables are x1, x2, ...)");
        ++pos_;
        if (!std::isdigit(static_cast<unsigned char>(peek())))
            fail("unknown variable (state variables are x1, x2, ...)");
        size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        const int idx = std::stoi(text_.substr(start, pos_ - start));
        if (idx < 1) fail("state indices are 1-based");
        return idx;
    }

    StlPtr parse_atom() {
        // linear expression: terms of the form [coef '*'] x<i> or bare numbers
        std::map<int, double> coeffs;
        double constant = 0.0;
        double sign = 1.0;
        bool first = true;
        for (;;) {
            skip_ws();
            if (first) {
                if (consume('-'))
                    sign = -1.0;
                else
                    consume('+');
                first = false;
            }
            skip_ws();
            if (peek() == 'x') {
                coeffs[parse_var()] += sign;
            } else if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
                const double v = parse_number();
                skip_ws();
                if (consume('*')) {
                    coeffs[parse_var()] += sign * v;
                } else {
                    constant += sign * v;
                }
            } else {
                fail("expected an atom term");
            }
            skip_ws();
            if (consume('+')) {
                sign = 1.0;
            } else if (consume('-')) {
                sign = -1.0;
            } else {
                break;
            }
        }

        skip_ws();
        AtomRel rel;
        bool negate_row = false;
        if (consume('<')) {
            rel = consume('=') ? AtomRel::Le : AtomRel::Lt;
        } else if (consume('>')) {
            rel = consume('=') ? AtomRel::Le : AtomRel::Lt;
            negate_row = true;
        } else {
            fail("expected a relation (<=, <, >=, >)");
        }
        skip_ws();
        double rhs = parse_number();
        rhs -= constant;

        int dim = 0;
        for (const auto& [idx, _] : coeffs) dim = std::max(dim, idx);
        if (dim == 0) fail("atom references no state variable");
        Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
        for (const auto& [idx, v] : coeffs) a(idx - 1) = v;
        if (negate_row) {
            a = -a;
            rhs = -rhs;
        }
        return StlFormula::atom(std::move(a), rhs, rel);
    }
};

void print(const StlFormula& f, std::ostringstream& os) {
    auto window = [&](const StlFormula& g) {
        std::ostringstream w;
        w << "[" << g.t_lo << "," << g.t_hi << "]";
        return w.str();
    };
    switch (f.kind) {
        case StlKind::True: os << "true"; break;
        case StlKind::False: os << "false"; break;
        case StlKind::Atom: {
            bool any = false;
            for (Eigen::Index i = 0; i < f.atom_a.size(); ++i) {
                const double c = f.atom_a(i);
                if (c == 0.0) continue;
                if (any) os << (c >= 0 ? " + " : " - ");
                else if (c < 0) os << "-";
                const double m = std::abs(c);
                if (m != 1.0) os << m << "*";
                os << "x" << (i + 1);
                any = true;
            }
            if (!any) os << "0";
            os << (f.atom_rel == AtomRel::Le ? " <= " : " < ") << f.atom_b;
            break;
        }
        case StlKind::Not:
            os << "!(";
            print(*f.lhs, os);
            os << ")";
            break;
        case StlKind::And:
        case StlKind::Or:
            os << "(";
            print(*f.lhs, os);
            os << (f.kind == StlKind::And ? " & " : " | ");
            print(*f.rhs, os);
            os << ")";
            break;
        case StlKind::Until:
        case StlKind::Release:
            os << "(";
            print(*f.lhs, os);
            os << (f.kind == StlKind::Until ? " U" : " R") << window(f) << " ";
            print(*f.rhs, os);
            os << ")";
            break;
        case StlKind::Finally:
            os << "F" << window(f) << " (";
            print(*f.lhs, os);
            os << ")";
            break;
        case StlKind::Globally:
            os << "G" << window(f) << " (";
            print(*f.lhs, os);
            os << ")";
            break;
        case StlKind::Next:
            os << "N[" << f.t_lo << "] (";
            print(*f.lhs, os);
            os << ")";
            break;
    }
}

} // namespace

StlPtr parse_stl(const std::string& text) { return Parser(text).parse(); }

std::string to_string(const StlFormula& f) {
    std::ostringstream os;
    print(f, os);
    return os.str();
}

} // namespace stlverify
