#include "srr/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace srr {

std::string format_double(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double row_activity(const LinearRow& row, const Assignment& values)
{
    double sum = 0.0;
    for (const auto& t : row.terms) {
        const auto it = values.find(t.var);
        if (it != values.end()) sum += t.coef * it->second;
    }
    return sum;
}

std::vector<std::string> violated_rows(const MilpModel& model, const Assignment& values, double tol)
{
    std::vector<std::string> bad;
    for (const auto& row : model.rows) {
        const double lhs = row_activity(row, values);
        bool ok = true;
        switch (row.sense) {
        case lp::RowSense::LessEqual: ok = lhs <= row.rhs + tol; break;
        case lp::RowSense::GreaterEqual: ok = lhs >= row.rhs - tol; break;
        case lp::RowSense::Equal: ok = std::abs(lhs - row.rhs) <= tol; break;
        }
        if (!ok) bad.push_back(row.name);
    }
    auto value_of = [&](const std::string& var) {
        const auto it = values.find(var);
        return it == values.end() ? 0.0 : it->second;
    };
    for (const auto& b : model.bounds) {
        const double v = value_of(b.var);
        if (v < b.lower - tol || v > b.upper + tol) bad.push_back(b.var);
    }
    for (const auto& var : model.binaries) {
        const double v = value_of(var);
        if (std::min(std::abs(v), std::abs(v - 1.0)) > tol) bad.push_back(var);
    }
    return bad;
}

// ---------------------------------------------------------------- writer

namespace {

constexpr std::size_t kLineWidth = 200;

void write_expression(std::ostringstream& os, const std::string& lead, const std::vector<LinearTerm>& terms)
{
    std::string line = lead;
    bool first = true;
    for (const auto& t : terms) {
        std::string piece;
        const bool negative = std::signbit(t.coef);
        const double mag = std::abs(t.coef);
        if (!first || negative) piece += negative ? "- " : "+ ";
        if (mag != 1.0) piece += format_double(mag) + " ";
        piece += t.var;
        if (line.size() + piece.size() + 1 > kLineWidth) {
            os << line << '\n';
            line = "   ";
        } else if (!first) {
            line += ' ';
        }
        line += piece;
        first = false;
    }
    if (terms.empty()) line += "0";
    os << line;
}

const char* sense_text(lp::RowSense s)
{
    switch (s) {
    case lp::RowSense::LessEqual: return "<=";
    case lp::RowSense::GreaterEqual: return ">=";
    case lp::RowSense::Equal: return "=";
    }
    return "=";
}

}  // namespace

std::string write_lp_format(const MilpModel& model)
{
    std::ostringstream os;
    if (!model.comment.empty()) os << "\\ " << model.comment << '\n';
    os << (model.minimize ? "Minimize" : "Maximize") << '\n';
    write_expression(os, " " + model.objective_name + ": ", model.objective);
    os << "\nSubject To\n";
    for (const auto& row : model.rows) {
        write_expression(os, " " + row.name + ": ", row.terms);
        os << ' ' << sense_text(row.sense) << ' ' << format_double(row.rhs) << '\n';
    }
    if (!model.bounds.empty()) {
        os << "Bounds\n";
        for (const auto& b : model.bounds) {
            const bool lo_inf = std::isinf(b.lower);
            const bool up_inf = std::isinf(b.upper);
            if (lo_inf && up_inf)
                os << ' ' << b.var << " free\n";
            else if (up_inf)
                os << ' ' << b.var << " >= " << format_double(b.lower) << '\n';
            else
                os << ' ' << format_double(b.lower) << " <= " << b.var << " <= " << format_double(b.upper) << '\n';
        }
    }
    if (!model.binaries.empty()) {
        os << "Binaries\n";
        std::string line = " ";
        for (const auto& v : model.binaries) {
            if (line.size() + v.size() + 1 > kLineWidth) {
                os << line << '\n';
                line = " ";
            }
            line += v + ' ';
        }
        line.pop_back();
        os << line << '\n';
    }
    os << "End\n";
    return os.str();
}

// ---------------------------------------------------------------- reader

namespace {

enum class Section { None, Objective, Constraints, Bounds, Binaries, Generals, End };

enum class TokKind { Number, Ident, Op, Colon, Sign };

struct Token {
    TokKind kind;
    std::string text;
    double value = 0.0;
    int line = 0;
};

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::optional<Section> section_keyword(std::string_view trimmed, bool& minimize)
{
    const std::string k = lower(trimmed);
    if (k == "minimize" || k == "minimise" || k == "minimum" || k == "min") {
        minimize = true;
        return Section::Objective;
    }
    if (k == "maximize" || k == "maximise" || k == "maximum" || k == "max") {
        minimize = false;
        return Section::Objective;
    }
    if (k == "subject to" || k == "such that" || k == "st" || k == "s.t.") return Section::Constraints;
    if (k == "bounds" || k == "bound") return Section::Bounds;
    if (k == "binaries" || k == "binary" || k == "bin") return Section::Binaries;
    if (k == "generals" || k == "general" || k == "gen") return Section::Generals;
    if (k == "end") return Section::End;
    return std::nullopt;
}

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || std::string_view("_!\"#$%&()/,;?@'`{}|~").find(c) != std::string_view::npos;
}

bool ident_char(char c)
{
    return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '.';
}

void tokenize_line(std::string_view s, int line, std::vector<Token>& out)
{
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '+' || c == '-') {
            out.push_back({TokKind::Sign, std::string(1, c), 0.0, line});
            ++i;
            continue;
        }
        if (c == ':') {
            out.push_back({TokKind::Colon, ":", 0.0, line});
            ++i;
            continue;
        }
        if (c == '<' || c == '>' || c == '=') {
            std::size_t j = i + 1;
            if (j < s.size() && (s[j] == '=' || s[j] == '<' || s[j] == '>')) ++j;
            std::string op(s.substr(i, j - i));
            if (op == "<" || op == "=<") op = "<=";
            if (op == ">" || op == "=>") op = ">=";
            if (op != "<=" && op != ">=" && op != "=") throw LpFormatError("bad operator '" + op + "'", line);
            out.push_back({TokKind::Op, op, 0.0, line});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t j = i;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
                    j = k;
                }
            }
            double v = 0.0;
            const auto res = std::from_chars(s.data() + i, s.data() + j, v);
            if (res.ec != std::errc() || res.ptr != s.data() + j)
                throw LpFormatError("bad number '" + std::string(s.substr(i, j - i)) + "'", line);
            out.push_back({TokKind::Number, std::string(s.substr(i, j - i)), v, line});
            i = j;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            std::string word(s.substr(i, j - i));
            const std::string lw = lower(word);
            if (lw == "inf" || lw == "infinity")
                out.push_back({TokKind::Number, word, std::numeric_limits<double>::infinity(), line});
            else
                out.push_back({TokKind::Ident, std::move(word), 0.0, line});
            i = j;
            continue;
        }
        throw LpFormatError(std::string("unexpected character '") + c + "'", line);
    }
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    bool done() const { return pos_ >= toks_.size(); }
    const Token& peek(std::size_t ahead = 0) const
    {
        if (pos_ + ahead >= toks_.size()) throw LpFormatError("unexpected end of section", last_line());
        return toks_[pos_ + ahead];
    }
    bool has(std::size_t ahead) const { return pos_ + ahead < toks_.size(); }
    Token next()
    {
        Token t = peek();
        ++pos_;
        return t;
    }
    int last_line() const { return toks_.empty() ? 0 : toks_.back().line; }

    // [name ':']
    std::optional<std::string> label()
    {
        if (has(1) && peek().kind == TokKind::Ident && peek(1).kind == TokKind::Colon) {
            std::string name = next().text;
            next();
            return name;
        }
        return std::nullopt;
    }

    // Linear terms until an operator or the end of the section.
    std::vector<LinearTerm> expression()
    {
        std::vector<LinearTerm> terms;
        while (!done() && peek().kind != TokKind::Op) {
            if (!terms.empty() && has(1) && peek().kind == TokKind::Ident && peek(1).kind == TokKind::Colon) break;
            double sign = 1.0;
            bool explicit_sign = false;
            while (!done() && peek().kind == TokKind::Sign) {
                if (next().text == "-") sign = -sign;
                explicit_sign = true;
            }
            if (!terms.empty() && !explicit_sign) throw LpFormatError("expected '+' or '-' between terms", peek().line);
            double coef = 1.0;
            if (!done() && peek().kind == TokKind::Number) coef = next().value;
            if (done() || peek().kind != TokKind::Ident) {
                // A lone constant like "obj: 0" denotes an empty objective.
                if (terms.empty() && coef == 0.0) return terms;
                throw LpFormatError("expected variable name", done() ? last_line() : peek().line);
            }
            terms.push_back({next().text, sign * coef});
        }
        return terms;
    }

    double signed_number()
    {
        double sign = 1.0;
        while (!done() && peek().kind == TokKind::Sign)
            if (next().text == "-") sign = -sign;
        const Token t = next();
        if (t.kind != TokKind::Number) throw LpFormatError("expected number, got '" + t.text + "'", t.line);
        return sign * t.value;
    }

    bool at_number() const
    {
        std::size_t k = 0;
        while (has(k) && toks_[pos_ + k].kind == TokKind::Sign) ++k;
        return has(k) && toks_[pos_ + k].kind == TokKind::Number;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

lp::RowSense to_sense(const std::string& op)
{
    if (op == "<=") return lp::RowSense::LessEqual;
    if (op == ">=") return lp::RowSense::GreaterEqual;
    return lp::RowSense::Equal;
}

VariableBound& bound_for(MilpModel& model, const std::string& var)
{
    for (auto& b : model.bounds)
        if (b.var == var) return b;
    model.bounds.push_back({var, 0.0, std::numeric_limits<double>::infinity()});
    return model.bounds.back();
}

void apply_bound(VariableBound& b, const std::string& op, double v, bool var_on_left)
{
    // "x op v" or "v op x".
    std::string eff = op;
    if (!var_on_left) eff = op == "<=" ? ">=" : op == ">=" ? "<=" : "=";
    if (eff == "<=") b.upper = v;
    if (eff == ">=") b.lower = v;
    if (eff == "=") b.lower = b.upper = v;
}

}  // namespace

MilpModel read_lp_format(std::string_view text)
{
    MilpModel model;
    model.objective_name.clear();
    std::vector<std::pair<Section, std::vector<Token>>> sections;
    Section current = Section::None;
    int line_no = 0;
    std::size_t start = 0;
    bool seen_end = false;
    while (start <= text.size() && !seen_end) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto bs = line.find('\\'); bs != std::string_view::npos) {
            const bool whole_line = line.substr(0, bs).find_first_not_of(" \t") == std::string_view::npos;
            if (current == Section::None && model.comment.empty() && whole_line) {
                std::string_view c = line.substr(bs + 1);
                if (!c.empty() && c.front() == ' ') c.remove_prefix(1);
                while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.remove_suffix(1);
                model.comment = std::string(c);
            }
            line = line.substr(0, bs);
        }
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        bool minimize = model.minimize;
        if (const auto sec = section_keyword(line, minimize)) {
            if (*sec == Section::End) {
                seen_end = true;
                break;
            }
            if (*sec == Section::Objective) model.minimize = minimize;
            current = *sec;
            sections.push_back({current, {}});
            continue;
        }
        if (current == Section::None) throw LpFormatError("content before the objective section", line_no);
        tokenize_line(line, line_no, sections.back().second);
        if (end == text.size()) break;
    }
    if (!seen_end) throw LpFormatError("missing End", line_no);

    for (auto& [sec, toks] : sections) {
        Parser p(std::move(toks));
        switch (sec) {
        case Section::Objective: {
            if (p.done()) break;
            if (auto name = p.label()) model.objective_name = *name;
            model.objective = p.expression();
            if (!p.done()) throw LpFormatError("trailing tokens in objective", p.peek().line);
            break;
        }
        case Section::Constraints: {
            int counter = 0;
            while (!p.done()) {
                LinearRow row;
                const int line = p.peek().line;
                row.name = p.label().value_or("R" + std::to_string(counter));
                ++counter;
                row.terms = p.expression();
                if (p.done() || p.peek().kind != TokKind::Op) throw LpFormatError("constraint without operator", line);
                row.sense = to_sense(p.next().text);
                row.rhs = p.signed_number();
                model.rows.push_back(std::move(row));
            }
            break;
        }
        case Section::Bounds: {
            while (!p.done()) {
                if (p.at_number()) {
                    const double v = p.signed_number();
                    const Token op = p.next();
                    if (op.kind != TokKind::Op) throw LpFormatError("expected operator in bound", op.line);
                    const Token var = p.next();
                    if (var.kind != TokKind::Ident) throw LpFormatError("expected variable in bound", var.line);
                    auto& b = bound_for(model, var.text);
                    apply_bound(b, op.text, v, false);
                    if (!p.done() && p.peek().kind == TokKind::Op) {
                        const std::string op2 = p.next().text;
                        apply_bound(b, op2, p.signed_number(), true);
                    }
                    continue;
                }
                const Token var = p.next();
                if (var.kind != TokKind::Ident) throw LpFormatError("expected variable in bound", var.line);
                if (!p.done() && p.peek().kind == TokKind::Ident && lower(p.peek().text) == "free") {
                    p.next();
                    auto& b = bound_for(model, var.text);
                    b.lower = -std::numeric_limits<double>::infinity();
                    b.upper = std::numeric_limits<double>::infinity();
                    continue;
                }
                const Token op = p.next();
                if (op.kind != TokKind::Op) throw LpFormatError("expected operator in bound", op.line);
                apply_bound(bound_for(model, var.text), op.text, p.signed_number(), true);
            }
            break;
        }
        case Section::Binaries:
            while (!p.done()) {
                const Token t = p.next();
                if (t.kind != TokKind::Ident) throw LpFormatError("expected variable name in Binaries", t.line);
                model.binaries.push_back(t.text);
            }
            break;
        case Section::Generals:
        case Section::None:
        case Section::End:
            break;
        }
    }
    if (model.objective_name.empty()) model.objective_name = "obj";
    return model;
}

}  // namespace srr
