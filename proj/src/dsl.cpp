#include "tmkit/dsl.hpp"

#include "tmkit/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tmkit {

SourceText read_source(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
    return {buf.str(), path};
}

std::string ParseDiagnostic::to_text(const std::string& origin) const {
    return origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
           (severity == Severity::Error ? "error" : "warning") + ": " + message;
}

std::size_t ParseResult::error_count() const {
    return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                  [](const ParseDiagnostic& d) { return d.severity == Severity::Error; }));
}

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    std::size_t line = 1;
    std::size_t column = 1;
};

struct SyntaxError {
    std::size_t line;
    std::size_t column;
    std::string message;
};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::String: return "string \"" + t.text + "\"";
    default: return "'" + t.text + "'";
    }
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = column_;
            if (pos_ >= text_.size()) {
                t.kind = Tok::End;
                if (last_line_) t.line = last_line_, t.column = last_column_;
                out.push_back(std::move(t));
                return out;
            }
            const char c = text_[pos_];
            if (ident_start(c)) {
                t.kind = Tok::Ident;
                while (pos_ < text_.size() && ident_char(text_[pos_])) t.text += advance();
            } else if (digit(c)) {
                lex_number(t);
            } else if (c == '"') {
                lex_string(t);
            } else {
                t.kind = Tok::Punct;
                const char n = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
                if ((c == '-' || c == '=') && n == '>') {
                    t.text += advance();
                    t.text += advance();
                } else if (std::string_view("{}();,:.=+-*/").find(c) != std::string_view::npos) {
                    t.text += advance();
                } else {
                    throw SyntaxError{line_, column_, "syntax error: unexpected character '" + printable(c) + "'"};
                }
            }
            out.push_back(std::move(t));
        }
    }

private:
    static std::string printable(char c) {
        if (static_cast<unsigned char>(c) >= 0x20 && static_cast<unsigned char>(c) < 0x7f) return std::string(1, c);
        char buf[8];
        std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned char>(c));
        return buf;
    }

    char advance() {
        const char c = text_[pos_++];
        last_line_ = line_;
        last_column_ = column_;
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    void lex_number(Token& t) {
        t.kind = Tok::Number;
        const std::size_t start = pos_;
        while (pos_ < text_.size() && digit(text_[pos_])) advance();
        if (pos_ + 1 < text_.size() && text_[pos_] == '.' && digit(text_[pos_ + 1])) {
            advance();
            while (pos_ < text_.size() && digit(text_[pos_])) advance();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && digit(text_[look])) {
                while (pos_ < look) advance();
                while (pos_ < text_.size() && digit(text_[pos_])) advance();
            }
        }
        t.text = text_.substr(start, pos_ - start);
        auto [end, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
        if (ec != std::errc{} || end != t.text.data() + t.text.size())
            throw SyntaxError{t.line, t.column, "syntax error: number '" + t.text + "' out of range"};
    }

    void lex_string(Token& t) {
        t.kind = Tok::String;
        advance();
        for (;;) {
            if (pos_ >= text_.size() || text_[pos_] == '\n')
                throw SyntaxError{t.line, t.column, "syntax error: unterminated string"};
            const char c = advance();
            if (c == '"') return;
            if (c == '\\') {
                if (pos_ >= text_.size()) throw SyntaxError{t.line, t.column, "syntax error: unterminated string"};
                const char e = advance();
                if (e == '"' || e == '\\')
                    t.text += e;
                else if (e == 'n')
                    t.text += '\n';
                else
                    throw SyntaxError{last_line_, last_column_, "syntax error: unknown escape '\\" + printable(e) + "'"};
            } else {
                t.text += c;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
    std::size_t last_line_ = 0;
    std::size_t last_column_ = 0;
};

struct Pos {
    std::size_t line = 1;
    std::size_t column = 1;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, const ParseOptions& options) : toks_(std::move(tokens)), options_(options) {}

    Document parse_document() {
        expect_word("model");
        doc_.model.name = peek().kind == Tok::String ? take().text : ident("model name");
        expect("{");
        while (!at("}")) top_item();
        expect("}");
        if (peek().kind != Tok::End) fail(peek(), "expected end of input, found " + describe(peek()));
        resolve();
        return std::move(doc_);
    }

    std::vector<ParseDiagnostic> diagnostics;

private:
    // Token helpers.
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    Token take() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool at(std::string_view punct) const { return peek().kind == Tok::Punct && peek().text == punct; }
    bool at_word(std::string_view w, std::size_t k = 0) const {
        return peek(k).kind == Tok::Ident && peek(k).text == w;
    }
    bool accept(std::string_view punct) {
        if (!at(punct)) return false;
        take();
        return true;
    }
    [[noreturn]] void fail(const Token& t, const std::string& what) {
        throw SyntaxError{t.line, t.column, "syntax error: " + what};
    }
    void expect(std::string_view punct) {
        if (!accept(punct)) fail(peek(), "expected '" + std::string(punct) + "', found " + describe(peek()));
    }
    void expect_word(std::string_view w) {
        if (!at_word(w)) fail(peek(), "expected '" + std::string(w) + "', found " + describe(peek()));
        take();
    }
    std::string ident(const std::string& what) {
        if (peek().kind != Tok::Ident) fail(peek(), "expected " + what + ", found " + describe(peek()));
        return take().text;
    }
    std::string string_lit(const std::string& what) {
        if (peek().kind != Tok::String) fail(peek(), "expected " + what + ", found " + describe(peek()));
        return take().text;
    }
    static Pos pos_of(const Token& t) { return {t.line, t.column}; }
    void end_block() { accept(";"); }

    void report(Severity severity, Pos at, std::string message) {
        diagnostics.push_back({severity, at.line, at.column, std::move(message)});
    }
    // Reference problems are errors in strict mode and warnings otherwise.
    void reference_problem(Pos at, std::string message) {
        report(options_.strict_references ? Severity::Error : Severity::Warning, at, std::move(message));
    }

    StageKind kind_of(const Token& t) {
        auto k = parse_stage_kind(t.text);
        if (!k) throw SyntaxError{t.line, t.column, "unknown stage kind '" + t.text + "'"};
        return *k;
    }

    // A.kind
    std::string stage_ref() {
        const std::string owner = ident("thimac name");
        expect(".");
        if (peek().kind != Tok::Ident) fail(peek(), "expected stage kind, found " + describe(peek()));
        const Token k = take();
        return stage_id(owner, kind_of(k));
    }

    void add_element_id(const std::string& id, Pos at) {
        if (!element_ids_.insert(id).second) reference_problem(at, "duplicate id '" + id + "'");
    }

    // Top level.
    void top_item() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail(t, "expected a declaration, found " + describe(t));
        if (t.text == "thimac") return thimac_decl(std::nullopt);
        if (t.text == "stage") return stage_decl();
        if (t.text == "flow") return flow_decl();
        if (t.text == "trigger") return trigger_decl();
        if (t.text == "var") return var_decl();
        if (t.text == "rule") return rule_decl();
        if (t.text == "event") return event_decl();
        if (t.text == "behavior") return behavior_decl();
        fail(t, "unexpected " + describe(t));
    }

    void thimac_decl(const std::optional<std::string>& enclosing) {
        expect_word("thimac");
        const Token id_tok = peek();
        Thimac th;
        th.id = ident("thimac name");
        th.parent = enclosing;
        if (accept(":")) {
            parents_.push_back({th.id, peek().text, pos_of(peek())});
            th.parent = ident("parent thimac");
        }
        if (peek().kind == Tok::String) th.name = take().text;
        for (;;) {
            if (at_word("aspect")) {
                take();
                const Token a = peek();
                auto aspect = parse_aspect(ident("aspect"));
                if (!aspect) fail(a, "unknown aspect '" + a.text + "'");
                th.aspect = *aspect;
            } else if (at_word("role")) {
                take();
                const Token r = peek();
                auto role = parse_swcm_role(ident("role"));
                if (!role) fail(r, "unknown role '" + r.text + "'");
                th.swcm_role = *role;
            } else {
                break;
            }
        }
        if (!thimac_ids_.insert(th.id).second) reference_problem(pos_of(id_tok), "duplicate id '" + th.id + "'");
        const std::string id = th.id;
        doc_.model.thimacs.push_back(std::move(th));
        if (accept(";")) return;
        expect("{");
        while (!at("}")) {
            if (at_word("thimac")) {
                thimac_decl(id);
                continue;
            }
            const Token k = peek();
            if (k.kind != Tok::Ident) fail(k, "expected stage kind, found " + describe(k));
            take();
            Stage s;
            s.kind = kind_of(k);
            s.owner = id;
            s.id = stage_id(id, s.kind);
            if (peek().kind == Tok::String) s.label = take().text;
            expect(";");
            add_element_id(s.id, pos_of(k));
            doc_.model.stages.push_back(std::move(s));
        }
        expect("}");
        end_block();
    }

    void stage_decl() {
        expect_word("stage");
        const Token at_tok = peek();
        Stage s;
        s.owner = ident("thimac name");
        expect(".");
        const Token k = peek();
        ident("stage kind");
        s.kind = kind_of(k);
        s.id = stage_id(s.owner, s.kind);
        if (peek().kind == Tok::String) s.label = take().text;
        expect(";");
        add_element_id(s.id, pos_of(at_tok));
        owners_.push_back({s.id, s.owner, pos_of(at_tok)});
        doc_.model.stages.push_back(std::move(s));
    }

    // [name ':'] A.x -> B.y
    std::tuple<std::string, std::string, std::string, Pos> arc_head(std::string_view arrow) {
        std::string name;
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::Punct && peek(1).text == ":") {
            name = take().text;
            take();
        }
        const Pos at = pos_of(peek());
        std::string from = stage_ref();
        if (!accept(arrow) && !(arrow == "->" ? false : accept("->")))
            fail(peek(), "expected '" + std::string(arrow) + "', found " + describe(peek()));
        std::string to = stage_ref();
        return {std::move(name), std::move(from), std::move(to), at};
    }

    void flow_decl() {
        expect_word("flow");
        auto [name, from, to, at] = arc_head("->");
        expect(";");
        Flow f{name.empty() ? default_flow_id(from, to) : name, from, to};
        add_element_id(f.id, at);
        endpoints_.push_back({"flow '" + f.id + "'", f.from, at});
        endpoints_.push_back({"flow '" + f.id + "'", f.to, at});
        doc_.model.flows.push_back(std::move(f));
    }

    void trigger_decl() {
        expect_word("trigger");
        auto [name, from, to, at] = arc_head("=>");
        Trigger t{name.empty() ? default_trigger_id(from, to) : name, from, to, std::nullopt};
        if (at_word("when")) {
            take();
            guards_.push_back({t.id, peek().text, pos_of(peek())});
            t.guard = ident("guard thimac");
        }
        expect(";");
        add_element_id(t.id, at);
        endpoints_.push_back({"trigger '" + t.id + "'", t.from, at});
        endpoints_.push_back({"trigger '" + t.id + "'", t.to, at});
        doc_.model.triggers.push_back(std::move(t));
    }

    double signed_number() {
        const bool negative = accept("-");
        if (peek().kind != Tok::Number) fail(peek(), "expected number, found " + describe(peek()));
        const double v = take().number;
        return negative ? -v : v;
    }

    void var_decl() {
        expect_word("var");
        const Token at_tok = peek();
        Variable v;
        v.name = ident("variable name");
        expect("=");
        v.value = signed_number();
        for (;;) {
            if (auto role = peek().kind == Tok::Ident ? parse_variable_role(peek().text) : std::nullopt) {
                take();
                v.role = *role;
            } else if (at_word("unit")) {
                take();
                v.unit = string_lit("unit string");
            } else {
                break;
            }
        }
        expect(";");
        if (!variable_names_.insert(v.name).second)
            reference_problem(pos_of(at_tok), "duplicate id '" + v.name + "'");
        doc_.model.variables.push_back(std::move(v));
    }

    // Expressions: sum := product (('+'|'-') product)*, product := unary (('*'|'/') unary)*.
    Expr expr() {
        Expr lhs = product();
        while (at("+") || at("-")) {
            const auto op = take().text == "+" ? Expr::Op::Add : Expr::Op::Sub;
            lhs = Expr::binary(op, std::move(lhs), product());
        }
        return lhs;
    }

    Expr product() {
        Expr lhs = unary();
        while (at("*") || at("/")) {
            const auto op = take().text == "*" ? Expr::Op::Mul : Expr::Op::Div;
            lhs = Expr::binary(op, std::move(lhs), unary());
        }
        return lhs;
    }

    Expr unary() {
        if (accept("-")) {
            if (peek().kind == Tok::Number) return Expr::number(-take().number);
            return Expr::negate(unary());
        }
        if (peek().kind == Tok::Number) return Expr::number(take().number);
        if (peek().kind == Tok::Ident) {
            const Token t = take();
            variable_uses_.push_back({t.text, pos_of(t)});
            return Expr::variable(t.text);
        }
        if (accept("(")) {
            Expr inner = expr();
            expect(")");
            return inner;
        }
        fail(peek(), "expected expression, found " + describe(peek()));
    }

    void rule_decl() {
        expect_word("rule");
        const Pos where = pos_of(peek());
        UpdateRule rule;
        rule.stage = stage_ref();
        rule_stages_.push_back({rule.stage, where});
        if (at_word("choose")) {
            take();
            rule.kind = UpdateRule::Kind::Stochastic;
            expect("{");
            while (!at("}")) {
                Outcome o;
                o.label = ident("outcome label");
                expect(":");
                o.probability = expr();
                expect("->");
                const Pos target_at = pos_of(peek());
                std::string target = ident("outcome target");
                if (accept(".")) {
                    const Token k = peek();
                    ident("stage kind");
                    target = stage_id(target, kind_of(k));
                    if (accept("=>")) target = default_trigger_id(target, stage_ref());
                }
                expect(";");
                outcome_targets_.push_back({doc_.model.rules.size(), rule.outcomes.size(), target_at});
                o.trigger = std::move(target);
                rule.outcomes.push_back(std::move(o));
            }
        } else {
            expect("{");
            while (!at("}")) {
                Assignment a;
                const Token t = peek();
                a.target = ident("variable name");
                variable_uses_.push_back({a.target, pos_of(t)});
                expect("=");
                a.value = expr();
                expect(";");
                rule.assignments.push_back(std::move(a));
            }
        }
        expect("}");
        end_block();
        doc_.model.rules.push_back(std::move(rule));
    }

    // Event element: Name | A.kind | A.x -> B.y | A.x => B.y
    std::string element() {
        const Pos where = pos_of(peek());
        std::string first = ident("element");
        if (!accept(".")) {
            element_refs_.push_back({first, "", "", "", where});
            return first;
        }
        const Token k = peek();
        ident("stage kind");
        first = stage_id(first, kind_of(k));
        if (at("->") || at("=>")) {
            const std::string arrow = take().text;
            const std::string second = stage_ref();
            const std::string id =
                arrow == "->" ? default_flow_id(first, second) : default_trigger_id(first, second);
            element_refs_.push_back({id, arrow, first, second, where});
            return id;
        }
        element_refs_.push_back({first, "", "", "", where});
        return first;
    }

    void event_decl() {
        expect_word("event");
        const Pos where = pos_of(peek());
        EventDecl e;
        e.id = ident("event id");
        e.description = string_lit("event description");
        for (;;) {
            if (at_word("emits")) {
                take();
                e.data_emitting = true;
            } else if (at_word("state")) {
                take();
                e.state = string_lit("state text");
            } else {
                break;
            }
        }
        expect("{");
        event_element_base_.push_back(element_refs_.size());
        while (!at("}")) {
            e.elements.push_back(element());
            if (!accept(";") && !accept(",")) break;
        }
        expect("}");
        end_block();
        if (!event_ids_.insert(e.id).second) reference_problem(where, "duplicate id '" + e.id + "'");
        doc_.events.push_back(std::move(e));
    }

    std::vector<std::string> id_list() {
        expect("{");
        std::vector<std::string> out;
        while (!at("}")) {
            event_uses_.push_back({peek().text, pos_of(peek())});
            out.push_back(ident("event id"));
            if (!accept(",") && !accept(";")) break;
        }
        expect("}");
        end_block();
        return out;
    }

    std::string event_use() {
        event_uses_.push_back({peek().text, pos_of(peek())});
        return ident("event id");
    }

    void behavior_decl() {
        expect_word("behavior");
        expect("{");
        BehaviorSpec& b = doc_.behavior;
        while (!at("}")) {
            if (at_word("branch") || at_word("exclusive")) {
                take();
                b.exclusive_groups.push_back(id_list());
            } else if (at_word("recur")) {
                take();
                std::string from = event_use();
                std::string to = accept("->") ? event_use() : from;
                expect(";");
                b.recurrences.push_back({std::move(from), std::move(to)});
            } else if (at_word("contain")) {
                take();
                Containment c;
                c.container = event_use();
                c.contained = id_list();
                b.containments.push_back(std::move(c));
            } else {
                std::string prev = event_use();
                expect("->");
                do {
                    std::string next = event_use();
                    b.successions.push_back({prev, next});
                    prev = std::move(next);
                } while (accept("->"));
                expect(";");
            }
        }
        expect("}");
        end_block();
    }

    // Reference resolution once everything is declared.
    void resolve() {
        Model& m = doc_.model;
        for (const auto& [child, parent, at] : parents_)
            if (!thimac_ids_.count(parent))
                reference_problem(at, "dangling reference: parent '" + parent + "' of '" + child + "' is not a thimac");
        for (const auto& [stage, owner, at] : owners_)
            if (!thimac_ids_.count(owner))
                reference_problem(at, "dangling reference: owner '" + owner + "' of '" + stage + "' is not a thimac");

        std::set<std::string> stages;
        for (const Stage& s : m.stages) stages.insert(s.id);
        for (const auto& [what, stage, at] : endpoints_)
            if (!stages.count(stage))
                reference_problem(at, "dangling reference: " + what + " endpoint '" + stage + "' is not a stage");
        for (const auto& [trigger, guard, at] : guards_)
            if (!thimac_ids_.count(guard))
                reference_problem(at, "dangling reference: guard '" + guard + "' of trigger '" + trigger + "' is not a thimac");
        for (const auto& [stage, at] : rule_stages_)
            if (!stages.count(stage))
                reference_problem(at, "dangling reference: rule stage '" + stage + "' is not a stage");
        for (const auto& [name, at] : variable_uses_)
            if (!variable_names_.count(name))
                reference_problem(at, "dangling reference: variable '" + name + "' is not declared");

        std::set<std::string> triggers;
        for (const Trigger& t : m.triggers) triggers.insert(t.id);
        for (const auto& [r, o, at] : outcome_targets_) {
            UpdateRule& rule = m.rules[r];
            std::string& target = rule.outcomes[o].trigger;
            if (triggers.count(target)) continue;
            std::string to_stage = target;
            if (target.find('.') == std::string::npos) to_stage = stage_id(target, StageKind::Create);
            auto it = std::find_if(m.triggers.begin(), m.triggers.end(),
                                   [&](const Trigger& t) { return t.from == rule.stage && t.to == to_stage; });
            if (it != m.triggers.end())
                target = it->id;
            else
                reference_problem(at, "dangling reference: outcome target '" + target + "' is not a trigger");
        }

        // Arc shorthands in events name the default id, or the first arc with those endpoints.
        std::size_t next_event = 0;
        for (std::size_t i = 0; i < element_refs_.size(); ++i) {
            while (next_event + 1 < event_element_base_.size() && event_element_base_[next_event + 1] <= i)
                ++next_event;
            auto& [id, arrow, from, to, at] = element_refs_[i];
            std::string resolved = id;
            if (!arrow.empty() && !element_ids_.count(id)) {
                if (arrow == "->") {
                    auto it = std::find_if(m.flows.begin(), m.flows.end(),
                                           [&](const Flow& f) { return f.from == from && f.to == to; });
                    if (it != m.flows.end()) resolved = it->id;
                } else {
                    auto it = std::find_if(m.triggers.begin(), m.triggers.end(),
                                           [&](const Trigger& t) { return t.from == from && t.to == to; });
                    if (it != m.triggers.end()) resolved = it->id;
                }
            }
            if (!element_ids_.count(resolved) && !thimac_ids_.count(resolved))
                reference_problem(at, "dangling reference: event element '" + resolved + "' is not in the model");
            if (resolved != id) {
                auto& elements = doc_.events[next_event].elements;
                elements[i - event_element_base_[next_event]] = resolved;
            }
        }
        for (const auto& [id, at] : event_uses_)
            if (!event_ids_.count(id)) reference_problem(at, "dangling reference: event '" + id + "' is not declared");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    ParseOptions options_;
    Document doc_;

    std::set<std::string> thimac_ids_;
    std::set<std::string> element_ids_;
    std::set<std::string> variable_names_;
    std::set<std::string> event_ids_;
    std::vector<std::tuple<std::string, std::string, Pos>> parents_;
    std::vector<std::tuple<std::string, std::string, Pos>> owners_;
    std::vector<std::tuple<std::string, std::string, Pos>> endpoints_;
    std::vector<std::tuple<std::string, std::string, Pos>> guards_;
    std::vector<std::pair<std::string, Pos>> rule_stages_;
    std::vector<std::pair<std::string, Pos>> variable_uses_;
    std::vector<std::tuple<std::size_t, std::size_t, Pos>> outcome_targets_;
    std::vector<std::tuple<std::string, std::string, std::string, std::string, Pos>> element_refs_;
    std::vector<std::size_t> event_element_base_;
    std::vector<std::pair<std::string, Pos>> event_uses_;
};

}  // namespace

ParseResult parse(const SourceText& source, const ParseOptions& options) {
    ParseResult result;
    try {
        Parser parser(Lexer(source.text).run(), options);
        Document doc = parser.parse_document();
        result.diagnostics = std::move(parser.diagnostics);
        if (result.error_count() == 0) result.document = std::move(doc);
    } catch (const SyntaxError& e) {
        result.diagnostics.push_back({Severity::Error, e.line, e.column, e.message});
    }
    return result;
}

// Serialization.

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty() || !ident_start(s.front())) return false;
    return std::all_of(s.begin(), s.end(), ident_char);
}

std::string quoted(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string arc_text(const std::string& id, const std::string& from, const std::string& to, std::string_view arrow) {
    if (is_identifier(id)) return id + ": " + from + " " + std::string(arrow) + " " + to;
    return from + " " + std::string(arrow) + " " + to;
}

std::string element_text(const Model& m, const std::string& id) {
    for (const Flow& f : m.flows)
        if (f.id == id && !is_identifier(id)) return f.from + " -> " + f.to;
    for (const Trigger& t : m.triggers)
        if (t.id == id && !is_identifier(id)) return t.from + " => " + t.to;
    auto split = [&](std::string_view arrow) -> std::optional<std::string> {
        auto p = id.find(arrow);
        if (p == std::string::npos) return std::nullopt;
        return id.substr(0, p) + " " + std::string(arrow) + " " + id.substr(p + arrow.size());
    };
    if (auto s = split("->")) return *s;
    if (auto s = split("=>")) return *s;
    return id;
}

bool grouped_by_owner(const Model& m) {
    std::vector<const Stage*> grouped;
    for (const Thimac& t : m.thimacs)
        for (const Stage& s : m.stages)
            if (s.owner == t.id) grouped.push_back(&s);
    if (grouped.size() != m.stages.size()) return false;
    for (std::size_t i = 0; i < grouped.size(); ++i)
        if (grouped[i] != &m.stages[i]) return false;
    // A repeated thimac id would list its stages twice.
    std::set<std::string> ids;
    for (const Thimac& t : m.thimacs)
        if (!ids.insert(t.id).second) return false;
    return true;
}

void thimac_header(std::ostringstream& out, const Thimac& t) {
    out << "  thimac " << t.id;
    if (t.parent) out << " : " << *t.parent;
    if (!t.name.empty()) out << ' ' << quoted(t.name);
    if (t.aspect != Aspect::Dual) out << " aspect " << to_string(t.aspect);
    if (t.swcm_role != SwcmRole::None) out << " role " << to_string(t.swcm_role);
}

std::string outcome_target(const Model& m, const Outcome& o) {
    if (is_identifier(o.trigger)) return o.trigger;
    for (const Trigger& t : m.triggers)
        if (t.id == o.trigger) return t.from + " => " + t.to;
    auto p = o.trigger.find("=>");
    if (p != std::string::npos) return o.trigger.substr(0, p) + " => " + o.trigger.substr(p + 2);
    return o.trigger;
}

}  // namespace

std::string serialize(const Document& document) {
    const Model& m = document.model;
    std::ostringstream out;
    out << "model " << (is_identifier(m.name) ? m.name : quoted(m.name)) << " {\n";

    if (grouped_by_owner(m)) {
        for (const Thimac& t : m.thimacs) {
            thimac_header(out, t);
            out << " {";
            bool any = false;
            for (const Stage& s : m.stages) {
                if (s.owner != t.id) continue;
                out << (any ? " " : " ") << to_string(s.kind);
                if (!s.label.empty()) out << ' ' << quoted(s.label);
                out << ';';
                any = true;
            }
            out << (any ? " }\n" : "}\n");
        }
    } else {
        for (const Thimac& t : m.thimacs) {
            thimac_header(out, t);
            out << ";\n";
        }
        for (const Stage& s : m.stages) {
            out << "  stage " << s.owner << '.' << to_string(s.kind);
            if (!s.label.empty()) out << ' ' << quoted(s.label);
            out << ";\n";
        }
    }

    for (const Flow& f : m.flows) out << "  flow " << arc_text(f.id, f.from, f.to, "->") << ";\n";
    for (const Trigger& t : m.triggers) {
        out << "  trigger " << arc_text(t.id, t.from, t.to, "=>");
        if (t.guard) out << " when " << *t.guard;
        out << ";\n";
    }
    for (const Variable& v : m.variables) {
        out << "  var " << v.name << " = " << format_number(v.value) << ' ' << to_string(v.role);
        if (!v.unit.empty()) out << " unit " << quoted(v.unit);
        out << ";\n";
    }
    for (const UpdateRule& r : m.rules) {
        out << "  rule " << r.stage;
        if (r.kind == UpdateRule::Kind::Stochastic) {
            out << " choose {\n";
            for (const Outcome& o : r.outcomes)
                out << "    " << o.label << ": " << o.probability.to_string() << " -> " << outcome_target(m, o) << ";\n";
        } else {
            out << " {\n";
            for (const Assignment& a : r.assignments) out << "    " << a.target << " = " << a.value.to_string() << ";\n";
        }
        out << "  }\n";
    }
    for (const EventDecl& e : document.events) {
        out << "  event " << e.id << ' ' << quoted(e.description);
        if (e.data_emitting) out << " emits";
        if (!e.state.empty()) out << " state " << quoted(e.state);
        out << " {";
        for (std::size_t i = 0; i < e.elements.size(); ++i)
            out << (i ? ", " : " ") << element_text(m, e.elements[i]);
        out << (e.elements.empty() ? "}\n" : " }\n");
    }
    const BehaviorSpec& b = document.behavior;
    if (!b.empty()) {
        out << "  behavior {\n";
        for (const auto& [a, c] : b.successions) out << "    " << a << " -> " << c << ";\n";
        for (const auto& g : b.exclusive_groups) {
            out << "    exclusive {";
            for (std::size_t i = 0; i < g.size(); ++i) out << (i ? ", " : "") << g[i];
            out << "}\n";
        }
        for (const auto& [a, c] : b.recurrences) {
            out << "    recur " << a;
            if (c != a) out << " -> " << c;
            out << ";\n";
        }
        for (const Containment& c : b.containments) {
            out << "    contain " << c.container << " {";
            for (std::size_t i = 0; i < c.contained.size(); ++i) out << (i ? ", " : "") << c.contained[i];
            out << "}\n";
        }
        out << "  }\n";
    }
    out << "}\n";
    return out.str();
}

std::string serialize(const Model& model) { return serialize(Document{model, {}, {}}); }

}  // namespace tmkit
