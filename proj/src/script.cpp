#include <cctype>
#include <cstring>
#include <set>
#include <sstream>

#include <json.hpp>

#include "graphblocks/compiler.hpp"

namespace graphblocks {

// ---------------------------------------------------------------------------
// Emission.  Grammar lives in docs/script_language.md; the only contract is
// human readability plus parse_script(emit_script(plan)) == plan.
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kHeader = "# graphblocks script v1";

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

std::string scalar_literal(const Scalar& v) {
    if (is_string(v)) return quote(std::get<std::string>(v));
    return format_scalar(v);  // numbers minimal-decimal, booleans true/false
}

void emit_expr(std::ostream& os, const ExprNode& e, const Catalog& catalog);

// Ports first (declared order), then fields (declared order).
void emit_args(std::ostream& os, const std::map<std::string, ExprNode>& args,
               const std::map<std::string, std::string>& fields, const BlockSpec& spec,
               const Catalog& catalog) {
    bool first = true;
    auto sep = [&] {
        if (!first) os << ", ";
        first = false;
    };
    for (const PortSpec* p : spec.value_in_ports()) {
        auto it = args.find(p->id);
        if (it == args.end()) continue;
        sep();
        os << p->id << " = ";
        emit_expr(os, it->second, catalog);
    }
    for (const FieldSpec& f : spec.fields) {
        auto it = fields.find(f.id);
        if (it == fields.end()) continue;
        sep();
        os << f.id << " := " << quote(it->second);
    }
}

void emit_expr(std::ostream& os, const ExprNode& e, const Catalog& catalog) {
    if (e.kind == ExprNode::Kind::constant) {
        os << scalar_literal(e.value);
        return;
    }
    const BlockSpec& spec = *catalog.lookup_block(e.block);
    os << e.block;
    if (!e.children.empty() || !e.fields.empty()) {
        os << "(";
        emit_args(os, e.children, e.fields, spec, catalog);
        os << ")";
    }
}

void emit_stmt(std::ostream& os, const Stmt& s, const Catalog& catalog, int depth) {
    const BlockSpec& spec = *catalog.lookup_block(s.block);
    std::string indent(static_cast<size_t>(depth) * 2, ' ');
    os << indent << s.node_id << " " << s.block;
    if (!s.args.empty() || !s.fields.empty()) {
        os << "(";
        emit_args(os, s.args, s.fields, spec, catalog);
        os << ")";
    }
    size_t substack_count = spec.substack_ports().size();
    if (substack_count == 0) {
        os << "\n";
        return;
    }
    os << " {\n";
    for (const Stmt& child : s.substacks.empty() ? std::vector<Stmt>{} : s.substacks[0])
        emit_stmt(os, child, catalog, depth + 1);
    os << indent << "}";
    if (substack_count > 1) {
        os << " else {\n";
        if (s.substacks.size() > 1)
            for (const Stmt& child : s.substacks[1]) emit_stmt(os, child, catalog, depth + 1);
        os << indent << "}";
    }
    os << "\n";
}

}  // namespace

std::string emit_script(const CompiledPlan& plan, const Catalog& catalog) {
    std::ostringstream os;
    os << kHeader << "\n";
    for (const Script& script : plan.scripts) {
        const BlockSpec& spec = *catalog.lookup_block(script.trigger.block);
        os << "\n" << "script " << script.trigger.node_id << " " << script.trigger.block;
        if (!script.trigger.fields.empty()) {
            os << "(";
            emit_args(os, {}, script.trigger.fields, spec, catalog);
            os << ")";
        }
        os << " {\n";
        for (const Stmt& s : script.body) emit_stmt(os, s, catalog, 1);
        os << "}\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Parsing: a small tokenizer plus recursive descent.
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { ident, number, string, boolean, punct, eof };
    Kind kind = Kind::eof;
    std::string text;   // ident / punct
    Scalar value = 0.0; // number / string / boolean literals
    int line = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_space_and_comments();
        Token t;
        t.line = line_;
        if (pos_ >= text_.size()) return t;
        char c = text_[pos_];
        if (c == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
            t.kind = Token::Kind::punct;
            t.text = ":=";
            pos_ += 2;
            return t;
        }
        if (std::strchr("{}(),=", c)) {
            t.kind = Token::Kind::punct;
            t.text = std::string(1, c);
            ++pos_;
            return t;
        }
        if (c == '"') return lex_string();
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return lex_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident();
        err("unexpected character '" + std::string(1, c) + "'");
    }

    [[noreturn]] void err(const std::string& message) const {
        fail(DiagCode::ScriptSyntaxError,
             "line " + std::to_string(line_) + ": " + message);
    }

  private:
    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    Token lex_string() {
        // Reuse JSON string syntax (including escapes) for literals.
        size_t start = pos_;
        ++pos_;
        while (pos_ < text_.size()) {
            if (text_[pos_] == '\\') {
                pos_ += 2;
                continue;
            }
            if (text_[pos_] == '"') {
                ++pos_;
                Token t;
                t.kind = Token::Kind::string;
                t.line = line_;
                try {
                    t.value = Scalar(nlohmann::json::parse(text_.substr(start, pos_ - start))
                                         .get<std::string>());
                } catch (const nlohmann::json::parse_error&) {
                    err("invalid string literal");
                }
                return t;
            }
            if (text_[pos_] == '\n') break;
            ++pos_;
        }
        err("unterminated string literal");
    }

    Token lex_number() {
        size_t start = pos_;
        if (text_[pos_] == '-') ++pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                std::strchr(".eE+-", text_[pos_]) != nullptr)) {
            // Stop '-'/'+' unless they follow an exponent marker.
            char c = text_[pos_];
            if ((c == '-' || c == '+') && pos_ > start) {
                char prev = text_[pos_ - 1];
                if (prev != 'e' && prev != 'E') break;
            }
            ++pos_;
        }
        std::string lit = text_.substr(start, pos_ - start);
        auto parsed = parse_number(lit);
        if (!parsed) err("invalid number literal '" + lit + "'");
        Token t;
        t.kind = Token::Kind::number;
        t.line = line_;
        t.value = Scalar(*parsed);
        return t;
    }

    Token lex_ident() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        Token t;
        t.line = line_;
        std::string word = text_.substr(start, pos_ - start);
        if (word == "true" || word == "false") {
            t.kind = Token::Kind::boolean;
            t.value = Scalar(word == "true");
            return t;
        }
        t.kind = Token::Kind::ident;
        t.text = word;
        return t;
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
};

class Parser {
  public:
    Parser(const std::string& text, const Catalog& catalog)
        : lexer_(text), catalog_(catalog) {
        advance();
    }

    CompiledPlan parse() {
        CompiledPlan plan;
        while (cur_.kind != Token::Kind::eof) {
            expect_keyword("script");
            plan.scripts.push_back(parse_script_block());
        }
        collect_variables(plan);
        return plan;
    }

  private:
    void advance() { cur_ = lexer_.next(); }

    [[noreturn]] void err(const std::string& message) const {
        fail(DiagCode::ScriptSyntaxError,
             "line " + std::to_string(cur_.line) + ": " + message);
    }

    void expect_keyword(const std::string& word) {
        if (cur_.kind != Token::Kind::ident || cur_.text != word)
            err("expected '" + word + "'");
        advance();
    }

    void expect_punct(const std::string& p) {
        if (cur_.kind != Token::Kind::punct || cur_.text != p)
            err("expected '" + p + "'");
        advance();
    }

    bool at_punct(const std::string& p) const {
        return cur_.kind == Token::Kind::punct && cur_.text == p;
    }

    std::string take_ident(const char* what) {
        if (cur_.kind != Token::Kind::ident) err(std::string("expected ") + what);
        std::string word = cur_.text;
        advance();
        return word;
    }

    Script parse_script_block() {
        Script script;
        script.trigger.node_id = take_ident("a node id");
        script.trigger.block = take_ident("a hat block name");
        const BlockSpec* spec = catalog_.lookup_block(script.trigger.block);
        if (!spec || spec->category != Category::hat)
            err("'" + script.trigger.block + "' is not a hat block");
        if (at_punct("("))
            parse_args(*spec, script.trigger.args, script.trigger.fields);
        expect_punct("{");
        script.body = parse_body(*spec);
        return script;
    }

    std::vector<Stmt> parse_body(const BlockSpec&) {
        std::vector<Stmt> body;
        while (!at_punct("}")) body.push_back(parse_stmt());
        expect_punct("}");
        return body;
    }

    Stmt parse_stmt() {
        Stmt s;
        s.node_id = take_ident("a node id");
        s.block = take_ident("a block name");
        const BlockSpec* spec = catalog_.lookup_block(s.block);
        if (!spec) err("unknown block '" + s.block + "'");
        if (spec->category == Category::hat || spec->category == Category::reporter)
            err("'" + s.block + "' cannot appear as a statement");
        if (at_punct("(")) parse_args(*spec, s.args, s.fields);
        size_t substack_count = spec->substack_ports().size();
        for (size_t i = 0; i < substack_count; ++i) {
            if (i == 0) {
                expect_punct("{");
            } else {
                expect_keyword("else");
                expect_punct("{");
            }
            s.substacks.push_back(parse_body(*spec));
        }
        return s;
    }

    void parse_args(const BlockSpec& spec, std::map<std::string, ExprNode>& args,
                    std::map<std::string, std::string>& fields) {
        expect_punct("(");
        bool first = true;
        while (!at_punct(")")) {
            if (!first) expect_punct(",");
            first = false;
            std::string name = take_ident("a port or field id");
            if (at_punct(":=")) {
                advance();
                if (!spec.field(name))
                    err("'" + spec.name + "' has no field '" + name + "'");
                if (cur_.kind != Token::Kind::string) err("field values are string literals");
                fields[name] = std::get<std::string>(cur_.value);
                advance();
            } else {
                expect_punct("=");
                const PortSpec* port = spec.in_port(name);
                if (!port || port->type == ValueType::exec)
                    err("'" + spec.name + "' has no value port '" + name + "'");
                args[name] = parse_expr();
            }
        }
        expect_punct(")");
    }

    ExprNode parse_expr() {
        ExprNode e;
        switch (cur_.kind) {
            case Token::Kind::number:
            case Token::Kind::string:
            case Token::Kind::boolean:
                e.kind = ExprNode::Kind::constant;
                e.value = cur_.value;
                advance();
                return e;
            case Token::Kind::ident: {
                e.kind = ExprNode::Kind::reporter;
                e.block = cur_.text;
                advance();
                const BlockSpec* spec = catalog_.lookup_block(e.block);
                if (!spec || spec->category != Category::reporter)
                    err("'" + e.block + "' is not a reporter block");
                if (at_punct("(")) parse_args(*spec, e.children, e.fields);
                return e;
            }
            default:
                err("expected an expression");
        }
    }

    static void collect_from_stmt(const Stmt& s, std::set<std::string>& vars) {
        if (s.block == "SetVariable") {
            auto it = s.fields.find("VARIABLE");
            if (it != s.fields.end()) vars.insert(it->second);
        }
        for (const auto& sub : s.substacks)
            for (const Stmt& child : sub) collect_from_stmt(child, vars);
    }

    void collect_variables(CompiledPlan& plan) const {
        std::set<std::string> vars;
        for (const Script& script : plan.scripts)
            for (const Stmt& s : script.body) collect_from_stmt(s, vars);
        plan.declared_variables.assign(vars.begin(), vars.end());
    }

    Lexer lexer_;
    const Catalog& catalog_;
    Token cur_;
};

}  // namespace

CompiledPlan parse_script(const std::string& text, const Catalog& catalog) {
    Parser parser(text, catalog);
    return parser.parse();
}

}  // namespace graphblocks
