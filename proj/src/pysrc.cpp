#include "depfix/pysrc.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace depfix::py {

namespace {

enum class TokKind { name, number, str, op };

struct Token {
    TokKind kind;
    std::string text;
    int line;  // 1-based
    int col;   // 0-based byte offset in line
};

struct LogicalLine {
    int first_line = 0;
    int last_line = 0;
    int indent = 0;  // tab-expanded width of leading whitespace
    std::vector<Token> tokens;
};

const std::unordered_set<std::string>& keywords() {
    static const std::unordered_set<std::string> kw = {
        "False", "None",   "True",  "and",    "as",     "assert", "async",  "await",
        "break", "class",  "continue", "def", "del",    "elif",   "else",   "except",
        "finally", "for",  "from",  "global", "if",     "import", "in",     "is",
        "lambda", "nonlocal", "not", "or",    "pass",   "raise",  "return", "try",
        "while", "with",  "yield"};
    return kw;
}

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_string_prefix(const std::string& s) {
    if (s.size() > 2) return false;
    for (char c : s) {
        char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (l != 'r' && l != 'b' && l != 'u' && l != 'f') return false;
    }
    return true;
}

class Tokenizer {
public:
    Tokenizer(std::string_view src, bool lenient) : src_(src), lenient_(lenient) {}

    std::vector<LogicalLine> run() {
        std::vector<LogicalLine> logical;
        std::vector<Token> current;
        std::vector<std::pair<char, int>> bracket_stack;  // open char, line

        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') {
                if (bracket_stack.empty()) flush(logical, current);
                advance();
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
                advance();
                continue;
            }
            if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
                advance();
                advance();
                continue;
            }
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
                continue;
            }
            if (c == '"' || c == '\'') {
                current.push_back(lex_string(""));
                continue;
            }
            if (is_name_start(c)) {
                Token t = lex_name();
                if (is_string_prefix(t.text) && pos_ < src_.size() &&
                    (src_[pos_] == '"' || src_[pos_] == '\'')) {
                    current.push_back(lex_string(t.text));
                } else {
                    current.push_back(std::move(t));
                }
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                current.push_back(lex_number());
                continue;
            }
            // operator / punctuation
            if (c == '(' || c == '[' || c == '{') {
                bracket_stack.emplace_back(c, line_);
            } else if (c == ')' || c == ']' || c == '}') {
                if (bracket_stack.empty()) {
                    if (!lenient_)
                        throw ParseError(std::string("unmatched '") + c + "'", line_, col_);
                } else {
                    bracket_stack.pop_back();
                }
            }
            current.push_back(lex_operator());
        }
        if (!bracket_stack.empty() && !lenient_)
            throw ParseError(std::string("unclosed '") + bracket_stack.front().first + "'",
                             bracket_stack.front().second, 0);
        flush(logical, current);
        return logical;
    }

private:
    void flush(std::vector<LogicalLine>& logical, std::vector<Token>& current) {
        if (current.empty()) return;
        LogicalLine ll;
        ll.first_line = current.front().line;
        ll.last_line = current.back().line;
        ll.indent = indent_of_line_[current.front().line];
        ll.tokens = std::move(current);
        current.clear();
        logical.push_back(std::move(ll));
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 0;
            at_line_start_ = true;
            indent_width_ = 0;
        } else {
            if (at_line_start_) {
                if (src_[pos_] == ' ')
                    ++indent_width_;
                else if (src_[pos_] == '\t')
                    indent_width_ = (indent_width_ / 8 + 1) * 8;
                else {
                    at_line_start_ = false;
                    indent_of_line_[line_] = indent_width_;
                }
            }
            ++col_;
        }
        ++pos_;
    }

    Token lex_name() {
        Token t{TokKind::name, {}, line_, col_};
        while (pos_ < src_.size() && is_name_char(src_[pos_])) {
            t.text += src_[pos_];
            advance();
        }
        return t;
    }

    Token lex_number() {
        Token t{TokKind::number, {}, line_, col_};
        while (pos_ < src_.size() &&
               (is_name_char(src_[pos_]) || src_[pos_] == '.' ||
                ((src_[pos_] == '+' || src_[pos_] == '-') && !t.text.empty() &&
                 (t.text.back() == 'e' || t.text.back() == 'E')))) {
            t.text += src_[pos_];
            advance();
        }
        return t;
    }

    Token lex_string(const std::string& prefix) {
        Token t{TokKind::str, prefix, line_, col_ - static_cast<int>(prefix.size())};
        char quote = src_[pos_];
        bool raw = prefix.find('r') != std::string::npos || prefix.find('R') != std::string::npos;
        bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote;
        int start_line = line_, start_col = col_;
        auto take = [&] {
            t.text += src_[pos_];
            advance();
        };
        take();
        if (triple) {
            take();
            take();
            while (pos_ < src_.size()) {
                if (src_[pos_] == quote && pos_ + 2 < src_.size() &&
                    src_[pos_ + 1] == quote && src_[pos_ + 2] == quote) {
                    take();
                    take();
                    take();
                    return t;
                }
                if (!raw && src_[pos_] == '\\' && pos_ + 1 < src_.size()) take();
                take();
            }
        } else {
            while (pos_ < src_.size() && src_[pos_] != '\n') {
                if (src_[pos_] == quote) {
                    take();
                    return t;
                }
                if (!raw && src_[pos_] == '\\' && pos_ + 1 < src_.size()) take();
                take();
            }
        }
        if (!lenient_) throw ParseError("unterminated string literal", start_line, start_col);
        return t;
    }

    Token lex_operator() {
        static const std::array<std::string_view, 27> multi = {
            "**=", "//=", ">>=", "<<=", "...", "!=", ">=", "<=", "==", "->", ":=",
            "+=",  "-=",  "*=",  "/=",  "%=",  "&=", "|=", "^=", "@=", "**", "//",
            ">>",  "<<",  "&&",  "||",  "~~"};
        Token t{TokKind::op, {}, line_, col_};
        std::string_view rest = src_.substr(pos_);
        for (std::string_view m : multi) {
            if (rest.substr(0, m.size()) == m) {
                for (std::size_t i = 0; i < m.size(); ++i) {
                    t.text += src_[pos_];
                    advance();
                }
                return t;
            }
        }
        t.text = src_[pos_];
        advance();
        return t;
    }

    std::string_view src_;
    bool lenient_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 0;
    bool at_line_start_ = true;
    int indent_width_ = 0;
    std::unordered_map<int, int> indent_of_line_;
};

bool tok_is(const Token& t, std::string_view text) {
    return t.text == text;
}

// Extracts call sites from one logical line's tokens.
void extract_calls(const std::vector<Token>& toks, std::vector<CallSite>& out) {
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind != TokKind::name) continue;
        if (keywords().count(toks[i].text)) continue;
        // must start a fresh primary
        if (i > 0) {
            const Token& prev = toks[i - 1];
            if (prev.kind == TokKind::name) {
                if (!keywords().count(prev.text)) continue;
                if (prev.text == "def" || prev.text == "class") continue;
            } else if (prev.kind == TokKind::number || prev.kind == TokKind::str) {
                continue;
            } else if (prev.text == "." || prev.text == ")" || prev.text == "]" ||
                       prev.text == "}") {
                // attribute on an expression receiver; handled below as chained
                continue;
            }
        }
        std::vector<std::string> segs{toks[i].text};
        std::size_t j = i + 1;
        while (j + 1 < toks.size() && tok_is(toks[j], ".") && toks[j + 1].kind == TokKind::name) {
            segs.push_back(toks[j + 1].text);
            j += 2;
        }
        if (j < toks.size() && tok_is(toks[j], "(")) {
            CallSite cs;
            cs.callee = segs;
            cs.callee_text = segs[0];
            for (std::size_t k = 1; k < segs.size(); ++k) cs.callee_text += "." + segs[k];
            cs.line = toks[i].line;
            cs.col = toks[i].col;
            out.push_back(std::move(cs));
        }
    }
    // chained calls: ").name(" or "].name("
    for (std::size_t i = 0; i + 2 < toks.size(); ++i) {
        if ((tok_is(toks[i], ")") || tok_is(toks[i], "]")) && tok_is(toks[i + 1], ".") &&
            toks[i + 2].kind == TokKind::name) {
            std::vector<std::string> segs{toks[i + 2].text};
            std::size_t j = i + 3;
            while (j + 1 < toks.size() && tok_is(toks[j], ".") &&
                   toks[j + 1].kind == TokKind::name) {
                segs.push_back(toks[j + 1].text);
                j += 2;
            }
            if (j < toks.size() && tok_is(toks[j], "(")) {
                CallSite cs;
                cs.callee = segs;
                cs.callee_text = segs[0];
                for (std::size_t k = 1; k < segs.size(); ++k) cs.callee_text += "." + segs[k];
                cs.line = toks[i + 2].line;
                cs.col = toks[i + 2].col;
                cs.chained = true;
                out.push_back(std::move(cs));
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const CallSite& a, const CallSite& b) {
        return std::pair(a.line, a.col) < std::pair(b.line, b.col);
    });
}

// Parses dotted name starting at toks[i]; returns segments and advances i past it.
std::vector<std::string> take_dotted(const std::vector<Token>& toks, std::size_t& i) {
    std::vector<std::string> segs;
    if (i >= toks.size() || toks[i].kind != TokKind::name) return segs;
    segs.push_back(toks[i].text);
    ++i;
    while (i + 1 < toks.size() && tok_is(toks[i], ".") && toks[i + 1].kind == TokKind::name) {
        segs.push_back(toks[i + 1].text);
        i += 2;
    }
    return segs;
}

std::string join_segs(const std::vector<std::string>& segs) {
    std::string out;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (i) out += '.';
        out += segs[i];
    }
    return out;
}

// Parses `import a.b as c, d.e` / `from m import x as y, z` bindings.
void parse_import(const LogicalLine& ll, const std::string& stmt_text,
                  std::vector<ImportBinding>& out, std::vector<std::string>& warnings) {
    const auto& toks = ll.tokens;
    std::size_t i = 0;
    if (tok_is(toks[i], "import")) {
        ++i;
        while (i < toks.size()) {
            auto segs = take_dotted(toks, i);
            if (segs.empty()) break;
            ImportBinding b;
            b.target = join_segs(segs);
            b.line = ll.first_line;
            b.statement = stmt_text;
            if (i < toks.size() && tok_is(toks[i], "as") && i + 1 < toks.size()) {
                b.local = toks[i + 1].text;
                b.form = ImportForm::import_as;
                i += 2;
            } else {
                b.local = segs[0];
                b.target = segs[0];  // `import a.b` binds `a` to package a
                b.form = ImportForm::plain;
            }
            out.push_back(std::move(b));
            if (i < toks.size() && tok_is(toks[i], ","))
                ++i;
            else
                break;
        }
    } else if (tok_is(toks[i], "from")) {
        ++i;
        auto base = take_dotted(toks, i);
        if (base.empty() || i >= toks.size() || !tok_is(toks[i], "import")) return;
        ++i;
        if (i < toks.size() && tok_is(toks[i], "*")) {
            warnings.push_back("line " + std::to_string(ll.first_line) +
                               ": star import from '" + join_segs(base) + "' ignored");
            return;
        }
        bool parens = i < toks.size() && tok_is(toks[i], "(");
        if (parens) ++i;
        while (i < toks.size()) {
            if (toks[i].kind != TokKind::name) break;
            ImportBinding b;
            std::string member = toks[i].text;
            b.target = join_segs(base) + "." + member;
            b.line = ll.first_line;
            b.statement = stmt_text;
            ++i;
            if (i < toks.size() && tok_is(toks[i], "as") && i + 1 < toks.size()) {
                b.local = toks[i + 1].text;
                b.form = ImportForm::from_import_as;
                i += 2;
            } else {
                b.local = member;
                b.form = ImportForm::from_import;
            }
            out.push_back(std::move(b));
            if (i < toks.size() && tok_is(toks[i], ","))
                ++i;
            else
                break;
        }
    }
}

}  // namespace

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            if (pos < text.size()) lines.emplace_back(text.substr(pos));
            break;
        }
        std::string line(text.substr(pos, nl - pos));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        pos = nl + 1;
    }
    return lines;
}

int ModuleIndex::enclosing_function(int line) const {
    int best = -1;
    for (std::size_t i = 0; i < functions.size(); ++i) {
        const auto& f = functions[i];
        if (line >= f.start_line && line <= f.end_line) {
            if (best < 0 || f.start_line >= functions[best].start_line)
                best = static_cast<int>(i);
        }
    }
    return best;
}

ModuleIndex parse_module(std::string_view source, bool lenient) {
    ModuleIndex mod;
    mod.lines = split_lines(source);

    Tokenizer tz(source, lenient);
    std::vector<LogicalLine> logical = tz.run();

    struct Scope {
        enum Kind { klass, func } kind;
        int header_indent;
        std::string name;
        int func_index;  // -1 for classes
    };
    std::vector<Scope> stack;

    auto innermost_func = [&]() -> int {
        for (auto it = stack.rbegin(); it != stack.rend(); ++it)
            if (it->kind == Scope::func) return it->func_index;
        return -1;
    };

    for (const LogicalLine& ll : logical) {
        while (!stack.empty() && ll.indent <= stack.back().header_indent) stack.pop_back();

        // extend spans of all enclosing functions
        for (const Scope& s : stack)
            if (s.kind == Scope::func)
                mod.functions[s.func_index].end_line =
                    std::max(mod.functions[s.func_index].end_line, ll.last_line);

        const auto& toks = ll.tokens;
        std::size_t first = 0;
        bool is_async = toks.size() > 1 && tok_is(toks[0], "async");
        if (is_async) first = 1;

        if (first < toks.size() && tok_is(toks[first], "def") && first + 1 < toks.size() &&
            toks[first + 1].kind == TokKind::name) {
            FunctionDef fn;
            std::string prefix;
            for (const Scope& s : stack) prefix += s.name + ".";
            fn.qualified_name = prefix + toks[first + 1].text;
            fn.start_line = ll.first_line;
            fn.end_line = ll.last_line;
            fn.parent = innermost_func();
            int idx = static_cast<int>(mod.functions.size());
            mod.functions.push_back(std::move(fn));
            extract_calls(toks, mod.functions[idx].calls);
            stack.push_back(Scope{Scope::func, ll.indent, toks[first + 1].text, idx});
            continue;
        }
        if (first < toks.size() && tok_is(toks[first], "class") && first + 1 < toks.size() &&
            toks[first + 1].kind == TokKind::name) {
            // class header may contain base-class calls; treat as non-function scope
            stack.push_back(Scope{Scope::klass, ll.indent, toks[first + 1].text, -1});
            continue;
        }

        int fidx = innermost_func();
        if (!toks.empty() && (tok_is(toks[0], "import") || tok_is(toks[0], "from"))) {
            std::string stmt = mod.lines[ll.first_line - 1];
            auto& dest = fidx >= 0 ? mod.functions[fidx].imports : mod.module_imports;
            parse_import(ll, stmt, dest, mod.warnings);
            continue;
        }

        std::vector<CallSite> calls;
        extract_calls(toks, calls);

        // single-name assignment `v = <call>(...)`
        if (toks.size() >= 3 && toks[0].kind == TokKind::name && tok_is(toks[1], "=")) {
            AssignStmt as;
            as.target = toks[0].text;
            as.line = ll.first_line;
            std::size_t i = 2;
            auto rhs = take_dotted(toks, i);
            if (!rhs.empty() && i < toks.size() && tok_is(toks[i], "(")) as.rhs_callee = rhs;
            (fidx >= 0 ? mod.functions[fidx].assigns : mod.module_assigns).push_back(std::move(as));
        }

        auto& call_dest = fidx >= 0 ? mod.functions[fidx].calls : mod.module_calls;
        for (auto& c : calls) call_dest.push_back(std::move(c));
    }

    for (auto& fn : mod.functions) {
        std::stable_sort(fn.calls.begin(), fn.calls.end(), [](const CallSite& a, const CallSite& b) {
            return std::pair(a.line, a.col) < std::pair(b.line, b.col);
        });
    }
    std::stable_sort(mod.functions.begin(), mod.functions.end(),
                     [](const FunctionDef& a, const FunctionDef& b) {
                         return a.start_line < b.start_line;
                     });
    return mod;
}

}  // namespace depfix::py
