// SPDX-License-Identifier: Apache-2.0
#include "toml_lite.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "wspso/errors.hpp"

namespace wspso::toml {
namespace {

[[noreturn]] void fail(int line, const std::string& what) {
    throw ParseError("toml parse error, line " + std::to_string(line) + ": " + what);
}

// Strip a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"') in_string = !in_string;
        if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

int bracket_balance(const std::string& s) {
    int depth = 0;
    bool in_string = false;
    for (char c : s) {
        if (c == '"') in_string = !in_string;
        if (in_string) continue;
        if (c == '[') ++depth;
        if (c == ']') --depth;
    }
    return depth;
}

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
};

Value parse_scalar(Cursor& c);

char text_at(Cursor& c) {
    const char ch = c.text[c.pos];
    ++c.pos;
    return ch;
}

Value parse_array(Cursor& c) {
    Value v;
    v.kind = Value::Kind::Arr;
    ++c.pos; // consume '['
    c.skip_ws();
    while (!c.done() && c.peek() != ']') {
        v.arr.push_back(parse_scalar(c));
        c.skip_ws();
        if (!c.done() && c.peek() == ',') {
            ++c.pos;
            c.skip_ws();
        }
    }
    if (c.done()) fail(c.line, "unterminated array");
    ++c.pos; // consume ']'
    return v;
}

Value parse_scalar(Cursor& c) {
    c.skip_ws();
    if (c.done()) fail(c.line, "expected a value");
    const char ch = c.peek();
    if (ch == '[') return parse_array(c);
    Value v;
    if (ch == '"') {
        v.kind = Value::Kind::String;
        ++c.pos;
        while (!c.done() && c.peek() != '"') {
            v.str.push_back(text_at(c));
        }
        if (c.done()) fail(c.line, "unterminated string");
        ++c.pos;
        return v;
    }
    // bare token: number or boolean
    std::string tok;
    while (!c.done() && c.peek() != ',' && c.peek() != ']' &&
           !std::isspace(static_cast<unsigned char>(c.peek()))) {
        tok.push_back(c.peek());
        ++c.pos;
    }
    if (tok == "true" || tok == "false") {
        v.kind = Value::Kind::Boolean;
        v.boolean = (tok == "true");
        return v;
    }
    char* end = nullptr;
    const double num = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(num))
        fail(c.line, "bad value '" + tok + "'");
    v.kind = Value::Kind::Number;
    v.number = num;
    return v;
}

} // namespace

Table parse(const std::string& text) {
    Table root;
    Table* current = &root;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            const bool is_array = line.size() > 1 && line[1] == '[';
            const std::string close = is_array ? "]]" : "]";
            const std::size_t end = line.find(close);
            if (end == std::string::npos || trim(line.substr(end + close.size())) != "")
                fail(line_no, "malformed table header");
            const std::string name = trim(line.substr(is_array ? 2 : 1, end - (is_array ? 2 : 1)));
            if (name.empty()) fail(line_no, "empty table name");
            Value& slot = root[name];
            if (is_array) {
                slot.kind = Value::Kind::Tbl;
                slot.tables.emplace_back();
                current = &slot.tables.back();
            } else {
                slot.kind = Value::Kind::Tbl;
                current = &slot.tbl;
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail(line_no, "empty key");
        std::string value_text = trim(line.substr(eq + 1));
        // Multi-line arrays: keep appending lines until brackets balance.
        int depth = bracket_balance(value_text);
        while (depth > 0 && std::getline(in, raw)) {
            ++line_no;
            const std::string more = trim(strip_comment(raw));
            value_text += " " + more;
            depth = bracket_balance(value_text);
        }
        if (depth != 0) fail(line_no, "unbalanced brackets in value for '" + key + "'");

        Cursor c{value_text, 0, line_no};
        Value v = parse_scalar(c);
        c.skip_ws();
        if (!c.done()) fail(line_no, "trailing characters after value for '" + key + "'");
        if (current->count(key)) fail(line_no, "duplicate key '" + key + "'");
        (*current)[key] = std::move(v);
    }
    return root;
}

const Value& require(const Table& t, const std::string& key) {
    const auto it = t.find(key);
    if (it == t.end()) throw ParseError("missing required key '" + key + "'");
    return it->second;
}

double require_number(const Table& t, const std::string& key) {
    const Value& v = require(t, key);
    if (!v.is_number()) throw ParseError("key '" + key + "' must be a number");
    return v.number;
}

long long require_integer(const Table& t, const std::string& key) {
    const double d = require_number(t, key);
    const long long i = static_cast<long long>(d);
    if (static_cast<double>(i) != d) throw ParseError("key '" + key + "' must be an integer");
    return i;
}

const Array& require_array(const Table& t, const std::string& key) {
    const Value& v = require(t, key);
    if (!v.is_array()) throw ParseError("key '" + key + "' must be an array");
    return v.arr;
}

double number_or(const Table& t, const std::string& key, double fallback) {
    const auto it = t.find(key);
    if (it == t.end()) return fallback;
    if (!it->second.is_number()) throw ParseError("key '" + key + "' must be a number");
    return it->second.number;
}

} // namespace wspso::toml
