// SPDX-License-Identifier: Apache-2.0
#pragma once

// Minimal TOML subset used by the scenario file format: bare keys, [table]
// and [[array-of-table]] headers, numbers, booleans, quoted strings, and
// (nested, possibly multi-line) arrays. No date/time types, no dotted keys,
// no inline tables.

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace wspso::toml {

struct Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value>;

struct Value {
    enum class Kind { Number, Boolean, String, Arr, Tbl };
    Kind kind = Kind::Number;
    double number = 0.0;
    bool boolean = false;
    std::string str;
    Array arr;
    std::vector<Table> tables; ///< for array-of-tables entries
    Table tbl;

    bool is_number() const { return kind == Kind::Number; }
    bool is_array() const { return kind == Kind::Arr; }
    bool is_table() const { return kind == Kind::Tbl; }
};

/// Parse document text; throws ParseError with a line number on bad input.
Table parse(const std::string& text);

/// Accessors that throw ParseError naming the key when missing/mistyped.
const Value& require(const Table& t, const std::string& key);
double require_number(const Table& t, const std::string& key);
long long require_integer(const Table& t, const std::string& key);
const Array& require_array(const Table& t, const std::string& key);
double number_or(const Table& t, const std::string& key, double fallback);

} // namespace wspso::toml
