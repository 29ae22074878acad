#pragma once

// Deterministic JSON writer: fixed key order (insertion order), numbers
// rendered by std::to_chars with 17 significant digits, stable whitespace.
// Output files produced through this writer are byte-identical across runs
// for identical inputs.

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pohozaev {

class JsonValue {
public:
    enum class Type { Null, Bool, Number, Int, String, Array, Object };

    JsonValue() : type_(Type::Null) {}
    static JsonValue null();
    static JsonValue boolean(bool b);
    static JsonValue number(double v);
    static JsonValue integer(long long v);
    static JsonValue str(std::string s);
    static JsonValue array();
    static JsonValue object();

    Type type() const { return type_; }

    // Array ops.
    JsonValue& push(JsonValue v);

    // Object ops (insertion order preserved; duplicate keys overwrite their
    // original slot, keeping the first position).
    JsonValue& set(const std::string& key, JsonValue v);

    // Serialize with 2-space indentation and trailing newline.
    std::string dump() const;

private:
    void write(std::string& out, int indent) const;

    Type type_;
    bool b_ = false;
    double num_ = 0.0;
    long long int_ = 0;
    std::string str_;
    std::vector<JsonValue> arr_;
    std::vector<std::pair<std::string, JsonValue>> obj_;
};

// Format one double exactly as the writer does (17 significant digits,
// shortest-general form; NaN/Inf render as null).
std::string format_number(double v);

// Atomically write text to a file (write temp + rename).
void write_text_file(const std::string& path, const std::string& content);

// Read a whole file into a string; throws on failure.
std::string read_text_file(const std::string& path);

// FNV-1a content hash rendered as 16 hex digits (used for input hashes).
std::string fnv1a_hex(const std::string& content);

}  // namespace pohozaev
