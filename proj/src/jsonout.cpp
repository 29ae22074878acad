#include "pohozaev/jsonout.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pohozaev {

JsonValue JsonValue::null() { return JsonValue(); }

JsonValue JsonValue::boolean(bool b) {
    JsonValue v;
    v.type_ = Type::Bool;
    v.b_ = b;
    return v;
}

JsonValue JsonValue::number(double x) {
    JsonValue v;
    v.type_ = Type::Number;
    v.num_ = x;
    return v;
}

JsonValue JsonValue::integer(long long x) {
    JsonValue v;
    v.type_ = Type::Int;
    v.int_ = x;
    return v;
}

JsonValue JsonValue::str(std::string s) {
    JsonValue v;
    v.type_ = Type::String;
    v.str_ = std::move(s);
    return v;
}

JsonValue JsonValue::array() {
    JsonValue v;
    v.type_ = Type::Array;
    return v;
}

JsonValue JsonValue::object() {
    JsonValue v;
    v.type_ = Type::Object;
    return v;
}

JsonValue& JsonValue::push(JsonValue v) {
    arr_.push_back(std::move(v));
    return *this;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue v) {
    for (auto& kv : obj_) {
        if (kv.first == key) {
            kv.second = std::move(v);
            return *this;
        }
    }
    obj_.emplace_back(key, std::move(v));
    return *this;
}

std::string format_number(double v) {
    if (std::isnan(v) || std::isinf(v)) return "null";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void indent_to(std::string& out, int indent) {
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
}

}  // namespace

void JsonValue::write(std::string& out, int indent) const {
    switch (type_) {
        case Type::Null: out += "null"; break;
        case Type::Bool: out += b_ ? "true" : "false"; break;
        case Type::Number: out += format_number(num_); break;
        case Type::Int: out += std::to_string(int_); break;
        case Type::String: write_escaped(out, str_); break;
        case Type::Array: {
            if (arr_.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            for (std::size_t i = 0; i < arr_.size(); ++i) {
                indent_to(out, indent + 1);
                arr_[i].write(out, indent + 1);
                if (i + 1 < arr_.size()) out += ',';
                out += '\n';
            }
            indent_to(out, indent);
            out += ']';
            break;
        }
        case Type::Object: {
            if (obj_.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            for (std::size_t i = 0; i < obj_.size(); ++i) {
                indent_to(out, indent + 1);
                write_escaped(out, obj_[i].first);
                out += ": ";
                obj_[i].second.write(out, indent + 1);
                if (i + 1 < obj_.size()) out += ',';
                out += '\n';
            }
            indent_to(out, indent);
            out += '}';
            break;
        }
    }
}

std::string JsonValue::dump() const {
    std::string out;
    write(out, 0);
    out += '\n';
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
        f.write(content.data(),
                static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw std::runtime_error("rename failed: " + path);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string fnv1a_hex(const std::string& content) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : content) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace pohozaev
