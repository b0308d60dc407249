#pragma once

#include <charconv>
#include <complex>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "p53dde/dde_sim.hpp"
#include "p53dde/errors.hpp"
#include "p53dde/params.hpp"

namespace p53dde {

// All output formatting goes through these helpers so that identical inputs
// produce byte-identical files: std::to_chars is locale-independent, and 17
// significant digits round-trip any double exactly.

inline std::string format_double(double v) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Three significant digits, for table columns where magnitude is the point.
inline std::string format_brief(double v) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 2);
    return std::string(buf, res.ptr);
}

// Order-preserving JSON tree. Keys are emitted in insertion order, numbers
// through format_double; no external dependency because determinism of the
// byte stream is part of the output contract.
class Json {
  public:
    enum class Kind { Null, Bool, Int, Num, Str, Arr, Obj };

    Json() : kind_(Kind::Null) {}
    static Json boolean(bool b) {
        Json j;
        j.kind_ = Kind::Bool;
        j.flag_ = b;
        return j;
    }
    static Json integer(long long v) {
        Json j;
        j.kind_ = Kind::Int;
        j.int_ = v;
        return j;
    }
    static Json number(double v) {
        Json j;
        j.kind_ = Kind::Num;
        j.num_ = v;
        return j;
    }
    static Json str(std::string s) {
        Json j;
        j.kind_ = Kind::Str;
        j.str_ = std::move(s);
        return j;
    }
    static Json array() {
        Json j;
        j.kind_ = Kind::Arr;
        return j;
    }
    static Json object() {
        Json j;
        j.kind_ = Kind::Obj;
        return j;
    }
    static Json complex(std::complex<double> z) {
        Json j = object();
        j.set("re", number(z.real()));
        j.set("im", number(z.imag()));
        return j;
    }
    template <typename Seq>
    static Json number_array(const Seq& xs) {
        Json j = array();
        for (double x : xs) j.push(number(x));
        return j;
    }
    static Json complex_array(const std::vector<std::complex<double>>& xs) {
        Json j = array();
        for (const auto& x : xs) j.push(complex(x));
        return j;
    }

    Json& set(std::string key, Json v) {
        members_.emplace_back(std::move(key),
                              std::make_unique<Json>(std::move(v)));
        return *this;
    }
    Json& push(Json v) {
        items_.push_back(std::make_unique<Json>(std::move(v)));
        return *this;
    }

    std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        out.push_back('\n');
        return out;
    }

  private:
    static void escape(std::string& out, const std::string& s) {
        out.push_back('"');
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out += buf;
                    } else {
                        out.push_back(c);
                    }
            }
        }
        out.push_back('"');
    }

    void write(std::string& out, int indent, int depth) const {
        const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
        const std::string padc(static_cast<std::size_t>(indent) * depth, ' ');
        switch (kind_) {
            case Kind::Null: out += "null"; break;
            case Kind::Bool: out += flag_ ? "true" : "false"; break;
            case Kind::Int: out += format_int(int_); break;
            case Kind::Num: out += format_double(num_); break;
            case Kind::Str: escape(out, str_); break;
            case Kind::Arr:
                if (items_.empty()) {
                    out += "[]";
                    break;
                }
                out += "[\n";
                for (std::size_t i = 0; i < items_.size(); ++i) {
                    out += pad;
                    items_[i]->write(out, indent, depth + 1);
                    if (i + 1 < items_.size()) out.push_back(',');
                    out.push_back('\n');
                }
                out += padc + "]";
                break;
            case Kind::Obj:
                if (members_.empty()) {
                    out += "{}";
                    break;
                }
                out += "{\n";
                for (std::size_t i = 0; i < members_.size(); ++i) {
                    out += pad;
                    escape(out, members_[i].first);
                    out += ": ";
                    members_[i].second->write(out, indent, depth + 1);
                    if (i + 1 < members_.size()) out.push_back(',');
                    out.push_back('\n');
                }
                out += padc + "}";
                break;
        }
    }

    Kind kind_;
    bool flag_ = false;
    long long int_ = 0;
    double num_ = 0.0;
    std::string str_;
    std::vector<std::unique_ptr<Json>> items_;
    std::vector<std::pair<std::string, std::unique_ptr<Json>>> members_;
};

// Trajectory CSV: header `t,x1,y1,x2,y2[,z]`, one row per output node,
// 17-significant-digit floats, LF line endings.
inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,x1,y1,x2,y2";
    if (traj.dim == 5) out += ",z";
    out.push_back('\n');
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out += format_double(traj.times[i]);
        for (std::size_t c = 0; c < traj.dim; ++c) {
            out.push_back(',');
            out += format_double(traj.states[i][c]);
        }
        out.push_back('\n');
    }
    return out;
}

// Flat `key = value` config text; `#` starts a comment, blank lines are
// skipped. Values are parsed with exact decimal semantics (from_chars),
// independent of locale.
inline std::vector<std::pair<std::string, double>> parse_config_text(
    const std::string& text) {
    std::vector<std::pair<std::string, double>> kv;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line(text.data() + pos,
                              (eol == std::string::npos ? text.size() : eol) - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        auto trim = [](std::string_view s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                                  s.front() == '\r'))
                s.remove_prefix(1);
            while (!s.empty() &&
                   (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
                s.remove_suffix(1);
            return s;
        };
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected `key = value`");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        double num = 0.0;
        const auto res = std::from_chars(val.data(), val.data() + val.size(), num);
        if (res.ec != std::errc() || res.ptr != val.data() + val.size())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": `" + std::string(val) + "` is not a number");
        kv.emplace_back(std::string(key), num);
    }
    return kv;
}

inline Params params_from_config_text(const std::string& text) {
    Params p;
    p.apply(parse_config_text(text));
    p.validate();
    return p;
}

// Serialization that parse_config_text round-trips losslessly.
inline std::string params_to_config_text(const Params& p) {
    std::string out;
    auto line = [&](const char* k, double v) {
        out += k;
        out += " = ";
        out += format_double(v);
        out.push_back('\n');
    };
    line("a1", p.a1);
    line("a2", p.a2);
    line("b1", p.b1);
    line("b2", p.b2);
    line("b12", p.b12);
    line("c2", p.c2);
    line("d2", p.d2);
    line("d12", p.d12);
    line("a", p.a);
    out += "n = " + format_int(p.n) + "\n";
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) throw Error("error reading file: " + path);
    return text;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open file for writing: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out.good()) throw Error("error writing file: " + path);
}

} // namespace p53dde
