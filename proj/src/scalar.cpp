#include "graphblocks/scalar.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace graphblocks {

std::string format_number(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    if (v == 0.0) return "0";  // folds -0 as well
    if (v == std::floor(v) && std::abs(v) < 9.007199254740992e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

std::string format_scalar(const Scalar& s) {
    if (is_number(s)) return format_number(std::get<double>(s));
    if (is_boolean(s)) return std::get<bool>(s) ? "true" : "false";
    return std::get<std::string>(s);
}

std::optional<double> parse_number(const std::string& text) {
    size_t begin = 0, end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (begin == end) return std::nullopt;
    std::string trimmed = text.substr(begin, end - begin);
    const char* cstr = trimmed.c_str();
    char* parse_end = nullptr;
    double v = std::strtod(cstr, &parse_end);
    if (parse_end != cstr + trimmed.size()) return std::nullopt;
    if (std::isnan(v) || std::isinf(v)) return std::nullopt;
    return v;
}

std::optional<double> to_number(const Scalar& s) {
    if (is_number(s)) {
        double v = std::get<double>(s);
        if (std::isnan(v)) return std::nullopt;
        return v;
    }
    if (is_boolean(s)) return std::get<bool>(s) ? 1.0 : 0.0;
    return parse_number(std::get<std::string>(s));
}

Scalar scalar_from_json(const nlohmann::json& j) {
    if (j.is_boolean()) return Scalar(j.get<bool>());
    if (j.is_number()) return Scalar(j.get<double>());
    return Scalar(j.get<std::string>());
}

nlohmann::json scalar_to_json(const Scalar& s) {
    if (is_boolean(s)) return std::get<bool>(s);
    if (is_number(s)) {
        double v = std::get<double>(s);
        // Keep canonical JSON clean for integral values.
        if (v == std::floor(v) && std::abs(v) < 9.007199254740992e15)
            return static_cast<std::int64_t>(v);
        return v;
    }
    return std::get<std::string>(s);
}

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace graphblocks
