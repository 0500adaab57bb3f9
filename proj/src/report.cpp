#include "finslerkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fk {

Check make_check(std::string name, double residual, double tolerance) {
    return Check{std::move(name), residual, tolerance, residual < tolerance};
}

Json to_json(const Check& check) {
    Json j;
    j["name"] = check.name;
    j["max_residual"] = check.max_residual;
    j["tolerance"] = check.tolerance;
    j["pass"] = check.pass;
    return j;
}

namespace {

void write_number(std::ostream& out, double v) {
    if (!std::isfinite(v)) {
        out << "null";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    out << buf;
}

void newline(std::ostream& out, int indent, int level) {
    if (indent < 0) return;
    out << '\n' << std::string(static_cast<std::size_t>(indent * level), ' ');
}

void write_value(std::ostream& out, const Json& v, int indent, int level) {
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out << "{}";
                return;
            }
            out << '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out << ',';
                first = false;
                newline(out, indent, level + 1);
                out << Json(it.key()).dump() << (indent < 0 ? ":" : ": ");
                write_value(out, it.value(), indent, level + 1);
            }
            newline(out, indent, level);
            out << '}';
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out << "[]";
                return;
            }
            const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_primitive(); });
            out << '[';
            bool first = true;
            for (const auto& e : v) {
                if (!first) out << (flat && indent >= 0 ? ", " : ",");
                first = false;
                if (!flat) newline(out, indent, level + 1);
                write_value(out, e, indent, level + 1);
            }
            if (!flat) newline(out, indent, level);
            out << ']';
            return;
        }
        case Json::value_t::number_float:
            write_number(out, v.get<double>());
            return;
        default:
            out << v.dump();
            return;
    }
}

}  // namespace

void write_json(std::ostream& out, const Json& value, int indent) {
    write_value(out, value, indent, 0);
    out << '\n';
}

std::string dump_json(const Json& value, int indent) {
    std::ostringstream out;
    write_json(out, value, indent);
    return out.str();
}

}  // namespace fk
