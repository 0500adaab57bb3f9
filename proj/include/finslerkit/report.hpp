#pragma once

// Named pass/fail checks and a JSON writer that prints every number with 17
// significant digits, so reports round-trip exactly.

#include <ostream>
#include <string>

#include "json.hpp"

namespace fk {

using Json = nlohmann::ordered_json;

struct Check {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// pass iff residual < tolerance; NaN never passes.
Check make_check(std::string name, double residual, double tolerance);
Json to_json(const Check& check);

// Non-finite numbers are written as null.
void write_json(std::ostream& out, const Json& value, int indent = 2);
std::string dump_json(const Json& value, int indent = 2);

}  // namespace fk
