#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qflab/forms.hpp"
#include "qflab/regions.hpp"

namespace qflab {

using Json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// %.17g, round-trip exact
std::string format_double(double v);

// Scalar values in configs and outputs: JSON numbers (integral -> exact),
// "p/q" strings, or arithmetic expressions over integers, rationals, sqrt()
// and pi ("sqrt(2)-1", "3/10", "2*pi").  Exactness survives iff no
// irrational leaf appears.
Scalar scalar_from_json(const Json& v, const char* what);
Json scalar_to_json(const Scalar& s);

Json form_to_json(const SymmetricForm& q);
SymmetricForm form_from_json(const Json& j);
Json inhom_to_json(const InhomForm& f);
InhomForm inhom_from_json(const Json& j);
Json region_to_json(const StarRegion& r);
StarRegion region_from_json(const Json& j);

// written via temp file + rename in the target directory
void atomic_write(const std::string& path, const std::string& content);

// CSV with '#'-prefixed header echo lines before the column row
std::string csv_document(const std::vector<std::string>& echo_lines,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<std::string>>& rows);

// strict-schema helper: every key of j must appear in allowed
void reject_unknown_keys(const Json& j, const std::vector<std::string>& allowed,
                         const char* where);

}  // namespace qflab
