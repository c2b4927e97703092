#ifndef CCL_SCHEMA_HPP_
#define CCL_SCHEMA_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ccl {

/// Validates `doc` against a JSON-Schema subset sufficient for this
/// project's document shapes: `type` (string or list of strings),
/// `properties`, `required`, `additionalProperties` (boolean), `items`
/// (single schema), `minimum`, and `enum`. Returns human-readable violation
/// messages with JSON paths; an empty result means the document conforms.
std::vector<std::string> validate_schema(const nlohmann::json &schema,
                                         const nlohmann::json &doc);

} // namespace ccl

#endif // CCL_SCHEMA_HPP_
