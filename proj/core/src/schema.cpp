#include <ccl/schema.hpp>

namespace ccl {
namespace {

using nlohmann::json;

bool matches_type(const json &doc, const std::string &type) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    if (type == "number") return doc.is_number();
    if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
    return false;
}

void validate(const json &schema, const json &doc, const std::string &path,
              std::vector<std::string> &violations) {
    if (const auto type = schema.find("type"); type != schema.end()) {
        bool ok = false;
        if (type->is_string()) {
            ok = matches_type(doc, type->get<std::string>());
        } else if (type->is_array()) {
            for (const auto &candidate : *type)
                ok = ok || matches_type(doc, candidate.get<std::string>());
        }
        if (!ok) {
            violations.push_back(path + ": expected type " + type->dump() + ", got " +
                                 std::string(doc.type_name()));
            return; // structural mismatch; deeper checks would be noise
        }
    }

    if (const auto allowed = schema.find("enum"); allowed != schema.end()) {
        bool found = false;
        for (const auto &candidate : *allowed) found = found || candidate == doc;
        if (!found)
            violations.push_back(path + ": value " + doc.dump() + " not in enum " +
                                 allowed->dump());
    }

    if (const auto minimum = schema.find("minimum");
        minimum != schema.end() && doc.is_number()) {
        if (doc.get<double>() < minimum->get<double>())
            violations.push_back(path + ": value " + doc.dump() + " below minimum " +
                                 minimum->dump());
    }

    if (doc.is_object()) {
        if (const auto required = schema.find("required"); required != schema.end()) {
            for (const auto &key : *required)
                if (!doc.contains(key.get<std::string>()))
                    violations.push_back(path + ": missing required key '" +
                                         key.get<std::string>() + "'");
        }
        const auto properties = schema.find("properties");
        if (const auto additional = schema.find("additionalProperties");
            additional != schema.end() && additional->is_boolean() &&
            !additional->get<bool>()) {
            for (const auto &item : doc.items())
                if (properties == schema.end() || !properties->contains(item.key()))
                    violations.push_back(path + ": unexpected key '" + item.key() + "'");
        }
        if (properties != schema.end()) {
            for (const auto &property : properties->items())
                if (const auto it = doc.find(property.key()); it != doc.end())
                    validate(property.value(), *it, path + "." + property.key(),
                             violations);
        }
    }

    if (doc.is_array()) {
        if (const auto items = schema.find("items"); items != schema.end()) {
            for (std::size_t i = 0; i < doc.size(); ++i)
                validate(*items, doc[i], path + "[" + std::to_string(i) + "]", violations);
        }
    }
}

} // namespace

std::vector<std::string> validate_schema(const json &schema, const json &doc) {
    std::vector<std::string> violations;
    validate(schema, doc, "$", violations);
    return violations;
}

} // namespace ccl
