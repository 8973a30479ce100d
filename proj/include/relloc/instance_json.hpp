#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "relloc/model.hpp"

namespace relloc {

class InstanceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `{"universe":[...], "sigs":{name:[atoms]}, "fields":{name:[[a,b],...]}}`
nlohmann::json instance_to_json(const Instance& inst);

/// Atom sigs are taken from the atom names (SigName + index). Relations
/// missing from the document are empty.
Instance instance_from_json(const nlohmann::json& doc, const Model& m);
Instance load_instance_file(const std::string& path, const Model& m);

}  // namespace relloc
