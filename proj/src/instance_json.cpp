#include "relloc/instance_json.hpp"

#include <cctype>
#include <fstream>

namespace relloc {

nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json doc;
  doc["universe"] = nlohmann::json::array();
  for (const auto& a : inst.universe) doc["universe"].push_back(a.name);
  doc["sigs"] = nlohmann::json::object();
  for (const auto& [name, set] : inst.sigs) {
    auto arr = nlohmann::json::array();
    for (const Tuple& t : set.tuples()) arr.push_back(inst.universe[t[0]].name);
    doc["sigs"][name] = std::move(arr);
  }
  doc["fields"] = nlohmann::json::object();
  for (const auto& [name, set] : inst.fields) {
    auto arr = nlohmann::json::array();
    for (const Tuple& t : set.tuples())
      arr.push_back({inst.universe[t[0]].name, inst.universe[t[1]].name});
    doc["fields"][name] = std::move(arr);
  }
  return doc;
}

namespace {

std::string sig_of_atom(const std::string& name) {
  std::size_t end = name.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(name[end - 1]))) --end;
  if (end == 0 || end == name.size())
    throw InstanceFormatError("atom '" + name + "' is not of the form SigName<index>");
  return name.substr(0, end);
}

}  // namespace

Instance instance_from_json(const nlohmann::json& doc, const Model& m) {
  if (!doc.is_object() || !doc.contains("universe") || !doc["universe"].is_array())
    throw InstanceFormatError("instance document needs a \"universe\" array");
  std::vector<Atom> universe;
  for (const auto& a : doc["universe"]) {
    if (!a.is_string()) throw InstanceFormatError("universe entries must be strings");
    const std::string name = a.get<std::string>();
    const std::string sig = sig_of_atom(name);
    if (!m.find_sig(sig)) throw InstanceFormatError("atom '" + name + "' has unknown sig");
    for (const auto& prev : universe)
      if (prev.name == name) throw InstanceFormatError("duplicate atom '" + name + "'");
    universe.push_back({name, sig});
  }
  Instance inst = empty_instance(m, std::move(universe));
  auto atom = [&](const nlohmann::json& j) {
    if (!j.is_string()) throw InstanceFormatError("atoms must be strings");
    auto id = inst.find_atom(j.get<std::string>());
    if (!id) throw InstanceFormatError("atom '" + j.get<std::string>() + "' not in universe");
    return *id;
  };
  if (doc.contains("sigs")) {
    for (const auto& [name, atoms] : doc["sigs"].items()) {
      auto it = inst.sigs.find(name);
      if (it == inst.sigs.end()) throw InstanceFormatError("unknown sig '" + name + "'");
      for (const auto& a : atoms) it->second.insert({atom(a)});
    }
  }
  if (doc.contains("fields")) {
    for (const auto& [name, tuples] : doc["fields"].items()) {
      auto it = inst.fields.find(name);
      if (it == inst.fields.end()) throw InstanceFormatError("unknown field '" + name + "'");
      for (const auto& t : tuples) {
        if (!t.is_array() || t.size() != 2)
          throw InstanceFormatError("field '" + name + "' tuples must be pairs");
        it->second.insert({atom(t[0]), atom(t[1])});
      }
    }
  }
  return inst;
}

Instance load_instance_file(const std::string& path, const Model& m) {
  std::ifstream in(path);
  if (!in) throw InstanceFormatError("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InstanceFormatError(path + ": " + e.what());
  }
  return instance_from_json(doc, m);
}

}  // namespace relloc
