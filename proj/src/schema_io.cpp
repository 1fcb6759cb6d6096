#include "fusemine/schema_io.hpp"

#include "fusemine/errors.hpp"

namespace fusemine {

namespace {

std::string_view kind_name(AttrKind k) { return k == AttrKind::Numeric ? "numeric" : "nominal"; }

std::string_view role_name(AttrRole r) {
  switch (r) {
    case AttrRole::Id: return "id";
    case AttrRole::Input: return "input";
    case AttrRole::Class: return "class";
  }
  return "input";
}

}  // namespace

nlohmann::json schema_to_json(const std::vector<AttributeSpec>& specs) {
  auto doc = nlohmann::json::array();
  for (const auto& s : specs) {
    nlohmann::json a;
    a["name"] = s.name;
    a["kind"] = kind_name(s.kind);
    if (s.is_nominal()) a["labels"] = s.labels;
    a["role"] = role_name(s.role);
    doc.push_back(std::move(a));
  }
  return doc;
}

std::vector<AttributeSpec> schema_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw SchemaMismatch("schema must be a JSON array of attributes");
  std::vector<AttributeSpec> out;
  try {
    for (const auto& a : doc) {
      AttributeSpec s;
      s.name = a.at("name").get<std::string>();
      const auto kind = a.at("kind").get<std::string>();
      if (kind == "numeric")
        s.kind = AttrKind::Numeric;
      else if (kind == "nominal")
        s.kind = AttrKind::Nominal;
      else
        throw SchemaMismatch("unknown attribute kind '" + kind + "'");
      if (a.contains("labels")) s.labels = a.at("labels").get<std::vector<std::string>>();
      const auto role = a.value("role", std::string("input"));
      if (role == "id")
        s.role = AttrRole::Id;
      else if (role == "input")
        s.role = AttrRole::Input;
      else if (role == "class")
        s.role = AttrRole::Class;
      else
        throw SchemaMismatch("unknown attribute role '" + role + "'");
      s.validate();
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("malformed schema: ") + e.what());
  }
  return out;
}

void save_bundle(const SourceBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& name : bundle.ordered_names()) {
    const auto& t = bundle.at(name);
    doc[name] = schema_to_json(t.specs());
    save_csv(t, dir / (name + ".csv"));
  }
  write_file_atomic(dir / "schema.json", doc.dump(2) + "\n");
}

SourceBundle load_bundle(const std::filesystem::path& dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(dir / "schema.json"));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("malformed schema.json: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaMismatch("schema.json must map source names to schemas");
  SourceBundle bundle;
  for (const auto& [name, schema] : doc.items()) {
    auto specs = schema_from_json(schema);
    bundle.sources.emplace(name, load_csv(dir / (name + ".csv"), specs));
  }
  bundle.validate_ids();
  return bundle;
}

}  // namespace fusemine
