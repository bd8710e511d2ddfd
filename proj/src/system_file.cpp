#include "weylsys/system_file.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "weylsys/errors.hpp"
#include "weylsys/parser.hpp"

namespace weylsys {
namespace {

using Json = nlohmann::ordered_json;

std::string endpoint(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) return rational_from_double(v.get<double>()).get_str();
  throw InputError("box endpoints must be strings or numbers");
}

}  // namespace

FormSystem SystemFile::system() const {
  if (s < 1) throw InputError("s must be positive");
  if (d < 2) throw InputError("d must be at least 2");
  if (r != static_cast<int>(forms.size()))
    throw InputError("r = " + std::to_string(r) + " but " + std::to_string(forms.size()) + " forms are listed");
  std::vector<Form> parsed;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    try {
      parsed.push_back(parse_polynomial(forms[i], s, d));
    } catch (const ParseError& e) {
      throw ParseError("form " + std::to_string(i + 1) + ": " + e.what(), e.position());
    }
  }
  return FormSystem(std::move(parsed));
}

LatticeBox SystemFile::lattice_box() const {
  if (box.empty()) return LatticeBox::unit(s);
  if (static_cast<int>(box.size()) != s) throw InputError("box must have s intervals");
  std::vector<std::pair<Rational, Rational>> intervals;
  for (const auto& [l, u] : box) intervals.emplace_back(parse_rational(l), parse_rational(u));
  return LatticeBox(std::move(intervals));
}

SystemFile SystemFile::from_system(const FormSystem& system, const LatticeBox& box, std::string name,
                                   std::string notes) {
  SystemFile f;
  f.name = std::move(name);
  f.notes = std::move(notes);
  f.s = system.num_vars();
  f.d = system.degree();
  f.r = system.num_forms();
  for (const auto& form : system.forms()) f.forms.push_back(format_polynomial(form));
  for (const auto& [l, u] : box.intervals()) f.box.emplace_back(l.get_str(), u.get_str());
  return f;
}

SystemFile SystemFile::parse(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw InputError("system file must be a JSON object");
  SystemFile f;
  try {
    f.schema_version = j.value("schema_version", 1);
    if (f.schema_version != 1) throw InputError("unsupported schema_version " + std::to_string(f.schema_version));
    if (j.contains("metadata")) {
      const auto& m = j.at("metadata");
      f.name = m.value("name", "");
      f.notes = m.value("notes", "");
    }
    f.s = j.at("s").get<int>();
    f.d = j.at("d").get<int>();
    f.forms = j.at("forms").get<std::vector<std::string>>();
    f.r = j.value("r", static_cast<int>(f.forms.size()));
    if (j.contains("box")) {
      for (const auto& side : j.at("box")) {
        if (!side.is_array() || side.size() != 2) throw InputError("box entries must be [lower, upper] pairs");
        f.box.emplace_back(endpoint(side[0]), endpoint(side[1]));
      }
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("invalid system file: ") + e.what());
  }
  f.system();
  f.lattice_box();
  return f;
}

SystemFile SystemFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open system file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string SystemFile::dump() const {
  Json j;
  j["schema_version"] = schema_version;
  j["metadata"] = {{"name", name}, {"notes", notes}};
  j["s"] = s;
  j["d"] = d;
  j["r"] = r;
  j["forms"] = forms;
  Json sides = Json::array();
  for (const auto& [l, u] : box) sides.push_back({l, u});
  j["box"] = sides;
  return j.dump(2) + "\n";
}

void SystemFile::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << dump();
}

}  // namespace weylsys
