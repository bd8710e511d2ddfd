#pragma once

#include <string>
#include <utility>
#include <vector>

#include "weylsys/form.hpp"

namespace weylsys {

/// On-disk description of a system of forms and a box (schema_version 1).
struct SystemFile {
  int schema_version = 1;
  std::string name;
  std::string notes;
  int s = 0;
  int d = 0;
  int r = 0;
  std::vector<std::string> forms;
  /// Rational endpoints as strings; empty means the unit box [-1, 1]^s.
  std::vector<std::pair<std::string, std::string>> box;

  FormSystem system() const;
  LatticeBox lattice_box() const;

  static SystemFile from_system(const FormSystem& system, const LatticeBox& box, std::string name = {},
                                std::string notes = {});
  static SystemFile parse(const std::string& json_text);
  static SystemFile load(const std::string& path);

  /// Canonical JSON text; dump(parse(dump(x))) == dump(x).
  std::string dump() const;
  void save(const std::string& path) const;
};

}  // namespace weylsys
