#pragma once

// Small random datasets shared by the unit tests and the acceptance run.

#include <random>
#include <string>
#include <vector>

#include "fusemine/table.hpp"

namespace fixture {

inline const std::vector<std::string>& levels() {
  static const std::vector<std::string> l{"Low", "Medium", "High"};
  return l;
}

inline fusemine::AttributeSpec status() {
  return fusemine::AttributeSpec::nominal("Status", {"Pass", "Fail", "Dropout"}, fusemine::AttrRole::Class);
}

// Nominal inputs, some driving the class, some copies or noisy copies of
// others, some pure noise.
inline fusemine::DataTable random_nominal(std::mt19937_64& rng, std::size_t attrs, std::size_t rows) {
  using namespace fusemine;
  std::vector<AttributeSpec> specs;
  for (std::size_t a = 0; a < attrs; ++a) specs.push_back(AttributeSpec::nominal("A" + std::to_string(a), levels()));
  specs.push_back(status());
  std::uniform_int_distribution<std::size_t> level(0, 2);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<int> kind(attrs);
  std::vector<std::size_t> parent(attrs, 0);
  for (std::size_t a = 0; a < attrs; ++a) {
    kind[a] = static_cast<int>(rng() % 4);
    if (a == 0 || kind[a] == 2) kind[a] = a == 0 ? 0 : 2;
    parent[a] = a == 0 ? 0 : rng() % a;
  }
  const double flip = 0.1 + 0.4 * u(rng);
  std::vector<Row> out;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t cls = level(rng);
    Row row;
    for (std::size_t a = 0; a < attrs; ++a) {
      std::size_t v = level(rng);
      if (kind[a] == 0 && u(rng) > flip) v = cls;
      if (kind[a] == 1) v = row[parent[a]].as_nominal();
      if (kind[a] == 2 && u(rng) > flip) v = row[parent[a]].as_nominal();
      row.push_back(Value::nominal(v));
    }
    row.push_back(Value::nominal(cls));
    out.push_back(row);
  }
  return DataTable(specs, out);
}

inline std::vector<std::size_t> column_codes(const fusemine::DataTable& t, std::size_t c) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < t.num_rows(); ++r) out.push_back(t.at(r, c).as_nominal());
  return out;
}

}  // namespace fixture
