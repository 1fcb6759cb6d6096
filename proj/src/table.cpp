#include "fusemine/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

#include "fusemine/errors.hpp"

namespace fusemine {

ParseError::ParseError(std::size_t row, std::size_t column, const std::string& what)
    : InputError(fmt::format("parse error at row {}, column {}: {}", row, column, what)),
      row_(row),
      column_(column) {}

DuplicateId::DuplicateId(long long id)
    : InputError(fmt::format("duplicate id {}", id)), id_(id) {}

namespace {

std::string join_ids(const std::vector<long long>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

IdMismatch::IdMismatch(std::vector<long long> ids)
    : InputError("ids not shared by every source: " + join_ids(ids)), ids_(std::move(ids)) {}

SyntaxError::SyntaxError(std::size_t line, const std::string& what)
    : InputError(fmt::format("syntax error at line {}: {}", line, what)), line_(line) {}

// ---------------------------------------------------------------------------

AttributeSpec AttributeSpec::numeric(std::string name, AttrRole role) {
  return AttributeSpec{std::move(name), AttrKind::Numeric, {}, role};
}

AttributeSpec AttributeSpec::nominal(std::string name, std::vector<std::string> labels,
                                     AttrRole role) {
  return AttributeSpec{std::move(name), AttrKind::Nominal, std::move(labels), role};
}

AttributeSpec AttributeSpec::id(std::string name) {
  return AttributeSpec{std::move(name), AttrKind::Numeric, {}, AttrRole::Id};
}

std::optional<std::size_t> AttributeSpec::label_index(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  return std::nullopt;
}

void AttributeSpec::validate() const {
  if (name.empty()) throw SchemaMismatch("attribute with empty name");
  if (kind == AttrKind::Nominal) {
    if (labels.empty()) throw SchemaMismatch("nominal attribute '" + name + "' has no labels");
    std::set<std::string_view> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size())
      throw SchemaMismatch("nominal attribute '" + name + "' has duplicate labels");
  } else if (!labels.empty()) {
    throw SchemaMismatch("numeric attribute '" + name + "' must not carry labels");
  }
  if (role == AttrRole::Id && kind != AttrKind::Numeric)
    throw SchemaMismatch("id attribute '" + name + "' must be numeric");
}

// ---------------------------------------------------------------------------

DataTable::DataTable(std::vector<AttributeSpec> specs, std::vector<Row> rows)
    : specs_(std::move(specs)), rows_(std::move(rows)) {
  std::size_t ids = 0, classes = 0;
  std::set<std::string_view> names;
  for (const auto& s : specs_) {
    s.validate();
    if (!names.insert(s.name).second) throw SchemaMismatch("duplicate column '" + s.name + "'");
    ids += s.role == AttrRole::Id;
    classes += s.role == AttrRole::Class;
  }
  if (ids > 1) throw SchemaMismatch("more than one id column");
  if (classes > 1) throw SchemaMismatch("more than one class column");

  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    if (row.size() != specs_.size())
      throw SchemaMismatch(fmt::format("row {} has {} values, expected {}", r, row.size(),
                                       specs_.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& v = row[c];
      const auto& s = specs_[c];
      if (v.is_missing()) continue;
      if (s.is_numeric() && !v.is_numeric())
        throw SchemaMismatch(fmt::format("row {} column '{}': expected numeric", r, s.name));
      if (s.is_nominal()) {
        if (!v.is_nominal())
          throw SchemaMismatch(fmt::format("row {} column '{}': expected nominal", r, s.name));
        if (v.as_nominal() >= s.labels.size())
          throw SchemaMismatch(
              fmt::format("row {} column '{}': label index out of range", r, s.name));
      }
    }
  }

  if (auto idc = id_column()) {
    std::set<long long> seen;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const auto& v = rows_[r][*idc];
      if (!v.is_numeric()) throw SchemaMismatch(fmt::format("row {} has a missing id", r));
      const double d = v.as_numeric();
      if (d < 0 || std::floor(d) != d || d > 9.0e15)
        throw SchemaMismatch(fmt::format("row {}: id must be a non-negative integer", r));
      if (!seen.insert(static_cast<long long>(d)).second)
        throw DuplicateId(static_cast<long long>(d));
    }
  }
}

std::optional<std::size_t> DataTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i)
    if (specs_[i].name == name) return i;
  return std::nullopt;
}

std::size_t DataTable::require_column(std::string_view name) const {
  if (auto i = column_index(name)) return *i;
  throw UnknownAttribute("unknown attribute '" + std::string(name) + "'");
}

std::optional<std::size_t> DataTable::id_column() const {
  for (std::size_t i = 0; i < specs_.size(); ++i)
    if (specs_[i].role == AttrRole::Id) return i;
  return std::nullopt;
}

std::optional<std::size_t> DataTable::class_column() const {
  for (std::size_t i = 0; i < specs_.size(); ++i)
    if (specs_[i].role == AttrRole::Class) return i;
  return std::nullopt;
}

std::vector<std::size_t> DataTable::input_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < specs_.size(); ++i)
    if (specs_[i].role == AttrRole::Input) out.push_back(i);
  return out;
}

std::vector<Value> DataTable::column(std::size_t col) const {
  std::vector<Value> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[col]);
  return out;
}

std::vector<long long> DataTable::ids() const {
  std::vector<long long> out;
  auto idc = id_column();
  if (!idc) return out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(static_cast<long long>(r[*idc].as_numeric()));
  return out;
}

long long DataTable::id_of(std::size_t row) const {
  auto idc = id_column();
  if (!idc) throw SchemaMismatch("table has no id column");
  return static_cast<long long>(rows_[row][*idc].as_numeric());
}

DataTable DataTable::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Row> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(rows_.at(r));
  return DataTable(specs_, std::move(out));
}

DataTable DataTable::select_columns(std::span<const std::size_t> cols) const {
  std::vector<AttributeSpec> specs;
  for (auto c : cols) specs.push_back(specs_.at(c));
  std::vector<Row> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) {
    Row nr;
    nr.reserve(cols.size());
    for (auto c : cols) nr.push_back(r[c]);
    out.push_back(std::move(nr));
  }
  return DataTable(std::move(specs), std::move(out));
}

DataTable DataTable::sorted_by_id() const {
  auto idc = id_column();
  if (!idc) return *this;
  std::vector<std::size_t> order(rows_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows_[a][*idc].as_numeric() < rows_[b][*idc].as_numeric();
  });
  return select_rows(order);
}

// ---------------------------------------------------------------------------

std::vector<std::string> SourceBundle::ordered_names() const {
  std::vector<std::string> out;
  for (auto n : {kTheory, kPractice, kOnline, kExam})
    if (sources.count(n)) out.emplace_back(n);
  for (const auto& [name, _] : sources)
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  return out;
}

std::vector<std::string> SourceBundle::input_source_names() const {
  auto all = ordered_names();
  std::erase(all, std::string(kExam));
  return all;
}

const DataTable& SourceBundle::at(std::string_view name) const {
  auto it = sources.find(name);
  if (it == sources.end()) throw IoError("bundle has no source '" + std::string(name) + "'");
  return it->second;
}

void SourceBundle::validate_ids() const {
  if (sources.empty()) throw IdMismatch({});
  std::set<long long> all;
  std::vector<std::set<long long>> per;
  for (const auto& name : ordered_names()) {
    const auto& t = sources.find(name)->second;
    if (!t.id_column()) throw SchemaMismatch("source '" + name + "' has no id column");
    auto ids = t.ids();
    per.emplace_back(ids.begin(), ids.end());
    all.insert(ids.begin(), ids.end());
  }
  std::vector<long long> bad;
  for (auto id : all)
    for (const auto& s : per)
      if (!s.count(id)) {
        bad.push_back(id);
        break;
      }
  if (!bad.empty()) throw IdMismatch(std::move(bad));
}

// ---------------------------------------------------------------------------

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

DataTable parse_csv(std::string_view text, std::span<const AttributeSpec> schema) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    lines.push_back(trim_cr(text.substr(start, pos - start)));
    start = pos + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw SchemaMismatch("csv has no header row");

  auto header = split_line(lines[0]);
  if (header.size() != schema.size())
    throw SchemaMismatch(fmt::format("header has {} columns, schema has {}", header.size(),
                                     schema.size()));
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] != schema[c].name)
      throw SchemaMismatch(fmt::format("header column {} is '{}', schema expects '{}'", c,
                                       header[c], schema[c].name));

  std::vector<Row> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li - 1;
    auto cells = split_line(lines[li]);
    if (cells.size() != schema.size())
      throw ParseError(row, cells.size(),
                       fmt::format("expected {} cells, found {}", schema.size(), cells.size()));
    Row r;
    r.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      if (cell.empty()) {
        r.push_back(Value::missing());
        continue;
      }
      if (schema[c].is_numeric()) {
        double d = 0;
        auto res = std::from_chars(cell.data(), cell.data() + cell.size(), d);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(d))
          throw ParseError(row, c, "'" + cell + "' is not a number");
        r.push_back(Value::numeric(d));
      } else {
        auto idx = schema[c].label_index(cell);
        if (!idx) throw ParseError(row, c, "unknown label '" + cell + "' for " + schema[c].name);
        r.push_back(Value::nominal(*idx));
      }
    }
    rows.push_back(std::move(r));
  }
  return DataTable(std::vector<AttributeSpec>(schema.begin(), schema.end()), std::move(rows));
}

DataTable load_csv(const std::filesystem::path& path, std::span<const AttributeSpec> schema) {
  return parse_csv(read_file(path), schema);
}

std::string to_csv(const DataTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.num_columns(); ++c) {
    if (c) out += ',';
    out += table.specs()[c].name;
  }
  out += '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      const auto& v = row[c];
      if (v.is_numeric())
        out += format_number(v.as_numeric());
      else if (v.is_nominal())
        out += table.specs()[c].labels[v.as_nominal()];
    }
    out += '\n';
  }
  return out;
}

void save_csv(const DataTable& table, const std::filesystem::path& path) {
  write_file_atomic(path, to_csv(table));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename onto '" + path.string() + "': " + ec.message());
}

// ---------------------------------------------------------------------------

DataTable join_on_id(const SourceBundle& bundle, bool drop_id) {
  bundle.validate_ids();
  const auto names = bundle.ordered_names();

  // Class comes from exam when it has one, else from the single source that does.
  const DataTable* class_src = nullptr;
  if (auto it = bundle.sources.find(kExam); it != bundle.sources.end() && it->second.class_column())
    class_src = &it->second;
  if (!class_src) {
    for (const auto& n : names) {
      const auto& t = bundle.at(n);
      if (t.class_column()) {
        if (class_src) throw SchemaMismatch("several sources carry a class and none is exam");
        class_src = &t;
      }
    }
  }

  std::vector<std::string> input_sources = names;
  if (names.size() > 1) std::erase(input_sources, std::string(kExam));

  std::vector<AttributeSpec> specs;
  const auto& first = bundle.at(names.front());
  if (!drop_id) specs.push_back(first.specs()[*first.id_column()]);
  for (const auto& n : input_sources) {
    const auto& t = bundle.at(n);
    for (auto c : t.input_columns()) specs.push_back(t.specs()[c]);
  }
  if (class_src) specs.push_back(class_src->specs()[*class_src->class_column()]);

  // Sorted tables share the same id order once the id sets are equal.
  std::map<std::string, DataTable, std::less<>> sorted;
  for (const auto& n : names) sorted.emplace(n, bundle.at(n).sorted_by_id());
  const auto& ref = sorted.at(names.front());

  std::vector<Row> rows;
  rows.reserve(ref.num_rows());
  for (std::size_t r = 0; r < ref.num_rows(); ++r) {
    Row row;
    row.reserve(specs.size());
    if (!drop_id) row.push_back(ref.at(r, *ref.id_column()));
    for (const auto& n : input_sources) {
      const auto& t = sorted.at(n);
      for (auto c : t.input_columns()) row.push_back(t.at(r, c));
    }
    rows.push_back(std::move(row));
  }
  if (class_src) {
    const auto sorted_class = class_src->sorted_by_id();
    const auto cc = *sorted_class.class_column();
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r].push_back(sorted_class.at(r, cc));
  }
  return DataTable(std::move(specs), std::move(rows));
}

}  // namespace fusemine
