#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fusemine {

enum class AttrKind { Numeric, Nominal };
enum class AttrRole { Id, Input, Class };

struct AttributeSpec {
  std::string name;
  AttrKind kind = AttrKind::Numeric;
  std::vector<std::string> labels;  // nominal only, ordered
  AttrRole role = AttrRole::Input;

  static AttributeSpec numeric(std::string name, AttrRole role = AttrRole::Input);
  static AttributeSpec nominal(std::string name, std::vector<std::string> labels,
                               AttrRole role = AttrRole::Input);
  static AttributeSpec id(std::string name = "id");

  bool is_nominal() const { return kind == AttrKind::Nominal; }
  bool is_numeric() const { return kind == AttrKind::Numeric; }
  std::optional<std::size_t> label_index(std::string_view label) const;

  // Throws SchemaMismatch when labels are empty or duplicated for a nominal.
  void validate() const;

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

class Value {
 public:
  Value() = default;
  static Value missing() { return Value(); }
  static Value numeric(double v) { return Value(v); }
  static Value nominal(std::size_t index) { return Value(index); }

  bool is_missing() const { return std::holds_alternative<std::monostate>(v_); }
  bool is_numeric() const { return std::holds_alternative<double>(v_); }
  bool is_nominal() const { return std::holds_alternative<std::size_t>(v_); }

  double as_numeric() const { return std::get<double>(v_); }
  std::size_t as_nominal() const { return std::get<std::size_t>(v_); }

  friend bool operator==(const Value&, const Value&) = default;

 private:
  explicit Value(double v) : v_(v) {}
  explicit Value(std::size_t v) : v_(v) {}
  std::variant<std::monostate, double, std::size_t> v_;
};

using Row = std::vector<Value>;

// Ordered attribute specs plus rows of values. Validated on construction;
// treat as immutable afterwards.
class DataTable {
 public:
  DataTable() = default;
  DataTable(std::vector<AttributeSpec> specs, std::vector<Row> rows);

  const std::vector<AttributeSpec>& specs() const { return specs_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_columns() const { return specs_.size(); }
  const Value& at(std::size_t row, std::size_t col) const { return rows_[row][col]; }

  std::optional<std::size_t> column_index(std::string_view name) const;
  std::size_t require_column(std::string_view name) const;
  std::optional<std::size_t> id_column() const;
  std::optional<std::size_t> class_column() const;
  std::vector<std::size_t> input_columns() const;

  std::vector<Value> column(std::size_t col) const;
  // Integer ids in row order; empty when the table has no id column.
  std::vector<long long> ids() const;
  long long id_of(std::size_t row) const;

  // Row subset in the given order.
  DataTable select_rows(std::span<const std::size_t> rows) const;
  // Column subset in the given order.
  DataTable select_columns(std::span<const std::size_t> cols) const;
  DataTable sorted_by_id() const;

  friend bool operator==(const DataTable&, const DataTable&) = default;

 private:
  std::vector<AttributeSpec> specs_;
  std::vector<Row> rows_;
};

// Canonical source names, in merge order.
inline constexpr std::string_view kTheory = "theory";
inline constexpr std::string_view kPractice = "practice";
inline constexpr std::string_view kOnline = "online";
inline constexpr std::string_view kExam = "exam";

// Named tables keyed by a shared student id column.
struct SourceBundle {
  std::map<std::string, DataTable, std::less<>> sources;

  // Source names in canonical order (theory, practice, online, exam, then
  // any others alphabetically).
  std::vector<std::string> ordered_names() const;
  // Non-exam sources in canonical order.
  std::vector<std::string> input_source_names() const;
  const DataTable& at(std::string_view name) const;

  // Throws IdMismatch listing ids that are not present in every table.
  void validate_ids() const;
};

// CSV I/O. Comma-delimited, header row, LF endings, empty cell = Missing.
DataTable load_csv(const std::filesystem::path& path, std::span<const AttributeSpec> schema);
DataTable parse_csv(std::string_view text, std::span<const AttributeSpec> schema);
void save_csv(const DataTable& table, const std::filesystem::path& path);
std::string to_csv(const DataTable& table);

// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

// One row per student, sorted by id. Columns: [id], inputs of every non-exam
// source in canonical order, then the class column.
DataTable join_on_id(const SourceBundle& bundle, bool drop_id);

// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace fusemine
