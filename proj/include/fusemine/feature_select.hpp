#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fusemine/parallel.hpp"
#include "fusemine/table.hpp"

namespace fusemine {

using Codes = std::vector<std::size_t>;

// Shannon entropy in bits of a coded column.
double entropy(std::span<const std::size_t> codes);

// 2*I(A;B) / (H(A)+H(B)); 0 when both entropies vanish. Throws LengthMismatch.
double symmetrical_uncertainty(std::span<const std::size_t> a, std::span<const std::size_t> b);

// Fayyad-Irani MDL cut points of a numeric column against the class, sorted.
// Missing values are ignored.
std::vector<double> mdl_cut_points(std::span<const Value> column, std::span<const std::size_t> cls);

// Codes a column for SU: nominal values keep their index, numeric values are
// binned by MDL cuts (10 equal-width bins when MDL accepts none). Missing gets
// its own code in both cases.
Codes encode_for_su(const AttributeSpec& spec, std::span<const Value> column,
                    std::span<const std::size_t> cls);

// Pairwise SU between the dataset's inputs and against the class.
class SuMatrix {
 public:
  SuMatrix() = default;
  explicit SuMatrix(std::size_t n) : n_(n), ff_(n * n, 0.0), fc_(n, 0.0) {}

  std::size_t size() const { return n_; }
  double feature_feature(std::size_t i, std::size_t j) const { return ff_[i * n_ + j]; }
  double feature_class(std::size_t i) const { return fc_[i]; }
  void set_ff(std::size_t i, std::size_t j, double v) { ff_[i * n_ + j] = ff_[j * n_ + i] = v; }
  void set_fc(std::size_t i, double v) { fc_[i] = v; }

  friend bool operator==(const SuMatrix&, const SuMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> ff_;
  std::vector<double> fc_;
};

// Encodes all inputs once, then fills the matrix. Parallel over matrix entries.
SuMatrix compute_su_matrix(const DataTable& dataset, Execution exec = Execution::Parallel);

struct MeritScore {
  std::vector<std::size_t> subset;  // positions in dataset.input_columns()
  double merit = 0.0;
};

// k*r_cf / sqrt(k + k(k-1)*r_ff). Empty subset has merit 0.
double subset_merit(std::span<const std::size_t> subset, const SuMatrix& su);

// Throws EmptySubset for an empty subset, SchemaMismatch without a class.
MeritScore cfs_merit(std::span<const std::size_t> subset, const DataTable& dataset);
MeritScore cfs_merit(std::span<const std::string> names, const DataTable& dataset);

struct BestFirstOptions {
  std::size_t stall_limit = 5;
};

// Forward best-first search from the empty set.
MeritScore best_first_search(const SuMatrix& su, const BestFirstOptions& opts = {});

// Names of the best CFS subset, in original attribute order.
std::vector<std::string> select_best_attributes(const DataTable& dataset,
                                                const BestFirstOptions& opts = {},
                                                Execution exec = Execution::Parallel);

// Keeps the id (if any), the named inputs and the class; row order unchanged.
DataTable reduce_to(const DataTable& dataset, std::span<const std::string> names);

}  // namespace fusemine
