#pragma once

#include <cstdint>
#include <istream>
#include <vector>

#include "abo/kernels.hpp"  // Matrix/Vector aliases

namespace abo {

/// Direction numbers for a base-2 Sobol' sequence, loaded from a plain-text
/// table: one dimension per line as "index degree coefficient m_1 .. m_degree"
/// (dimension 1 is the reserved van der Corput dimension and is implicit).
/// The bundled table carries Joe-Kuo D(6) initialization values.
class DirectionTable {
 public:
  static const DirectionTable& joe_kuo_default();
  static DirectionTable parse(std::istream& in);

  int max_dimension() const { return static_cast<int>(v_.size()); }
  std::uint64_t checksum() const { return checksum_; }

  /// 52 direction integers for dimension d (1-based), each < 2^52.
  const std::vector<std::uint64_t>& directions(int d) const;

  static constexpr int kBits = 52;

 private:
  std::vector<std::vector<std::uint64_t>> v_;  // v_[d-1]
  std::uint64_t checksum_ = 0;
};

/// Text of the bundled direction-number table and its expected fnv1a64
/// checksum (matches core/data/sobol_direction_numbers.*).
const char* embedded_direction_table_text();
std::uint64_t embedded_direction_table_checksum();

/// Stateful cursor over the Sobol' sequence in [0,1)^D. Points are produced
/// in the conventional Gray-code order, starting with the all-zeros point.
class SobolStream {
 public:
  explicit SobolStream(int dim,
                       const DirectionTable& table = DirectionTable::joe_kuo_default());

  int dim() const { return dim_; }
  std::uint64_t cursor() const { return index_; }

  /// Reposition the cursor so the next point is point number `index`.
  void seek(std::uint64_t index);

  Vector next();
  Matrix take(Index count);

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::vector<std::uint64_t> state_;                  // current integer point
  std::vector<std::vector<std::uint64_t>> directions_;  // per dimension
};

/// First `count` Sobol' points after skipping `skip`, as a count x D matrix.
Matrix sobol_points(int dim, Index count, std::uint64_t skip = 0);

/// Saltelli sample layout for variance-based sensitivity estimation:
/// rows stacked as [A; B; AB_1; ...; AB_D], where A and B come from the
/// first/last D columns of a 2D-dimensional Sobol' stream and AB_i equals A
/// with column i replaced by B's column i. Total rows: n_base * (D + 2).
struct SaltelliDesign {
  int dim = 0;
  Index n_base = 0;
  Matrix rows;

  Eigen::Block<const Matrix> block_a() const {
    return rows.block(0, 0, n_base, dim);
  }
  Eigen::Block<const Matrix> block_b() const {
    return rows.block(n_base, 0, n_base, dim);
  }
  Eigen::Block<const Matrix> block_ab(int i) const {
    return rows.block(static_cast<Index>(2 + i) * n_base, 0, n_base, dim);
  }
};

/// n_base >= 4. Powers of two preserve the balance properties of the
/// underlying Sobol' stream and are recommended, but any size is accepted.
SaltelliDesign saltelli_design(int dim, Index n_base);

}  // namespace abo
