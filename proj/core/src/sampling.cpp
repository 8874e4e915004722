#include "abo/sampling.hpp"

#include <bit>
#include <sstream>
#include <string>

#include "abo/errors.hpp"
#include "abo/rng.hpp"

namespace abo {

namespace {

// Expand initial values m_1..m_s into kBits direction integers via the
// primitive-polynomial recurrence, then scale so V_k = m_k * 2^(kBits-k).
std::vector<std::uint64_t> expand_directions(int s, std::uint64_t a,
                                             std::vector<std::uint64_t> m) {
  const int L = DirectionTable::kBits;
  m.resize(static_cast<std::size_t>(L));
  for (int k = s; k < L; ++k) {
    std::uint64_t v = m[static_cast<std::size_t>(k - s)] ^
                      (m[static_cast<std::size_t>(k - s)] << s);
    for (int j = 1; j < s; ++j)
      v ^= ((a >> (s - 1 - j)) & 1ULL) * (m[static_cast<std::size_t>(k - j)] << j);
    m[static_cast<std::size_t>(k)] = v;
  }
  std::vector<std::uint64_t> dirs(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k)
    dirs[static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(k)]
                                        << (L - 1 - k);
  return dirs;
}

std::vector<std::uint64_t> van_der_corput_directions() {
  const int L = DirectionTable::kBits;
  std::vector<std::uint64_t> dirs(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k)
    dirs[static_cast<std::size_t>(k)] = 1ULL << (L - 1 - k);
  return dirs;
}

}  // namespace

DirectionTable DirectionTable::parse(std::istream& in) {
  DirectionTable table;
  table.v_.push_back(van_der_corput_directions());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  table.checksum_ = fnv1a64(content);
  std::istringstream lines(content);
  std::string line;
  int expected = 2;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int dim = 0, s = 0;
    std::uint64_t a = 0;
    if (!(ls >> dim >> s >> a))
      throw Error("direction table: malformed line: " + line);
    if (dim != expected)
      throw Error("direction table: dimensions must be contiguous from 2");
    if (s < 1 || s >= kBits)
      throw Error("direction table: bad polynomial degree");
    std::vector<std::uint64_t> m;
    for (int k = 0; k < s; ++k) {
      std::uint64_t mk = 0;
      if (!(ls >> mk)) throw Error("direction table: missing m values: " + line);
      if (mk == 0 || mk % 2 == 0 || mk >= (1ULL << (k + 1)))
        throw Error("direction table: m_k must be odd and < 2^k");
      m.push_back(mk);
    }
    table.v_.push_back(expand_directions(s, a, std::move(m)));
    ++expected;
  }
  if (table.v_.size() < 2) throw Error("direction table: no dimensions found");
  return table;
}

const DirectionTable& DirectionTable::joe_kuo_default() {
  static const DirectionTable table = [] {
    std::istringstream in(embedded_direction_table_text());
    DirectionTable t = parse(in);
    if (t.checksum() != embedded_direction_table_checksum())
      throw Error("bundled direction table failed its checksum");
    return t;
  }();
  return table;
}

const std::vector<std::uint64_t>& DirectionTable::directions(int d) const {
  if (d < 1 || d > max_dimension())
    throw DimensionError("dimension exceeds direction table capacity");
  return v_[static_cast<std::size_t>(d - 1)];
}

SobolStream::SobolStream(int dim, const DirectionTable& table) : dim_(dim) {
  if (dim < 1) throw DimensionError("sobol dimension must be >= 1");
  directions_.reserve(static_cast<std::size_t>(dim));
  for (int d = 1; d <= dim; ++d) directions_.push_back(table.directions(d));
  state_.assign(static_cast<std::size_t>(dim), 0);
}

void SobolStream::seek(std::uint64_t index) {
  // Direct evaluation: point n is the XOR of directions selected by the
  // bits of gray(n) = n ^ (n >> 1).
  index_ = index;
  const std::uint64_t gray = index ^ (index >> 1);
  for (int d = 0; d < dim_; ++d) {
    std::uint64_t x = 0;
    std::uint64_t g = gray;
    int j = 0;
    while (g != 0) {
      if (g & 1ULL) x ^= directions_[static_cast<std::size_t>(d)]
                             [static_cast<std::size_t>(j)];
      g >>= 1;
      ++j;
    }
    state_[static_cast<std::size_t>(d)] = x;
  }
}

Vector SobolStream::next() {
  Vector point(dim_);
  constexpr double scale = 0x1.0p-52;
  for (int d = 0; d < dim_; ++d)
    point(d) = static_cast<double>(state_[static_cast<std::size_t>(d)]) * scale;
  // advance: flip the direction indexed by the lowest zero bit of the
  // current index (Gray-code increment)
  const int flip = std::countr_one(index_);
  ++index_;
  for (int d = 0; d < dim_; ++d)
    state_[static_cast<std::size_t>(d)] ^=
        directions_[static_cast<std::size_t>(d)][static_cast<std::size_t>(flip)];
  return point;
}

Matrix SobolStream::take(Index count) {
  Matrix out(count, dim_);
  for (Index i = 0; i < count; ++i) out.row(i) = next();
  return out;
}

Matrix sobol_points(int dim, Index count, std::uint64_t skip) {
  if (count < 1) throw DimensionError("sobol point count must be >= 1");
  SobolStream stream(dim);
  if (skip != 0) stream.seek(skip);
  return stream.take(count);
}

SaltelliDesign saltelli_design(int dim, Index n_base) {
  if (dim < 1) throw DimensionError("saltelli dimension must be >= 1");
  if (n_base < 4) throw DimensionError("saltelli base sample count must be >= 4");
  Matrix joint = sobol_points(2 * dim, n_base);
  SaltelliDesign design;
  design.dim = dim;
  design.n_base = n_base;
  design.rows.resize(n_base * (dim + 2), dim);
  design.rows.block(0, 0, n_base, dim) = joint.leftCols(dim);        // A
  design.rows.block(n_base, 0, n_base, dim) = joint.rightCols(dim);  // B
  for (int i = 0; i < dim; ++i) {
    auto ab = design.rows.block(static_cast<Index>(2 + i) * n_base, 0, n_base, dim);
    ab = joint.leftCols(dim);
    ab.col(i) = joint.col(dim + i);
  }
  return design;
}

}  // namespace abo
