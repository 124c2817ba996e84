#include "hgr/reduction.hpp"

#include <cmath>
#include <sstream>

#include "hgr/error.hpp"
#include "hgr/finite_difference.hpp"

namespace hgr {
namespace {

template <class Kernel>
void pointwise(const Grid3& grid, Kernel&& k) {
  const long long n = static_cast<long long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < n; ++idx) k(std::size_t(idx));
}

bool block_is_zero(const Block& b, const Grid3& grid) {
  switch (b.kind) {
    case Block::Kind::Zero:
      return true;
    case Block::Kind::Identity:
      return b.constant ? b.value == 0.0 : b.coeff.is_zero();
    case Block::Kind::Dense:
      for (const auto& f : b.dense)
        if (!f.is_zero()) return false;
      (void)grid;
      return true;
  }
  return true;
}

// X == Y^T at every point.
bool transpose_equal(const Block& x, const Block& y, const Grid3& grid) {
  const bool dense = x.kind == Block::Kind::Dense || y.kind == Block::Kind::Dense;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!dense) {
      const double cx = x.kind == Block::Kind::Zero ? 0.0 : x.coefficient(idx);
      const double cy = y.kind == Block::Kind::Zero ? 0.0 : y.coefficient(idx);
      if (cx != cy) return false;
      continue;
    }
    for (int r = 0; r < kN; ++r)
      for (int c = 0; c < kN; ++c)
        if (x.entry(idx, r, c) != y.entry(idx, c, r)) return false;
  }
  return true;
}

bool block_symmetric(const BlockMatrixField& m) {
  for (int i = 0; i < 5; ++i)
    for (int j = i; j < 5; ++j)
      if (!transpose_equal(m.blocks[i][j], m.blocks[j][i], m.grid)) return false;
  return true;
}

bool border_zero(const BlockMatrixField& m) {
  for (int j = 0; j < 5; ++j) {
    if (!block_is_zero(m.blocks[0][j], m.grid) || !block_is_zero(m.blocks[j][0], m.grid)) {
      return false;
    }
  }
  return true;
}

bool is_constant_identity(const Block& b, double v) {
  return b.kind == Block::Kind::Identity && b.constant && b.value == v;
}

double block_max(const Block& b) {
  switch (b.kind) {
    case Block::Kind::Zero:
      return 0.0;
    case Block::Kind::Identity:
      return b.constant ? std::abs(b.value) : b.coeff.max_abs();
    case Block::Kind::Dense: {
      double m = 0.0;
      for (const auto& f : b.dense) m = std::max(m, f.max_abs());
      return m;
    }
  }
  return 0.0;
}

}  // namespace

// ---- state ------------------------------------------------------------------

StateField StateField::zeros(const Grid3& grid) {
  StateField s;
  s.comp.assign(kStateSize, ScalarField(grid));
  return s;
}

StateField& StateField::axpy(double a, const StateField& o) {
  for (int i = 0; i < kStateSize; ++i) comp[i].axpy(a, o.comp[i]);
  return *this;
}

StateField& StateField::operator*=(double a) {
  for (auto& f : comp) f *= a;
  return *this;
}

double StateField::max_abs() const {
  double m = 0.0;
  for (const auto& f : comp) m = std::max(m, f.max_abs());
  return m;
}

bool StateField::is_finite() const {
  for (const auto& f : comp)
    if (!f.is_finite()) return false;
  return true;
}

Mat4 StateField::metric_at(std::size_t idx) const {
  Mat4 g = minkowski4();
  for (int c = 0; c < kN; ++c) {
    const auto [a, b] = sym_pair(c);
    g[a][b] += comp[c][idx];
    g[b][a] = g[a][b];
  }
  return g;
}

Deriv1 StateField::derivatives_at(std::size_t idx) const {
  Deriv1 x;
  for (int c = 0; c < kN; ++c) {
    const auto [a, b] = sym_pair(c);
    x[0][a][b] = x[0][b][a] = comp[kN + c][idx];
    for (int e = 0; e < 3; ++e) x[e + 1][a][b] = x[e + 1][b][a] = comp[2 * kN + kN * e + c][idx];
  }
  return x;
}

ProductState StateField::as_product() const {
  ProductState v;
  v.v1.assign(comp.begin(), comp.begin() + kN);
  v.v2.assign(comp.begin() + kN, comp.begin() + 2 * kN);
  v.v3.assign(comp.begin() + 2 * kN, comp.end());
  return v;
}

StateField StateField::from_product(const ProductState& v) {
  v.validate();
  if (v.components() != kN) throw PreconditionError("state: product state must have N = 10");
  StateField s;
  s.comp.reserve(kStateSize);
  for (const auto* block : {&v.v1, &v.v2, &v.v3})
    for (const auto& f : *block) s.comp.push_back(f);
  return s;
}

StateField to_first_order(const MetricField& g, const std::array<ScalarField, kN>& gt) {
  StateField U = StateField::zeros(g.grid);
  const Mat4 m = minkowski4();
  for (int c = 0; c < kN; ++c) {
    require_same_grid(gt[c].grid(), g.grid, "to_first_order");
    const auto [a, b] = sym_pair(c);
    U.u(c) = g.g[c];
    for (auto& v : U.u(c).values()) v -= m[a][b];
    U.ut(c) = gt[c];
    for (int e = 0; e < 3; ++e) U.ux(e, c) = derivative(U.u(c), e);
  }
  return U;
}

MetricField metric_from_state(const StateField& U) {
  std::array<ScalarField, kN> comps;
  const Mat4 m = minkowski4();
  for (int c = 0; c < kN; ++c) {
    const auto [a, b] = sym_pair(c);
    comps[c] = U.u(c);
    for (auto& v : comps[c].values()) v += m[a][b];
  }
  MetricField g = MetricField::from_components(std::move(comps));
  invert_metric(g);
  return g;
}

// ---- blocks -----------------------------------------------------------------

Block Block::identity(double v) {
  Block b;
  b.kind = Kind::Identity;
  b.value = v;
  return b;
}

Block Block::identity(ScalarField c) {
  Block b;
  b.kind = Kind::Identity;
  b.constant = false;
  b.coeff = std::move(c);
  return b;
}

double Block::entry(std::size_t idx, int r, int c) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Identity:
      return r == c ? coefficient(idx) : 0.0;
    case Kind::Dense:
      return dense[r * kN + c][idx];
  }
  return 0.0;
}

Eigen::MatrixXd BlockMatrixField::dense_at(std::size_t idx) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(kStateSize, kStateSize);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int r = 0; r < kN; ++r)
        for (int c = 0; c < kN; ++c) m(i * kN + r, j * kN + c) = blocks[i][j].entry(idx, r, c);
  return m;
}

StateField BlockMatrixField::apply(const StateField& U) const {
  require_same_grid(U.grid(), grid, "block apply");
  StateField out = StateField::zeros(grid);
  pointwise(grid, [&](std::size_t idx) {
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const Block& b = blocks[i][j];
        if (b.kind == Block::Kind::Zero) continue;
        for (int r = 0; r < kN; ++r) {
          double s = 0.0;
          if (b.kind == Block::Kind::Identity) {
            s = b.coefficient(idx) * U.comp[j * kN + r][idx];
          } else {
            for (int c = 0; c < kN; ++c) s += b.dense[r * kN + c][idx] * U.comp[j * kN + c][idx];
          }
          out.comp[i * kN + r][idx] += s;
        }
      }
  });
  return out;
}

A33Field a33_from_state(const StateField& U) {
  const MetricField g = metric_from_state(U);
  A33Field a;
  const int slots[6][2] = {{1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}};
  for (int q = 0; q < 6; ++q) a.g[q] = g.gtilde[sym_index(slots[q][0], slots[q][1])];
  return a;
}

BlockMatrixField assemble_A0(const StateField& U) {
  const MetricField g = metric_from_state(U);
  BlockMatrixField A(U.grid());
  A.blocks[0][0] = Block::identity(1.0);
  A.blocks[1][1] = Block::identity(1.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      A.blocks[2 + a][2 + b] = Block::identity(g.gtilde[sym_index(a + 1, b + 1)]);
  return A;
}

BlockMatrixField assemble_Aa(const StateField& U, int axis) {
  if (axis < 0 || axis > 2) throw PreconditionError("assemble_Aa: axis must be 0, 1 or 2");
  const MetricField g = metric_from_state(U);
  BlockMatrixField A(U.grid());
  A.blocks[1][1] = Block::identity(2.0 * g.gtilde[sym_index(axis + 1, 0)]);
  for (int b = 0; b < 3; ++b) {
    ScalarField c = g.gtilde[sym_index(axis + 1, b + 1)];
    if (b == axis)
      for (auto& v : c.values()) v -= 1.0;
    A.blocks[1][2 + b] = Block::identity(c);
    A.blocks[2 + b][1] = Block::identity(std::move(c));
  }
  return A;
}

BlockMatrixField constant_Ca(const Grid3& grid, int axis) {
  if (axis < 0 || axis > 2) throw PreconditionError("constant_Ca: axis must be 0, 1 or 2");
  BlockMatrixField C(grid);
  C.blocks[1][2 + axis] = Block::identity(1.0);
  C.blocks[2 + axis][1] = Block::identity(1.0);
  return C;
}

BlockMatrixField assemble_B(const StateField& U) {
  const MetricField g = metric_from_state(U);
  const Grid3& grid = U.grid();
  BlockMatrixField B(grid);
  B.blocks[0][1] = Block::identity(1.0);
  for (int j = 1; j < 5; ++j) {
    B.blocks[1][j].kind = Block::Kind::Dense;
    B.blocks[1][j].constant = false;
    B.blocks[1][j].dense.assign(kN * kN, ScalarField(grid));
  }
  pointwise(grid, [&](std::size_t idx) {
    const Mat4 ginv = g.inverse_at(idx);
    const Deriv1 x = U.derivatives_at(idx);
    const double scale = -1.0 / (-ginv[0][0]);
    for (int j = 1; j < 5; ++j) {
      const int slot = j - 1;  // 0: time, 1..3: spatial axis
      for (int c = 0; c < kN; ++c) {
        const auto [p, q] = sym_pair(c);
        Deriv1 e{};
        e[slot][p][q] = e[slot][q][p] = 1.0;
        const Mat4 qb = reduced_Q_bilinear(ginv, e, x);
        for (int r = 0; r < kN; ++r) {
          const auto [a, b] = sym_pair(r);
          B.blocks[1][j].dense[r * kN + c][idx] = scale * qb[a][b];
        }
      }
    }
  });
  return B;
}

// ---- structure checks -------------------------------------------------------

bool StructureReport::pass() const {
  for (const auto& c : conditions)
    if (!c.pass) return false;
  return true;
}

const ConditionResult* StructureReport::find(const std::string& tag) const {
  for (const auto& c : conditions)
    if (c.tag == tag) return &c;
  return nullptr;
}

std::string StructureReport::to_text() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& c : conditions) {
    os << "condition." << c.tag << " = " << (c.pass ? "pass" : "fail");
    if (!c.detail.empty()) os << "  # " << c.detail;
    os << "\n";
  }
  os << "c0 = " << c0 << "\n"
     << "norm.a0_minus_e = " << a0_minus_e_norm << "\n"
     << "norm.aa_max = " << aa_max << "\n"
     << "norm.b_tilde_max = " << b_tilde_max << "\n"
     << "overall = " << (pass() ? "pass" : "fail") << "\n";
  return os.str();
}

StructureReport check_structure(const BlockMatrixField& A0, const std::array<BlockMatrixField, 3>& Aa,
                                const std::array<BlockMatrixField, 3>& Ca,
                                const BlockMatrixField& B, const DyadicPartition& p, double s,
                                double delta) {
  StructureReport rep;
  const Grid3& grid = A0.grid;

  {
    ConditionResult c{"a0_block_identity", true, ""};
    if (!is_constant_identity(A0.blocks[0][0], 1.0) || !is_constant_identity(A0.blocks[1][1], 1.0)) {
      c.pass = false;
      c.detail = "(1,1) or (2,2) block is not the identity";
    }
    for (int i = 0; i < 2 && c.pass; ++i)
      for (int j = 0; j < 5; ++j) {
        if (j == i) continue;
        if (!block_is_zero(A0.blocks[i][j], grid) || !block_is_zero(A0.blocks[j][i], grid)) {
          c.pass = false;
          c.detail = "nonzero off-diagonal block in rows/columns 1-2";
          break;
        }
      }
    rep.conditions.push_back(c);
  }

  {
    ConditionResult c{"a33_spd", true, ""};
    A33Field a;
    const int slots[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    for (int q = 0; q < 6 && c.pass; ++q) {
      const Block& b = A0.blocks[2 + slots[q][0]][2 + slots[q][1]];
      if (b.kind == Block::Kind::Dense) {
        c.pass = false;
        c.detail = "a33 block is not of Kronecker form";
        break;
      }
      a.g[q] = b.kind == Block::Kind::Zero ? ScalarField(grid)
               : b.constant                ? ScalarField(grid, b.value)
                                           : b.coeff;
    }
    for (int i = 2; i < 5 && c.pass; ++i)
      for (int j = 2; j < 5; ++j)
        if (!transpose_equal(A0.blocks[i][j], A0.blocks[j][i], grid)) {
          c.pass = false;
          c.detail = "a33 not symmetric";
          break;
        }
    if (c.pass) {
      try {
        rep.c0 = a33_c0(a);
      } catch (const PreconditionError& e) {
        c.pass = false;
        c.detail = e.what();
      }
    }
    rep.conditions.push_back(c);
  }

  {
    ConditionResult c{"a0_minus_identity_finite", true, ""};
    const NormParams params{s + 1.0, delta, 1.0, 0, 0.0};
    double sum = 0.0;
    auto add = [&](ScalarField f, double copies) {
      if (!f.is_finite()) {
        sum = INFINITY;
        return;
      }
      if (!f.is_zero()) sum += copies * std::pow(norm_hsd(f, p, params), 2);
    };
    try {
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          const Block& b = A0.blocks[i][j];
          const double diag = i == j ? 1.0 : 0.0;
          if (b.kind == Block::Kind::Identity) {
            ScalarField f = b.constant ? ScalarField(grid, b.value) : b.coeff;
            for (auto& v : f.values()) v -= diag;
            add(std::move(f), kN);  // one coefficient stands for N diagonal entries
          } else if (b.kind == Block::Kind::Dense) {
            for (int r = 0; r < kN; ++r)
              for (int col = 0; col < kN; ++col) {
                ScalarField f = b.dense[r * kN + col];
                if (r == col)
                  for (auto& v : f.values()) v -= diag;
                add(std::move(f), 1.0);
              }
          } else if (i == j) {
            add(ScalarField(grid, -1.0), kN);
          }
        }
    } catch (const PreconditionError& e) {
      sum = INFINITY;
      c.detail = e.what();
    }
    rep.a0_minus_e_norm = std::sqrt(sum);
    if (!std::isfinite(rep.a0_minus_e_norm)) {
      c.pass = false;
      if (c.detail.empty()) c.detail = "A0 - e not finite in the weighted norm";
    }
    rep.conditions.push_back(c);
  }

  {
    ConditionResult c{"aa_symmetric_zero_border", true, ""};
    for (int a = 0; a < 3 && c.pass; ++a) {
      if (!border_zero(Aa[a])) {
        c.pass = false;
        c.detail = "A^" + std::to_string(a + 1) + " has a nonzero first block row/column";
      } else if (!block_symmetric(Aa[a])) {
        c.pass = false;
        c.detail = "A^" + std::to_string(a + 1) + " is not symmetric";
      }
    }
    for (const auto& m : Aa)
      for (const auto& row : m.blocks)
        for (const auto& b : row) rep.aa_max = std::max(rep.aa_max, block_max(b));
    rep.conditions.push_back(c);
  }

  {
    ConditionResult c{"ca_constant_symmetric", true, ""};
    for (int a = 0; a < 3 && c.pass; ++a) {
      for (const auto& row : Ca[a].blocks)
        for (const auto& b : row)
          if (b.kind == Block::Kind::Dense || (b.kind == Block::Kind::Identity && !b.constant)) {
            c.pass = false;
            c.detail = "C^" + std::to_string(a + 1) + " has a state-dependent block";
          }
      if (c.pass && (!border_zero(Ca[a]) || !block_symmetric(Ca[a]))) {
        c.pass = false;
        c.detail = "C^" + std::to_string(a + 1) + " is not symmetric with zero border";
      }
    }
    rep.conditions.push_back(c);
  }

  {
    ConditionResult c{"b_structure", true, ""};
    for (int i = 0; i < 5; ++i)
      if (!block_is_zero(B.blocks[i][0], grid)) {
        c.pass = false;
        c.detail = "first block column of B is nonzero";
      }
    if (c.pass && !is_constant_identity(B.blocks[0][1], 1.0)) {
      c.pass = false;
      c.detail = "b_12 is not the constant identity";
    }
    for (int j = 2; j < 5 && c.pass; ++j)
      if (!block_is_zero(B.blocks[0][j], grid)) {
        c.pass = false;
        c.detail = "first block row of B is not constant";
      }
    for (int i = 2; i < 5 && c.pass; ++i)
      for (int j = 0; j < 5; ++j)
        if (!block_is_zero(B.blocks[i][j], grid)) {
          c.pass = false;
          c.detail = "rows 3-5 of B are nonzero";
          break;
        }
    for (int j = 0; j < 5; ++j) rep.b_tilde_max = std::max(rep.b_tilde_max, block_max(B.blocks[1][j]));
    rep.conditions.push_back(c);
  }
  return rep;
}

StructureReport check_state_structure(const StateField& U, const DyadicPartition& p, double s,
                                      double delta) {
  const Grid3& grid = U.grid();
  const BlockMatrixField A0 = assemble_A0(U);
  const std::array<BlockMatrixField, 3> Aa{assemble_Aa(U, 0), assemble_Aa(U, 1), assemble_Aa(U, 2)};
  const std::array<BlockMatrixField, 3> Ca{constant_Ca(grid, 0), constant_Ca(grid, 1),
                                           constant_Ca(grid, 2)};
  return check_structure(A0, Aa, Ca, assemble_B(U), p, s, delta);
}

StateField system_residual(const StateField& U, const StateField& dUdt) {
  const Grid3& grid = U.grid();
  StateField res = assemble_A0(U).apply(dUdt);
  for (int a = 0; a < 3; ++a) {
    StateField dU = StateField::zeros(grid);
    for (int i = 0; i < kStateSize; ++i) dU.comp[i] = derivative(U.comp[i], a);
    res.axpy(-1.0, assemble_Aa(U, a).apply(dU));
    res.axpy(-1.0, constant_Ca(grid, a).apply(dU));
  }
  res.axpy(-1.0, assemble_B(U).apply(U));
  return res;
}

}  // namespace hgr
