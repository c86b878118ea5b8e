#ifndef TWOATOM_OPERATORS_HPP
#define TWOATOM_OPERATORS_HPP

#include <array>
#include <cmath>
#include <string_view>

#include "collective_couplings.hpp"
#include "core.hpp"

namespace twoatom {

namespace ops {

inline Vec4 ket(Level l) {
  Vec4 v = Vec4::Zero();
  v[idx(l)] = 1.0;
  return v;
}

inline Mat4 projector(Level l) {
  Mat4 m = Mat4::Zero();
  m(idx(l), idx(l)) = 1.0;
  return m;
}

/// S = (sigma1 + sigma2)/sqrt2 in the collective basis: |s> -> |gg>, |ee> -> |s>.
inline Mat4 lower_symmetric() {
  Mat4 m = Mat4::Zero();
  m(idx(Level::gg), idx(Level::s)) = 1.0;
  m(idx(Level::s), idx(Level::ee)) = 1.0;
  return m;
}

/// A = (sigma1 - sigma2)/sqrt2: |a> -> |gg>, |ee> -> -|a>.
inline Mat4 lower_antisymmetric() {
  Mat4 m = Mat4::Zero();
  m(idx(Level::gg), idx(Level::a)) = 1.0;
  m(idx(Level::a), idx(Level::ee)) = -1.0;
  return m;
}

inline Mat4 lower(Channel c) {
  return c == Channel::symmetric ? lower_symmetric() : lower_antisymmetric();
}

/// Dipole-dipole Hamiltonian; see cls_sign for the convention.
inline Mat4 dipole_hamiltonian(const CollectiveRates& r) {
  Mat4 h = Mat4::Zero();
  h(idx(Level::s), idx(Level::s)) = cls_sign * r.lambda12 / 2.0;
  h(idx(Level::a), idx(Level::a)) = -cls_sign * r.lambda12 / 2.0;
  return h;
}

/// Columns are the collective basis vectors written in the product basis
/// {|gg>, |eg>, |ge>, |ee>} (first letter is atom 1).
inline Mat4 collective_to_product() {
  const double r = 1.0 / std::sqrt(2.0);
  Mat4 u = Mat4::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = r;
  u(2, 1) = r;
  u(1, 2) = r;
  u(2, 2) = -r;
  u(3, 3) = 1.0;
  return u;
}

using Mat2 = Eigen::Matrix<cplx, 2, 2>;

// Single-atom operators in the (g, e) basis.
inline Mat2 pauli_z() { return (Mat2() << -1.0, 0.0, 0.0, 1.0).finished(); }
inline Mat2 pauli_x() { return (Mat2() << 0.0, 1.0, 1.0, 0.0).finished(); }
inline Mat2 pauli_y() { return (Mat2() << 0.0, cplx(0, 1), cplx(0, -1), 0.0).finished(); }
inline Mat2 raising() { return (Mat2() << 0.0, 0.0, 1.0, 0.0).finished(); }
inline Mat2 lowering() { return (Mat2() << 0.0, 1.0, 0.0, 0.0).finished(); }
inline Mat2 identity2() { return Mat2::Identity(); }

/// Product-basis operator o1 (atom 1) times o2 (atom 2). Index = i1 + 2*i2.
inline Mat4 kron(const Mat2& o1, const Mat2& o2) {
  Mat4 m;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2) m(i1 + 2 * i2, j1 + 2 * j2) = o1(i1, j1) * o2(i2, j2);
  return m;
}

inline Mat4 atom1(const Mat2& o) { return kron(o, identity2()); }
inline Mat4 atom2(const Mat2& o) { return kron(identity2(), o); }

/// Product-basis operator expressed in the collective basis.
inline Mat4 to_collective(const Mat4& product_op) {
  const Mat4 u = collective_to_product();
  return u.adjoint() * product_op * u;
}

}  // namespace ops

/// Two-atom Lindbladian with collective decay channels sqrt(gamma +- gamma12)
/// {S, A} and the dipole-dipole shift. Acts on any 4x4 block, Hermitian or not.
class Lindbladian {
 public:
  explicit Lindbladian(const CollectiveRates& r) : rates_(r) {
    const double gs = std::sqrt(std::max(0.0, r.symmetric_rate()));
    const double ga = std::sqrt(std::max(0.0, r.antisymmetric_rate()));
    jump_s_ = gs * ops::lower_symmetric();
    jump_a_ = ga * ops::lower_antisymmetric();
    hamiltonian_ = ops::dipole_hamiltonian(r);
    const cplx half_i(0.0, 0.5);
    effective_ = hamiltonian_ - half_i * (jump_s_.adjoint() * jump_s_ + jump_a_.adjoint() * jump_a_);
  }

  const CollectiveRates& rates() const { return rates_; }
  const Mat4& jump(Channel c) const { return c == Channel::symmetric ? jump_s_ : jump_a_; }
  const Mat4& hamiltonian() const { return hamiltonian_; }

  Mat4 apply(const Mat4& rho) const {
    const cplx i1(0.0, 1.0);
    Mat4 out = -i1 * (effective_ * rho) + i1 * (rho * effective_.adjoint());
    out.noalias() += jump_s_ * rho * jump_s_.adjoint();
    out.noalias() += jump_a_ * rho * jump_a_.adjoint();
    return out;
  }

 private:
  CollectiveRates rates_;
  Mat4 jump_s_, jump_a_, hamiltonian_, effective_;
};

/// The fifteen non-trivial two-atom operators, grouped by how they couple
/// to the input field.
enum class OperatorGroup { A, B };

struct AtomicOperator {
  std::string_view name;
  OperatorGroup group;
  char first;   // Pauli on atom 1: 'x', 'y', 'z' or '1'
  char second;  // Pauli on atom 2
};

inline constexpr std::array<AtomicOperator, 15> table1_operators{{
    {"sz1", OperatorGroup::A, 'z', '1'},
    {"sz2", OperatorGroup::A, '1', 'z'},
    {"sx1sx2", OperatorGroup::A, 'x', 'x'},
    {"sy1sy2", OperatorGroup::A, 'y', 'y'},
    {"sz1sz2", OperatorGroup::A, 'z', 'z'},
    {"sx1sy2", OperatorGroup::A, 'x', 'y'},
    {"sy1sx2", OperatorGroup::A, 'y', 'x'},
    {"sx1", OperatorGroup::B, 'x', '1'},
    {"sx2", OperatorGroup::B, '1', 'x'},
    {"sy1", OperatorGroup::B, 'y', '1'},
    {"sy2", OperatorGroup::B, '1', 'y'},
    {"sx1sz2", OperatorGroup::B, 'x', 'z'},
    {"sz1sx2", OperatorGroup::B, 'z', 'x'},
    {"sy1sz2", OperatorGroup::B, 'y', 'z'},
    {"sz1sy2", OperatorGroup::B, 'z', 'y'},
}};

namespace ops {

inline Mat2 pauli(char which) {
  switch (which) {
    case 'x': return pauli_x();
    case 'y': return pauli_y();
    case 'z': return pauli_z();
    default: return identity2();
  }
}

/// Product-basis matrix of a Table-1 operator.
inline Mat4 product_matrix(const AtomicOperator& op) { return kron(pauli(op.first), pauli(op.second)); }

}  // namespace ops

}  // namespace twoatom

#endif
