#pragma once

#include "magnetoelast/core.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <string>

namespace magnetoelast {

enum class BoundaryMode { periodic, box };

// Ghost rule at a box wall: even mirrors the interior value (zero normal derivative),
// odd mirrors it with a sign flip (zero value at the wall).
enum class Closure { even, odd };

struct ComponentClosure {
  Closure x = Closure::even;
  Closure y = Closure::even;
};

inline constexpr ComponentClosure kNeumann{Closure::even, Closure::even};

// Velocity component k is odd across the walls normal to direction k (v.n = 0).
inline ComponentClosure velocity_closure(int component) {
  return component == 0 ? ComponentClosure{Closure::odd, Closure::even}
                        : ComponentClosure{Closure::even, Closure::odd};
}

using ScalarField = Eigen::VectorXd;
template <int C> using Field = Eigen::Matrix<double, C, Eigen::Dynamic>;
using VectorField = Field<2>;
using MagnetizationField = Field<3>;
// 2x2 matrix per cell, column-major: (00, 10, 01, 11).
using MatrixField = Field<4>;
// Second gradient per cell, index i + 2j + 4k for d_j d_k v_i.
using Rank3Field = Field<8>;
// Gradient of a 3-component field per cell, column-major 3x2: entry (k, j) at k + 3j.
using MagnetizationGradient = Field<6>;
using SparseMatrix = Eigen::SparseMatrix<double>;

class Grid {
 public:
  Grid(int nx, int ny, double hx, double hy, BoundaryMode mode);
  static Grid unit_square(int n, BoundaryMode mode) { return Grid(n, n, 1.0 / n, 1.0 / n, mode); }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  BoundaryMode mode() const { return mode_; }
  bool periodic() const { return mode_ == BoundaryMode::periodic; }
  int cells() const { return nx_ * ny_; }
  int index(int i, int j) const { return i + nx_ * j; }
  double cell_area() const { return hx_ * hy_; }
  double x(int i) const { return (i + 0.5) * hx_; }
  double y(int j) const { return (j + 0.5) * hy_; }
  double width() const { return nx_ * hx_; }
  double height() const { return ny_ * hy_; }

  // Central differences with the given ghost rule; the rule is ignored in periodic mode.
  const SparseMatrix& dx(Closure c) const;
  const SparseMatrix& dy(Closure c) const;
  const SparseMatrix& dxx(Closure c) const;
  const SparseMatrix& dyy(Closure c) const;
  SparseMatrix dxy(ComponentClosure c) const;

  // Forward differences across interior faces (all faces when periodic).
  const SparseMatrix& face_dx() const;
  const SparseMatrix& face_dy() const;

  // Velocity gradient (4N x 2N) and second gradient (8N x 2N) on component-blocked vectors.
  const SparseMatrix& velocity_gradient_matrix() const;
  const SparseMatrix& velocity_second_gradient_matrix() const;

 private:
  struct Stencils;
  int nx_, ny_;
  double hx_, hy_;
  BoundaryMode mode_;
  std::shared_ptr<const Stencils> ops_;
};

// Component-blocked layout: all cells of component 0, then component 1, ...
template <int C>
Eigen::VectorXd blocked(const Field<C>& f) {
  const Eigen::Index n = f.cols();
  Eigen::VectorXd out(C * n);
  for (int c = 0; c < C; ++c) out.segment(c * n, n) = f.row(c).transpose();
  return out;
}

template <int C>
Field<C> unblocked(const Eigen::VectorXd& b) {
  const Eigen::Index n = b.size() / C;
  Field<C> out(C, n);
  for (int c = 0; c < C; ++c) out.row(c) = b.segment(c * n, n).transpose();
  return out;
}

// Sum over cells of a.b times the cell area.
template <typename A, typename B>
double inner(const Grid& grid, const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return grid.cell_area() * a.cwiseProduct(b).sum();
}

VectorField grad(const Grid& grid, const ScalarField& f, ComponentClosure c = kNeumann);
ScalarField div(const Grid& grid, const VectorField& v);
MatrixField velocity_gradient(const Grid& grid, const VectorField& v);
MatrixField sym_grad(const Grid& grid, const VectorField& v);
MatrixField skw_grad(const Grid& grid, const VectorField& v);
Rank3Field second_grad(const Grid& grid, const VectorField& v);
ScalarField laplacian(const Grid& grid, const ScalarField& f, ComponentClosure c = kNeumann);
MagnetizationGradient magnetization_gradient(const Grid& grid, const MagnetizationField& m);

// Boundary samples at face midpoints, counter-clockwise sides.
struct BoundaryField {
  Eigen::VectorXd bottom, right, top, left;
};

BoundaryField boundary_trace(const Grid& grid, const ScalarField& f);
double boundary_integral(const Grid& grid, const BoundaryField& f);
// Derivative along the counter-clockwise tangent of a tangential boundary component.
BoundaryField surface_divergence(const Grid& grid, const BoundaryField& t);

// The discrete boundary term B with <grad f, v> + <f, div v> = B for the given ghost rules.
double boundary_pairing(const Grid& grid, const ScalarField& f, ComponentClosure fc,
                        const VectorField& v, ComponentClosure vx, ComponentClosure vy);

struct GridDump {
  std::string name;
  int nx = 0, ny = 0;
  double hx = 0, hy = 0;
  Eigen::MatrixXd data;  // components x cells
};

void write_dump(const std::string& path, const std::string& name, const Grid& grid,
                const Eigen::MatrixXd& data);
GridDump read_dump(const std::string& path);

}  // namespace magnetoelast
