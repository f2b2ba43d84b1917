#include "magnetoelast/grid.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <bit>
#include <fstream>
#include <sstream>
#include <vector>

namespace magnetoelast {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

double ghost_sign(Closure c) { return c == Closure::even ? 1.0 : -1.0; }

// Adds weight * f_{i+offset} to row i, resolving out-of-range indices by wrap or ghost rule.
void add_neighbour(Triplets& t, int n, bool periodic, Closure c, int i, int offset, double w) {
  int j = i + offset;
  if (j >= 0 && j < n) {
    t.emplace_back(i, j, w);
  } else if (periodic) {
    t.emplace_back(i, (j + n) % n, w);
  } else {
    // mirror across the wall: ghost at -1 mirrors 0, ghost at n mirrors n-1
    const int mirror = j < 0 ? -j - 1 : 2 * n - j - 1;
    t.emplace_back(i, mirror, ghost_sign(c) * w);
  }
}

SparseMatrix first_difference(int n, double h, bool periodic, Closure c) {
  Triplets t;
  for (int i = 0; i < n; ++i) {
    add_neighbour(t, n, periodic, c, i, 1, 0.5 / h);
    add_neighbour(t, n, periodic, c, i, -1, -0.5 / h);
  }
  SparseMatrix d(n, n);
  d.setFromTriplets(t.begin(), t.end());
  d.prune(0.0);
  return d;
}

SparseMatrix second_difference(int n, double h, bool periodic, Closure c) {
  Triplets t;
  const double w = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    add_neighbour(t, n, periodic, c, i, 1, w);
    add_neighbour(t, n, periodic, c, i, -1, w);
    t.emplace_back(i, i, -2.0 * w);
  }
  SparseMatrix d(n, n);
  d.setFromTriplets(t.begin(), t.end());
  d.prune(0.0);
  return d;
}

SparseMatrix face_difference(int n, double h, bool periodic) {
  const int faces = periodic ? n : n - 1;
  Triplets t;
  for (int f = 0; f < faces; ++f) {
    t.emplace_back(f, f, -1.0 / h);
    t.emplace_back(f, (f + 1) % n, 1.0 / h);
  }
  SparseMatrix d(faces, n);
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

SparseMatrix identity(int n) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

// Places sparse blocks into a larger matrix at (row_block * rows, col_block * cols).
SparseMatrix assemble_blocks(int rows, int cols, int row_blocks, int col_blocks,
                             const std::vector<std::tuple<int, int, const SparseMatrix*>>& blocks) {
  Triplets t;
  for (const auto& [rb, cb, m] : blocks) {
    for (int k = 0; k < m->outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(*m, k); it; ++it)
        t.emplace_back(rb * rows + it.row(), cb * cols + it.col(), it.value());
  }
  SparseMatrix out(row_blocks * rows, col_blocks * cols);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

struct Grid::Stencils {
  SparseMatrix dx[2], dy[2], dxx[2], dyy[2];
  SparseMatrix face_dx, face_dy;
  SparseMatrix G, G2;
};

Grid::Grid(int nx, int ny, double hx, double hy, BoundaryMode mode)
    : nx_(nx), ny_(ny), hx_(hx), hy_(hy), mode_(mode) {
  if (nx < 4 || ny < 4) throw DomainError("grid needs at least 4 cells per direction");
  if (!(hx > 0) || !(hy > 0)) throw DomainError("grid spacing must be positive");
  auto s = std::make_shared<Stencils>();
  const bool per = periodic();
  const SparseMatrix Ix = identity(nx), Iy = identity(ny);
  for (int c = 0; c < 2; ++c) {
    const Closure cl = c == 0 ? Closure::even : Closure::odd;
    s->dx[c] = Eigen::kroneckerProduct(Iy, first_difference(nx, hx, per, cl));
    s->dy[c] = Eigen::kroneckerProduct(first_difference(ny, hy, per, cl), Ix);
    s->dxx[c] = Eigen::kroneckerProduct(Iy, second_difference(nx, hx, per, cl));
    s->dyy[c] = Eigen::kroneckerProduct(second_difference(ny, hy, per, cl), Ix);
  }
  s->face_dx = Eigen::kroneckerProduct(Iy, face_difference(nx, hx, per));
  s->face_dy = Eigen::kroneckerProduct(face_difference(ny, hy, per), Ix);

  const int n = cells();
  const auto ci = [](Closure c) { return c == Closure::even ? 0 : 1; };
  const ComponentClosure c0 = velocity_closure(0), c1 = velocity_closure(1);
  const SparseMatrix& dx0 = s->dx[ci(c0.x)];
  const SparseMatrix& dx1 = s->dx[ci(c1.x)];
  const SparseMatrix& dy0 = s->dy[ci(c0.y)];
  const SparseMatrix& dy1 = s->dy[ci(c1.y)];
  // rows: L00 = dx vx, L10 = dx vy, L01 = dy vx, L11 = dy vy
  s->G = assemble_blocks(n, n, 4, 2, {{0, 0, &dx0}, {1, 1, &dx1}, {2, 0, &dy0}, {3, 1, &dy1}});
  const SparseMatrix& dxx0 = s->dxx[ci(c0.x)];
  const SparseMatrix& dxx1 = s->dxx[ci(c1.x)];
  const SparseMatrix& dyy0 = s->dyy[ci(c0.y)];
  const SparseMatrix& dyy1 = s->dyy[ci(c1.y)];
  const SparseMatrix dxy0 = dy0 * dx0;
  const SparseMatrix dxy1 = dy1 * dx1;
  s->G2 = assemble_blocks(n, n, 8, 2,
                          {{0, 0, &dxx0}, {1, 1, &dxx1}, {2, 0, &dxy0}, {3, 1, &dxy1},
                           {4, 0, &dxy0}, {5, 1, &dxy1}, {6, 0, &dyy0}, {7, 1, &dyy1}});
  ops_ = s;
}

const SparseMatrix& Grid::dx(Closure c) const { return ops_->dx[c == Closure::even ? 0 : 1]; }
const SparseMatrix& Grid::dy(Closure c) const { return ops_->dy[c == Closure::even ? 0 : 1]; }
const SparseMatrix& Grid::dxx(Closure c) const { return ops_->dxx[c == Closure::even ? 0 : 1]; }
const SparseMatrix& Grid::dyy(Closure c) const { return ops_->dyy[c == Closure::even ? 0 : 1]; }
SparseMatrix Grid::dxy(ComponentClosure c) const { return dy(c.y) * dx(c.x); }
const SparseMatrix& Grid::face_dx() const { return ops_->face_dx; }
const SparseMatrix& Grid::face_dy() const { return ops_->face_dy; }
const SparseMatrix& Grid::velocity_gradient_matrix() const { return ops_->G; }
const SparseMatrix& Grid::velocity_second_gradient_matrix() const { return ops_->G2; }

VectorField grad(const Grid& grid, const ScalarField& f, ComponentClosure c) {
  VectorField g(2, grid.cells());
  g.row(0) = (grid.dx(c.x) * f).transpose();
  g.row(1) = (grid.dy(c.y) * f).transpose();
  return g;
}

ScalarField div(const Grid& grid, const VectorField& v) {
  const ScalarField vx = v.row(0).transpose(), vy = v.row(1).transpose();
  return grid.dx(velocity_closure(0).x) * vx + grid.dy(velocity_closure(1).y) * vy;
}

MatrixField velocity_gradient(const Grid& grid, const VectorField& v) {
  return unblocked<4>(grid.velocity_gradient_matrix() * blocked<2>(v));
}

MatrixField sym_grad(const Grid& grid, const VectorField& v) {
  MatrixField L = velocity_gradient(grid, v);
  const Eigen::RowVectorXd off = 0.5 * (L.row(1) + L.row(2));
  L.row(1) = off;
  L.row(2) = off;
  return L;
}

MatrixField skw_grad(const Grid& grid, const VectorField& v) {
  MatrixField L = velocity_gradient(grid, v);
  const Eigen::RowVectorXd off = 0.5 * (L.row(1) - L.row(2));
  L.row(0).setZero();
  L.row(3).setZero();
  L.row(1) = off;
  L.row(2) = -off;
  return L;
}

Rank3Field second_grad(const Grid& grid, const VectorField& v) {
  return unblocked<8>(grid.velocity_second_gradient_matrix() * blocked<2>(v));
}

ScalarField laplacian(const Grid& grid, const ScalarField& f, ComponentClosure c) {
  return grid.dxx(c.x) * f + grid.dyy(c.y) * f;
}

MagnetizationGradient magnetization_gradient(const Grid& grid, const MagnetizationField& m) {
  MagnetizationGradient g(6, grid.cells());
  for (int k = 0; k < 3; ++k) {
    const ScalarField mk = m.row(k).transpose();
    g.row(k) = (grid.dx(Closure::even) * mk).transpose();
    g.row(k + 3) = (grid.dy(Closure::even) * mk).transpose();
  }
  return g;
}

BoundaryField boundary_trace(const Grid& grid, const ScalarField& f) {
  if (grid.periodic()) throw UnsupportedOperation("boundary trace needs box mode");
  const int nx = grid.nx(), ny = grid.ny();
  BoundaryField b;
  b.bottom.resize(nx);
  b.top.resize(nx);
  b.left.resize(ny);
  b.right.resize(ny);
  for (int i = 0; i < nx; ++i) {
    b.bottom(i) = f(grid.index(i, 0));
    b.top(i) = f(grid.index(i, ny - 1));
  }
  for (int j = 0; j < ny; ++j) {
    b.left(j) = f(grid.index(0, j));
    b.right(j) = f(grid.index(nx - 1, j));
  }
  return b;
}

double boundary_integral(const Grid& grid, const BoundaryField& f) {
  if (grid.periodic()) throw UnsupportedOperation("boundary integral needs box mode");
  return grid.hx() * (f.bottom.sum() + f.top.sum()) + grid.hy() * (f.left.sum() + f.right.sum());
}

namespace {

Eigen::VectorXd side_derivative(const Eigen::VectorXd& t, double h) {
  const Eigen::Index n = t.size();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == 0) d(i) = (-3 * t(0) + 4 * t(1) - t(2)) / (2 * h);
    else if (i == n - 1) d(i) = (3 * t(n - 1) - 4 * t(n - 2) + t(n - 3)) / (2 * h);
    else d(i) = (t(i + 1) - t(i - 1)) / (2 * h);
  }
  return d;
}

}  // namespace

BoundaryField surface_divergence(const Grid& grid, const BoundaryField& t) {
  if (grid.periodic()) throw UnsupportedOperation("surface divergence needs box mode");
  BoundaryField d;
  // samples are stored in increasing coordinate order; the tangent runs counter-clockwise
  d.bottom = side_derivative(t.bottom, grid.hx());
  d.right = side_derivative(t.right, grid.hy());
  d.top = -side_derivative(t.top, grid.hx());
  d.left = -side_derivative(t.left, grid.hy());
  return d;
}

double boundary_pairing(const Grid& grid, const ScalarField& f, ComponentClosure fc,
                        const VectorField& v, ComponentClosure vx, ComponentClosure vy) {
  if (grid.periodic()) return 0.0;
  const int nx = grid.nx(), ny = grid.ny();
  double sum = 0.0;
  for (int j = 0; j < ny; ++j) {
    const int l = grid.index(0, j), r = grid.index(nx - 1, j);
    const double sf = ghost_sign(fc.x), sv = ghost_sign(vx.x);
    sum += 0.5 * grid.hy() * (sf * f(r) * v(0, r) + f(r) * sv * v(0, r));
    sum -= 0.5 * grid.hy() * (sf * f(l) * v(0, l) + f(l) * sv * v(0, l));
  }
  for (int i = 0; i < nx; ++i) {
    const int b = grid.index(i, 0), t = grid.index(i, ny - 1);
    const double sf = ghost_sign(fc.y), sv = ghost_sign(vy.y);
    sum += 0.5 * grid.hx() * (sf * f(t) * v(1, t) + f(t) * sv * v(1, t));
    sum -= 0.5 * grid.hx() * (sf * f(b) * v(1, b) + f(b) * sv * v(1, b));
  }
  return sum;
}

void write_dump(const std::string& path, const std::string& name, const Grid& grid,
                const Eigen::MatrixXd& data) {
  static_assert(std::endian::native == std::endian::little, "dump format is little-endian");
  if (data.cols() != grid.cells()) throw DomainError("dump data does not match grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << name << "\n" << grid.nx() << " " << grid.ny() << " " << grid.hx() << " " << grid.hy()
      << "\n" << data.rows() << "\n";
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(sizeof(double) * data.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

GridDump read_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  GridDump d;
  std::string line;
  std::getline(in, d.name);
  std::getline(in, line);
  std::istringstream dims(line);
  dims >> d.nx >> d.ny >> d.hx >> d.hy;
  std::getline(in, line);
  const int comps = std::stoi(line);
  if (!dims || d.nx <= 0 || d.ny <= 0 || comps <= 0) throw std::runtime_error("bad dump header in " + path);
  d.data.resize(comps, static_cast<Eigen::Index>(d.nx) * d.ny);
  in.read(reinterpret_cast<char*>(d.data.data()),
          static_cast<std::streamsize>(sizeof(double) * d.data.size()));
  if (!in) throw std::runtime_error("truncated dump " + path);
  return d;
}

}  // namespace magnetoelast
