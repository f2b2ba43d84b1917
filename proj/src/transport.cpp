#include "magnetoelast/transport.hpp"

#include <algorithm>
#include <cmath>

namespace magnetoelast {

namespace {

// Visits every flux-carrying face: f(left cell, right cell, normal velocity, spacing, axis).
template <typename Visit>
void for_each_face(const Grid& grid, const VectorField& v, Visit&& visit) {
  const int nx = grid.nx(), ny = grid.ny();
  const int fx = grid.periodic() ? nx : nx - 1;
  const int fy = grid.periodic() ? ny : ny - 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < fx; ++i) {
      const int L = grid.index(i, j), R = grid.index((i + 1) % nx, j);
      visit(L, R, 0.5 * (v(0, L) + v(0, R)), grid.hx(), 0);
    }
  for (int j = 0; j < fy; ++j)
    for (int i = 0; i < nx; ++i) {
      const int L = grid.index(i, j), R = grid.index(i, (j + 1) % ny);
      visit(L, R, 0.5 * (v(1, L) + v(1, R)), grid.hy(), 1);
    }
}

template <int C>
Eigen::Matrix<double, C, 1> face_value(const Field<C>& q, int L, int R, double u,
                                       AdvectionScheme scheme) {
  if (scheme == AdvectionScheme::central2_rk2) return 0.5 * (q.col(L) + q.col(R));
  return u >= 0 ? q.col(L) : q.col(R);
}

template <int C, typename Rhs>
Field<C> integrate(const Field<C>& q0, double dt, AdvectionScheme scheme, Rhs&& rhs) {
  Field<C> q1 = q0 + dt * rhs(q0);
  if (scheme == AdvectionScheme::upwind1) return q1;
  return 0.5 * (q0 + q1 + dt * rhs(q1));
}

}  // namespace

template <int C>
Field<C> flux_divergence(const Grid& grid, const VectorField& v, const Field<C>& q,
                         AdvectionScheme scheme) {
  Field<C> out = Field<C>::Zero(C, q.cols());
  for_each_face(grid, v, [&](int L, int R, double u, double h, int) {
    const Eigen::Matrix<double, C, 1> flux = u * face_value<C>(q, L, R, u, scheme) / h;
    out.col(L) += flux;
    out.col(R) -= flux;
  });
  return out;
}

template <int C>
Field<C> advection(const Grid& grid, const VectorField& v, const Field<C>& q,
                   AdvectionScheme scheme) {
  Field<C> out = Field<C>::Zero(C, q.cols());
  for_each_face(grid, v, [&](int L, int R, double u, double h, int) {
    const Eigen::Matrix<double, C, 1> qf = face_value<C>(q, L, R, u, scheme);
    out.col(L) += u * (qf - q.col(L)) / h;
    out.col(R) -= u * (qf - q.col(R)) / h;
  });
  return out;
}

template Field<1> flux_divergence<1>(const Grid&, const VectorField&, const Field<1>&, AdvectionScheme);
template Field<2> flux_divergence<2>(const Grid&, const VectorField&, const Field<2>&, AdvectionScheme);
template Field<3> flux_divergence<3>(const Grid&, const VectorField&, const Field<3>&, AdvectionScheme);
template Field<4> flux_divergence<4>(const Grid&, const VectorField&, const Field<4>&, AdvectionScheme);
template Field<1> advection<1>(const Grid&, const VectorField&, const Field<1>&, AdvectionScheme);
template Field<2> advection<2>(const Grid&, const VectorField&, const Field<2>&, AdvectionScheme);
template Field<3> advection<3>(const Grid&, const VectorField&, const Field<3>&, AdvectionScheme);
template Field<4> advection<4>(const Grid&, const VectorField&, const Field<4>&, AdvectionScheme);

template <int C>
VectorField advection_power_gradient(const Grid& grid, const VectorField& v, const Field<C>& q,
                                     const Field<C>& weight, AdvectionScheme scheme) {
  VectorField g = VectorField::Zero(2, q.cols());
  for_each_face(grid, v, [&](int L, int R, double u, double h, int axis) {
    const Eigen::Matrix<double, C, 1> qf = face_value<C>(q, L, R, u, scheme);
    const double c = (weight.col(L).dot(qf - q.col(L)) - weight.col(R).dot(qf - q.col(R))) / h;
    g(axis, L) += 0.5 * c;
    g(axis, R) += 0.5 * c;
  });
  return g;
}

template VectorField advection_power_gradient<2>(const Grid&, const VectorField&, const Field<2>&,
                                                 const Field<2>&, AdvectionScheme);
template VectorField advection_power_gradient<3>(const Grid&, const VectorField&, const Field<3>&,
                                                 const Field<3>&, AdvectionScheme);

Kinematics kinematics(const Grid& grid, const VectorField& v) {
  return Kinematics{v, velocity_gradient(grid, v)};
}

double stable_dt(const Grid& grid, const VectorField& v, double cfl, double dt_max) {
  const double vmax = v.cols() > 0 ? v.colwise().norm().maxCoeff() : 0.0;
  if (!(vmax > 0)) return dt_max;
  return std::min(dt_max, cfl * std::min(grid.hx(), grid.hy()) / vmax);
}

ScalarField advance_conserved(const Grid& grid, const ScalarField& q, const VectorField& v,
                              const TransportStep& step) {
  const Field<1> q0 = q.transpose();
  const Field<1> q1 = integrate<1>(q0, step.dt, step.scheme, [&](const Field<1>& x) {
    return Field<1>(-flux_divergence<1>(grid, v, x, step.scheme));
  });
  return q1.transpose();
}

ScalarField advance_density(const Grid& grid, const ScalarField& rho, const VectorField& v,
                            const TransportStep& step) {
  ScalarField r1 = advance_conserved(grid, rho, v, step);
  if (r1.minCoeff() < 0) throw PositivityError("density became negative; reduce dt");
  return r1;
}

namespace {

MatrixField stretch(const MatrixField& L, const MatrixField& F) {
  MatrixField out(4, F.cols());
  for (Eigen::Index c = 0; c < F.cols(); ++c) {
    const Eigen::Map<const Eigen::Matrix2d> Lc(L.col(c).data()), Fc(F.col(c).data());
    Eigen::Map<Eigen::Matrix2d>(out.col(c).data()) = Lc * Fc;
  }
  return out;
}

}  // namespace

MagnetizationField spin(const MatrixField& L, const MagnetizationField& m) {
  MagnetizationField out = MagnetizationField::Zero(3, m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double w = 0.5 * (L(2, c) - L(1, c));  // W = [[0, w], [-w, 0]]
    out(0, c) = w * m(1, c);
    out(1, c) = -w * m(0, c);
  }
  return out;
}

DefgradUpdate advance_defgrad(const Grid& grid, const MatrixField& F, const Kinematics& kin,
                              const TransportStep& step, double degeneracy_floor) {
  DefgradUpdate out;
  out.F = integrate<4>(F, step.dt, step.scheme, [&](const MatrixField& q) {
    return MatrixField(stretch(kin.L, q) - advection<4>(grid, kin.v, q, step.scheme));
  });
  out.min_det = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < out.F.cols(); ++c)
    out.min_det = std::min(out.min_det, out.F(0, c) * out.F(3, c) - out.F(1, c) * out.F(2, c));
  if (out.min_det <= degeneracy_floor)
    throw DomainError("deformation gradient degenerated: min det F = " + std::to_string(out.min_det));
  return out;
}

MagnetizationField advance_magnetization(const Grid& grid, const MagnetizationField& m,
                                         const Kinematics& kin, const MagnetizationField& r,
                                         const TransportStep& step) {
  return integrate<3>(m, step.dt, step.scheme, [&](const MagnetizationField& q) {
    return MagnetizationField(spin(kin.L, q) - advection<3>(grid, kin.v, q, step.scheme) + r);
  });
}

MagnetizationField corotational_rate(const Grid& grid, const MagnetizationField& m,
                                     const Kinematics& kin, const MagnetizationField& dm_dt,
                                     AdvectionScheme scheme) {
  return dm_dt + advection<3>(grid, kin.v, m, scheme) - spin(kin.L, m);
}

}  // namespace magnetoelast
