#pragma once

#include "magnetoelast/grid.hpp"

#include <memory>

namespace magnetoelast {

// Potential of Laplace u = div(chi m) with h_dem = -grad u. In box mode u lives on an enlarged
// box with u = 0 beyond it; in periodic mode u lives on the grid itself.
struct DemagSolution {
  bool periodic = false;
  int px = 0, py = 0;  // potential grid size
  int ox = 0, oy = 0;  // offset of the domain inside it
  double hx = 0, hy = 0;
  ScalarField u;
  VectorField grad_u;  // on the domain
  VectorField h_dem;   // -grad_u
};

struct DemagEnergy {
  double field_energy = 0;  // mu0/2 * integral |grad u|^2 over the potential grid
  double interaction = 0;   // mu0 * integral_domain m . grad u
};

// Smallest size >= pad * n whose sine transform length n+1 has only factors 2, 3, 5.
int padded_size(int n, int pad);

class DemagSolver {
 public:
  DemagSolver(const Grid& grid, int pad = 4);
  ~DemagSolver();
  DemagSolver(DemagSolver&&) noexcept;
  DemagSolver& operator=(DemagSolver&&) noexcept;

  DemagSolution solve(const MagnetizationField& m) const;
  int pad() const { return pad_; }

 private:
  struct Plan;
  Grid grid_;
  int pad_;
  std::unique_ptr<Plan> plan_;
};

DemagSolution solve_demag(const Grid& grid, const MagnetizationField& m, int pad = 4);
DemagEnergy demag_energy(const DemagSolution& sol, const MagnetizationField& m, double mu0);

// Orthogonal-up-to-scale sine transform: X_k = sum_n x_n sin(pi (n+1)(k+1)/(N+1)).
Eigen::VectorXd sine_transform(const Eigen::VectorXd& x);

}  // namespace magnetoelast
