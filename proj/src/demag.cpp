#include "magnetoelast/demag.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

namespace magnetoelast {

namespace {

bool smooth235(int n) {
  for (int f : {2, 3, 5})
    while (n % f == 0) n /= f;
  return n == 1;
}

class SineTransform {
 public:
  explicit SineTransform(int n) : n_(n), buf_(2 * (n + 1)) {}

  // In-place along a strided line.
  void apply(double* x, int stride) {
    const int M = 2 * (n_ + 1);
    buf_[0] = 0.0;
    buf_[n_ + 1] = 0.0;
    for (int k = 0; k < n_; ++k) {
      buf_[k + 1] = x[k * stride];
      buf_[M - 1 - k] = -x[k * stride];
    }
    fft_.fwd(spec_, buf_);
    for (int k = 0; k < n_; ++k) x[k * stride] = -0.5 * spec_[k + 1].imag();
  }

 private:
  int n_;
  std::vector<double> buf_;
  std::vector<std::complex<double>> spec_;
  Eigen::FFT<double> fft_;
};

}  // namespace

int padded_size(int n, int pad) {
  int N = pad * n;
  while (!smooth235(N + 1)) ++N;
  return N;
}

Eigen::VectorXd sine_transform(const Eigen::VectorXd& x) {
  Eigen::VectorXd y = x;
  SineTransform t(static_cast<int>(x.size()));
  t.apply(y.data(), 1);
  return y;
}

struct DemagSolver::Plan {
  std::mutex lock;
  int px = 0, py = 0, ox = 0, oy = 0;
  std::unique_ptr<SineTransform> sx, sy;
  Eigen::VectorXd lx, ly;  // Dirichlet or periodic Laplacian eigenvalues per direction
  Eigen::FFT<double> fft;
};

DemagSolver::DemagSolver(const Grid& grid, int pad) : grid_(grid), pad_(pad), plan_(new Plan) {
  if (pad < 2 && !grid.periodic()) throw DomainError("demag pad must be at least 2");
  Plan& p = *plan_;
  const double hx = grid.hx(), hy = grid.hy();
  if (grid.periodic()) {
    p.px = grid.nx();
    p.py = grid.ny();
    p.lx.resize(p.px);
    p.ly.resize(p.py);
    for (int a = 0; a < p.px; ++a) {
      const double s = std::sin(std::numbers::pi * a / p.px);
      p.lx(a) = -4.0 * s * s / (hx * hx);
    }
    for (int b = 0; b < p.py; ++b) {
      const double s = std::sin(std::numbers::pi * b / p.py);
      p.ly(b) = -4.0 * s * s / (hy * hy);
    }
    return;
  }
  p.px = padded_size(grid.nx(), pad);
  p.py = padded_size(grid.ny(), pad);
  p.ox = (p.px - grid.nx()) / 2;
  p.oy = (p.py - grid.ny()) / 2;
  p.sx = std::make_unique<SineTransform>(p.px);
  p.sy = std::make_unique<SineTransform>(p.py);
  p.lx.resize(p.px);
  p.ly.resize(p.py);
  for (int k = 0; k < p.px; ++k)
    p.lx(k) = (2.0 * std::cos(std::numbers::pi * (k + 1) / (p.px + 1)) - 2.0) / (hx * hx);
  for (int k = 0; k < p.py; ++k)
    p.ly(k) = (2.0 * std::cos(std::numbers::pi * (k + 1) / (p.py + 1)) - 2.0) / (hy * hy);
}

DemagSolver::~DemagSolver() = default;
DemagSolver::DemagSolver(DemagSolver&&) noexcept = default;
DemagSolver& DemagSolver::operator=(DemagSolver&&) noexcept = default;

namespace {

using cplx = std::complex<double>;

// 2-D FFT of a row-major (x fastest) complex array, in place.
void fft2(Eigen::FFT<double>& fft, std::vector<cplx>& a, int nx, int ny, bool inverse) {
  std::vector<cplx> line, out;
  line.resize(nx);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) line[i] = a[i + nx * j];
    if (inverse) fft.inv(out, line); else fft.fwd(out, line);
    for (int i = 0; i < nx; ++i) a[i + nx * j] = out[i];
  }
  line.resize(ny);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) line[j] = a[i + nx * j];
    if (inverse) fft.inv(out, line); else fft.fwd(out, line);
    for (int j = 0; j < ny; ++j) a[i + nx * j] = out[j];
  }
}

}  // namespace

DemagSolution DemagSolver::solve(const MagnetizationField& m) const {
  Plan& p = *plan_;
  std::lock_guard<std::mutex> guard(p.lock);
  const int nx = grid_.nx(), ny = grid_.ny();
  const double hx = grid_.hx(), hy = grid_.hy();
  DemagSolution sol;
  sol.periodic = grid_.periodic();
  sol.px = p.px;
  sol.py = p.py;
  sol.ox = p.ox;
  sol.oy = p.oy;
  sol.hx = hx;
  sol.hy = hy;
  sol.grad_u.resize(2, grid_.cells());

  if (grid_.periodic()) {
    std::vector<cplx> mx(nx * ny), my(nx * ny);
    for (int c = 0; c < nx * ny; ++c) {
      mx[c] = m(0, c);
      my[c] = m(1, c);
    }
    fft2(p.fft, mx, nx, ny, false);
    fft2(p.fft, my, nx, ny, false);
    std::vector<cplx> u(nx * ny), gx(nx * ny), gy(nx * ny);
    for (int b = 0; b < ny; ++b)
      for (int a = 0; a < nx; ++a) {
        const int c = a + nx * b;
        const cplx dx(0.0, std::sin(2.0 * std::numbers::pi * a / nx) / hx);
        const cplx dy(0.0, std::sin(2.0 * std::numbers::pi * b / ny) / hy);
        const double lap = p.lx(a) + p.ly(b);
        const cplx uh = lap != 0.0 ? (dx * mx[c] + dy * my[c]) / lap : cplx(0.0);
        u[c] = uh;
        gx[c] = dx * uh;
        gy[c] = dy * uh;
      }
    fft2(p.fft, u, nx, ny, true);
    fft2(p.fft, gx, nx, ny, true);
    fft2(p.fft, gy, nx, ny, true);
    sol.u.resize(nx * ny);
    for (int c = 0; c < nx * ny; ++c) {
      sol.u(c) = u[c].real();
      sol.grad_u(0, c) = gx[c].real();
      sol.grad_u(1, c) = gy[c].real();
    }
    sol.h_dem = -sol.grad_u;
    return sol;
  }

  const int px = p.px, py = p.py;
  auto M = [&](int comp, int I, int J) {
    const int i = I - p.ox, j = J - p.oy;
    if (i < 0 || i >= nx || j < 0 || j >= ny) return 0.0;
    return m(comp, grid_.index(i, j));
  };
  // central divergence of the zero-extended magnetization
  Eigen::VectorXd s(px * py);
  for (int J = 0; J < py; ++J)
    for (int I = 0; I < px; ++I)
      s(I + px * J) = (M(0, I + 1, J) - M(0, I - 1, J)) / (2 * hx) +
                      (M(1, I, J + 1) - M(1, I, J - 1)) / (2 * hy);
  for (int J = 0; J < py; ++J) p.sx->apply(s.data() + px * J, 1);
  for (int I = 0; I < px; ++I) p.sy->apply(s.data() + I, px);
  const double norm = 4.0 / ((px + 1.0) * (py + 1.0));
  for (int J = 0; J < py; ++J)
    for (int I = 0; I < px; ++I) s(I + px * J) *= norm / (p.lx(I) + p.ly(J));
  for (int J = 0; J < py; ++J) p.sx->apply(s.data() + px * J, 1);
  for (int I = 0; I < px; ++I) p.sy->apply(s.data() + I, px);
  sol.u = std::move(s);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int I = i + p.ox, J = j + p.oy, c = grid_.index(i, j);
      sol.grad_u(0, c) = (sol.u(I + 1 + px * J) - sol.u(I - 1 + px * J)) / (2 * hx);
      sol.grad_u(1, c) = (sol.u(I + px * (J + 1)) - sol.u(I + px * (J - 1))) / (2 * hy);
    }
  sol.h_dem = -sol.grad_u;
  return sol;
}

DemagSolution solve_demag(const Grid& grid, const MagnetizationField& m, int pad) {
  return DemagSolver(grid, pad).solve(m);
}

DemagEnergy demag_energy(const DemagSolution& sol, const MagnetizationField& m, double mu0) {
  DemagEnergy e;
  const int px = sol.px, py = sol.py;
  const double area = sol.hx * sol.hy;
  auto U = [&](int I, int J) {
    if (sol.periodic) return sol.u(((I + px) % px) + px * ((J + py) % py));
    if (I < 0 || I >= px || J < 0 || J >= py) return 0.0;
    return sol.u(I + px * J);
  };
  double sum = 0.0;
  const int lo = sol.periodic ? 0 : -1;
  for (int J = 0; J < py; ++J)
    for (int I = lo; I < px; ++I) {
      const double d = (U(I + 1, J) - U(I, J)) / sol.hx;
      sum += d * d;
    }
  for (int J = lo; J < py; ++J)
    for (int I = 0; I < px; ++I) {
      const double d = (U(I, J + 1) - U(I, J)) / sol.hy;
      sum += d * d;
    }
  e.field_energy = 0.5 * mu0 * area * sum;
  e.interaction = mu0 * area * (m.topRows(2).cwiseProduct(sol.grad_u)).sum();
  return e;
}

}  // namespace magnetoelast
