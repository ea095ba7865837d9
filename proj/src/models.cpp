#include "adsde/models.hpp"

#include <cmath>
#include <stdexcept>

namespace adsde {

namespace {

double spectral_norm_symmetric(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

LyapunovData squared_norm_lyapunov(std::size_t dim) {
  LyapunovData lyap;
  lyap.V = [](const Vector& x) { return x.squaredNorm() + 1.0; };
  lyap.gradient = [](const Vector& x) -> Vector { return 2.0 * x; };
  lyap.hessian = [dim](const Vector&) -> Matrix {
    return 2.0 * Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  };
  lyap.hessian_norm_sup = 2.0;
  lyap.gradient_constant = 4.0;
  lyap.exponent_a = 1.0;
  return lyap;
}

Vector lorenz_drift(const Vector& u) {
  Vector b(3);
  b[0] = 10.0 * (u[1] - u[0]);
  b[1] = 28.0 * u[0] - u[1] - u[0] * u[2];
  b[2] = u[0] * u[1] - (8.0 / 3.0) * u[2];
  return b;
}

Matrix lorenz_diffusion(const Vector&) {
  Matrix s = Matrix::Zero(3, 3);
  s(0, 0) = 1.0;
  s(1, 1) = 1.0;
  return s;
}

constexpr double kDof3Stiffness[3] = {1.3, 0.154, 0.196};
constexpr double kDof3NoiseGain = 0.5;   // g0
constexpr double kDof3Damping = 0.9965;  // f0
constexpr double kMassConditionLimit = 1e12;

// M(q)^{-1} v with a conditioning guard.
Eigen::Vector3d solve_mass(const Eigen::Matrix3d& mass, const Eigen::Vector3d& v) {
  Eigen::PartialPivLU<Eigen::Matrix3d> lu(mass);
  const double rcond = lu.rcond();
  if (!(rcond * kMassConditionLimit >= 1.0)) {
    throw ModelEvaluationError("dof3 mass matrix is numerically singular (rcond " +
                               std::to_string(rcond) + ")");
  }
  return lu.solve(v);
}

}  // namespace

double LyapunovData::value(const Vector& x) const {
  const double v = V(x);
  if (!(v >= 1.0)) {
    throw ModelEvaluationError("Lyapunov function below 1 (V = " + std::to_string(v) + ")");
  }
  return v;
}

double LyapunovData::hessian_norm(const Vector& x) const {
  if (hessian) return spectral_norm_symmetric(hessian(x));
  if (hessian_norm_sup) return *hessian_norm_sup;
  throw MissingDerivatives("Lyapunov data has no Hessian information");
}

Vector HamiltonianModel::b1(const Vector& x) const { return dp_h(x); }

Vector HamiltonianModel::b2(const Vector& x) const {
  return -dq_h(x) - damping(x) * dp_h(x);
}

Vector HamiltonianModel::drift(const Vector& x) const {
  const auto d = static_cast<Eigen::Index>(dof);
  const Vector dp = dp_h(x);
  Vector b(2 * d);
  b.head(d) = dp;
  b.tail(d) = -dq_h(x) - damping(x) * dp;
  return b;
}

Matrix HamiltonianModel::diffusion(const Vector& x) const {
  const auto d = static_cast<Eigen::Index>(dof);
  Matrix s = Matrix::Zero(2 * d, static_cast<Eigen::Index>(noise_dim));
  s.bottomRows(d) = noise(x);
  return s;
}

SdeModel induced_sde(std::shared_ptr<const HamiltonianModel> model) {
  SdeModel sde;
  sde.label = model->label;
  sde.state_dim = 2 * model->dof;
  sde.noise_dim = model->noise_dim;
  sde.drift = [m = model.get()](const Vector& x) { return m->drift(x); };
  sde.diffusion = [m = model.get()](const Vector& x) { return m->diffusion(x); };
  sde.lyapunov = model->lyapunov;
  sde.hamiltonian = std::move(model);
  return sde;
}

SdeModel lorenz_model() {
  SdeModel model;
  model.label = "lorenz";
  model.state_dim = 3;
  model.noise_dim = 3;
  model.drift = lorenz_drift;
  model.diffusion = lorenz_diffusion;
  model.lyapunov = squared_norm_lyapunov(3);
  model.lyapunov.trace_constant = 2.0;
  return model;
}

SdeModel lorenz_model_shifted_lyapunov() {
  SdeModel model = lorenz_model();
  model.label = "lorenz-shifted";
  auto shift = [](const Vector& u) {
    Vector s = u;
    s[2] -= 38.0;
    return s;
  };
  model.lyapunov.V = [shift](const Vector& u) { return shift(u).squaredNorm() + 1.0; };
  model.lyapunov.gradient = [shift](const Vector& u) -> Vector { return 2.0 * shift(u); };
  return model;
}

Potential quadratic_potential(std::size_t dim) {
  Potential pot;
  pot.dim = dim;
  pot.g.value = [](const Vector& q) { return 0.5 * q.squaredNorm(); };
  pot.g.gradient = [](const Vector& q) -> Vector { return q; };
  pot.g.hessian = [dim](const Vector&) -> Matrix {
    return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  };
  pot.constant_hessian_scale = 1.0;
  return pot;
}

HamiltonianModel langevin_model(const Potential& pot, double damping, const Matrix& c) {
  if (!(damping > 0.0)) throw std::invalid_argument("Langevin damping must be positive");
  const auto d = static_cast<Eigen::Index>(pot.dim);
  if (c.rows() != d || c.cols() != d) throw std::invalid_argument("noise matrix must be d x d");
  if (Eigen::FullPivLU<Matrix>(c).rank() != d) {
    throw std::invalid_argument("Langevin noise matrix must be invertible");
  }
  if (!pot.g.has_derivatives()) throw MissingDerivatives("potential needs gradient and Hessian");

  HamiltonianModel model;
  model.label = "langevin";
  model.dof = pot.dim;
  model.noise_dim = pot.dim;
  const SmoothFunction g = pot.g;
  model.hamiltonian = [g, d](const Vector& x) {
    return 0.5 * x.tail(d).squaredNorm() + g.value(x.head(d));
  };
  model.dp_h = [d](const Vector& x) -> Vector { return x.tail(d); };
  model.dq_h = [g, d](const Vector& x) -> Vector { return g.gradient(x.head(d)); };
  model.damping = [damping, d](const Vector&) -> Matrix {
    return damping * Matrix::Identity(d, d);
  };
  model.noise = [c](const Vector&) -> Matrix { return c; };

  const double gam = damping;
  LyapunovData& lyap = model.lyapunov;
  lyap.V = [g, d, gam](const Vector& x) {
    const auto q = x.head(d);
    const auto p = x.tail(d);
    return 0.5 * p.squaredNorm() + g.value(q) + 0.5 * gam * p.dot(q) +
           0.25 * gam * gam * q.squaredNorm() + 1.0;
  };
  lyap.gradient = [g, d, gam](const Vector& x) -> Vector {
    const Vector q = x.head(d);
    const Vector p = x.tail(d);
    Vector grad(2 * d);
    grad.head(d) = g.gradient(q) + 0.5 * gam * p + 0.5 * gam * gam * q;
    grad.tail(d) = p + 0.5 * gam * q;
    return grad;
  };
  lyap.hessian = [g, d, gam](const Vector& x) -> Matrix {
    Matrix h(2 * d, 2 * d);
    const Matrix id = Matrix::Identity(d, d);
    h.topLeftCorner(d, d) = g.hessian(x.head(d)) + 0.5 * gam * gam * id;
    h.topRightCorner(d, d) = 0.5 * gam * id;
    h.bottomLeftCorner(d, d) = 0.5 * gam * id;
    h.bottomRightCorner(d, d) = id;
    return h;
  };
  if (pot.constant_hessian_scale) {
    // D^2 V is then the Kronecker product of this 2x2 block with Id.
    Matrix block(2, 2);
    block << *pot.constant_hessian_scale + 0.5 * gam * gam, 0.5 * gam, 0.5 * gam, 1.0;
    lyap.hessian_norm_sup = spectral_norm_symmetric(block);
  }
  lyap.trace_constant = (c * c.transpose()).trace();
  lyap.exponent_a = 1.0;
  model.dp_v = [d, gam](const Vector& x) -> Vector { return x.tail(d) + 0.5 * gam * x.head(d); };
  model.pp_hessian_norm_sup = 1.0;
  return model;
}

Eigen::Matrix3d dof3_mass(const Eigen::Vector3d& q) {
  const double v2 = -1.61 * (0.375 * q[1] + q[2]);
  const double v3 = -1.61 * q[1];
  Eigen::Matrix3d m;
  m(0, 0) = 1.3;
  m(0, 1) = m(1, 0) = v2 + 0.3;
  m(0, 2) = m(2, 0) = v3;
  m(1, 1) = v2 * v2 + 2.0 * v2 + 0.314;
  m(1, 2) = m(2, 1) = v2 * v3 + v3 + 0.0375;
  m(2, 2) = v3 * v3 + 0.1;
  return m;
}

Eigen::Matrix3d dof3_mass_partial(const Eigen::Vector3d& q, int index) {
  if (index < 0 || index > 2) throw std::out_of_range("dof3 coordinate index");
  Eigen::Matrix3d dm = Eigen::Matrix3d::Zero();
  if (index == 0) return dm;
  const double v2 = -1.61 * (0.375 * q[1] + q[2]);
  const double v3 = -1.61 * q[1];
  // dv2/dq2 = -1.61 * 0.375, dv2/dq3 = -1.61, dv3/dq2 = -1.61, dv3/dq3 = 0.
  const double dv2 = index == 1 ? -1.61 * 0.375 : -1.61;
  const double dv3 = index == 1 ? -1.61 : 0.0;
  dm(0, 1) = dm(1, 0) = dv2;
  dm(0, 2) = dm(2, 0) = dv3;
  dm(1, 1) = 2.0 * v2 * dv2 + 2.0 * dv2;
  dm(1, 2) = dm(2, 1) = dv2 * v3 + v2 * dv3 + dv3;
  dm(2, 2) = 2.0 * v3 * dv3;
  return dm;
}

HamiltonianModel dof3_model(Dof3Options options) {
  HamiltonianModel model;
  model.label = "dof3";
  model.dof = 3;
  model.noise_dim = 3;
  const bool frozen = options.frozen_mass;
  const Eigen::Matrix3d mass0 = dof3_mass(Eigen::Vector3d::Zero());

  auto mass_at = [frozen, mass0](const Eigen::Vector3d& q) {
    return frozen ? mass0 : dof3_mass(q);
  };
  auto velocity = [mass_at](const Vector& x) -> Eigen::Vector3d {
    const Eigen::Vector3d q = x.head<3>();
    const Eigen::Vector3d p = x.tail<3>();
    return solve_mass(mass_at(q), p);
  };

  model.hamiltonian = [velocity](const Vector& x) {
    const Eigen::Vector3d q = x.head<3>();
    const Eigen::Vector3d p = x.tail<3>();
    double potential = 0.0;
    for (int i = 0; i < 3; ++i) potential += kDof3Stiffness[i] * q[i] * q[i];
    return 0.5 * velocity(x).dot(p) + 0.5 * potential;
  };
  model.dp_h = [velocity](const Vector& x) -> Vector { return velocity(x); };
  // d/dq_i <M^{-1}p, p> = -<M^{-1} (dM/dq_i) M^{-1} p, p>.
  model.dq_h = [velocity, frozen](const Vector& x) -> Vector {
    const Eigen::Vector3d q = x.head<3>();
    Vector out(3);
    for (int i = 0; i < 3; ++i) out[i] = kDof3Stiffness[i] * q[i];
    if (!frozen) {
      const Eigen::Vector3d v = velocity(x);
      for (int i = 1; i < 3; ++i) out[i] -= 0.5 * v.dot(dof3_mass_partial(q, i) * v);
    }
    return out;
  };
  model.damping = [](const Vector&) -> Matrix {
    Matrix f = Matrix::Zero(3, 3);
    f(0, 0) = kDof3Damping;
    return f;
  };
  model.noise = [](const Vector&) -> Matrix {
    Matrix c = Matrix::Zero(3, 3);
    c(0, 0) = kDof3NoiseGain;
    return c;
  };

  LyapunovData& lyap = model.lyapunov;
  const ScalarField h = model.hamiltonian;
  const VectorField dp = model.dp_h;
  const VectorField dq = model.dq_h;
  lyap.V = [h](const Vector& x) { return h(x) + 1.0; };
  lyap.gradient = [dp, dq](const Vector& x) -> Vector {
    Vector g(6);
    g.head<3>() = dq(x);
    g.tail<3>() = dp(x);
    return g;
  };
  lyap.trace_constant = kDof3NoiseGain * kDof3NoiseGain;
  lyap.exponent_a = 1.0;
  model.dp_v = dp;
  return model;
}

SdeModel ou_oracle_model(double theta, double sigma, std::size_t dim) {
  if (!(theta > 0.0)) throw std::invalid_argument("OU rate theta must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("OU noise level must be positive");
  if (dim == 0) throw std::invalid_argument("OU dimension must be positive");
  SdeModel model;
  model.label = "ou";
  model.state_dim = dim;
  model.noise_dim = dim;
  model.drift = [theta](const Vector& x) -> Vector { return -theta * x; };
  const auto n = static_cast<Eigen::Index>(dim);
  model.diffusion = [sigma, n](const Vector&) -> Matrix {
    return sigma * Matrix::Identity(n, n);
  };
  model.lyapunov = squared_norm_lyapunov(dim);
  model.lyapunov.drift_constants = DriftConstants{2.0 * theta, 2.0 * theta};
  model.lyapunov.trace_constant = static_cast<double>(dim) * sigma * sigma;
  return model;
}

double generator_apply(const SdeModel& model, const Vector& grad_f, const Matrix& hess_f,
                       const Vector& x) {
  const Matrix sigma = model.diffusion(x);
  return grad_f.dot(model.drift(x)) + 0.5 * (sigma.transpose() * hess_f * sigma).trace();
}

double generator_apply(const SdeModel& model, const SmoothFunction& f, const Vector& x) {
  if (!f.has_derivatives()) throw MissingDerivatives("generator needs gradient and Hessian");
  return generator_apply(model, f.gradient(x), f.hessian(x), x);
}

}  // namespace adsde
