#include "frontlab/model.hpp"

#include "frontlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace frontlab {

bool Box::contains(const State& u, double tol) const {
  if (u.size() != lo.size()) return false;
  for (int i = 0; i < u.size(); ++i) {
    if (!(u(i) >= lo(i) - tol && u(i) <= hi(i) + tol)) return false;
  }
  return true;
}

State Box::sample(CounterRng& rng) const {
  State s(dim());
  for (int i = 0; i < dim(); ++i) s(i) = rng.uniform(lo(i), hi(i));
  return s;
}

SystemModel::SystemModel(Box omega) : omega_(std::move(omega)) {
  if (omega_.lo.size() != omega_.hi.size() || omega_.lo.size() < 1 ||
      omega_.lo.size() > kMaxDim) {
    throw PreconditionError("domain box has inconsistent dimension");
  }
  for (int i = 0; i < omega_.dim(); ++i) {
    if (!(omega_.lo(i) <= omega_.hi(i))) throw PreconditionError("domain box has lo > hi");
  }
}

void SystemModel::require_in_domain(const State& u, const char* what) const {
  if (!omega_.contains(u)) {
    std::ostringstream os;
    os << what << ": state (";
    for (int i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u(i);
    os << ") is outside the domain of " << name();
    throw DomainError(os.str());
  }
}

// ---------------------------------------------------------------- Burgers

BurgersModel::BurgersModel(Box omega) : SystemModel(std::move(omega)) {
  if (dim() != 1) throw PreconditionError("Burgers model is scalar");
}

State BurgersModel::flux(const State& u) const { return scalar_state(0.5 * u(0) * u(0)); }

Matrix BurgersModel::jacobian(const State& u) const {
  Matrix m(1, 1);
  m(0, 0) = u(0);
  return m;
}

double BurgersModel::entropy(const State& u) const { return 0.5 * u(0) * u(0); }

double BurgersModel::entropy_flux(const State& u) const { return u(0) * u(0) * u(0) / 3.0; }

State BurgersModel::entropy_gradient(const State& u) const { return scalar_state(u(0)); }

double BurgersModel::characteristic_speed(int, const State& u) const { return u(0); }

State BurgersModel::speed_gradient(int, const State&) const { return scalar_state(1.0); }

State BurgersModel::right_vector(int, const State&) const { return scalar_state(1.0); }

double BurgersModel::lambda_hat() const {
  return std::max(std::abs(domain().lo(0)), std::abs(domain().hi(0)));
}

// ---------------------------------------------------------------- p-system

PSystemModel::PSystemModel(double gamma, Box omega)
    : SystemModel(std::move(omega)), gamma_(gamma) {
  if (dim() != 2) throw PreconditionError("p-system has two components");
  if (!(gamma_ >= 1.0)) throw PreconditionError("p-system requires gamma >= 1");
  if (!(domain().lo(0) > 0.0)) throw PreconditionError("p-system domain must keep v > 0");
}

double PSystemModel::pressure(double v) const { return std::pow(v, -gamma_); }

double PSystemModel::pressure_derivative(double v) const {
  return -gamma_ * std::pow(v, -gamma_ - 1.0);
}

double PSystemModel::sound_speed(double v) const {
  return std::sqrt(gamma_) * std::pow(v, -0.5 * (gamma_ + 1.0));
}

double PSystemModel::volume_for_sound_speed(double c) const {
  return std::pow(c / std::sqrt(gamma_), -2.0 / (gamma_ + 1.0));
}

double PSystemModel::sound_speed_integral(double a, double b) const {
  if (gamma_ == 1.0) return std::log(b / a);
  const double e = 0.5 * (1.0 - gamma_);
  return 2.0 * std::sqrt(gamma_) / (gamma_ - 1.0) * (std::pow(a, e) - std::pow(b, e));
}

State PSystemModel::flux(const State& u) const { return pair_state(-u(1), pressure(u(0))); }

Matrix PSystemModel::jacobian(const State& u) const {
  Matrix m(2, 2);
  m << 0.0, -1.0, pressure_derivative(u(0)), 0.0;
  return m;
}

double PSystemModel::entropy(const State& u) const {
  const double v = u(0);
  const double potential = gamma_ == 1.0 ? -std::log(v) : std::pow(v, 1.0 - gamma_) / (gamma_ - 1.0);
  return 0.5 * u(1) * u(1) + potential;
}

double PSystemModel::entropy_flux(const State& u) const { return u(1) * pressure(u(0)); }

State PSystemModel::entropy_gradient(const State& u) const {
  return pair_state(-pressure(u(0)), u(1));
}

double PSystemModel::characteristic_speed(int family, const State& u) const {
  const double c = sound_speed(u(0));
  return family == 0 ? -c : c;
}

State PSystemModel::speed_gradient(int family, const State& u) const {
  // c'(v) = -(gamma + 1) c / (2 v)
  const double dc = -0.5 * (gamma_ + 1.0) * sound_speed(u(0)) / u(0);
  return pair_state(family == 0 ? -dc : dc, 0.0);
}

State PSystemModel::right_vector(int family, const State& u) const {
  const double c = sound_speed(u(0));
  return family == 0 ? pair_state(1.0, c) : pair_state(1.0, -c);
}

double PSystemModel::c0() const {
  // Hessian of eta is diag(-p'(v), 1); its smallest eigenvalue on the box sits at v_max.
  return 0.5 * std::min(1.0, -pressure_derivative(domain().hi(0)));
}

double PSystemModel::lambda_hat() const { return sound_speed(domain().lo(0)); }

// ---------------------------------------------------------------- linear

LinearModel::LinearModel(Matrix a, Box omega) : SystemModel(std::move(omega)), a_(std::move(a)) {
  if (a_.rows() != dim() || a_.cols() != dim()) throw PreconditionError("matrix/domain mismatch");
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-14) {
    throw PreconditionError("linear model requires a symmetric matrix for eta = |u|^2/2");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a_);
  lambdas_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
  for (int i = 1; i < dim(); ++i) {
    if (lambdas_(i) - lambdas_(i - 1) < 1e-12) {
      throw HyperbolicityError("linear model eigenvalues are not distinct");
    }
  }
}

State LinearModel::flux(const State& u) const { return a_ * u; }

Matrix LinearModel::jacobian(const State&) const { return a_; }

double LinearModel::entropy(const State& u) const { return 0.5 * u.squaredNorm(); }

double LinearModel::entropy_flux(const State& u) const { return 0.5 * u.dot(a_ * u); }

State LinearModel::entropy_gradient(const State& u) const { return u; }

double LinearModel::characteristic_speed(int family, const State&) const {
  return lambdas_(family);
}

State LinearModel::speed_gradient(int, const State&) const { return State::Zero(dim()); }

State LinearModel::right_vector(int family, const State&) const { return vectors_.col(family); }

double LinearModel::lambda_hat() const { return lambdas_.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------- factories

ModelPtr make_burgers(double lo, double hi) {
  return std::make_shared<BurgersModel>(Box{scalar_state(lo), scalar_state(hi)});
}

ModelPtr make_psystem(double gamma, State lo, State hi) {
  return std::make_shared<PSystemModel>(gamma, Box{std::move(lo), std::move(hi)});
}

ModelPtr make_linear(Matrix a, State lo, State hi) {
  return std::make_shared<LinearModel>(std::move(a), Box{std::move(lo), std::move(hi)});
}

// ---------------------------------------------------------------- free operations

RelativeEntropy relative_entropy(const SystemModel& model, const State& omega,
                                 const State& ustar) {
  model.require_in_domain(omega, "relative_entropy");
  model.require_in_domain(ustar, "relative_entropy");
  const State grad = model.entropy_gradient(ustar);
  RelativeEntropy r;
  r.eta = model.entropy(omega) - model.entropy(ustar) - grad.dot(omega - ustar);
  r.q = model.entropy_flux(omega) - model.entropy_flux(ustar) -
        grad.dot(model.flux(omega) - model.flux(ustar));
  return r;
}

namespace {

std::vector<State> lattice_points(const Box& box, int per_axis) {
  std::vector<State> pts;
  const int n = box.dim();
  int total = 1;
  for (int i = 0; i < n; ++i) total *= per_axis;
  pts.reserve(total);
  for (int idx = 0; idx < total; ++idx) {
    State s(n);
    int rem = idx;
    for (int i = 0; i < n; ++i) {
      const int k = rem % per_axis;
      rem /= per_axis;
      s(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * k / (per_axis - 1);
    }
    pts.push_back(s);
  }
  return pts;
}

}  // namespace

EstimatedConstants estimate_constants(const SystemModel& model, std::size_t samples,
                                      std::uint64_t seed) {
  if (samples < 2) throw PreconditionError("estimate_constants needs at least two samples");
  const Box& box = model.domain();
  CounterRng rng(seed, 0x636f6e7374ULL);

  double c0 = kInf;
  double cprime = 0.0;
  double speed = 0.0;
  std::size_t used = 0;
  auto visit = [&](const State& w, const State& us) {
    const double d2 = (w - us).squaredNorm();
    if (d2 < 1e-18) return;
    const RelativeEntropy r = relative_entropy(model, w, us);
    c0 = std::min(c0, r.eta / d2);
    cprime = std::max(cprime, std::max(r.eta, std::abs(r.q)) / d2);
    if (r.eta > 0.0) speed = std::max(speed, std::abs(r.q) / r.eta);
    ++used;
  };

  for (std::size_t k = 0; k < samples; ++k) {
    const State w = box.sample(rng);
    const State us = box.sample(rng);
    visit(w, us);
  }
  const std::vector<State> grid = lattice_points(box, 6);
  for (const State& w : grid) {
    for (const State& us : grid) visit(w, us);
  }
  // Nearly coincident pairs along each axis probe the Hessian extremes.
  for (const State& w : grid) {
    for (int i = 0; i < box.dim(); ++i) {
      State us = w;
      const double h = 1e-3 * (box.hi(i) - box.lo(i));
      us(i) += us(i) + h <= box.hi(i) ? h : -h;
      visit(w, us);
    }
  }
  if (used == 0) throw PreconditionError("estimate_constants: all sampled pairs coincide");

  EstimatedConstants out;
  out.c0_hat = c0;
  out.Cprime_hat = cprime;
  out.lambda_hat = std::max(speed, model.lambda_hat());
  return out;
}

EigenData eigen(const SystemModel& model, const State& u) {
  model.require_in_domain(u, "eigen");
  const Matrix a = model.jacobian(u);
  const int n = model.dim();
  EigenData out;
  if (n == 1) {
    out.lambdas = scalar_state(a(0, 0));
    out.left = Matrix::Identity(1, 1);
    out.right = Matrix::Identity(1, 1);
    out.kinds[0] = model.field_kind(0);
    return out;
  }
  Eigen::EigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw HyperbolicityError("eigen solve failed");
  const auto values = solver.eigenvalues();
  const auto vectors = solver.eigenvectors();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(values(i).imag()) > 1e-12 * (1.0 + std::abs(values(i).real()))) {
      throw HyperbolicityError("complex eigenvalue: system is not hyperbolic at this state");
    }
    order[i] = i;
  }
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return values(x).real() < values(y).real(); });
  out.lambdas = State(n);
  out.right = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    out.lambdas(i) = values(order[i]).real();
    State r = vectors.col(order[i]).real();
    r.normalize();
    // Deterministic orientation: first nonzero component positive.
    int lead = 0;
    while (lead < n - 1 && std::abs(r(lead)) < 1e-14) ++lead;
    if (r(lead) < 0) r = -r;
    out.right.col(i) = r;
    out.kinds[i] = model.field_kind(i);
  }
  for (int i = 1; i < n; ++i) {
    const double gap = out.lambdas(i) - out.lambdas(i - 1);
    if (gap < 1e-12 * (1.0 + std::abs(out.lambdas(i)))) {
      throw HyperbolicityError("eigenvalue collision: strict hyperbolicity fails");
    }
  }
  out.left = out.right.inverse();
  return out;
}

double check_entropy_compatibility(const SystemModel& model, std::size_t samples,
                                   std::uint64_t seed) {
  CounterRng rng(seed, 0x636f6d70ULL);
  const Box& box = model.domain();
  const int n = model.dim();
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    State u = box.sample(rng);
    State grad_q(n);
    for (int j = 0; j < n; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(u(j)));
      State up = u, dn = u;
      up(j) += h;
      dn(j) -= h;
      grad_q(j) = (model.entropy_flux(up) - model.entropy_flux(dn)) / (2.0 * h);
    }
    const State rhs = (model.entropy_gradient(u).transpose() * model.jacobian(u)).transpose();
    worst = std::max(worst, (grad_q - rhs).norm());
  }
  return worst;
}

double nonlinearity_certificate(const SystemModel& model, int family, std::size_t samples,
                                std::uint64_t seed) {
  CounterRng rng(seed, 0x676e6cULL + static_cast<std::uint64_t>(family));
  double worst = kInf;
  for (std::size_t k = 0; k < samples; ++k) {
    const State u = model.domain().sample(rng);
    const State r = model.right_vector(family, u);
    worst = std::min(worst, std::abs(model.speed_gradient(family, u).dot(r)) / r.norm());
  }
  return worst;
}

}  // namespace frontlab
