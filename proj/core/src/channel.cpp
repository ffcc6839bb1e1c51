#include "pnes/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pnes/error.hpp"
#include "pnes/spectral.hpp"

namespace pnes {

void ChannelParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("channel: gamma must be > 0");
  if (!(n_bath >= 0.0) || !std::isfinite(n_bath)) throw DomainError("channel: n_bath must be >= 0");
}

double transmissivity(double t, const ChannelParams& params) { return std::exp(-params.gamma * t); }

double mixing_angle(double t, const ChannelParams& params) {
  return std::atan(std::sqrt(std::expm1(params.gamma * t)));
}

CovarianceMatrix cm_of_pnes(const PnesState& state) {
  return CovarianceMatrix::standard_form(mean_photon(state) + 0.5, correlation(state));
}

CovarianceMatrix cm_evolve(const CovarianceMatrix& sigma0, double t, const ChannelParams& params) {
  if (t < 0.0) throw DomainError("cm_evolve: negative time");
  const double eta = transmissivity(t, params);
  const double loss = std::isinf(t) ? 1.0 : -std::expm1(-params.gamma * t);
  return CovarianceMatrix(eta * sigma0.matrix() + loss * (params.n_bath + 0.5) * Eigen::Matrix4d::Identity());
}

std::string_view to_string(Engine e) { return e == Engine::AncillaMap ? "ancilla" : "rk4"; }

Engine parse_engine(std::string_view name) {
  if (name == "ancilla") return Engine::AncillaMap;
  if (name == "rk4") return Engine::LindbladRk4;
  throw ConfigError("unknown engine '" + std::string(name) + "' (valid: ancilla, rk4)");
}

int ancilla_dim_for(double n_bath, double tol) {
  if (n_bath <= 0.0) return 2;
  const double r = n_bath / (1.0 + n_bath);
  int a = 1;
  while (std::pow(r, a) >= tol) ++a;
  return std::max(a, 2);
}

SingleModeChannel::SingleModeChannel(double t, const ChannelParams& params, int in_dim, int ancilla_dim)
    : in_dim_(in_dim), out_dim_(in_dim), ancilla_dim_(ancilla_dim) {
  params.validate();
  if (t < 0.0) throw DomainError("channel: negative time");
  if (in_dim < 1 || ancilla_dim < 1) throw DomainError("channel: dimensions must be >= 1");

  const double c = std::exp(-0.5 * params.gamma * t);
  const double s = std::sqrt(-std::expm1(-params.gamma * t));
  const double r = params.n_bath / (1.0 + params.n_bath);
  std::vector<double> prob(static_cast<std::size_t>(ancilla_dim));
  double norm = 0.0;
  for (int j = 0; j < ancilla_dim; ++j) norm += prob[j] = std::pow(r, j);
  for (double& p : prob) p /= norm;

  // amp[j][n][k]: amplitude of |k> on the mode (ancilla holding n + j - k)
  // in U|n>|j>, with U a^dagger U^dagger = c a^dagger - s c^dagger and
  // U c^dagger U^dagger = s a^dagger + c c^dagger.
  std::vector<std::vector<Eigen::VectorXd>> amp(static_cast<std::size_t>(ancilla_dim));
  Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
  for (int j = 0; j < ancilla_dim; ++j) {
    if (j > 0) {
      const int m = j - 1;
      Eigen::VectorXd next = Eigen::VectorXd::Zero(j + 1);
      for (int k = 0; k <= j; ++k) {
        if (k > 0) next(k) += s * std::sqrt(double(k)) * w(k - 1);
        if (k <= m) next(k) += c * std::sqrt(double(m + 1 - k)) * w(k);
      }
      w = next / std::sqrt(double(j));
    }
    auto& col = amp[j];
    col.push_back(w);
    for (int n = 1; n < in_dim; ++n) {
      const Eigen::VectorXd& v = col.back();
      const int m = n - 1 + j;
      Eigen::VectorXd next = Eigen::VectorXd::Zero(m + 2);
      for (int k = 0; k <= m + 1; ++k) {
        if (k > 0) next(k) += c * std::sqrt(double(k)) * v(k - 1);
        if (k <= m) next(k) -= s * std::sqrt(double(m + 1 - k)) * v(k);
      }
      col.push_back(next / std::sqrt(double(n)));
    }
  }

  blocks_.resize(static_cast<std::size_t>(2 * in_dim - 1));
  for (int q = -(in_dim - 1); q < in_dim; ++q) {
    const int len = DensityMatrix::extent(q, in_dim);
    const int o = DensityMatrix::offset(q);
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(len, len);
    for (int i = 0; i < len; ++i) {
      const int n = i + o;
      for (int j = 0; j < ancilla_dim; ++j) {
        const Eigen::VectorXd& u = amp[j][n];
        const Eigen::VectorXd& v = amp[j][n - q];
        // photon number cannot grow beyond n + j on the mode
        const int top = std::min(len - 1, n + j - o);
        for (int ip = 0; ip <= top; ++ip) {
          const int np = ip + o;
          if (np >= u.size() || np - q >= v.size()) continue;
          e(ip, i) += prob[j] * u(np) * v(np - q);
        }
      }
    }
    blocks_[q + in_dim - 1] = std::move(e);
  }
}

void SingleModeChannel::truncate_output(int out_dim) {
  if (out_dim < 1 || out_dim > out_dim_) throw DomainError("truncate_output: invalid dimension");
  for (int q = -(in_dim_ - 1); q < in_dim_; ++q) {
    auto& b = blocks_[q + in_dim_ - 1];
    const int rows = std::max(0, DensityMatrix::extent(q, out_dim));
    b.conservativeResize(rows, b.cols());
  }
  out_dim_ = out_dim;
}

const Eigen::MatrixXd& SingleModeChannel::block(int q) const {
  if (q <= -in_dim_ || q >= in_dim_) throw RangeError("channel: coherence order outside truncation");
  return blocks_[q + in_dim_ - 1];
}

Eigen::VectorXd SingleModeChannel::apply_populations(const Eigen::VectorXd& p) const { return block(0) * p; }

DensityMatrix apply_local(const DensityMatrix& rho, const SingleModeChannel& channel) {
  if (rho.dim() != channel.in_dim()) throw DomainError("apply_local: dimension mismatch");
  DensityMatrix out(channel.out_dim());
  for (const auto& [c, x] : rho.blocks()) {
    const Eigen::MatrixXd& e1 = channel.block(c.q1);
    const Eigen::MatrixXd& e2 = channel.block(c.q2);
    if (e1.rows() == 0 || e2.rows() == 0) continue;
    auto& y = out.block(c);
    const Eigen::MatrixXd re = e1 * x.real() * e2.transpose();
    if ((x.imag().array() == 0.0).all()) {
      y = re.cast<cplx>();
    } else {
      const Eigen::MatrixXd im = e1 * x.imag() * e2.transpose();
      y.real() = re;
      y.imag() = im;
    }
  }
  return out;
}

DensityMatrix evolve_ancilla(const DensityMatrix& rho0, double t, const ChannelParams& params,
                             const EvolutionSpec& spec) {
  params.validate();
  if (t < 0.0) throw DomainError("evolve: negative time");
  int a = spec.ancilla_dim;
  if (a == 0) {
    a = ancilla_dim_for(params.n_bath);
  } else {
    const double r = params.n_bath / (1.0 + params.n_bath);
    if (a < 1 || std::pow(r, a) >= 1e-10) {
      throw TruncationError("evolve: ancilla dimension " + std::to_string(a) + " too small for n_bath=" +
                            std::to_string(params.n_bath));
    }
  }
  SingleModeChannel ch(t, params, rho0.dim(), a);
  if (spec.compact_tail > 0.0) {
    const auto pa = marginal_populations(rho0, 0);
    const auto pb = marginal_populations(rho0, 1);
    const Eigen::VectorXd qa = ch.apply_populations(Eigen::Map<const Eigen::VectorXd>(pa.data(), pa.size()));
    const Eigen::VectorXd qb = ch.apply_populations(Eigen::Map<const Eigen::VectorXd>(pb.data(), pb.size()));
    int keep = rho0.dim();
    double tail = 0.0;
    while (keep > std::max(1, spec.compact_floor)) {
      const double add = std::max(qa(keep - 1), 0.0) + std::max(qb(keep - 1), 0.0);
      if (tail + add >= spec.compact_tail) break;
      tail += add;
      --keep;
    }
    if (keep < rho0.dim()) ch.truncate_output(keep);
  }
  return apply_local(rho0, ch);
}

namespace {

struct FlatLayout {
  std::vector<Coherence> coherences;
  std::vector<Eigen::Index> offsets;
  int dim = 0;
};

FlatLayout layout_of(const DensityMatrix& rho) {
  FlatLayout l;
  l.dim = rho.dim();
  Eigen::Index off = 0;
  for (const auto& [c, b] : rho.blocks()) {
    l.coherences.push_back(c);
    l.offsets.push_back(off);
    off += b.size();
  }
  l.offsets.push_back(off);
  return l;
}

Eigen::VectorXcd flatten(const DensityMatrix& rho, const FlatLayout& l) {
  Eigen::VectorXcd v(l.offsets.back());
  for (std::size_t k = 0; k < l.coherences.size(); ++k) {
    const auto& b = *rho.find(l.coherences[k]);
    v.segment(l.offsets[k], b.size()) = Eigen::Map<const Eigen::VectorXcd>(b.data(), b.size());
  }
  return v;
}

DensityMatrix unflatten(const Eigen::VectorXcd& v, const FlatLayout& l) {
  DensityMatrix rho(l.dim);
  for (std::size_t k = 0; k < l.coherences.size(); ++k) {
    auto& b = rho.block(l.coherences[k]);
    b = Eigen::Map<const Eigen::MatrixXcd>(v.data() + l.offsets[k], b.rows(), b.cols());
  }
  return rho;
}

void rhs_flat(const Eigen::VectorXcd& x, Eigen::VectorXcd& dx, const FlatLayout& l, const ChannelParams& p) {
  const double up = 0.5 * p.gamma * (p.n_bath + 1.0);
  const double dn = 0.5 * p.gamma * p.n_bath;
  for (std::size_t k = 0; k < l.coherences.size(); ++k) {
    const Coherence c = l.coherences[k];
    const int rows = DensityMatrix::extent(c.q1, l.dim);
    const int cols = DensityMatrix::extent(c.q2, l.dim);
    const int o1 = DensityMatrix::offset(c.q1), o2 = DensityMatrix::offset(c.q2);
    const cplx* in = x.data() + l.offsets[k];
    cplx* out = dx.data() + l.offsets[k];
    auto at = [&](int i1, int i2) { return in[i1 + rows * i2]; };
    for (int i2 = 0; i2 < cols; ++i2) {
      const double n2 = i2 + o2, m2 = n2 - c.q2;
      for (int i1 = 0; i1 < rows; ++i1) {
        const double n1 = i1 + o1, m1 = n1 - c.q1;
        const cplx v = at(i1, i2);
        cplx d = -(up * (n1 + m1 + n2 + m2) + dn * (n1 + m1 + n2 + m2 + 4.0)) * v;
        if (i1 + 1 < rows) d += 2.0 * up * std::sqrt((n1 + 1) * (m1 + 1)) * at(i1 + 1, i2);
        if (i1 > 0) d += 2.0 * dn * std::sqrt(n1 * m1) * at(i1 - 1, i2);
        if (i2 + 1 < cols) d += 2.0 * up * std::sqrt((n2 + 1) * (m2 + 1)) * at(i1, i2 + 1);
        if (i2 > 0) d += 2.0 * dn * std::sqrt(n2 * m2) * at(i1, i2 - 1);
        out[i1 + rows * i2] = d;
      }
    }
  }
}

DensityMatrix rk4_integrate(const DensityMatrix& rho0, double t, const ChannelParams& params, double dt) {
  params.validate();
  if (!(dt > 0.0) || dt > 1e-2) throw DomainError("evolve_lindblad: dt must lie in (0, 1e-2]");
  if (t < 0.0) throw DomainError("evolve: negative time");
  const FlatLayout l = layout_of(rho0);
  Eigen::VectorXcd x = flatten(rho0, l);
  Eigen::VectorXcd k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size());
  double remaining = t;
  while (remaining > 1e-15) {
    const double h = remaining > dt * (1.0 + 1e-12) ? dt : remaining;
    rhs_flat(x, k1, l, params);
    rhs_flat(x + 0.5 * h * k1, k2, l, params);
    rhs_flat(x + 0.5 * h * k2, k3, l, params);
    rhs_flat(x + h * k3, k4, l, params);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    remaining -= h;
  }
  DensityMatrix out = unflatten(x, l);
  const auto eig = hermitian_spectrum(out);
  if (!eig.empty() && eig.front() < -1e-6) {
    throw StepSizeError("evolve_lindblad: eigenvalue " + std::to_string(eig.front()) + " after RK4 with dt=" +
                        std::to_string(dt) + "; reduce the step");
  }
  return out;
}

}  // namespace

DensityMatrix lindblad_rhs(const DensityMatrix& rho, const ChannelParams& params) {
  const FlatLayout l = layout_of(rho);
  const Eigen::VectorXcd x = flatten(rho, l);
  Eigen::VectorXcd dx(x.size());
  rhs_flat(x, dx, l, params);
  return unflatten(dx, l);
}

DensityMatrix evolve_lindblad(const DensityMatrix& rho0, double t, const ChannelParams& params, double dt) {
  return rk4_integrate(rho0, t, params, dt);
}

DensityMatrix evolve(const DensityMatrix& rho0, double t, const ChannelParams& params, const EvolutionSpec& spec) {
  if (spec.engine == Engine::LindbladRk4) return evolve_lindblad(rho0, t, params, spec.rk4_step);
  return evolve_ancilla(rho0, t, params, spec);
}

Trajectory::Trajectory(DensityMatrix rho0, ChannelParams params, EvolutionSpec spec)
    : rho0_(std::move(rho0)), params_(params), spec_(spec) {
  params_.validate();
}

int Trajectory::ancilla_dim() const noexcept {
  if (spec_.engine != Engine::AncillaMap) return 0;
  return spec_.ancilla_dim > 0 ? spec_.ancilla_dim : ancilla_dim_for(params_.n_bath);
}

DensityMatrix Trajectory::at(double t) {
  if (t < 0.0) throw DomainError("trajectory: negative time");
  if (spec_.engine == Engine::AncillaMap) return evolve_ancilla(rho0_, t, params_, spec_);
  auto it = checkpoints_.upper_bound(t);
  const DensityMatrix* start = &rho0_;
  double t0 = 0.0;
  if (it != checkpoints_.begin()) {
    --it;
    start = &it->second;
    t0 = it->first;
  }
  DensityMatrix out = t == t0 ? *start : rk4_integrate(*start, t - t0, params_, spec_.rk4_step);
  if (checkpoints_.size() >= 64) checkpoints_.erase(checkpoints_.begin());
  checkpoints_.insert_or_assign(t, out);
  return out;
}

}  // namespace pnes
