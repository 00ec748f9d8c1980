#include "cavcool/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cavcool/error.hpp"
#include "cavcool/io.hpp"

namespace cavcool {

namespace {

// Below this many steps the explicit loop is cheaper than building powers of
// the 400 x 400 step matrix.
constexpr std::int64_t kCompiledThreshold = 4000;

double mean_of(const RVector& p) {
  double m = 0.0;
  for (Eigen::Index n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p(n);
  return m;
}

void symmetrize(CVector& v, Eigen::Index d) {
  auto rho = v.reshaped(d, d);
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  rho = herm;
}

class Recorder {
 public:
  Recorder(const HilbertLayout& layout, const PropagationOptions& options)
      : layout_(layout), options_(options) {
    traj_.n_trap = layout.n_trap;
  }

  void record(double t, const CVector& v, double hermiticity) {
    const Eigen::Index d = layout_.dim();
    if (!v.allFinite()) throw NumericalError("propagate: non-finite density matrix at t = " + format_number(t));
    const CMatrix rho = v.reshaped(d, d);

    const double drift = std::abs(rho.trace() - Complex(1.0));
    if (!(drift <= options_.trace_tolerance)) {
      throw NumericalError("propagate: trace drift " + format_number(drift) + " exceeds tolerance at t = " +
                           format_number(t));
    }

    const RVector p = partial_trace_trap(rho, layout_);
    double pe = 0.0, pc = 0.0;
    for (int c = 0; c < HilbertLayout::n_photon; ++c)
      for (int n = 0; n < layout_.n_trap; ++n) pe += rho(layout_.index(1, c, n), layout_.index(1, c, n)).real();
    for (int v2 = 0; v2 < HilbertLayout::n_vib; ++v2)
      for (int n = 0; n < layout_.n_trap; ++n) pc += rho(layout_.index(v2, 1, n), layout_.index(v2, 1, n)).real();

    double min_ev = 0.0;
    if (options_.check_positivity) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
      min_ev = es.eigenvalues().minCoeff();
    }

    traj_.times.push_back(t);
    traj_.populations.push_back(p);
    traj_.mean_n.push_back(mean_of(p));
    traj_.pop_excited.push_back(pe);
    traj_.pop_photon.push_back(pc);
    traj_.trace_drift.push_back(drift);
    traj_.hermiticity.push_back(hermiticity);
    traj_.min_eigenvalue.push_back(min_ev);
  }

  Trajectory finish(const CVector& v) {
    const Eigen::Index d = layout_.dim();
    traj_.final_state = v.reshaped(d, d);
    return std::move(traj_);
  }

 private:
  HilbertLayout layout_;
  PropagationOptions options_;
  Trajectory traj_;
};

double asymmetry(const CVector& v, Eigen::Index d) {
  const auto rho = v.reshaped(d, d);
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

struct Plan {
  std::int64_t records = 0;
};

Plan check_and_plan(const DensityMatrix& rho0, const LiouvillianMatrix& l, double dt, double t_end,
                    std::int64_t record_every) {
  if (l.kind != LiouvillianKind::full) throw std::invalid_argument("propagate: needs a full Liouvillian");
  if (!(rho0.layout() == l.layout)) throw std::invalid_argument("propagate: layout mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be > 0");
  if (dt > max_time_step(l) * (1.0 + 1e-12)) {
    throw std::invalid_argument("propagate: dt = " + format_number(dt) + " exceeds step-size guard " +
                                format_number(max_time_step(l)));
  }
  if (!(t_end >= 0.0)) throw std::invalid_argument("propagate: t_end must be >= 0");
  if (record_every < 1) throw std::invalid_argument("propagate: record_every must be >= 1");
  const auto steps = static_cast<std::int64_t>(std::llround(t_end / dt));
  return Plan{steps / record_every};
}

Trajectory run_stepwise(const DensityMatrix& rho0, const LiouvillianMatrix& l, double dt, std::int64_t records,
                        std::int64_t record_every, const PropagationOptions& options) {
  const Eigen::Index d = rho0.layout().dim();
  Recorder rec(rho0.layout(), options);
  CVector v = vectorize(rho0.matrix());
  rec.record(0.0, v, asymmetry(v, d));
  CVector k1, k2, k3, k4;
  for (std::int64_t r = 1; r <= records; ++r) {
    double worst = 0.0;
    for (std::int64_t s = 0; s < record_every; ++s) {
      k1.noalias() = l.matrix * v;
      k2.noalias() = l.matrix * (v + 0.5 * dt * k1);
      k3.noalias() = l.matrix * (v + 0.5 * dt * k2);
      k4.noalias() = l.matrix * (v + dt * k3);
      v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      worst = std::max(worst, asymmetry(v, d));
      symmetrize(v, d);
    }
    rec.record(static_cast<double>(r * record_every) * dt, v, worst);
  }
  return rec.finish(v);
}

Trajectory run_compiled(const DensityMatrix& rho0, Rk4Propagator& propagator, std::int64_t records,
                        std::int64_t record_every, const PropagationOptions& options) {
  const Eigen::Index d = rho0.layout().dim();
  Recorder rec(rho0.layout(), options);
  CVector v = vectorize(rho0.matrix());
  rec.record(0.0, v, asymmetry(v, d));
  if (records > 0) {
    const CMatrix chunk = propagator.power(record_every);
    CVector next;
    for (std::int64_t r = 1; r <= records; ++r) {
      next.noalias() = chunk * v;
      v.swap(next);
      const double asym = asymmetry(v, d);
      symmetrize(v, d);
      rec.record(static_cast<double>(r * record_every) * propagator.dt(), v, asym);
    }
  }
  return rec.finish(v);
}

}  // namespace

void Trajectory::push_populations(double t, const RVector& p) {
  times.push_back(t);
  populations.push_back(p);
  mean_n.push_back(mean_of(p));
  pop_excited.push_back(0.0);
  pop_photon.push_back(0.0);
  trace_drift.push_back(std::abs(p.sum() - 1.0));
  hermiticity.push_back(0.0);
  min_eigenvalue.push_back(p.size() > 0 ? p.minCoeff() : 0.0);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (int n = 0; n < traj.n_trap; ++n) os << ",p_" << n;
  os << ",mean_n,pop_e,pop_photon,trace_drift\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_number(traj.times[i]);
    for (int n = 0; n < traj.n_trap; ++n) os << ',' << format_number(traj.populations[i](n));
    os << ',' << format_number(traj.mean_n[i]) << ',' << format_number(traj.pop_excited[i]) << ','
       << format_number(traj.pop_photon[i]) << ',' << format_number(traj.trace_drift[i]) << '\n';
  }
}

RVector thermal_distribution(double mean_n, int levels) {
  if (levels < 1) throw std::invalid_argument("thermal_distribution: levels must be >= 1");
  if (!(mean_n >= 0.0)) throw std::invalid_argument("thermal_distribution: mean_n must be >= 0");
  RVector p(levels);
  const double ratio = mean_n / (mean_n + 1.0);
  double w = 1.0;
  for (int n = 0; n < levels; ++n) {
    p(n) = w;
    w *= ratio;
  }
  return p / p.sum();
}

DensityMatrix make_initial_state(const HilbertLayout& layout, const InitialState& recipe) {
  layout.validate();
  RVector p = RVector::Zero(layout.n_trap);
  if (recipe.kind == InitialState::Kind::thermal) {
    p = thermal_distribution(recipe.mean_n, layout.n_trap);
  } else {
    if (recipe.fock_n < 0 || recipe.fock_n >= layout.n_trap) {
      throw std::invalid_argument("make_initial_state: Fock level outside the truncated ladder");
    }
    p(recipe.fock_n) = 1.0;
  }
  CMatrix rho = CMatrix::Zero(layout.dim(), layout.dim());
  for (int n = 0; n < layout.n_trap; ++n) rho(layout.index(0, 0, n), layout.index(0, 0, n)) = p(n);
  return DensityMatrix(std::move(rho), layout);
}

double max_time_step(const LiouvillianMatrix& l) { return 0.1 / std::max(l.rate_scale, 1.0); }

double default_time_step(const ModelParams& p) { return 0.005 / p.rate_scale(); }

Rk4Propagator::Rk4Propagator(const LiouvillianMatrix& l, double dt) : dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("Rk4Propagator: dt must be > 0");
  const Eigen::Index n = l.matrix.rows();
  if (l.hilbert_dim > 0 && n == static_cast<Eigen::Index>(l.hilbert_dim) * l.hilbert_dim) hilbert_dim_ = l.hilbert_dim;
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix hl = dt * l.matrix;
  // Horner form of 1 + z + z^2/2 + z^3/6 + z^4/24
  CMatrix m = id + hl / 4.0;
  m = id + (hl * m) / 3.0;
  m = id + (hl * m) / 2.0;
  m = id + hl * m;
  restore_trace_row(m);
  powers_.push_back(std::move(m));
}

void Rk4Propagator::restore_trace_row(CMatrix& m) const {
  if (hilbert_dim_ == 0) return;
  const CVector t = trace_functional(hilbert_dim_);
  // m <- m - t (t^T m - t^T) / |t|^2, with |t|^2 = d
  const Eigen::RowVectorXcd defect = t.transpose() * m - t.transpose();
  m.noalias() -= (t / static_cast<double>(hilbert_dim_)) * defect;
}

const CMatrix& Rk4Propagator::power_of_two(int s) {
  if (s < 0) throw std::invalid_argument("Rk4Propagator: negative exponent");
  while (static_cast<int>(powers_.size()) <= s) {
    const CMatrix& last = powers_.back();
    CMatrix sq = last * last;
    restore_trace_row(sq);
    powers_.push_back(std::move(sq));
  }
  return powers_[static_cast<std::size_t>(s)];
}

CMatrix Rk4Propagator::power(std::int64_t k) {
  if (k < 0) throw std::invalid_argument("Rk4Propagator: negative power");
  const Eigen::Index n = powers_.front().rows();
  CMatrix result = CMatrix::Identity(n, n);
  bool first = true;
  for (int s = 0; k > 0; ++s, k >>= 1) {
    if (k & 1) {
      const CMatrix& p = power_of_two(s);
      if (first) {
        result = p;
        first = false;
      } else {
        result = (p * result).eval();
        restore_trace_row(result);
      }
    }
  }
  return result;
}

Trajectory propagate(const DensityMatrix& rho0, const LiouvillianMatrix& l, double dt, double t_end,
                     std::int64_t record_every, const PropagationOptions& options) {
  const Plan plan = check_and_plan(rho0, l, dt, t_end, record_every);
  const std::int64_t steps = plan.records * record_every;
  const bool compiled = options.stepping == Stepping::compiled ||
                        (options.stepping == Stepping::automatic && steps > kCompiledThreshold);
  if (!compiled) return run_stepwise(rho0, l, dt, plan.records, record_every, options);
  Rk4Propagator propagator(l, dt);
  return run_compiled(rho0, propagator, plan.records, record_every, options);
}

Trajectory propagate(const DensityMatrix& rho0, const LiouvillianMatrix& l, Rk4Propagator& propagator,
                     double t_end, std::int64_t record_every, const PropagationOptions& options) {
  const Plan plan = check_and_plan(rho0, l, propagator.dt(), t_end, record_every);
  if (options.stepping == Stepping::stepwise) {
    return run_stepwise(rho0, l, propagator.dt(), plan.records, record_every, options);
  }
  return run_compiled(rho0, propagator, plan.records, record_every, options);
}

}  // namespace cavcool
