// Copyright 2026 The hydrotwin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hydrotwin/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hydrotwin/errors.hpp"
#include "model_format.hpp"

namespace hydrotwin {
namespace {

constexpr std::string_view kSvrKind = "svr";
constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Dual of epsilon-SVR written over 2n variables a_t in [0, C] with signs
// s_t = +1 (t < n) and -1 (t >= n):
//   min 1/2 a'Qa + p'a   s.t.  s'a = 0,
//   Q_tu = s_t s_u K(t mod n, u mod n),  p_t = eps - s_t z_(t mod n).
// The regression coefficient of sample i is a_i - a_(i+n).
class SmoSolver {
 public:
  SmoSolver(const std::vector<double>& kernel, std::span<const double> z, double c,
            double eps)
      : n_(z.size()), l_(2 * z.size()), kernel_(kernel), c_(c) {
    alpha_.assign(l_, 0.0);
    sign_.resize(l_);
    p_.resize(l_);
    for (std::size_t t = 0; t < l_; ++t) {
      const bool upper = t < n_;
      sign_[t] = upper ? 1.0 : -1.0;
      p_[t] = eps - sign_[t] * z[t % n_];
    }
    grad_ = p_;
  }

  struct Result {
    bool converged = false;
    std::size_t iterations = 0;
    double gap = 0.0;
  };

  Result solve(double tolerance, std::size_t max_iterations) {
    Result res;
    while (true) {
      std::size_t i = 0;
      std::size_t j = 0;
      res.gap = select_working_set(i, j);
      if (res.gap < tolerance) {
        res.converged = true;
        break;
      }
      if (res.iterations >= max_iterations) break;
      ++res.iterations;
      update_pair(i, j);
    }
    return res;
  }

  std::vector<double> coefficients() const {
    std::vector<double> beta(n_);
    for (std::size_t i = 0; i < n_; ++i) beta[i] = alpha_[i] - alpha_[i + n_];
    return beta;
  }

  // Intercept: average of s_t G_t over free variables, else the midpoint of
  // the feasible interval.
  double rho() const {
    double ub = kInf;
    double lb = -kInf;
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < l_; ++t) {
      const double yg = sign_[t] * grad_[t];
      if (at_upper(t)) {
        if (sign_[t] < 0) {
          ub = std::min(ub, yg);
        } else {
          lb = std::max(lb, yg);
        }
      } else if (at_lower(t)) {
        if (sign_[t] > 0) {
          ub = std::min(ub, yg);
        } else {
          lb = std::max(lb, yg);
        }
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    return n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  }

  double objective() const {
    double v = 0.0;
    for (std::size_t t = 0; t < l_; ++t) v += alpha_[t] * (grad_[t] + p_[t]);
    return 0.5 * v;
  }

 private:
  double q(std::size_t t, std::size_t u) const {
    return sign_[t] * sign_[u] * kernel_[(t % n_) * n_ + (u % n_)];
  }
  double qd(std::size_t t) const { return kernel_[(t % n_) * n_ + (t % n_)]; }
  bool at_upper(std::size_t t) const { return alpha_[t] >= c_; }
  bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }

  // Second-order working set selection (maximal violating pair refined by
  // the curvature of the pair). Returns the current maximal KKT violation.
  double select_working_set(std::size_t& out_i, std::size_t& out_j) const {
    double gmax = -kInf;
    double gmax2 = -kInf;
    std::size_t i = l_;
    for (std::size_t t = 0; t < l_; ++t) {
      if (sign_[t] > 0) {
        if (!at_upper(t) && -grad_[t] >= gmax) {
          gmax = -grad_[t];
          i = t;
        }
      } else if (!at_lower(t) && grad_[t] >= gmax) {
        gmax = grad_[t];
        i = t;
      }
    }

    std::size_t j = l_;
    double best_drop = kInf;
    for (std::size_t t = 0; t < l_; ++t) {
      if (sign_[t] > 0) {
        if (at_lower(t)) continue;
        const double diff = gmax + grad_[t];
        gmax2 = std::max(gmax2, grad_[t]);
        if (i < l_ && diff > 0.0) {
          double quad = qd(i) + qd(t) - 2.0 * sign_[i] * q(i, t);
          if (quad <= 0.0) quad = kTau;
          const double drop = -(diff * diff) / quad;
          if (drop <= best_drop) {
            j = t;
            best_drop = drop;
          }
        }
      } else {
        if (at_upper(t)) continue;
        const double diff = gmax - grad_[t];
        gmax2 = std::max(gmax2, -grad_[t]);
        if (i < l_ && diff > 0.0) {
          double quad = qd(i) + qd(t) + 2.0 * sign_[i] * q(i, t);
          if (quad <= 0.0) quad = kTau;
          const double drop = -(diff * diff) / quad;
          if (drop <= best_drop) {
            j = t;
            best_drop = drop;
          }
        }
      }
    }
    out_i = i;
    out_j = j;
    if (i >= l_ || j >= l_) return 0.0;
    return gmax + gmax2;
  }

  void update_pair(std::size_t i, std::size_t j) {
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    const double qij = q(i, j);

    if (sign_[i] != sign_[j]) {
      double quad = qd(i) + qd(j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c_) {
          ai = c_;
          aj = c_ - diff;
        }
      } else if (aj > c_) {
        aj = c_;
        ai = c_ + diff;
      }
    } else {
      double quad = qd(i) + qd(j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c_) {
        if (ai > c_) {
          ai = c_;
          aj = sum - c_;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c_) {
        if (aj > c_) {
          aj = c_;
          ai = sum - c_;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    const double di = ai - old_i;
    const double dj = aj - old_j;
    const std::size_t ri = (i % n_) * n_;
    const std::size_t rj = (j % n_) * n_;
    const double si = sign_[i] * di;
    const double sj = sign_[j] * dj;
    for (std::size_t t = 0; t < l_; ++t) {
      const std::size_t k = t % n_;
      grad_[t] += sign_[t] * (si * kernel_[ri + k] + sj * kernel_[rj + k]);
    }
  }

  std::size_t n_;
  std::size_t l_;
  const std::vector<double>& kernel_;
  double c_;
  std::vector<double> alpha_;
  std::vector<double> sign_;
  std::vector<double> p_;
  std::vector<double> grad_;
};

double spread_or_one(double sum_sq, std::size_t n, double mean) {
  const double var = sum_sq / static_cast<double>(n);
  const double sd = std::sqrt(std::max(var, 0.0));
  return sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
}

}  // namespace

Standardizer Standardizer::fit(std::span<const FeatureVector> x) {
  Standardizer s;
  if (x.empty()) {
    s.scale.fill(1.0);
    return s;
  }
  for (const auto& row : x) {
    for (std::size_t d = 0; d < kNumFeatures; ++d) s.mean[d] += row[d];
  }
  for (auto& m : s.mean) m /= static_cast<double>(x.size());
  FeatureVector sum_sq{};
  for (const auto& row : x) {
    for (std::size_t d = 0; d < kNumFeatures; ++d) {
      const double dv = row[d] - s.mean[d];
      sum_sq[d] += dv * dv;
    }
  }
  for (std::size_t d = 0; d < kNumFeatures; ++d) {
    s.scale[d] = spread_or_one(sum_sq[d], x.size(), s.mean[d]);
  }
  return s;
}

FeatureVector Standardizer::apply(const FeatureVector& x) const {
  FeatureVector z;
  for (std::size_t d = 0; d < kNumFeatures; ++d) z[d] = (x[d] - mean[d]) / scale[d];
  return z;
}

double rbf_kernel(const FeatureVector& a, const FeatureVector& b, double gamma) {
  double d2 = 0.0;
  for (std::size_t d = 0; d < kNumFeatures; ++d) {
    const double diff = a[d] - b[d];
    d2 += diff * diff;
  }
  return std::exp(-gamma * d2);
}

SvrModel SvrModel::fit(std::span<const FeatureVector> x, std::span<const double> y,
                       SvrParams params) {
  if (x.size() != y.size()) throw InvalidInput("feature/target count mismatch");
  if (x.size() < 2) throw InvalidInput("SVR needs at least two rows");
  if (!(params.c > 0.0) || !(params.epsilon >= 0.0) || !(params.gamma > 0.0) ||
      !(params.tolerance > 0.0)) {
    throw InvalidInput("SVR hyperparameters must be positive");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(y[i])) throw InvalidInput("non-finite SVR target");
    for (const double v : x[i]) {
      if (!std::isfinite(v)) throw InvalidInput("non-finite SVR feature");
    }
  }

  SvrModel model;
  model.params_ = params;
  model.features_ = Standardizer::fit(x);

  const std::size_t n = x.size();
  double mean = 0.0;
  for (const double v : y) mean += v;
  mean /= static_cast<double>(n);
  double sum_sq = 0.0;
  for (const double v : y) sum_sq += (v - mean) * (v - mean);
  model.target_mean_ = mean;
  model.target_scale_ = spread_or_one(sum_sq, n, mean);

  std::vector<FeatureVector> zx(n);
  std::vector<double> zy(n);
  for (std::size_t i = 0; i < n; ++i) {
    zx[i] = model.features_.apply(x[i]);
    zy[i] = (y[i] - mean) / model.target_scale_;
  }

  // Dense kernel matrix; the per-class training sets stay in the low
  // thousands of rows.
  std::vector<double> kernel(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = rbf_kernel(zx[i], zx[j], params.gamma);
      kernel[i * n + j] = k;
      kernel[j * n + i] = k;
    }
  }

  SmoSolver solver(kernel, zy, params.c, params.epsilon);
  const std::size_t budget = params.max_sweeps * 2 * n;
  const auto res = solver.solve(params.tolerance, budget);
  model.converged_ = res.converged;
  model.iterations_ = res.iterations;
  model.kkt_gap_ = res.gap;
  model.objective_ = solver.objective();
  model.bias_ = -solver.rho();

  const auto beta = solver.coefficients();
  for (std::size_t i = 0; i < n; ++i) {
    if (beta[i] != 0.0) {
      model.support_.push_back(zx[i]);
      model.coef_.push_back(beta[i]);
    }
  }
  return model;
}

double SvrModel::predict(const FeatureVector& x) const {
  const auto z = features_.apply(x);
  double f = bias_;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    f += coef_[i] * rbf_kernel(support_[i], z, params_.gamma);
  }
  return f * target_scale_ + target_mean_;
}

std::string SvrModel::serialize() const {
  std::ostringstream out;
  out << detail::model_header(kSvrKind);
  out << "c " << format_exact(params_.c) << '\n'
      << "epsilon " << format_exact(params_.epsilon) << '\n'
      << "gamma " << format_exact(params_.gamma) << '\n'
      << "tolerance " << format_exact(params_.tolerance) << '\n'
      << "max_sweeps " << params_.max_sweeps << '\n'
      << "converged " << (converged_ ? 1 : 0) << '\n'
      << "iterations " << iterations_ << '\n'
      << "kkt_gap " << format_exact(kkt_gap_) << '\n'
      << "objective " << format_exact(objective_) << '\n'
      << "feature_mean";
  for (const double v : features_.mean) out << ' ' << format_exact(v);
  out << "\nfeature_scale";
  for (const double v : features_.scale) out << ' ' << format_exact(v);
  out << "\ntarget_mean " << format_exact(target_mean_) << '\n'
      << "target_scale " << format_exact(target_scale_) << '\n'
      << "bias " << format_exact(bias_) << '\n'
      << "support_vectors " << support_.size() << '\n';
  for (std::size_t i = 0; i < support_.size(); ++i) {
    out << "sv " << format_exact(coef_[i]);
    for (const double v : support_[i]) out << ' ' << format_exact(v);
    out << '\n';
  }
  return out.str();
}

SvrModel SvrModel::deserialize(std::string_view text) {
  detail::ModelReader in(text, kSvrKind);
  SvrModel m;
  in.expect("c");
  m.params_.c = in.number();
  in.expect("epsilon");
  m.params_.epsilon = in.number();
  in.expect("gamma");
  m.params_.gamma = in.number();
  in.expect("tolerance");
  m.params_.tolerance = in.number();
  in.expect("max_sweeps");
  m.params_.max_sweeps = in.count(std::numeric_limits<std::size_t>::max() / 4);
  in.expect("converged");
  m.converged_ = in.integer() != 0;
  in.expect("iterations");
  m.iterations_ = static_cast<std::size_t>(in.integer());
  in.expect("kkt_gap");
  m.kkt_gap_ = in.number();
  in.expect("objective");
  m.objective_ = in.number();
  in.expect("feature_mean");
  for (auto& v : m.features_.mean) v = in.number();
  in.expect("feature_scale");
  for (auto& v : m.features_.scale) {
    v = in.number();
    if (!(v > 0.0)) throw FormatError("feature scale must be > 0");
  }
  in.expect("target_mean");
  m.target_mean_ = in.number();
  in.expect("target_scale");
  m.target_scale_ = in.number();
  if (!(m.target_scale_ > 0.0)) throw FormatError("target scale must be > 0");
  in.expect("bias");
  m.bias_ = in.number();
  in.expect("support_vectors");
  const auto n = in.count();
  m.support_.resize(n);
  m.coef_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.expect("sv");
    m.coef_[i] = in.number();
    for (auto& v : m.support_[i]) v = in.number();
  }
  in.finish();
  return m;
}

void save_model(const SvrModel& model, const std::filesystem::path& path) {
  write_text_file(path, model.serialize());
}

SvrModel load_svr(const std::filesystem::path& path) {
  return SvrModel::deserialize(read_text_file(path));
}

std::string model_kind(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  std::istringstream first(text.substr(0, text.find('\n')));
  std::string magic;
  std::string version;
  std::string kind;
  first >> magic >> version >> kind;
  if (magic != detail::kModelMagic || version != detail::kModelVersion || kind.empty()) {
    throw FormatError("not a hydrotwin v1 model file: " + path.string());
  }
  return kind;
}

}  // namespace hydrotwin
