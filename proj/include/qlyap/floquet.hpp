#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <vector>

#include "qlyap/cat.hpp"
#include "qlyap/errors.hpp"
#include "qlyap/kick.hpp"
#include "qlyap/lattice.hpp"

namespace qlyap {

enum class ModelType { kFree, kPositionKick, kCatMap };

inline const char* model_type_name(ModelType t) {
  switch (t) {
    case ModelType::kFree:
      return "free";
    case ModelType::kPositionKick:
      return "position_kick";
    case ModelType::kCatMap:
      return "cat";
  }
  return "unknown";
}

// One Floquet period: the kick (if any) followed by free rotation for time
// tau. Resonant periods are integer multiples of 4 pi, for which the k^2/2
// part of the free phase is an exact multiple of 2 pi and is dropped rather
// than accumulated as roundoff.
struct ModelSpec {
  ModelType type = ModelType::kFree;
  int cutoff = 8;
  bool resonant = true;
  long long resonant_multiple = 1;
  double tau_value = 0.0;
  KickSpec kick;

  double tau() const {
    return resonant ? 4.0 * kPi * static_cast<double>(resonant_multiple)
                    : tau_value;
  }
};

// Phase factors exp(i a(k)) of the free propagator along one axis.
inline Vec free_axis_phase(const Lattice& lat, const ModelSpec& spec,
                           double beta) {
  const double tau = spec.tau();
  Vec out(lat.axis_dim());
  for (int i = 0; i < lat.axis_dim(); ++i) {
    const double k = i - lat.cutoff();
    const double arg = spec.resonant
                           ? tau * (beta * k + beta * beta / 2.0)
                           : tau * (beta + k) * (beta + k) / 2.0;
    out(i) = std::polar(1.0, arg);
  }
  return out;
}

// A batch of states evolved together under one model at one Bloch sector.
// Columns start as basis modes; the cat map moves the sector itself (the
// integer carry of M beta folds into the mode indices) and drops amplitude
// that leaves the window, tracked per column in lost().
class Pool {
 public:
  Pool(const Lattice& lat, const ModelSpec& spec, const Eigen::Vector2d& beta,
       const std::vector<Mode>& modes)
      : lat_(lat),
        spec_(spec),
        beta_(beta),
        states_(Mat::Zero(lat.dim(), static_cast<Eigen::Index>(modes.size()))),
        lost_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(modes.size()))) {
    require(!modes.empty(), "pool needs at least one mode");
    for (std::size_t j = 0; j < modes.size(); ++j) {
      require(lat.inside(modes[j]), "pool mode outside the lattice");
      states_(lat.index(modes[j]), static_cast<Eigen::Index>(j)) = 1.0;
    }
    if (spec.type == ModelType::kPositionKick)
      kick_ = std::make_shared<const KickOperator>(lat, spec.kick);
  }

  void step() {
    switch (spec_.type) {
      case ModelType::kFree:
        break;
      case ModelType::kPositionKick:
        kick_->apply(states_);
        break;
      case ModelType::kCatMap:
        cat_step();
        break;
    }
    apply_free_phases();
    ++steps_;
  }

  const Mat& states() const { return states_; }
  const Eigen::Vector2d& beta() const { return beta_; }
  int steps_done() const { return steps_; }
  double max_lost() const { return lost_.size() ? lost_.maxCoeff() : 0.0; }
  const Eigen::VectorXd& lost() const { return lost_; }

 private:
  void cat_step() {
    const Eigen::Vector2d mb(beta_(0) + beta_(1), beta_(0) + 2.0 * beta_(1));
    const Eigen::Vector2d carry(std::floor(mb(0)), std::floor(mb(1)));
    beta_ = mb - carry;
    const int c1 = static_cast<int>(carry(0));
    const int c2 = static_cast<int>(carry(1));
    const int n = lat_.axis_dim();
    Mat next = Mat::Zero(states_.rows(), states_.cols());
    for (Eigen::Index j = 0; j < states_.cols(); ++j) {
      for (int i = 0; i < lat_.dim(); ++i) {
        const cplx amp = states_(i, j);
        if (amp == cplx(0.0, 0.0)) continue;
        const int k1 = i / n - lat_.cutoff();
        const int k2 = i % n - lat_.cutoff();
        const int kp1 = k1 + k2 + c1;
        const int kp2 = k1 + 2 * k2 + c2;
        if (lat_.inside(kp1, kp2))
          next(lat_.index(kp1, kp2), j) = amp;
        else
          lost_(j) += std::norm(amp);
      }
    }
    states_.swap(next);
  }

  void apply_free_phases() {
    const Vec f1 = free_axis_phase(lat_, spec_, beta_(0));
    const Vec f2 = free_axis_phase(lat_, spec_, beta_(1));
    const int n = lat_.axis_dim();
    Eigen::Map<Mat> b(states_.data(), n, n * states_.cols());
    b.array().colwise() *= f2.array();
    for (Eigen::Index c = 0; c < b.cols(); ++c) b.col(c) *= f1(c % n);
  }

  Lattice lat_;
  ModelSpec spec_;
  Eigen::Vector2d beta_;
  Mat states_;
  Eigen::VectorXd lost_;
  std::shared_ptr<const KickOperator> kick_;
  int steps_ = 0;
};

}  // namespace qlyap
