#pragma once

#include <Eigen/Dense>

#include "qlyap/errors.hpp"
#include "qlyap/lattice.hpp"

namespace qlyap {

// Observable labels used throughout: 0 = x1, 1 = x2, 2 = p1, 3 = p2.
inline constexpr int kNumObservables = 4;
inline constexpr const char* kObservableNames[kNumObservables] = {"x1", "x2",
                                                                  "p1", "p2"};

// Applies the four windowed observables to batches of states. A batch is a
// (d x m) matrix whose columns are state vectors; within a column the flat
// index is (k1 + K) * n + (k2 + K), so the column-major view of one state as
// an n x n block has rows indexed by k2 and block-columns indexed by k1.
class Observables {
 public:
  explicit Observables(const Lattice& lat)
      : lat_(lat), section_(lat.position_section()) {}

  const Lattice& lattice() const { return lat_; }
  const Mat& position_axis_section() const { return section_; }

  // out = O_which(beta) * a, columnwise.
  void apply(int which, const Eigen::Vector2d& beta, const Mat& a,
             Mat& out) const {
    const int n = lat_.axis_dim();
    const Eigen::Index m = a.cols();
    out.resize(a.rows(), m);
    Eigen::Map<const Mat> in(a.data(), n, n * m);
    Eigen::Map<Mat> ob(out.data(), n, n * m);
    switch (which) {
      case 0: {  // x1 acts on the block-column (k1) index
        const Mat st = section_.transpose();
        for (Eigen::Index j = 0; j < m; ++j)
          ob.middleCols(j * n, n).noalias() = in.middleCols(j * n, n) * st;
        break;
      }
      case 1:  // x2 acts on the row (k2) index
        ob.noalias() = section_ * in;
        break;
      case 2: {  // p1 = beta1 + k1, constant along each block column
        for (Eigen::Index c = 0; c < n * m; ++c)
          ob.col(c) = in.col(c) *
                      (beta(0) + static_cast<double>(c % n) - lat_.cutoff());
        break;
      }
      case 3: {  // p2 = beta2 + k2, varies along rows
        const Eigen::VectorXd p = lat_.axis_momenta(beta(1));
        ob = in.array().colwise() * p.cast<cplx>().array();
        break;
      }
      default:
        throw NumericsError("unknown observable index");
    }
  }

 private:
  Lattice lat_;
  Mat section_;
};

}  // namespace qlyap
