#include "spiderweb/scalar.hpp"

namespace spiderweb {

double matrix_norm_inf_upper(const IMatrix& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Interval row(0.0);
    for (Eigen::Index j = 0; j < m.cols(); ++j) row += Interval(m(i, j).mag());
    best = std::max(best, row.upper());
  }
  return best;
}

}  // namespace spiderweb
