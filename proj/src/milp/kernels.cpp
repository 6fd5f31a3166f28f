#include "mmimo/milp/kernels.hpp"

#include <cstddef>

#ifdef MMIMO_HAVE_OPENMP
#include <omp.h>
#endif

namespace mmimo::milp::kernels {

bool parallel_available() {
#ifdef MMIMO_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

namespace serial {

void pivot_row(const CscMatrix& a, std::span<const double> rho, std::span<double> alpha) {
  for (int j = 0; j < a.cols; ++j) {
    double s = 0.0;
    for (int t = a.start[j]; t < a.start[j + 1]; ++t) s += rho[a.index[t]] * a.value[t];
    alpha[j] = s;
  }
  for (int i = 0; i < a.rows; ++i) alpha[a.cols + i] = -rho[i];
}

void update_reduced_costs(std::span<double> d, std::span<const double> alpha, double step) {
  for (std::size_t j = 0; j < d.size(); ++j) d[j] -= step * alpha[j];
}

void pivot_inverse(std::span<double> binv, int m, std::span<const double> column, int p) {
  double* prow = binv.data() + static_cast<std::ptrdiff_t>(p) * m;
  const double inv = 1.0 / column[p];
  for (int k = 0; k < m; ++k) prow[k] *= inv;
  for (int i = 0; i < m; ++i) {
    if (i == p || column[i] == 0.0) continue;
    double* row = binv.data() + static_cast<std::ptrdiff_t>(i) * m;
    const double f = column[i];
    for (int k = 0; k < m; ++k) row[k] -= f * prow[k];
  }
}

}  // namespace serial

namespace parallel {

void pivot_row(const CscMatrix& a, std::span<const double> rho, std::span<double> alpha) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < a.cols; ++j) {
    double s = 0.0;
    for (int t = a.start[j]; t < a.start[j + 1]; ++t) s += rho[a.index[t]] * a.value[t];
    alpha[j] = s;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) alpha[a.cols + i] = -rho[i];
}

void update_reduced_costs(std::span<double> d, std::span<const double> alpha, double step) {
  const auto n = static_cast<std::ptrdiff_t>(d.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) d[j] -= step * alpha[j];
}

void pivot_inverse(std::span<double> binv, int m, std::span<const double> column, int p) {
  double* prow = binv.data() + static_cast<std::ptrdiff_t>(p) * m;
  const double inv = 1.0 / column[p];
  for (int k = 0; k < m; ++k) prow[k] *= inv;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    if (i == p || column[i] == 0.0) continue;
    double* row = binv.data() + static_cast<std::ptrdiff_t>(i) * m;
    const double f = column[i];
    for (int k = 0; k < m; ++k) row[k] -= f * prow[k];
  }
}

}  // namespace parallel

void pivot_row(Mode mode, const CscMatrix& a, std::span<const double> rho,
               std::span<double> alpha) {
  if (mode == Mode::Parallel) {
    parallel::pivot_row(a, rho, alpha);
  } else {
    serial::pivot_row(a, rho, alpha);
  }
}

void update_reduced_costs(Mode mode, std::span<double> d, std::span<const double> alpha,
                          double step) {
  if (mode == Mode::Parallel) {
    parallel::update_reduced_costs(d, alpha, step);
  } else {
    serial::update_reduced_costs(d, alpha, step);
  }
}

void pivot_inverse(Mode mode, std::span<double> binv, int m, std::span<const double> column,
                   int p) {
  if (mode == Mode::Parallel) {
    parallel::pivot_inverse(binv, m, column, p);
  } else {
    serial::pivot_inverse(binv, m, column, p);
  }
}

}  // namespace mmimo::milp::kernels
