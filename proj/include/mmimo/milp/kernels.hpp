#pragma once

// Dense inner loops of the simplex method. Each kernel exists as a serial
// reference and an OpenMP variant; both produce bit-identical results since
// every output element is written by exactly one iteration.

#include <span>
#include <vector>

namespace mmimo::milp {

/// Compressed sparse column storage.
struct CscMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> start;  // cols + 1
  std::vector<int> index;
  std::vector<double> value;
};

namespace kernels {

enum class Mode { Serial, Parallel };

/// True if the library was built with OpenMP.
bool parallel_available();

// alpha[j] = rho . a_j for structural columns, alpha[n + i] = -rho[i] for the
// logical of row i.
void pivot_row(Mode mode, const CscMatrix& a, std::span<const double> rho,
               std::span<double> alpha);

// d[j] -= step * alpha[j].
void update_reduced_costs(Mode mode, std::span<double> d, std::span<const double> alpha,
                          double step);

// Gauss-Jordan pivot of the dense basis inverse on `column` at row p.
void pivot_inverse(Mode mode, std::span<double> binv, int m, std::span<const double> column,
                   int p);

namespace serial {
void pivot_row(const CscMatrix& a, std::span<const double> rho, std::span<double> alpha);
void update_reduced_costs(std::span<double> d, std::span<const double> alpha, double step);
void pivot_inverse(std::span<double> binv, int m, std::span<const double> column, int p);
}  // namespace serial

namespace parallel {
void pivot_row(const CscMatrix& a, std::span<const double> rho, std::span<double> alpha);
void update_reduced_costs(std::span<double> d, std::span<const double> alpha, double step);
void pivot_inverse(std::span<double> binv, int m, std::span<const double> column, int p);
}  // namespace parallel

}  // namespace kernels
}  // namespace mmimo::milp
