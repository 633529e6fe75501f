#pragma once

#include <vector>

namespace bcj {

struct JacobiParams {
  int n = 1;
  double alpha = 0;
  double beta = 0;
};

// P_n^{(alpha,beta)}(x) in the classical (Szego) normalization, three-term recurrence.
double eval_jacobi(const JacobiParams& jp, double x);

// |P_n(x)| divided by max_{[-1,1]} |P_n|, evaluated in log scale so that huge
// alpha, beta do not overflow.
double jacobi_relative_residual(const JacobiParams& jp, double x);

// Recurrence coefficients of the monic orthogonal polynomials:
// p_{k+1} = (x - diag[k]) p_k - offdiag2[k] p_{k-1}, k = 0..n-1 (offdiag2[0] unused).
void jacobi_recurrence(const JacobiParams& jp, std::vector<double>& diag, std::vector<double>& offdiag2);

// Ordered zeros from the symmetric Jacobi matrix, polished by safeguarded Newton.
std::vector<double> jacobi_zeros(const JacobiParams& jp);

}  // namespace bcj
