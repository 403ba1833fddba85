#pragma once
#include <stdexcept>
#include <vector>

extern "C" void dgtsv_(const int* n, const int* nrhs, double* dl, double* d, double* du, double* b,
                       const int* ldb, int* info);

namespace uihp::detail {

// Solves the tridiagonal system in place (LAPACK, partial pivoting); rhs becomes x.
inline void solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                              std::vector<double> sup, std::vector<double>& rhs) {
  const int n = static_cast<int>(diag.size()), nrhs = 1;
  int info = 0;
  if (n == 0) return;
  dgtsv_(&n, &nrhs, sub.data(), diag.data(), sup.data(), rhs.data(), &n, &info);
  if (info != 0) throw std::runtime_error("singular tridiagonal system");
}

}  // namespace uihp::detail
