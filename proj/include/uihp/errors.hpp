#pragma once
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uihp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sampled object outgrew its node or step cap. Callers discard the replicate and tally it.
class CapExceeded : public Error {
 public:
  enum class Kind { nodes, steps, law_range };
  CapExceeded(Kind kind, std::size_t cap)
      : Error(std::string(kind == Kind::nodes   ? "node cap exceeded: "
                          : kind == Kind::steps ? "step budget exceeded: "
                                                : "law table range exceeded: ") +
              std::to_string(cap)),
        kind(kind),
        cap(cap) {}
  Kind kind;
  std::size_t cap;
};

class NoConvergence : public Error {
 public:
  explicit NoConvergence(double residual)
      : Error("no convergence, residual " + std::to_string(residual)), residual(residual) {}
  double residual;
};

class NoAnchor : public Error {
 public:
  NoAnchor() : Error("no label-0 corner on the nonnegative side of the window") {}
};

class Unresolved : public Error {
 public:
  explicit Unresolved(std::vector<std::size_t> corners)
      : Error("unresolved successor for " + std::to_string(corners.size()) + " corner(s)"),
        corners(std::move(corners)) {}
  std::vector<std::size_t> corners;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(double fraction, double ceiling)
      : Error("truncation fraction " + std::to_string(fraction) + " above ceiling " +
              std::to_string(ceiling)),
        fraction(fraction),
        ceiling(ceiling) {}
  double fraction;
  double ceiling;
};

}  // namespace uihp
