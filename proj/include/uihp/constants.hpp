#pragma once
#include <cmath>

namespace uihp {

enum class Model { quad, tri };

inline const char* model_name(Model m) { return m == Model::quad ? "quad" : "tri"; }

// Boltzmann weights for triangulations with a boundary. The critical point is
// R = sqrt(3), S = 3^{1/4}(sqrt(3) - 1), g3 = 1/(2 * 3^{3/4}).
struct TriangularWeights {
  double R = 0;
  double S = 0;
  double g3 = 0;

  static TriangularWeights critical() {
    const double r3 = std::sqrt(3.0);
    return {r3, std::pow(3.0, 0.25) * (r3 - 1.0), 0.5 * std::pow(3.0, -0.75)};
  }

  double C() const { return 2.0 * std::sqrt(R) + S; }
  double p_up() const { return std::sqrt(R) / C(); }  // = P(down step)
  double p_level() const { return S / C(); }

  // mobile branching: a labeled vertex has k face children with probability (1 - a) a^k
  double labeled_ratio() const { return 2.0 * g3 * S; }
  // the face below a flag: three-flag face, or a face holding one labeled vertex
  // (label f or f+1). Normalized copies, so perturbed weights still give a law.
  double three_flag_prob() const { return g3 * S / face_norm(); }
  double labeled_face_prob() const { return g3 * R / S / face_norm(); }

 private:
  double face_norm() const { return g3 * S + 2.0 * g3 * R / S; }
};

}  // namespace uihp
