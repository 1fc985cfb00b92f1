#ifndef ABSGAME_TARGETS_HPP
#define ABSGAME_TARGETS_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "absgame/scalar.hpp"

namespace absgame {

// A time-indexed family of maps g_n : [0,1]^d -> [0,1]^d, Lipschitz with a
// declared constant; together with the dynamics it defines the moving
// points the strategies must keep away from. Evaluation rejects any output
// that escapes the unit cube rather than clamping it.
class TargetFamily {
 public:
  using Fn = std::function<std::vector<Scalar>(unsigned long,
                                               const std::vector<Scalar>&)>;

  static TargetFamily constant(std::vector<Scalar> point);
  // g_n = points[n-1]; evaluation beyond the list is an error.
  static TargetFamily point_sequence(std::vector<std::vector<Scalar>> points);
  static TargetFamily identity(std::size_t dimension, const Mode& mode);
  // g(x)_i = slopes[i] * x_i + offsets[i] for every n.
  static TargetFamily affine(std::vector<Scalar> slopes,
                             std::vector<Scalar> offsets);
  static TargetFamily custom(Fn fn, Scalar lipschitz, std::size_t dimension,
                             std::string label);

  std::size_t dimension() const { return dimension_; }
  const Mode& mode() const { return lipschitz_.mode(); }
  const std::string& name() const { return name_; }
  // Declared Lipschitz constant (sup-norm to sup-norm).
  const Scalar& lipschitz() const { return lipschitz_; }

  // g_n(x) for n >= 1. Throws SpecError when the image leaves [0,1]^d or n
  // is out of range, PrecisionExhausted when containment is undecidable.
  std::vector<Scalar> evaluate(unsigned long n, const std::vector<Scalar>& x) const;

 private:
  TargetFamily(Fn fn, Scalar lipschitz, std::size_t dimension, std::string name)
      : fn_(std::move(fn)),
        lipschitz_(std::move(lipschitz)),
        dimension_(dimension),
        name_(std::move(name)) {}

  Fn fn_;
  Scalar lipschitz_;
  std::size_t dimension_;
  std::string name_;
};

// Checks ||g_n(x) - g_n(y)||_inf <= C1 * (1 + 1e-9) * ||x - y||_inf on the
// given sample pairs. The slack absorbs honest rounding in ball mode; a
// definite violation means the declared constant is wrong.
Ternary lipschitz_audit(
    const TargetFamily& g, unsigned long n,
    const std::vector<std::pair<std::vector<Scalar>, std::vector<Scalar>>>& pairs);

}  // namespace absgame

#endif  // ABSGAME_TARGETS_HPP
