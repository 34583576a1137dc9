#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "wpgd/error.hpp"

namespace wpgd::attacks {

enum class Norm { linf, l2 };
enum class Objective { ce, wasserstein };

inline const char* to_string(Norm n) { return n == Norm::linf ? "linf" : "l2"; }
inline const char* to_string(Objective o) { return o == Objective::ce ? "ce" : "wasserstein"; }

inline Norm parse_norm(const std::string& s) {
  if (s == "linf") return Norm::linf;
  if (s == "l2") return Norm::l2;
  throw ValidationError("unknown norm '" + s + "' (expected linf or l2)");
}

inline Objective parse_objective(const std::string& s) {
  if (s == "ce") return Objective::ce;
  if (s == "wasserstein" || s == "w") return Objective::wasserstein;
  throw ValidationError("unknown attack objective '" + s + "' (expected ce or wasserstein)");
}

/// Projected-gradient attack settings. eps is in input units (pixels in
/// [0, 1]). eps == 0 is accepted and returns the clean input.
struct AttackConfig {
  double eps = 0.1;
  std::size_t steps = 20;
  std::optional<double> step_size{};  // defaults to 2.5 * eps / steps
  Norm norm = Norm::linf;
  Objective objective = Objective::ce;
  bool random_start = true;
  double clamp_lo = 0.0;
  double clamp_hi = 1.0;
  double lambda = 100.0;  // entropic weight of the Wasserstein objective
  std::uint64_t seed = 0;

  double alpha() const { return step_size.value_or(2.5 * eps / static_cast<double>(steps)); }

  void validate() const {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw ValidationError("attack: eps must be >= 0");
    if (steps == 0) throw ValidationError("attack: steps must be >= 1");
    if (step_size && !(*step_size > 0.0)) throw ValidationError("attack: step_size must be > 0");
    if (!(clamp_lo < clamp_hi)) throw ValidationError("attack: clamp range needs lo < hi");
    if (!(lambda > 0.0)) throw ValidationError("attack: lambda must be > 0");
  }
};

}  // namespace wpgd::attacks
