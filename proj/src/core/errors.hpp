#pragma once

#include <stdexcept>
#include <string>

namespace digmm {

// Failure categories shared by the whole library.  Every exception thrown by
// digmm carries one of these codes so callers (and the C API) can map
// failures to a stable, coarse-grained taxonomy without parsing messages.
enum class errc {
  ok = 0,
  invalid_argument,
  dimension_mismatch,
  length_mismatch,
  non_symmetric,
  not_positive_definite,
  too_few_samples,
  degenerate_data,
  infeasible,
  infeasible_point,
  no_convergence,
  missing_labels,
  single_class,
  dimension_not_two,
  parse_error,
  non_finite_value,
  ragged_rows,
  schema_error,
  version_error,
  invariant_violation,
  rejection_stall,
  io_error,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

// Precondition helper: throws with the given code when `condition` is false.
inline void require(bool condition, errc code, const std::string& message) {
  if (!condition) raise(code, message);
}

}  // namespace digmm
