#include "core/errors.hpp"

namespace digmm {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::ok: return "ok";
    case errc::invalid_argument: return "invalid_argument";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::length_mismatch: return "length_mismatch";
    case errc::non_symmetric: return "non_symmetric";
    case errc::not_positive_definite: return "not_positive_definite";
    case errc::too_few_samples: return "too_few_samples";
    case errc::degenerate_data: return "degenerate_data";
    case errc::infeasible: return "infeasible";
    case errc::infeasible_point: return "infeasible_point";
    case errc::no_convergence: return "no_convergence";
    case errc::missing_labels: return "missing_labels";
    case errc::single_class: return "single_class";
    case errc::dimension_not_two: return "dimension_not_two";
    case errc::parse_error: return "parse_error";
    case errc::non_finite_value: return "non_finite_value";
    case errc::ragged_rows: return "ragged_rows";
    case errc::schema_error: return "schema_error";
    case errc::version_error: return "version_error";
    case errc::invariant_violation: return "invariant_violation";
    case errc::rejection_stall: return "rejection_stall";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace digmm
