#pragma once

#include <stdexcept>
#include <string>

namespace epicascade {

enum class errc {
  disconnected_graph,
  invalid_edge,
  generation_failed,
  out_of_range,
  override_out_of_range,
  empty_seed_set,
  non_positive_weights,
  is_seed,
  parse_error,
  validation_error,
  bad_record,
  io_error,
};

const char* errc_name(errc code) noexcept;

/// Library errors carry a machine-checkable code plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message);
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace epicascade
