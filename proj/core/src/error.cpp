#include "epicascade/error.hpp"

namespace epicascade {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::disconnected_graph: return "DisconnectedGraph";
    case errc::invalid_edge: return "InvalidEdge";
    case errc::generation_failed: return "GenerationFailed";
    case errc::out_of_range: return "OutOfRange";
    case errc::override_out_of_range: return "OverrideOutOfRange";
    case errc::empty_seed_set: return "EmptySeedSet";
    case errc::non_positive_weights: return "NonPositiveWeights";
    case errc::is_seed: return "IsSeed";
    case errc::parse_error: return "ParseError";
    case errc::validation_error: return "ValidationError";
    case errc::bad_record: return "BadRecord";
    case errc::io_error: return "IoError";
  }
  return "Error";
}

Error::Error(errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

}  // namespace epicascade
