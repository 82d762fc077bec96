#include "psychflow/sim/random.hpp"

namespace psychflow::sim {

std::string_view to_string(StreamPurpose purpose) {
  switch (purpose) {
    case StreamPurpose::Arrivals: return "arrivals";
    case StreamPurpose::Attributes: return "attributes";
    case StreamPurpose::LengthOfStay: return "los";
    case StreamPurpose::Review: return "review";
  }
  return "?";
}

}  // namespace psychflow::sim
