#include "grassclust/errors.hpp"

namespace grassclust {

OutOfRangeError::OutOfRangeError(const std::string& what, long missing_index)
    : InputError(what), missing_index_(missing_index) {}

CutLocusError::CutLocusError(const std::string& what, double max_angle)
    : Error(what), max_angle_(max_angle) {}

}  // namespace grassclust
