#pragma once

#include <stdexcept>
#include <string>

namespace ttcone {

/// Shape or index inconsistency between operands.
class DimsMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A base point whose numerical ranks differ from the declared ones.
class RankDeficientBase : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A candidate vector whose projected residual exceeds the slack bound.
class NotInCone : public std::runtime_error {
public:
    NotInCone(const std::string& what, long split, long residual_rank, long slack_bound)
        : std::runtime_error(what),
          split(split),
          residual_rank(residual_rank),
          slack_bound(slack_bound) {}

    long split;  // 1-based split index, -1 when not attributable
    long residual_rank;
    long slack_bound;
};

/// The U-channel carried from one split cannot absorb the channel found at
/// the next split; the channel-matching pseudoinverse is rank-deficient.
class DegenerateChannels : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file or JSON payload.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ttcone
