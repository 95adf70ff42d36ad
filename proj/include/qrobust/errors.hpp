#pragma once

#include <stdexcept>
#include <string>

namespace qrobust {

/// Exact methods refuse problems above their variable cap instead of running
/// for hours; callers can raise the cap explicitly if they mean it.
class SizeCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A feasible set turned out to be empty (constraints reject every assignment).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sample pool contained no feasible candidate, so nothing could be selected.
/// The report over the infeasible candidates is still available to the caller.
class EmptyHarvestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qrobust
