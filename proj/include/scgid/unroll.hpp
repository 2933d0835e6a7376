#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "scgid/docalculus.hpp"
#include "scgid/dsep.hpp"
#include "scgid/graph.hpp"

namespace scgid {

struct Exhaustive {};

struct Sampled {
    std::size_t count = 1;
    std::uint64_t seed = 0;
};

/// Time window and lag bound used to realize SCG edges. max_lag is a
/// finitization knob: compatibility itself puts no bound on lags.
struct UnrollConfig {
    int t0 = 0;
    int tmax = 1;
    int max_lag = 1;
    std::variant<Exhaustive, Sampled> mode = Exhaustive{};
};

// Throws ArgumentError unless t0 <= tmax, 0 <= max_lag <= tmax - t0 and any sample count is positive.
void validate(const UnrollConfig& cfg);

/// Lazily yields every FT-ADMG compatible with g whose lags are within
/// cfg.max_lag, each exactly once, in a fixed order.
///
/// Throws InfeasibleError naming an edge that has no admissible slot and
/// ResourceError when the slot count exceeds `max_slots`.
class CompatibleEnumerator {
public:
    CompatibleEnumerator(const Scg& g, const UnrollConfig& cfg, std::size_t max_slots = 24);

    std::optional<FtAdmg> next();

private:
    struct Slot {
        std::size_t a, b;
    };
    struct EdgeSlots {
        bool bidirected = false;
        std::vector<Slot> slots;
    };

    bool advance();

    std::vector<std::string> names_;
    int t0_, tmax_;
    std::size_t window_;
    std::vector<EdgeSlots> edges_;
    std::vector<std::uint32_t> choice_;  // non-empty subset per edge
    bool exhausted_ = false;
};

std::vector<FtAdmg> enumerate_compatible(const Scg& g, const UnrollConfig& cfg, std::size_t max_slots = 24);

/// cfg.mode must be Sampled. Each sample realizes every SCG edge once at a
/// random admissible slot, adds each further slot with probability 1/2 and
/// drops additions that would close an instantaneous cycle.
/// Deterministic for a given seed on every platform.
std::vector<FtAdmg> sample_compatible(const Scg& g, const UnrollConfig& cfg);

/// Builds the compatible FT-ADMG from the completeness proof: edges of
/// `path` at lag 0 in every slice, every other SCG edge at lag 1.
/// The path read at t0 is active given every slice of `cond`.
/// Throws ContractError if `path` is blocked by cond in g and ArgumentError
/// if tmax - t0 < |S|.
FtAdmg completeness_witness(const Scg& g, const Path& path, const VertexSet& cond, int t0, int tmax);
FtAdmg completeness_witness(const Scg& g, const Path& path, const VertexSet& cond);

/// For a rule that does not apply on g: a compatible FT-ADMG on which the
/// same rule's separation fails. Built as the completeness witness of the
/// mutilated SCG with the cut edges restored once, from t0 to t0 + 1.
/// Throws ContractError when the rule applies.
FtAdmg rule_failure_witness(const Scg& g, int rule, const CausalQuery& q, int t0, int tmax);
FtAdmg rule_failure_witness(const Scg& g, int rule, const CausalQuery& q);

// The path's vertices read in one time slice.
TemporalPath at_time(const Path& path, int t);

}  // namespace scgid
