#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tmkit {

/// Outcome probabilities. Sums to 1 within 1e-12, all non-negative, labels unique.
class Distribution {
public:
    using Outcome = std::pair<std::string, double>;

    /// Throws Error(Domain) when the invariants do not hold.
    explicit Distribution(std::vector<Outcome> outcomes);

    const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
    std::size_t size() const noexcept { return outcomes_.size(); }

private:
    std::vector<Outcome> outcomes_;
};

inline constexpr double probability_tolerance = 1e-12;

/// -log_base(p). Throws Error(Domain) unless 0 < p <= 1 and base is 2, e or 10.
double self_information(double p, double base = 2.0);

/// -sum p log_base p with 0 log 0 = 0.
double entropy(const Distribution& distribution, double base = 2.0);

struct OutcomeInfo {
    std::string label;
    std::size_t count = 0;
    double probability = 0.0;
    /// Infinite for an outcome that was never observed.
    double self_information = 0.0;
};

struct InfoReport {
    std::vector<OutcomeInfo> outcomes;
    double entropy = 0.0;
    std::optional<double> empirical_entropy;
    std::size_t observations = 0;
    double base = 2.0;

    std::string to_text() const;
    std::string to_json() const;
};

/// Report for a known distribution.
InfoReport info_report(const Distribution& distribution, double base = 2.0);

/// Relative frequencies of `outcomes` in `sequence`. Throws InvalidArgument for an empty
/// outcome set and EmptyObservation when none of them occurs.
InfoReport empirical_info(const std::vector<std::string>& sequence,
                          const std::vector<std::string>& outcomes, double base = 2.0);

}  // namespace tmkit
