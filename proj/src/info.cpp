#include "tmkit/info.hpp"

#include "tmkit/error.hpp"
#include "tmkit/expr.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace tmkit {

namespace {

double log_in(double x, double base) {
    if (base == 2.0) return std::log2(x);
    if (base == 10.0) return std::log10(x);
    return std::log(x);
}

void check_base(double base) {
    if (base != 2.0 && base != 10.0 && base != std::exp(1.0))
        throw Error(ErrorCode::Domain, "logarithm base must be 2, e or 10");
}

std::string unit_of(double base) {
    if (base == 2.0) return "bits";
    if (base == 10.0) return "hartleys";
    return "nats";
}

}  // namespace

Distribution::Distribution(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
    if (outcomes_.empty()) throw Error(ErrorCode::Domain, "distribution has no outcomes");
    double total = 0.0;
    std::set<std::string> labels;
    for (const auto& [label, p] : outcomes_) {
        if (!(p >= 0.0 && p <= 1.0))
            throw Error(ErrorCode::Domain, "probability of '" + label + "' is outside [0, 1]");
        if (!labels.insert(label).second) throw Error(ErrorCode::Domain, "duplicate outcome '" + label + "'");
        total += p;
    }
    if (std::fabs(total - 1.0) > probability_tolerance)
        throw Error(ErrorCode::Domain, "probabilities sum to " + format_number(total) + ", not 1");
}

double self_information(double p, double base) {
    check_base(base);
    if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::Domain, "probability " + format_number(p) + " outside (0, 1]");
    return p == 1.0 ? 0.0 : -log_in(p, base);
}

double entropy(const Distribution& distribution, double base) {
    check_base(base);
    double h = 0.0;
    for (const auto& [label, p] : distribution.outcomes())
        if (p > 0.0) h += p * self_information(p, base);
    return h;
}

InfoReport info_report(const Distribution& distribution, double base) {
    InfoReport r;
    r.base = base;
    for (const auto& [label, p] : distribution.outcomes())
        r.outcomes.push_back({label, 0, p,
                              p > 0.0 ? self_information(p, base) : std::numeric_limits<double>::infinity()});
    r.entropy = entropy(distribution, base);
    return r;
}

InfoReport empirical_info(const std::vector<std::string>& sequence, const std::vector<std::string>& outcomes,
                          double base) {
    check_base(base);
    if (outcomes.empty()) throw Error(ErrorCode::InvalidArgument, "no outcome events given");
    std::map<std::string, std::size_t> counts;
    for (const std::string& o : outcomes) counts[o] = 0;
    std::size_t total = 0;
    for (const std::string& e : sequence) {
        auto it = counts.find(e);
        if (it != counts.end()) ++it->second, ++total;
    }
    if (total == 0) throw Error(ErrorCode::EmptyObservation, "none of the outcome events was observed");

    InfoReport r;
    r.base = base;
    r.observations = total;
    std::set<std::string> seen;
    for (const std::string& o : outcomes) {
        if (!seen.insert(o).second) continue;
        const std::size_t c = counts[o];
        const double p = static_cast<double>(c) / static_cast<double>(total);
        const double info = c ? self_information(p, base) : std::numeric_limits<double>::infinity();
        r.outcomes.push_back({o, c, p, info});
        if (c) r.entropy += p * info;
    }
    r.empirical_entropy = r.entropy;
    return r;
}

std::string InfoReport::to_text() const {
    std::size_t width = 7;
    for (const OutcomeInfo& o : outcomes) width = std::max(width, o.label.size());
    std::ostringstream out;
    auto pad = [&](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
    out << pad("outcome", width) << "  " << pad("count", 8) << "  " << pad("probability", 22) << "  "
        << "information (" << unit_of(base) << ")\n";
    for (const OutcomeInfo& o : outcomes)
        out << pad(o.label, width) << "  " << pad(std::to_string(o.count), 8) << "  "
            << pad(format_number(o.probability), 22) << "  "
            << (std::isinf(o.self_information) ? std::string("inf") : format_number(o.self_information)) << '\n';
    out << "entropy " << format_number(entropy) << ' ' << unit_of(base) << '\n';
    if (empirical_entropy) out << "observations " << observations << '\n';
    return out.str();
}

std::string InfoReport::to_json() const {
    nlohmann::ordered_json j;
    j["base"] = base;
    j["unit"] = unit_of(base);
    j["entropy"] = entropy;
    if (empirical_entropy) {
        j["empirical_entropy"] = *empirical_entropy;
        j["observations"] = observations;
    }
    j["outcomes"] = nlohmann::ordered_json::array();
    for (const OutcomeInfo& o : outcomes) {
        nlohmann::ordered_json row;
        row["label"] = o.label;
        row["count"] = o.count;
        row["probability"] = o.probability;
        if (std::isinf(o.self_information))
            row["self_information"] = nullptr;
        else
            row["self_information"] = o.self_information;
        j["outcomes"].push_back(row);
    }
    return j.dump(2) + "\n";
}

}  // namespace tmkit
