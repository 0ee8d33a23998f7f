#include "doctest.h"

#include "tmkit/error.hpp"
#include "tmkit/info.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

using namespace tmkit;

namespace {

const double e_base = std::exp(1.0);

// Natural-log formula, independent of the library's base dispatch.
double info_oracle(double p, double base) { return -std::log(p) / std::log(base); }

template <class Fn>
void expect_code(ErrorCode code, Fn&& fn) {
    try {
        fn();
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

std::vector<double> grid() {
    std::vector<double> g;
    for (int k = 1; k <= 200; ++k) g.push_back(k / 200.0);
    for (double p : {1e-300, 1e-12, 0.3, 0.7, 1.0 / 3.0}) g.push_back(p);
    return g;
}

}  // namespace

TEST_CASE("a fair coin carries one bit") {
    CHECK(self_information(0.5) == 1.0);
    CHECK(entropy(Distribution({{"face", 0.5}, {"tail", 0.5}})) == 1.0);
    CHECK(self_information(1.0) == 0.0);
    CHECK(self_information(0.25) == 2.0);
    CHECK(self_information(0.1, 10) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(self_information(1 / e_base, e_base) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("self-information agrees with the natural-log formula") {
    for (double base : {2.0, e_base, 10.0})
        for (double p : grid()) CHECK(std::fabs(self_information(p, base) - info_oracle(p, base)) <= 1e-12 * std::max(1.0, info_oracle(p, base)));
}

TEST_CASE("self-information is additive over independent outcomes") {
    for (double p : grid())
        for (double q : grid()) {
            if (p * q < 1e-300) continue;
            const double sum = self_information(p) + self_information(q);
            CHECK(std::fabs(self_information(p * q) - sum) <= 1e-12 * std::max(1.0, sum));
        }
}

TEST_CASE("self-information decreases as probability grows") {
    auto g = grid();
    std::sort(g.begin(), g.end());
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (g[i] == g[i - 1]) continue;
        CHECK(self_information(g[i - 1]) > self_information(g[i]));
    }
}

TEST_CASE("entropy of independent pairs adds") {
    for (int a = 1; a < 20; ++a)
        for (int b = 1; b < 20; ++b) {
            const double p = a / 20.0, q = b / 20.0;
            Distribution x({{"x0", p}, {"x1", 1 - p}});
            Distribution y({{"y0", q}, {"y1", 1 - q}});
            Distribution joint({{"00", p * q}, {"01", p * (1 - q)}, {"10", (1 - p) * q}, {"11", (1 - p) * (1 - q)}});
            CHECK(std::fabs(entropy(joint) - (entropy(x) + entropy(y))) <= 1e-12);
        }
}

TEST_CASE("entropy is bounded by the uniform distribution") {
    for (int n = 1; n <= 16; ++n) {
        std::vector<Distribution::Outcome> uniform;
        for (int i = 0; i < n; ++i) uniform.push_back({"o" + std::to_string(i), 1.0 / n});
        const double h = entropy(Distribution(uniform));
        CHECK(std::fabs(h - std::log2(double(n))) <= 1e-12);
        if (n >= 2) {
            std::vector<Distribution::Outcome> skewed = uniform;
            skewed[0].second += 0.5 / n;
            skewed[1].second -= 0.5 / n;
            CHECK(entropy(Distribution(skewed)) < h);
        }
    }
}

TEST_CASE("zero-probability outcomes contribute nothing") {
    Distribution d({{"a", 0.5}, {"b", 0.5}, {"never", 0.0}});
    CHECK(entropy(d) == 1.0);
    InfoReport r = info_report(d);
    CHECK(std::isinf(r.outcomes[2].self_information));
    CHECK(r.to_json().find("null") != std::string::npos);
}

TEST_CASE("domain checks") {
    expect_code(ErrorCode::Domain, [] { self_information(0.0); });
    expect_code(ErrorCode::Domain, [] { self_information(1.5); });
    expect_code(ErrorCode::Domain, [] { self_information(-0.1); });
    expect_code(ErrorCode::Domain, [] { self_information(std::nan("")); });
    expect_code(ErrorCode::Domain, [] { self_information(0.5, 3.0); });
    expect_code(ErrorCode::Domain, [] { Distribution({{"a", 0.5}, {"b", 0.4}}); });
    expect_code(ErrorCode::Domain, [] { Distribution({{"a", 0.5}, {"a", 0.5}}); });
    expect_code(ErrorCode::Domain, [] { Distribution({}); });
    CHECK_NOTHROW(Distribution({{"a", 0.1}, {"b", 0.2}, {"c", 0.7}}));
}

TEST_CASE("empirical information from an event sequence") {
    std::vector<std::string> seq{"E1", "E3", "E2", "E3", "E4", "E3", "E9", "E4"};
    InfoReport r = empirical_info(seq, {"E3", "E4"});
    CHECK(r.observations == 5);
    REQUIRE(r.outcomes.size() == 2);
    CHECK(r.outcomes[0].count == 3);
    CHECK(r.outcomes[0].probability == 0.6);
    const double h = -(0.6 * std::log(0.6) + 0.4 * std::log(0.4)) / std::log(2.0);
    CHECK(std::fabs(r.entropy - h) <= 1e-12);
    CHECK(r.empirical_entropy.has_value());

    InfoReport missing = empirical_info(seq, {"E3", "E7"});
    CHECK(std::isinf(missing.outcomes[1].self_information));
    CHECK(missing.entropy == 0.0);

    expect_code(ErrorCode::InvalidArgument, [&] { empirical_info(seq, {}); });
    expect_code(ErrorCode::EmptyObservation, [&] { empirical_info(seq, {"E7"}); });
}

TEST_CASE("report text and json") {
    InfoReport r = info_report(Distribution({{"face", 0.5}, {"tail", 0.5}}));
    std::string text = r.to_text();
    CHECK(text.find("entropy 1 bits\n") != std::string::npos);
    auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["entropy"] == 1.0);
    CHECK(j["unit"] == "bits");
    CHECK(j["outcomes"][1]["label"] == "tail");
    CHECK(j["outcomes"][1]["self_information"] == 1.0);
}
