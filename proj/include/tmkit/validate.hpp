#pragma once

#include "tmkit/model.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tmkit {

/// Static rules. The numeric order is the report sort order.
enum class Rule : std::uint8_t {
    DanglingReference = 1,
    DuplicateId,
    StageKindClosure,
    ParentCycle,
    DuplicateStageKind,
    DuplicateSwcmRole,
    RuleOnIllegalStage,
    CrossMachineFlow,
    IntraMachineFlow,
    TriggerTarget,
    TriggerDuplicatesFlow,
    IntraMachineCycle,
    DuplicateVariable,
    InvalidUpdateRule,
};

/// "TM01".."TM14".
std::string rule_code(Rule rule);
std::string_view rule_name(Rule rule);

struct Violation {
    Rule rule;
    std::string element;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool has(Rule rule) const;
    std::string to_text() const;

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Allowed (from, to) kinds for a flow whose endpoints share an owner.
const std::vector<std::pair<StageKind, StageKind>>& intra_machine_flow_table();
bool intra_machine_flow_allowed(StageKind from, StageKind to);

/// Checks every static invariant. Sorted by rule then element id.
ValidationReport validate_static(const Model& model);

}  // namespace tmkit
