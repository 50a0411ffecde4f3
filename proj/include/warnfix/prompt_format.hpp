#pragma once

#include <optional>
#include <string>
#include <vector>

namespace warnfix::prompt {

// Block labels shared by the prompt builders and the rule-based oracle backend.
inline constexpr const char* kCode = "[Code]";
inline constexpr const char* kTypeInformation = "[Type Information]";
inline constexpr const char* kAnalysis = "[Function Signature and Analysis]";
inline constexpr const char* kSignature = "[Function Signature]";
inline constexpr const char* kImplementation = "[Implementation]";
inline constexpr const char* kFixTask = "[Fix Task]";
inline constexpr const char* kPreviousPatch = "[Previous Patch]";
inline constexpr const char* kCurrentDiagnostics = "[Current Diagnostics]";

inline constexpr const char* kDecisionQuestion =
    "Do we need a range check to resolve this compiler warning?";

inline constexpr const char* kSystemPersona =
    "You are an expert C++ developer working on a highly performance-sensitive project. "
    "Avoid unnecessary operations, even if they seem harmless.";

inline constexpr const char* kMarkerNeeded = "RANGE_CHECK_REQUIRED";
inline constexpr const char* kMarkerNotNeeded = "NO_RANGE_CHECK";

// Lines of the named block: everything after the label line up to the next
// "[...]" label line (or end of text). nullopt when the label is absent.
std::optional<std::string> extract_block(const std::string& text, const std::string& label);

// Value of a "key: value" line inside a block.
std::optional<std::string> block_field(const std::string& block, const std::string& key);

}  // namespace warnfix::prompt
