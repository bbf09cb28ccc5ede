#pragma once

#include <array>
#include <string>
#include <string_view>

namespace simmatch {

// Which penalty on the output Gram the objective carries.
//   ScaleDependent: alpha * T * Tr(Y^T Y)
//   InputOutput:    alpha * Tr(X^T X) * Tr(Y^T Y)
//   SquaredOutput:  alpha * Tr(Y^T Y)^2
enum class RegularizerKind { ScaleDependent, InputOutput, SquaredOutput };

inline constexpr std::array<RegularizerKind, 3> kAllRegularizers{
    RegularizerKind::ScaleDependent, RegularizerKind::InputOutput, RegularizerKind::SquaredOutput};

// Canonical names: "scale-dependent", "input-output", "squared-output".
std::string_view to_string(RegularizerKind kind);

// Accepts the canonical names plus the short aliases
// "scale"/"sd", "io"/"input", "squared"/"so". Throws InvalidInput otherwise.
RegularizerKind parse_regularizer(std::string_view text);

}  // namespace simmatch
