#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ansigen {

/// Input/output shapes of a sample: natural language to playbook, to a
/// first role task, to the next task of a playbook, to the next role task.
enum class GenerationType { nl_to_pb, nl_to_t, pb_nl_to_t, t_nl_to_t };

inline constexpr std::array<GenerationType, 4> kGenerationTypes = {
    GenerationType::nl_to_pb, GenerationType::nl_to_t, GenerationType::pb_nl_to_t, GenerationType::t_nl_to_t};

/// Wire token used in dataset files (`nl_to_pb`, ...).
std::string_view generation_type_token(GenerationType type);
std::optional<GenerationType> parse_generation_type(std::string_view token);

/// Label used in reports (`NL→PB`, ...).
std::string_view generation_type_label(GenerationType type);

inline bool is_task_type(GenerationType type) { return type != GenerationType::nl_to_pb; }

}  // namespace ansigen
