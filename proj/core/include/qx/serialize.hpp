#pragma once

// nlohmann::json conversions for the domain types. These are the in-memory
// JSON forms; dataset files use the formats in io.hpp.

#include <nlohmann/json.hpp>

#include "qx/tokenize.hpp"
#include "qx/types.hpp"

namespace qx {

void to_json(nlohmann::json& j, const Token& t);
void from_json(const nlohmann::json& j, Token& t);

void to_json(nlohmann::json& j, BioTag t);
void from_json(const nlohmann::json& j, BioTag& t);

void to_json(nlohmann::json& j, const TagSequence& s);
void from_json(const nlohmann::json& j, TagSequence& s);

void to_json(nlohmann::json& j, const QuestionSpan& s);
void from_json(const nlohmann::json& j, QuestionSpan& s);

void to_json(nlohmann::json& j, const AnnotatedExample& e);
void from_json(const nlohmann::json& j, AnnotatedExample& e);

void to_json(nlohmann::json& j, const Alignment& a);
void from_json(const nlohmann::json& j, Alignment& a);

}  // namespace qx
