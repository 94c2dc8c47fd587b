#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "qx/tokenize.hpp"
#include "qx/types.hpp"

namespace qx {

/// How decode_spans treats an I that does not continue a B/I run.
///  - strict: throw MalformedTags.
///  - iob2_repair: treat the orphan I as a B (it opens a new span).
enum class RepairPolicy { strict, iob2_repair };

// Word-level tags -> subtoken-level tags. The first subtoken of a word takes
// the word's tag; continuation subtokens become I under a B or I parent and
// O under an O parent.
TagSequence project_tags(const TagSequence& word_tags,
                         const Alignment& alignment);

// Subtoken-level tags -> word-level tags: each word takes the tag of its
// first subtoken.
TagSequence collapse_tags(const TagSequence& subtoken_tags,
                          const Alignment& alignment);

/// One span per maximal B I* run, sorted by start. Returned spans carry no
/// text; see attach_text.
std::vector<QuestionSpan> decode_spans(const TagSequence& tags,
                                       RepairPolicy policy);

/// Inverse of decode_spans. Throws ContractViolation on overlapping,
/// unsorted or out-of-range spans.
TagSequence encode_tags(const std::vector<QuestionSpan>& spans,
                        std::size_t n_words);

/// Source slice from the first word's start to the last word's end.
std::string span_text(std::string_view text, const std::vector<Token>& words,
                      std::size_t start_word, std::size_t end_word);

/// Fills in QuestionSpan::text for every span from its word range.
void attach_text(std::vector<QuestionSpan>& spans, std::string_view text,
                 const std::vector<Token>& words);

}  // namespace qx
