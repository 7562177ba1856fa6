#pragma once

#include <optional>
#include <string>
#include <vector>

namespace troupe {

enum class AnswerKind { choice, numeric, text };

std::string to_string(AnswerKind kind);
AnswerKind answer_kind_from_string(const std::string& s);

// One canonical answer payload. Exactly one of the value fields is
// meaningful, selected by `kind`.
struct Answer {
    AnswerKind kind = AnswerKind::text;
    std::string choice;  // canonical uppercase option letter
    double number = 0.0; // finite real
    std::string text;    // free-form string, compared via token F1

    static Answer make_choice(std::string option);
    static Answer make_numeric(double value);
    static Answer make_text(std::string value);

    bool operator==(const Answer&) const = default;
};

// Similarity in [0,1] between an answer and the ground truth:
//   choice  -> exact-match indicator
//   numeric -> max(0, 1 - |a-y| / max(|y|, 1e-6))   (relative error)
//   text    -> token-level F1 after lowercasing and punctuation stripping
// Throws contract_error on a kind mismatch.
double sim(const Answer& answer, const Answer& truth);

// Whether a final answer counts as matching the ground truth: exact for
// choice, sim >= 0.9 for numeric and text.
bool is_agreement(const Answer& final_answer, const Answer& truth);

// Extracts an Answer from raw model output.
//   choice  -> first "(X)" pattern or standalone option letter
//   numeric -> first parseable real
//   text    -> content after an "Answer:" marker, else the trimmed text
// Throws parse_error (carrying the raw text) when nothing can be extracted.
Answer parse_answer(const std::string& raw_text, AnswerKind kind,
                    const std::vector<std::string>& options = {});

} // namespace troupe
