#pragma once

#include <optional>
#include <string>
#include <vector>

#include "troupe/answer.hpp"
#include "troupe/errors.hpp"

namespace troupe {

// One element of a query stream. Ground truth is present in optimization
// streams and absent (or ignored) at pure inference time.
struct QueryItem {
    std::string query_id;
    std::string text;
    std::optional<std::string> image_ref;
    std::optional<std::string> category_hint;
    AnswerKind answer_kind = AnswerKind::text;
    std::vector<std::string> options; // required for choice questions
    std::optional<Answer> ground_truth;

    void validate() const {
        if (query_id.empty()) throw domain_error("query: empty query_id");
        if (answer_kind == AnswerKind::choice && options.empty())
            throw domain_error("query '" + query_id + "': choice kind requires options");
        if (ground_truth && ground_truth->kind != answer_kind)
            throw domain_error("query '" + query_id + "': ground truth kind mismatch");
    }
};

// The ordered list of task categories the head classifier may emit.
struct CategoryTaxonomy {
    std::vector<std::string> categories;

    static CategoryTaxonomy canonical() {
        return CategoryTaxonomy{
            {"spatial_relation", "counting", "size", "distance_depth", "orientation"}};
    }

    bool contains(const std::string& c) const {
        for (const auto& x : categories)
            if (x == c) return true;
        return false;
    }
};

} // namespace troupe
