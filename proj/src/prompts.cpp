#include "troupe/prompts.hpp"

#include <sstream>

#include "troupe/detail/prompts_data.hpp"
#include "troupe/errors.hpp"
#include "troupe/routing.hpp"

namespace troupe {

const std::string& head_template() {
    static const std::string tpl = detail::head_prompt_bytes();
    return tpl;
}

const std::string& reasoning_template() {
    static const std::string tpl = detail::reasoning_prompt_bytes();
    return tpl;
}

const std::string& role_template(const std::string& role_id) {
    static const std::string implicit_visual = detail::role_implicit_visual_bytes();
    static const std::string explicit_3d = detail::role_explicit_3d_bytes();
    static const std::string scene_graph = detail::role_scene_graph_bytes();
    if (role_id == "implicit_visual") return implicit_visual;
    if (role_id == "explicit_3d") return explicit_3d;
    if (role_id == "scene_graph") return scene_graph;
    throw config_error("prompts: no template for role '" + role_id + "'");
}

std::string substitute(const std::string& tpl, const std::string& placeholder,
                       const std::string& value) {
    std::string out;
    out.reserve(tpl.size() + value.size());
    std::size_t pos = 0;
    while (true) {
        std::size_t hit = tpl.find(placeholder, pos);
        if (hit == std::string::npos) {
            out.append(tpl, pos, std::string::npos);
            return out;
        }
        out.append(tpl, pos, hit - pos);
        out += value;
        pos = hit + placeholder.size();
    }
}

std::string render_head_prompt(const QueryItem& query) {
    return substitute(head_template(), "{query}", query.text);
}

std::string render_role_prompt(const std::string& role_id, const QueryItem& query) {
    return substitute(role_template(role_id), "{query}", query.text);
}

namespace {

std::string truncated_trace(const std::string& trace, std::size_t budget) {
    if (trace.size() <= budget) return trace;
    return trace.substr(0, budget) + " [trace truncated]";
}

std::string format_answer(const Answer& a) {
    switch (a.kind) {
    case AnswerKind::choice: return "(" + a.choice + ")";
    case AnswerKind::numeric: {
        std::ostringstream os;
        os << a.number;
        return os.str();
    }
    case AnswerKind::text: return a.text;
    }
    return {};
}

} // namespace

std::string render_reasoning_prompt(const QueryItem& query,
                                    const std::vector<WeightedEvidence>& evidence,
                                    std::size_t trace_byte_budget) {
    std::ostringstream block;
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        const auto& e = evidence[i];
        block << "  [" << (i + 1) << "] agent=" << e.record.agent_id
              << "  role=" << e.record.role_id << "  w=" << e.weight
              << "\n      answer: " << format_answer(e.record.answer);
        std::string trace = truncated_trace(e.record.trace, trace_byte_budget);
        if (!trace.empty()) block << "\n      trace: " << trace;
        block << "\n";
    }
    std::string out = substitute(reasoning_template(), "{evidence}", block.str());
    return substitute(out, "{query}", query.text);
}

} // namespace troupe
