#include "troupe/answer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>
#include <sstream>

#include "troupe/errors.hpp"

namespace troupe {

std::string to_string(AnswerKind kind) {
    switch (kind) {
        case AnswerKind::choice: return "choice";
        case AnswerKind::numeric: return "numeric";
        case AnswerKind::text: return "text";
    }
    return "text";
}

AnswerKind answer_kind_from_string(const std::string& s) {
    if (s == "choice") return AnswerKind::choice;
    if (s == "numeric") return AnswerKind::numeric;
    if (s == "text") return AnswerKind::text;
    throw parse_error("unknown answer kind: '" + s + "'");
}

Answer Answer::make_choice(std::string option) {
    Answer a;
    a.kind = AnswerKind::choice;
    for (auto& c : option) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    a.choice = std::move(option);
    return a;
}

Answer Answer::make_numeric(double value) {
    if (!std::isfinite(value)) throw domain_error("numeric answer must be finite");
    Answer a;
    a.kind = AnswerKind::numeric;
    a.number = value;
    return a;
}

Answer Answer::make_text(std::string value) {
    Answer a;
    a.kind = AnswerKind::text;
    a.text = std::move(value);
    return a;
}

namespace {

std::vector<std::string> tokenize(const std::string& s) {
    std::string cleaned;
    cleaned.reserve(s.size());
    for (char c : s) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc))
            cleaned.push_back(static_cast<char>(std::tolower(uc)));
        else
            cleaned.push_back(' ');
    }
    std::istringstream iss(cleaned);
    std::vector<std::string> tokens;
    std::string tok;
    while (iss >> tok) tokens.push_back(tok);
    return tokens;
}

double token_f1(const std::string& a, const std::string& b) {
    const auto ta = tokenize(a);
    const auto tb = tokenize(b);
    if (ta.empty() && tb.empty()) return 1.0;
    if (ta.empty() || tb.empty()) return 0.0;

    std::map<std::string, int> counts;
    for (const auto& t : ta) ++counts[t];
    int overlap = 0;
    for (const auto& t : tb) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    return 2.0 * overlap / static_cast<double>(ta.size() + tb.size());
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Text following an "Answer:" marker, cut at the line end or a "Reason:" tail.
std::optional<std::string> after_answer_marker(const std::string& raw) {
    static const std::regex marker(R"(Answer\s*:\s*)", std::regex::icase);
    std::smatch m;
    if (!std::regex_search(raw, m, marker)) return std::nullopt;
    std::string rest = raw.substr(static_cast<std::size_t>(m.position() + m.length()));
    auto cut = rest.find('\n');
    if (cut != std::string::npos) rest = rest.substr(0, cut);
    static const std::regex reason(R"(\s*/?\s*Reason\s*:)", std::regex::icase);
    std::smatch r;
    if (std::regex_search(rest, r, reason)) rest = rest.substr(0, static_cast<std::size_t>(r.position()));
    return trim(rest);
}

} // namespace

double sim(const Answer& answer, const Answer& truth) {
    if (answer.kind != truth.kind)
        throw contract_error("sim: answer kind " + to_string(answer.kind) +
                             " does not match truth kind " + to_string(truth.kind));
    switch (answer.kind) {
        case AnswerKind::choice:
            return answer.choice == truth.choice ? 1.0 : 0.0;
        case AnswerKind::numeric: {
            const double denom = std::max(std::abs(truth.number), 1e-6);
            return std::max(0.0, 1.0 - std::abs(answer.number - truth.number) / denom);
        }
        case AnswerKind::text:
            return token_f1(answer.text, truth.text);
    }
    return 0.0;
}

bool is_agreement(const Answer& final_answer, const Answer& truth) {
    const double s = sim(final_answer, truth);
    return truth.kind == AnswerKind::choice ? s == 1.0 : s >= 0.9;
}

Answer parse_answer(const std::string& raw_text, AnswerKind kind,
                    const std::vector<std::string>& options) {
    const std::string trimmed = trim(raw_text);
    if (trimmed.empty()) throw parse_error("parse_answer: empty model output");

    switch (kind) {
        case AnswerKind::choice: {
            // Prefer the "(X)" pattern the output-format contract asks for.
            static const std::regex paren(R"(\(([A-Za-z])\))");
            std::smatch m;
            if (std::regex_search(trimmed, m, paren))
                return Answer::make_choice(m[1].str());
            // Fall back to a standalone option letter.
            auto is_option = [&](char c) {
                const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                if (options.empty()) return std::isalpha(static_cast<unsigned char>(up)) != 0;
                for (const auto& o : options)
                    if (o.size() == 1 &&
                        std::toupper(static_cast<unsigned char>(o[0])) == up)
                        return true;
                return false;
            };
            for (std::size_t i = 0; i < trimmed.size(); ++i) {
                const bool left_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(trimmed[i - 1]));
                const bool right_ok = i + 1 == trimmed.size() ||
                                      !std::isalnum(static_cast<unsigned char>(trimmed[i + 1]));
                if (left_ok && right_ok && std::isalpha(static_cast<unsigned char>(trimmed[i])) &&
                    is_option(trimmed[i]))
                    return Answer::make_choice(std::string(1, trimmed[i]));
            }
            throw parse_error("parse_answer: no option letter in: " + trimmed);
        }
        case AnswerKind::numeric: {
            static const std::regex number(R"([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)");
            std::smatch m;
            if (std::regex_search(trimmed, m, number))
                return Answer::make_numeric(std::stod(m[0].str()));
            throw parse_error("parse_answer: no numeric value in: " + trimmed);
        }
        case AnswerKind::text: {
            if (auto marked = after_answer_marker(trimmed); marked && !marked->empty())
                return Answer::make_text(*marked);
            return Answer::make_text(trimmed);
        }
    }
    throw parse_error("parse_answer: unreachable kind");
}

} // namespace troupe
