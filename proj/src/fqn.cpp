#include "depfix/fqn.hpp"

#include <stdexcept>

namespace depfix {

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto is_alpha = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    auto is_alnum = [&](char c) { return is_alpha(c) || (c >= '0' && c <= '9'); };
    if (!is_alpha(s.front())) return false;
    for (char c : s)
        if (!is_alnum(c)) return false;
    return true;
}

static std::string join_dotted(const std::vector<std::string>& segments) {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i) out += '.';
        out += segments[i];
    }
    return out;
}

Fqn::Fqn(std::vector<std::string> segments)
    : segments_(std::move(segments)), dotted_(join_dotted(segments_)) {
    if (segments_.empty()) throw std::invalid_argument("FQN must have at least one segment");
    for (const auto& seg : segments_)
        if (!is_identifier(seg))
            throw std::invalid_argument("invalid identifier segment '" + seg + "' in FQN");
}

Fqn Fqn::parse(std::string_view dotted) {
    std::vector<std::string> segs;
    std::size_t pos = 0;
    while (true) {
        std::size_t dot = dotted.find('.', pos);
        std::string_view seg =
            dot == std::string_view::npos ? dotted.substr(pos) : dotted.substr(pos, dot - pos);
        segs.emplace_back(seg);
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
    }
    return Fqn(std::move(segs));
}

std::optional<Fqn> Fqn::try_parse(std::string_view dotted) {
    try {
        return Fqn::parse(dotted);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

bool Fqn::starts_with(const Fqn& prefix) const {
    if (prefix.size() > size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (segments_[i] != prefix.segments_[i]) return false;
    return true;
}

Fqn Fqn::joined(std::span<const std::string> tail) const {
    std::vector<std::string> segs = segments_;
    segs.insert(segs.end(), tail.begin(), tail.end());
    return Fqn(std::move(segs));
}

}  // namespace depfix
