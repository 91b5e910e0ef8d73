// Fully qualified API names (dotted identifier paths).
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace depfix {

/// A fully qualified name such as `torch.linalg.lstsq`.
/// Always holds at least one segment; every segment is a valid identifier.
class Fqn {
public:
    Fqn() = default;
    explicit Fqn(std::vector<std::string> segments);

    /// Parses a dotted string. Throws std::invalid_argument on an empty
    /// string or an invalid identifier segment.
    static Fqn parse(std::string_view dotted);

    /// Parses a dotted string, returning nullopt instead of throwing.
    static std::optional<Fqn> try_parse(std::string_view dotted);

    const std::vector<std::string>& segments() const { return segments_; }
    const std::string& dotted() const { return dotted_; }

    const std::string& root() const { return segments_.front(); }
    std::size_t size() const { return segments_.size(); }

    /// True if `prefix` equals the first prefix.size() segments of this FQN.
    bool starts_with(const Fqn& prefix) const;

    /// New FQN with extra segments appended.
    Fqn joined(std::span<const std::string> tail) const;

    bool operator==(const Fqn& other) const { return dotted_ == other.dotted_; }
    bool operator!=(const Fqn& other) const = default;
    bool operator<(const Fqn& other) const { return dotted_ < other.dotted_; }

private:
    std::vector<std::string> segments_;
    std::string dotted_;
};

/// True for a valid identifier: [A-Za-z_][A-Za-z0-9_]*.
bool is_identifier(std::string_view s);

}  // namespace depfix
