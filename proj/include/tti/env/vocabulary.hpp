#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tti::env {

using TokenId = std::uint32_t;

enum class TokenKind : std::uint8_t {
    Name,       // entity name, e.g. "ent07"
    Qualifier,  // entity category; also labels hub links
    Attribute,
    Value,      // answer vocabulary, ordered by intern order
    Relation,   // labels of entity-to-entity links
    Other,
};

std::string_view to_string(TokenKind kind) noexcept;
TokenKind token_kind_from_string(std::string_view text);

/// Interned token table. Token ids are dense and assigned in insertion order,
/// so value tokens compare by id in the order they were interned.
class Vocabulary {
public:
    TokenId intern(std::string_view text, TokenKind kind);

    /// Throws InvalidGraph if the token is unknown.
    TokenId id(std::string_view text) const;
    bool contains(std::string_view text) const;

    const std::string& text(TokenId id) const { return texts_.at(id); }
    TokenKind kind(TokenId id) const { return kinds_.at(id); }
    std::size_t size() const noexcept { return texts_.size(); }

    std::vector<TokenId> tokens_of(TokenKind kind) const;

    bool operator==(const Vocabulary& other) const {
        return texts_ == other.texts_ && kinds_ == other.kinds_;
    }

private:
    std::vector<std::string> texts_;
    std::vector<TokenKind> kinds_;
    std::unordered_map<std::string, TokenId> index_;
};

} // namespace tti::env
