#include "tti/env/vocabulary.hpp"

#include "tti/core/error.hpp"

namespace tti::env {

std::string_view to_string(TokenKind kind) noexcept {
    switch (kind) {
    case TokenKind::Name: return "name";
    case TokenKind::Qualifier: return "qualifier";
    case TokenKind::Attribute: return "attribute";
    case TokenKind::Value: return "value";
    case TokenKind::Relation: return "relation";
    case TokenKind::Other: return "other";
    }
    return "other";
}

TokenKind token_kind_from_string(std::string_view text) {
    if (text == "name") return TokenKind::Name;
    if (text == "qualifier") return TokenKind::Qualifier;
    if (text == "attribute") return TokenKind::Attribute;
    if (text == "value") return TokenKind::Value;
    if (text == "relation") return TokenKind::Relation;
    if (text == "other") return TokenKind::Other;
    throw Error(ErrorCode::InvalidGraph, "unknown token kind '" + std::string(text) + "'");
}

TokenId Vocabulary::intern(std::string_view text, TokenKind kind) {
    const std::string key(text);
    if (auto it = index_.find(key); it != index_.end()) {
        if (kinds_[it->second] != kind) {
            throw Error(ErrorCode::InvalidGraph, "token '" + key + "' interned with two kinds");
        }
        return it->second;
    }
    const auto id = static_cast<TokenId>(texts_.size());
    texts_.push_back(key);
    kinds_.push_back(kind);
    index_.emplace(key, id);
    return id;
}

TokenId Vocabulary::id(std::string_view text) const {
    if (auto it = index_.find(std::string(text)); it != index_.end()) {
        return it->second;
    }
    throw Error(ErrorCode::InvalidGraph, "unknown token '" + std::string(text) + "'");
}

bool Vocabulary::contains(std::string_view text) const {
    return index_.contains(std::string(text));
}

std::vector<TokenId> Vocabulary::tokens_of(TokenKind kind) const {
    std::vector<TokenId> out;
    for (TokenId i = 0; i < texts_.size(); ++i) {
        if (kinds_[i] == kind) {
            out.push_back(i);
        }
    }
    return out;
}

} // namespace tti::env
