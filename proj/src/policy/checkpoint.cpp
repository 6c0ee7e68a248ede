#include "tti/policy/checkpoint.hpp"

#include "tti/core/error.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tti::policy {

using nlohmann::json;

namespace {

constexpr std::array<char, 8> kMagic{'T', 'T', 'I', 'C', 'K', 'P', 'T', '\0'};

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 8)) {
        throw Error(ErrorCode::CorruptCheckpoint, "truncated checkpoint");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

} // namespace

void write_checkpoint(std::ostream& out, const PolicyParams& params, const env::Vocabulary& vocab,
                      const json& metadata) {
    json header;
    header["feature_dim"] = params.feature_dim;
    header["slots"] = params.slots();
    json layout;
    layout["max_window"] = params.layout.max_window();
    json queries = json::array();
    for (env::TokenId q : params.layout.queries()) queries.push_back(vocab.text(q));
    json values = json::array();
    for (env::TokenId v : params.layout.values()) values.push_back(vocab.text(v));
    layout["queries"] = std::move(queries);
    layout["values"] = std::move(values);
    header["layout"] = std::move(layout);
    header["metadata"] = metadata;
    const std::string text = header.dump();

    out.write(kMagic.data(), kMagic.size());
    put_u64(out, kCheckpointVersion);
    put_u64(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_u64(out, params.weights.size());
    for (double w : params.weights) put_u64(out, std::bit_cast<std::uint64_t>(w));
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing checkpoint");
    }
}

Checkpoint read_checkpoint(std::istream& in, const env::Vocabulary& vocab) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw Error(ErrorCode::CorruptCheckpoint, "bad checkpoint magic");
    }
    if (get_u64(in) != kCheckpointVersion) {
        throw Error(ErrorCode::CorruptCheckpoint, "unsupported checkpoint version");
    }
    const std::uint64_t header_len = get_u64(in);
    if (header_len > (1u << 26)) {
        throw Error(ErrorCode::CorruptCheckpoint, "implausible header length");
    }
    std::string text(header_len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) {
        throw Error(ErrorCode::CorruptCheckpoint, "truncated checkpoint header");
    }
    Checkpoint ck;
    try {
        const json header = json::parse(text);
        const json& layout = header.at("layout");
        std::vector<env::TokenId> queries, values;
        for (const auto& q : layout.at("queries")) queries.push_back(vocab.id(q.get<std::string>()));
        for (const auto& v : layout.at("values")) values.push_back(vocab.id(v.get<std::string>()));
        ActionSpace space(layout.at("max_window").get<int>(), std::move(queries), std::move(values));
        const auto dim = header.at("feature_dim").get<std::size_t>();
        if (header.at("slots").get<std::size_t>() != space.size() || dim == 0) {
            throw Error(ErrorCode::CorruptCheckpoint, "layout descriptor is inconsistent");
        }
        ck.params = PolicyParams(std::move(space), dim);
        ck.metadata = header.value("metadata", json::object());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptCheckpoint, std::string("bad checkpoint header: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptCheckpoint) throw;
        throw Error(ErrorCode::CorruptCheckpoint, e.what());
    }
    if (get_u64(in) != ck.params.weights.size()) {
        throw Error(ErrorCode::CorruptCheckpoint, "weight count does not match layout");
    }
    for (double& w : ck.params.weights) {
        w = std::bit_cast<double>(get_u64(in));
        if (!std::isfinite(w)) {
            throw Error(ErrorCode::CorruptCheckpoint, "non-finite weight");
        }
    }
    return ck;
}

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params, const env::Vocabulary& vocab,
                     const json& metadata) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write checkpoint " + path.string());
    }
    write_checkpoint(out, params, vocab, metadata);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const env::Vocabulary& vocab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open checkpoint " + path.string());
    }
    return read_checkpoint(in, vocab);
}

} // namespace tti::policy
