#include "finn/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "finn/errors.hpp"
#include "finn/text.hpp"

namespace finn {
namespace {

constexpr char kMagic[8] = {'F', 'I', 'N', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

std::string join_sizes(const std::vector<std::size_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text,
                                         const char* what) {
    std::vector<std::size_t> out;
    if (text.empty()) return out;
    for (const std::string& tok : split_line(text, ','))
        out.push_back(parse_size(tok, what));
    return out;
}

// --- little-endian primitives --------------------------------------------

void put_u32(std::ostream& out, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(bytes, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

void put_double(std::ostream& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

[[noreturn]] void truncated() {
    throw VerificationError("checkpoint: truncated or unreadable payload");
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) truncated();
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) truncated();
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

double get_double(std::istream& in) {
    return std::bit_cast<double>(get_u64(in));
}

std::string get_string(std::istream& in, std::uint32_t max_len) {
    const std::uint32_t len = get_u32(in);
    if (len > max_len)
        throw VerificationError("checkpoint: implausible string length");
    std::string s(len, '\0');
    if (len && !in.read(s.data(), len)) truncated();
    return s;
}

}  // namespace

std::string serialize_model_config(const ModelConfig& cfg) {
    std::ostringstream out;
    out << "variant = " << variant_name(cfg.variant) << '\n'
        << "n = " << cfg.n << '\n'
        << "m = " << cfg.m << '\n'
        << "k = " << cfg.k << '\n'
        << "l = " << cfg.l << '\n'
        << "hidden = " << join_sizes(cfg.hidden) << '\n'
        << "activation = " << activation_name(cfg.activation) << '\n'
        << "dropout_keep = " << format_double(cfg.dropout_keep) << '\n'
        << "use_bn = " << (cfg.use_bn ? 1 : 0) << '\n'
        << "embed_low = " << format_double(cfg.embed_low) << '\n'
        << "embed_high = " << format_double(cfg.embed_high) << '\n'
        << "seed = " << cfg.seed << '\n';
    return out.str();
}

ModelConfig parse_model_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto pos = line.find(" = ");
        if (pos == std::string::npos)
            throw std::invalid_argument("model config: bad line '" + line + "'");
        const std::string key = line.substr(0, pos);
        if (!kv.emplace(key, line.substr(pos + 3)).second)
            throw std::invalid_argument("model config: duplicate key '" + key +
                                        "'");
    }
    auto take = [&kv](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument(std::string("model config: missing key '") +
                                        key + "'");
        std::string value = it->second;
        kv.erase(it);
        return value;
    };

    ModelConfig cfg;
    cfg.variant = parse_variant(take("variant"));
    cfg.n = parse_size(take("n"), "n");
    cfg.m = parse_size(take("m"), "m");
    cfg.k = parse_size(take("k"), "k");
    cfg.l = parse_size(take("l"), "l");
    cfg.hidden = parse_size_list(take("hidden"), "hidden width");
    cfg.activation = parse_activation(take("activation"));
    cfg.dropout_keep = parse_double(take("dropout_keep"), "dropout_keep");
    const std::string bn = take("use_bn");
    if (bn != "0" && bn != "1")
        throw std::invalid_argument("model config: use_bn must be 0 or 1");
    cfg.use_bn = bn == "1";
    cfg.embed_low = parse_double(take("embed_low"), "embed_low");
    cfg.embed_high = parse_double(take("embed_high"), "embed_high");
    cfg.seed = parse_size(take("seed"), "seed");
    if (!kv.empty())
        throw std::invalid_argument("model config: unknown key '" +
                                    kv.begin()->first + "'");
    return cfg;
}

void save_checkpoint(const std::string& path, const Model& g,
                     std::uint64_t vocab_fingerprint) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    out.write(kMagic, sizeof kMagic);
    put_u32(out, kVersion);
    put_string(out, serialize_model_config(g.config()));
    put_u64(out, vocab_fingerprint);

    const auto states = g.state_tensors();
    put_u32(out, static_cast<std::uint32_t>(states.size()));
    for (const auto& [name, tensor] : states) {
        put_string(out, name);
        put_u32(out, static_cast<std::uint32_t>(tensor->rank()));
        for (std::size_t d = 0; d < tensor->rank(); ++d)
            put_u64(out, tensor->dim(d));
        for (std::size_t i = 0; i < tensor->size(); ++i)
            put_double(out, (*tensor)[i]);
    }
    out.flush();
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint '" + path + "'");
    char magic[8];
    if (!in.read(magic, sizeof magic) ||
        !std::equal(magic, magic + 8, kMagic))
        throw VerificationError("checkpoint: bad magic in '" + path + "'");
    const std::uint32_t version = get_u32(in);
    if (version != kVersion)
        throw VerificationError("checkpoint: unsupported version " +
                                std::to_string(version));

    const ModelConfig cfg = parse_model_config(get_string(in, 1u << 20));
    const std::uint64_t fingerprint = get_u64(in);
    LoadedCheckpoint loaded{Model(cfg), fingerprint};

    auto states = loaded.model.state_tensors();
    const std::uint32_t count = get_u32(in);
    if (count != states.size())
        throw VerificationError(
            "checkpoint: tensor count mismatch (stored " + std::to_string(count) +
            ", model has " + std::to_string(states.size()) + ")");
    for (std::uint32_t ti = 0; ti < count; ++ti) {
        const std::string name = get_string(in, 1u << 16);
        Tensor* target = nullptr;
        for (auto& [tname, tensor] : states)
            if (tname == name) target = tensor;
        if (!target)
            throw VerificationError("checkpoint: unexpected tensor '" + name + "'");
        const std::uint32_t rank = get_u32(in);
        if (rank != target->rank())
            throw VerificationError("checkpoint: rank mismatch for '" + name + "'");
        for (std::uint32_t d = 0; d < rank; ++d)
            if (get_u64(in) != target->dim(d))
                throw VerificationError("checkpoint: shape mismatch for '" + name +
                                        "'");
        for (std::size_t i = 0; i < target->size(); ++i)
            (*target)[i] = get_double(in);
    }
    if (in.peek() != std::istream::traits_type::eof())
        throw VerificationError("checkpoint: trailing bytes in '" + path + "'");
    return loaded;
}

}  // namespace finn
