#include <bit>
#include <cstring>
#include <fstream>

#include "tft/model.hpp"

namespace tft {

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'T', 'F', 'T', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in, const std::string& what) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw DataError("checkpoint truncated while reading " + what);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const TFTModel& model, const DatasetSchema& schema,
                     const Normalizer& normalizer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint file: " + path);

    ConfigText cfg = schema_to_config(schema);
    config_to_text(model.config, cfg);
    cfg.sections.push_back(normalizer.serialize());
    auto& meta = cfg.add("meta");
    meta.set_int("init_seed", static_cast<long long>(model.init_seed));
    const std::string text = cfg.serialize();

    out.write(kMagic, 4);
    write_u32(out, kVersion);
    write_u32(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));

    const auto params = model.parameters();
    write_u32(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& [name, tensor] : params) {
        write_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(out, static_cast<std::uint32_t>(tensor.rank()));
        for (int d : tensor.shape()) write_u32(out, static_cast<std::uint32_t>(d));
        out.write(reinterpret_cast<const char*>(tensor.array().data()),
                  static_cast<std::streamsize>(sizeof(double) * tensor.size()));
    }
    if (!out) throw DataError("failed while writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint file: " + path);

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw DataError(path + " is not a TFT checkpoint (bad magic bytes)");
    }
    const std::uint32_t version = read_u32(in, "version");
    if (version != kVersion) {
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t text_len = read_u32(in, "config length");
    std::string text(text_len, '\0');
    in.read(text.data(), text_len);
    if (!in) throw DataError("checkpoint truncated while reading config text");

    const ConfigText cfg = ConfigText::parse(text);
    Checkpoint ckpt;
    ckpt.schema = parse_schema(cfg);
    const TFTConfig config = config_from_text(cfg);
    const std::uint64_t seed =
        static_cast<std::uint64_t>(cfg.require("meta").get_int("init_seed"));
    ckpt.normalizer = Normalizer::deserialize(cfg.require("normalizer"), ckpt.schema);
    ckpt.model = build_model(config, seed);

    auto params = ckpt.model.parameters();
    const std::uint32_t count = read_u32(in, "tensor count");
    if (count != params.size()) {
        throw ConfigError("checkpoint holds " + std::to_string(count) + " tensors, model expects " +
                          std::to_string(params.size()));
    }
    for (auto& [name, tensor] : params) {
        const std::uint32_t name_len = read_u32(in, "tensor name length");
        std::string stored(name_len, '\0');
        in.read(stored.data(), name_len);
        if (stored != name) {
            throw ConfigError("checkpoint tensor '" + stored + "' does not match expected '" +
                              name + "'");
        }
        const std::uint32_t rank = read_u32(in, "rank of " + name);
        if (rank != static_cast<std::uint32_t>(tensor.rank())) {
            throw ConfigError("checkpoint tensor '" + name + "' has rank " + std::to_string(rank) +
                              ", expected " + std::to_string(tensor.rank()));
        }
        for (int d : tensor.shape()) {
            const std::uint32_t dim = read_u32(in, "dims of " + name);
            if (dim != static_cast<std::uint32_t>(d)) {
                throw ConfigError("checkpoint tensor '" + name + "' has unexpected shape");
            }
        }
        in.read(reinterpret_cast<char*>(tensor.values_mut().data()),
                static_cast<std::streamsize>(sizeof(double) * tensor.size()));
        if (!in) throw DataError("checkpoint truncated while reading tensor '" + name + "'");
    }
    return ckpt;
}

}  // namespace tft
