#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aesa/actions_obs.hpp"
#include "aesa/config.hpp"
#include "aesa/env.hpp"
#include "aesa/errors.hpp"
#include "aesa/policies.hpp"

namespace aesa {

/// One behaviour-cloning sample: the observation the teacher saw and the
/// action it took.
struct BcRecord {
    Observation observation;
    BeamAction action;

    friend bool operator==(const BcRecord&, const BcRecord&) = default;
};

inline constexpr char kBcMagic[8] = {'A', 'E', 'S', 'A', 'B', 'C', '0', '1'};
inline constexpr int kBcFormatVersion = 1;
inline constexpr std::size_t kBcRecordBytes = (kMaxTracks * kTrackFeatures + kRasterSize * kRasterSize) * 4 + 2 * 4;

static_assert(std::endian::native == std::endian::little, "dataset I/O assumes a little-endian host");
static_assert(sizeof(float) == 4);

/// Binary container:
///   8-byte magic "AESABC01"
///   uint32 little-endian length of the JSON header
///   JSON header (format, version, count, shapes, dtypes, byte order)
///   `count` records of 105 float32, 2304 float32, 2 int32
class BcDatasetWriter {
public:
    BcDatasetWriter(const std::string& path, std::uint64_t count, nlohmann::json extra = nlohmann::json::object())
        : out_(path, std::ios::binary), expected_(count) {
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
        nlohmann::json header = {
            {"format", "aesa-bc"},
            {"version", kBcFormatVersion},
            {"count", count},
            {"byteorder", "little"},
            {"record_bytes", kBcRecordBytes},
            {"fields",
             {{{"name", "track_matrix"}, {"dtype", "float32"}, {"shape", {kMaxTracks, kTrackFeatures}}},
              {{"name", "scan_raster"}, {"dtype", "float32"}, {"shape", {1, kRasterSize, kRasterSize}}},
              {{"name", "action"}, {"dtype", "int32"}, {"shape", {2}}}}},
            {"meta", std::move(extra)}};
        const std::string text = header.dump();
        const auto len = static_cast<std::uint32_t>(text.size());
        out_.write(kBcMagic, sizeof kBcMagic);
        out_.write(reinterpret_cast<const char*>(&len), sizeof len);
        out_.write(text.data(), static_cast<std::streamsize>(text.size()));
    }

    void write(const BcRecord& rec) {
        if (written_ >= expected_) throw ContractViolation("BcDatasetWriter: more records than declared");
        out_.write(reinterpret_cast<const char*>(rec.observation.track_matrix.data()),
                   static_cast<std::streamsize>(rec.observation.track_matrix.size() * sizeof(float)));
        out_.write(reinterpret_cast<const char*>(rec.observation.scan_raster.data()),
                   static_cast<std::streamsize>(rec.observation.scan_raster.size() * sizeof(float)));
        const std::int32_t action[2] = {rec.action.a_psi, rec.action.a_theta};
        out_.write(reinterpret_cast<const char*>(action), sizeof action);
        if (!out_) throw std::runtime_error("BcDatasetWriter: write failed");
        ++written_;
    }

    void close() {
        if (written_ != expected_) throw ContractViolation("BcDatasetWriter: fewer records than declared");
        out_.close();
    }

private:
    std::ofstream out_;
    std::uint64_t expected_ = 0;
    std::uint64_t written_ = 0;
};

class BcDatasetReader {
public:
    explicit BcDatasetReader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw IntegrityError("cannot open dataset " + path);
        char magic[8];
        std::uint32_t len = 0;
        in_.read(magic, sizeof magic);
        in_.read(reinterpret_cast<char*>(&len), sizeof len);
        if (!in_ || std::memcmp(magic, kBcMagic, sizeof magic) != 0) throw IntegrityError("dataset: bad magic");
        std::string text(len, '\0');
        in_.read(text.data(), len);
        if (!in_) throw IntegrityError("dataset: truncated header");
        try {
            header_ = nlohmann::json::parse(text);
            count_ = header_.at("count").get<std::uint64_t>();
            if (header_.at("version").get<int>() != kBcFormatVersion) throw IntegrityError("dataset: unsupported version");
            if (header_.at("record_bytes").get<std::size_t>() != kBcRecordBytes)
                throw IntegrityError("dataset: record size mismatch");
        } catch (const nlohmann::json::exception& e) {
            throw IntegrityError(std::string("dataset: malformed header: ") + e.what());
        }
    }

    const nlohmann::json& header() const { return header_; }
    std::uint64_t count() const { return count_; }
    std::uint64_t remaining() const { return count_ - read_; }

    BcRecord next() {
        if (read_ >= count_) throw ContractViolation("BcDatasetReader: no records left");
        BcRecord rec;
        in_.read(reinterpret_cast<char*>(rec.observation.track_matrix.data()),
                 static_cast<std::streamsize>(rec.observation.track_matrix.size() * sizeof(float)));
        in_.read(reinterpret_cast<char*>(rec.observation.scan_raster.data()),
                 static_cast<std::streamsize>(rec.observation.scan_raster.size() * sizeof(float)));
        std::int32_t action[2];
        in_.read(reinterpret_cast<char*>(action), sizeof action);
        if (!in_) throw IntegrityError("dataset: truncated record " + std::to_string(read_));
        rec.action = {action[0], action[1]};
        ++read_;
        return rec;
    }

private:
    std::ifstream in_;
    nlohmann::json header_;
    std::uint64_t count_ = 0;
    std::uint64_t read_ = 0;
};

/// Drives episodes with `teacher` and hands each (observation, action)
/// pair to `sink`. Episode k uses seed config.seed + k.
inline void collect_bc_samples(const EpisodeConfig& config, std::uint64_t n_samples, Policy& teacher,
                               const std::function<void(const BcRecord&)>& sink) {
    if (n_samples == 0) throw ConfigError("samples", "must be > 0");
    std::uint64_t collected = 0;
    for (std::uint64_t episode = 0; collected < n_samples; ++episode) {
        EpisodeConfig cfg = config;
        cfg.seed = config.seed + episode;
        Environment env(cfg);
        BcRecord rec;
        rec.observation = env.reset();
        teacher.reset(cfg.seed, env.grid());
        while (!env.done() && collected < n_samples) {
            rec.action = teacher.act(env.step_count(), rec.observation);
            sink(rec);
            ++collected;
            rec.observation = env.step(rec.action).observation;
        }
    }
}

inline void export_bc_dataset(const EpisodeConfig& config, std::uint64_t n_samples, Policy& teacher,
                              const std::string& path) {
    if (n_samples == 0) throw ConfigError("samples", "must be > 0");
    BcDatasetWriter writer(path, n_samples,
                           {{"teacher", teacher.name()},
                            {"grid_size", config.grid().n},
                            {"config", config_to_json(config)},
                            {"config_hash", hex64(config_hash(config))}});
    collect_bc_samples(config, n_samples, teacher, [&](const BcRecord& r) { writer.write(r); });
    writer.close();
}

inline std::vector<BcRecord> read_bc_dataset(const std::string& path) {
    BcDatasetReader reader(path);
    std::vector<BcRecord> out;
    out.reserve(reader.count());
    while (reader.remaining() > 0) out.push_back(reader.next());
    return out;
}

}  // namespace aesa
