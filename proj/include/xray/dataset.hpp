#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "xray/heapgen.hpp"
#include "xray/json_io.hpp"
#include "xray/occupancy.hpp"
#include "xray/parallel.hpp"
#include "xray/sensor.hpp"

// Training-data exporter: (modal target mask, depth) inputs paired with the
// full occupancy distribution as the regression label. Samples are packed
// into fixed-size binary shards with a JSON sidecar per shard and a
// manifest.json describing the whole set.
//
// Shard layout (little-endian, row-major):
//   magic   "XRAYDS1\0"
//   u32     version (1)
//   u32     width, height, n_samples
//   then per sample: u8 mask[w*h], f32 depth[w*h], f32 dist[w*h]
//   u32     crc32 of every preceding byte

namespace xray {

inline constexpr char kDatasetMagic[8] = {'X', 'R', 'A', 'Y', 'D', 'S', '1', '\0'};
inline constexpr std::uint32_t kDatasetVersion = 1;

struct SampleMeta {
    std::uint64_t seed = 0;
    Pose target_pose;
    int object_count = 0;
};

inline void to_json(nlohmann::json& j, const SampleMeta& m) {
    j = {{"seed", m.seed},
         {"target_pose", m.target_pose},
         {"object_count", m.object_count}};
}

inline void from_json(const nlohmann::json& j, SampleMeta& m) {
    j.at("seed").get_to(m.seed);
    j.at("target_pose").get_to(m.target_pose);
    j.at("object_count").get_to(m.object_count);
}

struct SampleRecord {
    Mask target_modal;
    Raster<float> depth;
    Raster<float> dist;
    SampleMeta meta;
};

struct DatasetConfig {
    HeapConfig heap;
    CandidateGrid grid;  // defaulted from heap dims in normalized()
    bool grid_set = false;
    double iou_threshold = 0.9;
    double camera_height = kDefaultCameraHeight;
    int shard_size = 100;
    double train_frac = 0.8;
    double library_split_frac = 0.6;

    DatasetConfig normalized() const {
        DatasetConfig c = *this;
        if (!c.grid_set) {
            // Same grid semantics as search time, true-pose injection
            // included: without it a visible target off the coarse lattice
            // gets an all-zero label even though its pose is plainly
            // observable.
            c.grid = CandidateGrid::for_workspace(c.heap.width, c.heap.height, 8,
                                                  c.heap.n_rot);
            c.grid_set = true;
        }
        return c;
    }
};

inline void to_json(nlohmann::json& j, const DatasetConfig& c) {
    j = {{"heap", c.heap},
         {"grid", c.grid},
         {"iou_threshold", c.iou_threshold},
         {"camera_height", c.camera_height},
         {"shard_size", c.shard_size},
         {"train_frac", c.train_frac},
         {"library_split_frac", c.library_split_frac}};
}

inline void from_json(const nlohmann::json& j, DatasetConfig& c) {
    j.at("heap").get_to(c.heap);
    j.at("grid").get_to(c.grid);
    c.grid_set = true;
    j.at("iou_threshold").get_to(c.iou_threshold);
    j.at("camera_height").get_to(c.camera_height);
    j.at("shard_size").get_to(c.shard_size);
    j.at("train_frac").get_to(c.train_frac);
    j.at("library_split_frac").get_to(c.library_split_frac);
}

// nlohmann dumps object keys sorted, so this is a canonical encoding.
inline std::string config_hash(const DatasetConfig& config) {
    const std::string dump = nlohmann::json(config.normalized()).dump();
    const auto crc = ::crc32(0, reinterpret_cast<const Bytef*>(dump.data()),
                             static_cast<uInt>(dump.size()));
    std::ostringstream os;
    os << std::hex << std::setw(8) << std::setfill('0') << crc;
    return os.str();
}

inline SampleRecord make_sample(std::uint64_t seed, const HeapConfig& heap,
                                const CandidateGrid& grid, double iou_threshold = 0.9,
                                double camera_height = kDefaultCameraHeight) {
    const Scene scene = sample_heap(seed, heap);
    const auto obs = observe(scene, camera_height);
    const auto dist = occupancy_distribution(scene, grid, 1, iou_threshold);
    SampleRecord rec;
    rec.target_modal = obs.target_modal;
    rec.depth = obs.depth.values;
    rec.dist = dist.values;
    rec.meta.seed = seed;
    rec.meta.target_pose = scene.target()->pose;
    rec.meta.object_count = static_cast<int>(scene.instances.size()) - 1;
    return rec;
}

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_f32(std::vector<std::uint8_t>& out, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32(out, u);
}

inline float get_f32(const std::uint8_t* p) {
    const std::uint32_t u = get_u32(p);
    float v;
    std::memcpy(&v, &u, 4);
    return v;
}

inline std::string sidecar_path(const std::string& shard_path) {
    const auto dot = shard_path.rfind('.');
    return (dot == std::string::npos ? shard_path : shard_path.substr(0, dot)) + ".json";
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_shard(const std::vector<SampleRecord>& records) {
    if (records.empty()) throw FormatError("empty shard");
    const int w = records.front().target_modal.width;
    const int h = records.front().target_modal.height;
    const std::size_t npix = static_cast<std::size_t>(w) * h;

    std::vector<std::uint8_t> out;
    out.reserve(24 + records.size() * npix * 9 + 4);
    for (char c : kDatasetMagic) out.push_back(static_cast<std::uint8_t>(c));
    detail::put_u32(out, kDatasetVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(w));
    detail::put_u32(out, static_cast<std::uint32_t>(h));
    detail::put_u32(out, static_cast<std::uint32_t>(records.size()));

    for (const auto& rec : records) {
        if (rec.target_modal.width != w || rec.target_modal.height != h ||
            !rec.depth.same_shape(rec.target_modal) ||
            !rec.dist.same_shape(rec.target_modal))
            throw DimensionMismatch("shard samples disagree on shape");
        out.insert(out.end(), rec.target_modal.data.begin(), rec.target_modal.data.end());
        for (std::size_t i = 0; i < npix; ++i) detail::put_f32(out, rec.depth[i]);
        for (std::size_t i = 0; i < npix; ++i) detail::put_f32(out, rec.dist[i]);
    }
    const std::uint32_t crc = static_cast<std::uint32_t>(
        ::crc32(0, out.data(), static_cast<uInt>(out.size())));
    detail::put_u32(out, crc);
    return out;
}

inline void write_shard(const std::vector<SampleRecord>& records,
                        const std::string& path) {
    const auto bytes = encode_shard(records);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open for write: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw FormatError("short write: " + path);

    nlohmann::json side;
    for (const auto& rec : records) side["samples"].push_back(rec.meta);
    std::ofstream sf(detail::sidecar_path(path), std::ios::trunc);
    sf << side.dump(2) << "\n";
}

inline std::vector<SampleRecord> read_shard(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (bytes.size() < 28) throw FormatError("shard too small: " + path);
    if (std::memcmp(bytes.data(), kDatasetMagic, 8) != 0)
        throw FormatError("bad shard magic: " + path);
    if (detail::get_u32(&bytes[8]) != kDatasetVersion)
        throw FormatError("unsupported shard version: " + path);

    const std::uint32_t stored_crc = detail::get_u32(&bytes[bytes.size() - 4]);
    const std::uint32_t actual_crc = static_cast<std::uint32_t>(
        ::crc32(0, bytes.data(), static_cast<uInt>(bytes.size() - 4)));
    if (stored_crc != actual_crc) throw FormatError("shard crc mismatch: " + path);

    const int w = static_cast<int>(detail::get_u32(&bytes[12]));
    const int h = static_cast<int>(detail::get_u32(&bytes[16]));
    const std::uint32_t n = detail::get_u32(&bytes[20]);
    const std::size_t npix = static_cast<std::size_t>(w) * h;
    if (bytes.size() != 24 + n * npix * 9 + 4)
        throw FormatError("shard size mismatch: " + path);

    std::vector<SampleMeta> metas;
    {
        std::ifstream sf(detail::sidecar_path(path));
        if (sf) {
            nlohmann::json side = nlohmann::json::parse(sf);
            metas = side.at("samples").get<std::vector<SampleMeta>>();
            if (metas.size() != n) throw FormatError("sidecar count mismatch: " + path);
        }
    }

    std::vector<SampleRecord> records;
    records.reserve(n);
    std::size_t at = 24;
    for (std::uint32_t k = 0; k < n; ++k) {
        SampleRecord rec;
        rec.target_modal = Mask(w, h);
        rec.depth = Raster<float>(w, h);
        rec.dist = Raster<float>(w, h);
        std::memcpy(rec.target_modal.data.data(), &bytes[at], npix);
        at += npix;
        for (std::size_t i = 0; i < npix; ++i, at += 4)
            rec.depth[i] = detail::get_f32(&bytes[at]);
        for (std::size_t i = 0; i < npix; ++i, at += 4)
            rec.dist[i] = detail::get_f32(&bytes[at]);
        if (k < metas.size()) rec.meta = metas[k];
        records.push_back(std::move(rec));
    }
    return records;
}

inline void write_sample(const SampleRecord& record, const std::string& path) {
    write_shard({record}, path);
}

inline SampleRecord read_sample(const std::string& path) {
    auto records = read_shard(path);
    if (records.size() != 1) throw FormatError("expected a single-sample file: " + path);
    return std::move(records.front());
}

struct ShardInfo {
    std::string file;
    std::uint64_t seed_begin = 0;
    std::uint64_t seed_end = 0;  // exclusive
    int n_samples = 0;
};

inline void to_json(nlohmann::json& j, const ShardInfo& s) {
    j = {{"file", s.file},
         {"seed_begin", s.seed_begin},
         {"seed_end", s.seed_end},
         {"n_samples", s.n_samples}};
}

inline void from_json(const nlohmann::json& j, ShardInfo& s) {
    j.at("file").get_to(s.file);
    j.at("seed_begin").get_to(s.seed_begin);
    j.at("seed_end").get_to(s.seed_end);
    j.at("n_samples").get_to(s.n_samples);
}

struct SplitInfo {
    std::uint64_t seed_begin = 0;
    std::uint64_t seed_end = 0;  // exclusive
    FootprintLibrary library;
};

inline void to_json(nlohmann::json& j, const SplitInfo& s) {
    j = {{"seed_begin", s.seed_begin},
         {"seed_end", s.seed_end},
         {"library", s.library}};
}

inline void from_json(const nlohmann::json& j, SplitInfo& s) {
    j.at("seed_begin").get_to(s.seed_begin);
    j.at("seed_end").get_to(s.seed_end);
    j.at("library").get_to(s.library);
}

struct Manifest {
    std::uint32_t format_version = kDatasetVersion;
    int width = 0;
    int height = 0;
    // Depth is stored once; consumers wanting the two-channel convention
    // (mask + duplicated depth) replicate it on load.
    bool depth_stored_once = true;
    std::uint64_t n_samples = 0;
    std::string hash;
    DatasetConfig config;
    SplitInfo train;
    SplitInfo test;
    std::vector<ShardInfo> shards;
    bool complete = true;
    std::vector<std::string> errors;
};

inline void to_json(nlohmann::json& j, const Manifest& m) {
    j = {{"format_version", m.format_version},
         {"width", m.width},
         {"height", m.height},
         {"depth_stored_once", m.depth_stored_once},
         {"n_samples", m.n_samples},
         {"config_hash", m.hash},
         {"config", m.config},
         {"train", m.train},
         {"test", m.test},
         {"shards", m.shards},
         {"complete", m.complete},
         {"errors", m.errors}};
}

inline void from_json(const nlohmann::json& j, Manifest& m) {
    j.at("format_version").get_to(m.format_version);
    j.at("width").get_to(m.width);
    j.at("height").get_to(m.height);
    j.at("depth_stored_once").get_to(m.depth_stored_once);
    j.at("n_samples").get_to(m.n_samples);
    j.at("config_hash").get_to(m.hash);
    j.at("config").get_to(m.config);
    j.at("train").get_to(m.train);
    j.at("test").get_to(m.test);
    j.at("shards").get_to(m.shards);
    j.at("complete").get_to(m.complete);
    j.at("errors").get_to(m.errors);
}

// Seeds map to shards in order; the train/test boundary is at
// round(n * train_frac) and the two splits draw distractors from disjoint
// halves of the footprint library so no shape crosses the split.
inline Manifest generate_dataset(std::uint64_t seed_begin, std::uint64_t n_samples,
                                 const DatasetConfig& config_in,
                                 const std::string& out_dir, int n_workers = 1) {
    const DatasetConfig config = config_in.normalized();
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "shards");

    const std::uint64_t n_train = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(n_samples) * config.train_frac));
    const auto [lib_train, lib_test] =
        config.heap.footprint_library.split(config.library_split_frac);

    Manifest m;
    m.width = config.heap.width;
    m.height = config.heap.height;
    m.n_samples = n_samples;
    m.hash = config_hash(config);
    m.config = config;
    m.train = SplitInfo{seed_begin, seed_begin + n_train, lib_train};
    m.test = SplitInfo{seed_begin + n_train, seed_begin + n_samples, lib_test};

    const std::uint64_t shard_size = static_cast<std::uint64_t>(config.shard_size);
    const std::size_t n_shards =
        static_cast<std::size_t>((n_samples + shard_size - 1) / shard_size);
    std::vector<ShardInfo> shard_infos(n_shards);
    std::vector<std::string> shard_errors(n_shards);

    parallel_chunks(n_shards, n_workers, [&](int, std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const std::uint64_t lo = seed_begin + s * shard_size;
            const std::uint64_t hi =
                std::min<std::uint64_t>(lo + shard_size, seed_begin + n_samples);
            std::ostringstream name;
            name << "shards/" << std::setw(4) << std::setfill('0') << s << ".xrd";
            try {
                std::vector<SampleRecord> records;
                records.reserve(static_cast<std::size_t>(hi - lo));
                for (std::uint64_t seed = lo; seed < hi; ++seed) {
                    HeapConfig heap = config.heap;
                    heap.footprint_library =
                        seed < seed_begin + n_train ? lib_train : lib_test;
                    records.push_back(
                        make_sample(seed, heap, config.grid, config.iou_threshold,
                                    config.camera_height));
                }
                write_shard(records, (fs::path(out_dir) / name.str()).string());
                shard_infos[s] = {name.str(), lo, hi, static_cast<int>(hi - lo)};
            } catch (const std::exception& e) {
                shard_errors[s] = name.str() + ": " + e.what();
            }
        }
    });

    for (std::size_t s = 0; s < n_shards; ++s) {
        if (!shard_errors[s].empty()) {
            m.errors.push_back(shard_errors[s]);
            m.complete = false;
        } else {
            m.shards.push_back(shard_infos[s]);
        }
    }

    std::ofstream mf((fs::path(out_dir) / "manifest.json").string(), std::ios::trunc);
    mf << nlohmann::json(m).dump(2) << "\n";
    return m;
}

inline Manifest read_manifest(const std::string& dir) {
    std::ifstream f((std::filesystem::path(dir) / "manifest.json").string());
    if (!f) throw FormatError("no manifest in " + dir);
    return nlohmann::json::parse(f).get<Manifest>();
}

struct DatasetCheck {
    bool ok = true;
    std::uint64_t samples_seen = 0;
    std::vector<std::string> errors;
};

// Full integrity pass: manifest readable, every shard present with matching
// magic, version, checksum, dimensions, count, and sidecar metadata.
inline DatasetCheck verify_dataset(const std::string& dir) {
    DatasetCheck check;
    Manifest m;
    try {
        m = read_manifest(dir);
    } catch (const std::exception& e) {
        check.ok = false;
        check.errors.push_back(e.what());
        return check;
    }
    if (!m.complete) {
        check.ok = false;
        check.errors.push_back("manifest marked incomplete");
    }
    for (const auto& shard : m.shards) {
        try {
            const auto records =
                read_shard((std::filesystem::path(dir) / shard.file).string());
            if (static_cast<int>(records.size()) != shard.n_samples)
                throw FormatError("sample count mismatch: " + shard.file);
            for (std::size_t k = 0; k < records.size(); ++k) {
                const auto& rec = records[k];
                if (rec.target_modal.width != m.width ||
                    rec.target_modal.height != m.height)
                    throw FormatError("sample shape mismatch: " + shard.file);
                if (rec.meta.seed != shard.seed_begin + k)
                    throw FormatError("seed sequence mismatch: " + shard.file);
            }
            check.samples_seen += records.size();
        } catch (const std::exception& e) {
            check.ok = false;
            check.errors.push_back(e.what());
        }
    }
    if (check.samples_seen != m.n_samples) {
        check.ok = false;
        check.errors.push_back("total sample count mismatch");
    }
    return check;
}

}  // namespace xray
