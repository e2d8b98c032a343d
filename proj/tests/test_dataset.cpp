#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "reference.hpp"
#include "xray/dataset.hpp"
#include "xray/png_io.hpp"
#include "xray/xray.hpp"

using namespace xray;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("xray_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::uint8_t> slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// Small, fast generation setup shared by the dataset tests.
DatasetConfig tiny_config() {
    DatasetConfig cfg;
    cfg.heap.width = 32;
    cfg.heap.height = 24;
    cfg.heap.n_min = 2;
    cfg.heap.n_max = 4;
    cfg.heap.n_lambda = 3.0;
    cfg.heap.placement_sigma = 6.0;
    cfg.heap.n_rot = 8;
    cfg.heap.target_spec = Footprint::rect(5, 4, 0.005);
    cfg.shard_size = 4;
    return cfg;
}

std::vector<SampleRecord> tiny_records(int n) {
    const DatasetConfig cfg = tiny_config().normalized();
    std::vector<SampleRecord> recs;
    for (int k = 0; k < n; ++k)
        recs.push_back(make_sample(static_cast<std::uint64_t>(k), cfg.heap,
                                   cfg.grid, cfg.iou_threshold));
    return recs;
}

}  // namespace

TEST_CASE("8-bit png round-trips exactly") {
    const fs::path dir = temp_dir("png8");
    Raster<std::uint8_t> img(13, 9, 0);
    Rng rng(17);
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<std::uint8_t>(rng.next_below(256));
    const std::string path = (dir / "img.png").string();
    write_png_gray8(path, img);
    int bit_depth = 0;
    const auto back = read_png_gray(path, &bit_depth);
    CHECK(bit_depth == 8);
    REQUIRE(back.same_shape(img));
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(back[i] == static_cast<std::uint16_t>(img[i]));
    fs::remove_all(dir);
}

TEST_CASE("16-bit png round-trips exactly") {
    const fs::path dir = temp_dir("png16");
    Raster<std::uint16_t> img(7, 11, 0);
    Rng rng(18);
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<std::uint16_t>(rng.next_below(65536));
    const std::string path = (dir / "img.png").string();
    write_png_gray16(path, img);
    int bit_depth = 0;
    const auto back = read_png_gray(path, &bit_depth);
    CHECK(bit_depth == 16);
    REQUIRE(back.same_shape(img));
    CHECK(back.data == img.data);
    fs::remove_all(dir);
}

TEST_CASE("mask png stores 0 and 255 only") {
    const fs::path dir = temp_dir("maskpng");
    Mask m(6, 4, 0);
    m.at(1, 1) = 1;
    m.at(5, 3) = 1;
    const std::string path = (dir / "mask.png").string();
    write_mask_png(path, m);
    int bit_depth = 0;
    const auto back = read_png_gray(path, &bit_depth);
    CHECK(bit_depth == 8);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x)
            CHECK(back.at(x, y) == (m.at(x, y) ? 255 : 0));
    fs::remove_all(dir);
}

TEST_CASE("distribution png rounds unit values to byte range") {
    const fs::path dir = temp_dir("distpng");
    Raster<float> v(4, 1, 0.0f);
    v[0] = 0.0f;
    v[1] = 0.5f;
    v[2] = 1.0f;
    v[3] = 2.0f;  // clamped
    const std::string path = (dir / "dist.png").string();
    write_distribution_png(path, v);
    int bit_depth = 0;
    const auto back = read_png_gray(path, &bit_depth);
    CHECK(back[0] == 0);
    CHECK(back[1] == 128);  // round(0.5 * 255)
    CHECK(back[2] == 255);
    CHECK(back[3] == 255);
    fs::remove_all(dir);
}

TEST_CASE("depth png quantizes at the recorded scale") {
    const fs::path dir = temp_dir("depthpng");
    Raster<float> depth(5, 3, 0.0f);
    Rng rng(19);
    for (std::size_t i = 0; i < depth.size(); ++i)
        depth[i] = static_cast<float>(rng.uniform(0.0, 0.8));
    const std::string path = (dir / "depth.png").string();
    write_depth_png(path, depth);
    int bit_depth = 0;
    const auto back = read_png_gray(path, &bit_depth);
    CHECK(bit_depth == 16);
    for (std::size_t i = 0; i < depth.size(); ++i) {
        const double meters = back[i] * kDepthScale;
        CHECK(std::fabs(meters - depth[i]) <= kDepthScale * 0.5 + 1e-9);
    }
    CHECK(fs::exists(path + ".json"));
    fs::remove_all(dir);
}

TEST_CASE("png reader rejects non-png bytes") {
    const fs::path dir = temp_dir("badpng");
    const fs::path path = dir / "junk.png";
    spit(path, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    int bit_depth = 0;
    CHECK_THROWS_AS(read_png_gray(path.string(), &bit_depth), FormatError);
    fs::remove_all(dir);
}

TEST_CASE("samples survive a shard round trip bit for bit") {
    const fs::path dir = temp_dir("shard_rt");
    const auto recs = tiny_records(3);
    const std::string path = (dir / "0000.xrd").string();
    write_shard(recs, path);
    const auto back = read_shard(path);
    REQUIRE(back.size() == recs.size());
    for (std::size_t k = 0; k < recs.size(); ++k) {
        CHECK(back[k].target_modal == recs[k].target_modal);
        CHECK(back[k].depth == recs[k].depth);
        CHECK(back[k].dist == recs[k].dist);
        CHECK(back[k].meta.seed == recs[k].meta.seed);
        CHECK(back[k].meta.target_pose == recs[k].meta.target_pose);
        CHECK(back[k].meta.object_count == recs[k].meta.object_count);
    }
    // Writing the same records twice produces identical bytes.
    const std::string again = (dir / "0001.xrd").string();
    write_shard(recs, again);
    CHECK(slurp(path) == slurp(again));
    fs::remove_all(dir);
}

TEST_CASE("shard reader detects corruption") {
    const fs::path dir = temp_dir("shard_bad");
    const auto recs = tiny_records(2);
    const std::string path = (dir / "0000.xrd").string();
    write_shard(recs, path);
    auto bytes = slurp(path);

    SECTION("flipped payload byte fails the checksum") {
        bytes[bytes.size() / 2] ^= 0x40;
        spit(path, bytes);
        CHECK_THROWS_AS(read_shard(path), FormatError);
    }
    SECTION("truncated file is rejected") {
        bytes.resize(bytes.size() - 9);
        spit(path, bytes);
        CHECK_THROWS_AS(read_shard(path), FormatError);
    }
    SECTION("bad magic is rejected") {
        bytes[0] = 'Z';
        spit(path, bytes);
        CHECK_THROWS_AS(read_shard(path), FormatError);
    }
    SECTION("sidecar sample count must match") {
        // Overwrite the real sidecar with one missing a sample.
        nlohmann::json j;
        j["samples"].push_back(recs[0].meta);
        std::ofstream sf(dir / "0000.json", std::ios::trunc);
        sf << j.dump() << "\n";
        sf.close();
        CHECK_THROWS_AS(read_shard(path), FormatError);
    }
    fs::remove_all(dir);
}

TEST_CASE("single-sample files reuse the shard format") {
    const fs::path dir = temp_dir("sample_rt");
    const auto recs = tiny_records(1);
    const std::string path = (dir / "sample.xrd").string();
    write_sample(recs[0], path);
    const auto back = read_sample(path);
    CHECK(back.target_modal == recs[0].target_modal);
    CHECK(back.depth == recs[0].depth);
    CHECK(back.dist == recs[0].dist);
    CHECK(back.meta.seed == recs[0].meta.seed);
    fs::remove_all(dir);
}

TEST_CASE("mixed shapes and empty shards are rejected") {
    auto recs = tiny_records(2);
    recs[1].depth = Raster<float>(8, 8, 0.0f);
    CHECK_THROWS_AS(encode_shard(recs), DimensionMismatch);
    CHECK_THROWS_AS(encode_shard({}), FormatError);
}

TEST_CASE("config hash is stable and sensitive") {
    const DatasetConfig a = tiny_config();
    CHECK(config_hash(a) == config_hash(a));
    CHECK(config_hash(a).size() == 8);
    DatasetConfig b = a;
    b.iou_threshold = 0.8;
    CHECK(config_hash(a) != config_hash(b));
    DatasetConfig c = a;
    c.heap.placement_sigma += 1.0;
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("sample depth uses the configured camera height") {
    const DatasetConfig cfg = tiny_config().normalized();
    const auto rec = make_sample(3, cfg.heap, cfg.grid, cfg.iou_threshold, 0.5);
    const Scene scene = sample_heap(3, cfg.heap);
    for (std::size_t i = 0; i < rec.depth.size(); ++i)
        CHECK(rec.depth[i] == 0.5f - scene.heightmap()[i]);
}

TEST_CASE("generated dataset passes verification and splits by seed") {
    const fs::path dir = temp_dir("gen");
    const DatasetConfig cfg = tiny_config();
    const Manifest m = generate_dataset(0, 10, cfg, dir.string());
    CHECK(m.complete);
    CHECK(m.errors.empty());
    CHECK(m.n_samples == 10);
    CHECK(m.width == 32);
    CHECK(m.height == 24);
    CHECK(m.depth_stored_once);
    REQUIRE(m.shards.size() == 3);  // 4 + 4 + 2
    CHECK(m.shards[0].file == "shards/0000.xrd");
    CHECK(m.shards[2].n_samples == 2);
    // round(10 * 0.8) = 8 train seeds, libraries disjoint across the split.
    CHECK(m.train.seed_begin == 0);
    CHECK(m.train.seed_end == 8);
    CHECK(m.test.seed_begin == 8);
    CHECK(m.test.seed_end == 10);
    CHECK(m.train.library.disjoint_from(m.test.library));

    const auto check = verify_dataset(dir.string());
    CHECK(check.ok);
    CHECK(check.samples_seen == 10);
    CHECK(check.errors.empty());

    // The manifest on disk parses back to the same structure.
    const Manifest back = read_manifest(dir.string());
    CHECK(nlohmann::json(back) == nlohmann::json(m));
    fs::remove_all(dir);
}

TEST_CASE("dataset generation is deterministic across runs and workers") {
    const fs::path a = temp_dir("gen_a");
    const fs::path b = temp_dir("gen_b");
    const fs::path c = temp_dir("gen_c");
    const DatasetConfig cfg = tiny_config();
    generate_dataset(5, 9, cfg, a.string(), 1);
    generate_dataset(5, 9, cfg, b.string(), 1);
    generate_dataset(5, 9, cfg, c.string(), 3);
    for (const char* rel :
         {"manifest.json", "shards/0000.xrd", "shards/0000.json",
          "shards/0001.xrd", "shards/0002.xrd"}) {
        CHECK(slurp(a / rel) == slurp(b / rel));
        CHECK(slurp(a / rel) == slurp(c / rel));
    }
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}

TEST_CASE("verification flags a tampered shard") {
    const fs::path dir = temp_dir("gen_tamper");
    generate_dataset(0, 6, tiny_config(), dir.string());
    auto bytes = slurp(dir / "shards" / "0000.xrd");
    bytes[40] ^= 0x01;
    spit(dir / "shards" / "0000.xrd", bytes);
    const auto check = verify_dataset(dir.string());
    CHECK_FALSE(check.ok);
    CHECK_FALSE(check.errors.empty());
    fs::remove_all(dir);
}

TEST_CASE("regenerating a sample from its recorded seed matches the stored bytes") {
    const fs::path dir = temp_dir("gen_regen");
    const DatasetConfig cfg = tiny_config().normalized();
    generate_dataset(0, 6, cfg, dir.string());
    const auto records = read_shard((dir / "shards" / "0000.xrd").string());
    REQUIRE_FALSE(records.empty());
    const Manifest m = read_manifest(dir.string());
    for (const auto& rec : records) {
        HeapConfig heap = cfg.heap;
        heap.footprint_library = rec.meta.seed < m.train.seed_end
                                     ? m.train.library
                                     : m.test.library;
        const auto again = make_sample(rec.meta.seed, heap, cfg.grid,
                                       cfg.iou_threshold, cfg.camera_height);
        CHECK(again.target_modal == rec.target_modal);
        CHECK(again.depth == rec.depth);
        CHECK(again.dist == rec.dist);
        CHECK(again.meta.target_pose == rec.meta.target_pose);
    }
    fs::remove_all(dir);
}
