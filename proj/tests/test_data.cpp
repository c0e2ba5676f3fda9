#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "tagnn/data.hpp"
#include "tagnn/rng.hpp"

using namespace tagnn;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("tagnn_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

MotionSequence tiny_sequence(std::size_t frames, std::size_t channels, double ts_ms) {
    MotionSequence seq;
    seq.meta.unit = Unit::Degrees;
    seq.meta.ts_sec = ts_ms / 1000.0;
    for (std::size_t ch = 0; ch < channels; ++ch)
        seq.meta.channels.push_back("ch" + std::to_string(ch));
    for (std::size_t i = 0; i < frames; ++i) {
        seq.timestamps_ms.push_back(static_cast<double>(i) * ts_ms);
        for (std::size_t ch = 0; ch < channels; ++ch)
            seq.frames.push_back(std::sin(0.05 * static_cast<double>(i) +
                                          static_cast<double>(ch)));
    }
    return seq;
}

}  // namespace

TEST_CASE("csv: 3-row 42-channel file parses with unit and rate") {
    TempDir dir;
    std::ofstream f(dir.file("a.csv"));
    f << "# unit: degrees\n";
    f << "time_ms";
    for (int i = 0; i < 42; ++i) f << ",c" << i;
    f << "\n";
    for (int r = 0; r < 3; ++r) {
        f << r * 10;
        for (int i = 0; i < 42; ++i) f << ',' << r + i;
        f << "\n";
    }
    f.close();
    const MotionSequence seq = load_motion_csv(dir.file("a.csv"));
    CHECK(seq.n_frames() == 3);
    CHECK(seq.n_channels() == 42);
    CHECK(seq.meta.ts_sec == doctest::Approx(0.01));
    CHECK(seq.meta.unit == Unit::Degrees);
    CHECK(seq.frame(2, 1) == 3.0);
}

TEST_CASE("csv: a timestamp gap is rejected naming the row") {
    TempDir dir;
    std::ofstream f(dir.file("gap.csv"));
    f << "# unit: mm\ntime_ms,a\n0,1\n10,2\n35,3\n";
    f.close();
    CHECK_THROWS_WITH_AS(load_motion_csv(dir.file("gap.csv")), doctest::Contains("row 3"),
                         IngestionError);
}

TEST_CASE("csv: missing unit line and unknown units are rejected") {
    TempDir dir;
    {
        std::ofstream f(dir.file("nounit.csv"));
        f << "time_ms,a\n0,1\n10,2\n";
    }
    CHECK_THROWS_AS(load_motion_csv(dir.file("nounit.csv")), IngestionError);
    {
        std::ofstream f(dir.file("badunit.csv"));
        f << "# unit: parsecs\ntime_ms,a\n0,1\n10,2\n";
    }
    CHECK_THROWS_AS(load_motion_csv(dir.file("badunit.csv")), IngestionError);
}

TEST_CASE("csv: write then read is bit-identical") {
    TempDir dir;
    SynthSpec spec = SynthSpec::defaults(Layout::Vrhands14, 100.0, 0.05, 42);
    const MotionSequence seq = synth_generate(spec);
    save_motion_csv(seq, dir.file("round.csv"));
    const MotionSequence back = load_motion_csv(dir.file("round.csv"));
    REQUIRE(back.n_frames() == seq.n_frames());
    REQUIRE(back.n_channels() == seq.n_channels());
    CHECK(back.frames == seq.frames);
    CHECK(back.timestamps_ms == seq.timestamps_ms);
    CHECK(back.meta.channels == seq.meta.channels);
}

TEST_CASE("horizon mapping: representable and unrepresentable horizons") {
    CHECK(horizon_to_frames(20.0, 0.01) == 2);
    CHECK(horizon_to_frames(40.0, 0.01) == 4);
    CHECK_THROWS_AS(horizon_to_frames(25.0, 0.01), ContractError);
    // 90 Hz: 44.44 ms rounds cleanly to 4 frames
    CHECK(horizon_to_frames(44.44, 1.0 / 90.0) == 4);
}

TEST_CASE("make_samples: window count follows the boundary inequality") {
    const MotionSequence seq = tiny_sequence(100, 2, 10.0);
    std::vector<double> horizons = {40, 80, 120, 160, 200, 240, 280, 320, 360, 400};
    const SampleSet set = make_samples(seq, horizons, 1, 16, 3.0, true);
    // 100 - 16 - 40 + 1
    CHECK(set.count() == 45);
    CHECK(set.horizon_frames.front() == 4);
    CHECK(set.horizon_frames.back() == 40);

    const MotionSequence shorty = tiny_sequence(55, 2, 10.0);
    CHECK(make_samples(shorty, horizons, 1, 16, 3.0, true).count() == 0);
}

TEST_CASE("gather_batch lays out windows channel-major with aligned targets") {
    const MotionSequence seq = tiny_sequence(120, 3, 10.0);
    const std::vector<double> horizons = {40, 120};
    const SampleSet set = make_samples(seq, horizons, 5, 16, 3.0, true);
    REQUIRE(set.count() >= 3);
    const std::vector<WindowRef> refs = {{0, 0}, {0, 2}};
    const MotionSequence* seqp = &seq;
    const Batch batch = gather_batch({seqp, 1}, {&set, 1}, refs);
    CHECK(batch.b == 2);
    CHECK(batch.c == 3);
    CHECK(batch.t_sec == std::vector<double>{0.04, 0.12});

    const std::size_t s0 = set.starts[0], s2 = set.starts[2];
    CHECK(batch.window_at(1, 0, 3) == seq.frame(s0 + 3, 1));
    CHECK(batch.window_at(2, 1, 15) == seq.frame(s2 + 15, 2));
    CHECK(batch.theta0[0 * 3 + 1] == seq.frame(s0 + 15, 1));
    // horizon 40 ms -> 4 frames after t0
    CHECK(batch.targets[(0 * 2 + 1) * 3 + 0] == seq.frame(s2 + 15 + 4, 0));
    // oracle targets sliced at t0
    CHECK(batch.gv.size() == 2 * 3);
    CHECK(batch.gv[0 * 3 + 2] == set.gv[(s0 + 15) * 3 + 2]);
}

TEST_CASE("synth: determinism, std targets, zero amplitude") {
    SynthSpec spec = SynthSpec::defaults(Layout::Vrhands14, 100.0, 2.0, 9);
    const MotionSequence a = synth_generate(spec);
    const MotionSequence b = synth_generate(spec);
    CHECK(a.frames == b.frames);

    // empirical std matches the target (rescaled generator hits it exactly)
    const std::size_t c = a.n_channels(), n = a.n_frames();
    for (std::size_t ch : {2UL, 5UL, 20UL}) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += a.frame(i, ch);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = a.frame(i, ch) - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double target = spec.channel_std[ch];
        CHECK(std::sqrt(var) == doctest::Approx(target).epsilon(1e-9));
    }

    SynthSpec still = spec;
    still.channel_std.assign(42, 0.0);
    const MotionSequence quiet = synth_generate(still);
    for (double v : quiet.frames) CHECK(v == 0.0);
}

TEST_CASE("synth: a std target of 20 lands within the +-10% contract") {
    SynthSpec spec = SynthSpec::defaults(Layout::Vrhands14, 100.0, 2.0, 33);
    spec.channel_std.assign(42, 20.0);
    const MotionSequence seq = synth_generate(spec);
    const std::size_t n = seq.n_frames();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += seq.frame(i, 7);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (seq.frame(i, 7) - mean) * (seq.frame(i, 7) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    CHECK(sd > 18.0);
    CHECK(sd < 22.0);
}

TEST_CASE("synth: infeasible specs are rejected") {
    SynthSpec spec = SynthSpec::defaults(Layout::Vrhands14, 100.0, 0.5, 1);
    spec.max_freq_hz = 0.0;
    CHECK_THROWS_AS(synth_generate(spec), SpecError);

    SynthSpec nyq = SynthSpec::defaults(Layout::Vrhands14, 100.0, 0.5, 1);
    nyq.max_freq_hz = 60.0;
    CHECK_THROWS_AS(synth_generate(nyq), SpecError);

    SynthSpec jerky = SynthSpec::defaults(Layout::Vrhands14, 100.0, 0.5, 1);
    jerky.jerk_limit = 1e-6;
    CHECK_THROWS_AS(synth_generate(jerky), SpecError);
}

TEST_CASE("synth: reinterhand layout emits millimetres at 90 Hz") {
    SynthSpec spec = SynthSpec::defaults(Layout::Reinterhand21, 90.0, 0.05, 3);
    const MotionSequence seq = synth_generate(spec);
    CHECK(seq.n_channels() == 63);
    CHECK(seq.meta.unit == Unit::Millimetres);
    CHECK(seq.meta.ts_sec == doctest::Approx(1.0 / 90.0));
}

TEST_CASE("checkpoint: save/load round trip keeps the forward pass within f32 error") {
    TempDir dir;
    ModelConfig cfg;
    TagnnModel model(cfg);
    Rng rng(5);
    ParamSet ps = model.init_params(rng);

    Checkpoint ckpt;
    ckpt.cfg = cfg;
    ckpt.params = ps;
    ckpt.meta["unit"] = "degrees";
    save_checkpoint(ckpt, dir.file("m.ckpt"));
    const Checkpoint back = load_checkpoint(dir.file("m.ckpt"));
    CHECK(back.meta.at("unit") == "degrees");
    REQUIRE(back.params.count() == ps.count());

    std::vector<double> window(16 * 42);
    Rng wr(6);
    for (double& v : window) v = wr.uniform(-20, 20);
    const auto before = model.predict(window, 0.2, ps, 0.01);
    const auto after = model.predict(window, 0.2, back.params, 0.01);
    for (std::size_t i = 0; i < before.size(); ++i) {
        const double rel = std::abs(before[i] - after[i]) /
                           std::max(1e-6, std::abs(before[i]) + std::abs(after[i]));
        CHECK(rel < 1e-5);
    }
}

TEST_CASE("checkpoint: wide payload is bit-exact") {
    TempDir dir;
    ModelConfig cfg;
    TagnnModel model(cfg);
    Rng rng(15);
    ParamSet ps = model.init_params(rng);
    Checkpoint ckpt;
    ckpt.cfg = cfg;
    ckpt.params = ps;
    save_checkpoint(ckpt, dir.file("wide.ckpt"), /*wide=*/true);
    const Checkpoint back = load_checkpoint(dir.file("wide.ckpt"));
    for (std::size_t i = 0; i < ps.count(); ++i)
        CHECK(back.params.at(ps.name(i)).vec() == ps.value(i).vec());
}

TEST_CASE("checkpoint: tampered shape and truncated payload are named errors") {
    TempDir dir;
    ModelConfig cfg = ModelConfig{};
    TagnnModel model(cfg);
    Rng rng(7);
    Checkpoint ckpt;
    ckpt.cfg = cfg;
    ckpt.params = model.init_params(rng);
    save_checkpoint(ckpt, dir.file("x.ckpt"));

    // corrupt the declared shape of one array in the manifest
    std::ifstream in(dir.file("x.ckpt"), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    const std::string needle = "param ch0.kfe.v.head.w f32 2 32 1 ";
    const auto at = text.find(needle);
    REQUIRE(at != std::string::npos);
    std::string patched = text;
    patched.replace(at, needle.size(), "param ch0.kfe.v.head.w f32 2 31 1 ");
    {
        std::ofstream out(dir.file("bad.ckpt"), std::ios::binary);
        out << patched;
    }
    CHECK_THROWS_WITH_AS(load_checkpoint(dir.file("bad.ckpt")),
                         doctest::Contains("ch0.kfe.v.head.w"), IoError);

    // truncate the payload
    {
        std::ofstream out(dir.file("short.ckpt"), std::ios::binary);
        out << text.substr(0, text.size() - 64);
    }
    CHECK_THROWS_WITH_AS(load_checkpoint(dir.file("short.ckpt")), doctest::Contains("truncated"),
                         IoError);

    // unsupported version
    {
        std::ofstream out(dir.file("vers.ckpt"), std::ios::binary);
        out << "tagnn-checkpoint 9\nconfig 0\nmeta 0\narrays 0\npayload 0\n";
    }
    CHECK_THROWS_WITH_AS(load_checkpoint(dir.file("vers.ckpt")), doctest::Contains("version"),
                         IoError);
}

TEST_CASE("checkpoint: empty parameter set is a valid zero-array container") {
    TempDir dir;
    Checkpoint ckpt;
    ckpt.cfg = ModelConfig{};
    ckpt.meta["note"] = "empty";
    save_checkpoint(ckpt, dir.file("empty.ckpt"));
    const Checkpoint back = load_checkpoint(dir.file("empty.ckpt"));
    CHECK(back.params.count() == 0);
    CHECK(back.extra.count() == 0);
    CHECK(back.meta.at("note") == "empty");
}

TEST_CASE("dataset directory loading") {
    TempDir dir;
    std::filesystem::create_directories(dir.path / "train");
    std::filesystem::create_directories(dir.path / "test");
    SynthSpec spec = SynthSpec::defaults(Layout::Vrhands14, 100.0, 0.05, 2);
    save_motion_csv(synth_generate(spec), (dir.path / "train" / "a.csv").string());
    spec.seed = 3;
    save_motion_csv(synth_generate(spec), (dir.path / "train" / "b.csv").string());
    spec.seed = 4;
    save_motion_csv(synth_generate(spec), (dir.path / "test" / "t.csv").string());
    const Dataset d = load_dataset_dir(dir.path.string());
    CHECK(d.train.size() == 2);
    CHECK(d.val.empty());
    CHECK(d.test.size() == 1);
    CHECK_THROWS_AS(load_dataset_dir((dir.path / "nope").string()), IoError);
}
