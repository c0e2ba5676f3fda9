#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tagnn/config.hpp"
#include "tagnn/kinematics.hpp"
#include "tagnn/model.hpp"
#include "tagnn/params.hpp"

namespace tagnn {

struct MotionSequence {
    SeriesMeta meta;
    std::vector<double> timestamps_ms;  // strictly increasing, uniform within 1%
    std::vector<double> frames;         // [n][c] row-major

    std::size_t n_frames() const { return timestamps_ms.size(); }
    std::size_t n_channels() const { return meta.channels.size(); }
    double frame(std::size_t i, std::size_t ch) const { return frames[i * n_channels() + ch]; }
    const double* frame_ptr(std::size_t i) const { return &frames[i * n_channels()]; }
};

// CSV layout: a required "# unit: degrees|mm" comment line, then a header
// "time_ms,<channel>,..." and numeric rows. Values are written with
// round-trippable precision so write->read is bit-identical.
MotionSequence load_motion_csv(const std::string& path);
void save_motion_csv(const MotionSequence& seq, const std::string& path);

// All *.csv in a directory, sorted by filename.
std::vector<MotionSequence> load_motion_dir(const std::string& dir);

// Splits are by recording identity: train/ val/ test/ subdirectories.
struct Dataset {
    std::vector<MotionSequence> train, val, test;
};
Dataset load_dataset_dir(const std::string& dir);

// Frame offset of a horizon. Throws when the horizon is half a frame or more
// away from an exact frame multiple (silent horizon drift otherwise).
std::size_t horizon_to_frames(double t_ms, double ts_sec);

// Window references plus per-sequence oracle derivative targets for one
// recording. Windows never straddle the recording boundary, and targets are
// only emitted where the horizon frames and the oracle support fit.
struct SampleSet {
    std::size_t window_len = 0;
    std::vector<std::size_t> starts;
    std::vector<std::size_t> horizon_frames;
    std::vector<double> horizon_sec;  // exact frame multiples
    std::vector<double> gv, ga;       // [n][c]; empty when oracle disabled

    std::size_t count() const { return starts.size(); }
};

SampleSet make_samples(const MotionSequence& seq, const std::vector<double>& horizons_ms,
                       std::size_t stride, std::size_t window_len, double sigma,
                       bool with_oracle = true);

struct WindowRef {
    std::uint32_t seq = 0;
    std::uint32_t sample = 0;
};

std::vector<WindowRef> flatten_refs(std::span<const SampleSet> sets);

// Channel-major gather of windows, targets, and oracle rows.
Batch gather_batch(std::span<const MotionSequence> seqs, std::span<const SampleSet> sets,
                   std::span<const WindowRef> refs);

// Synthetic motion: per-finger latent oscillation shared by the finger's
// channels plus an independent per-channel component, scaled to per-channel
// standard-deviation targets; optional smoothed step-like intent changes.
struct SynthSpec {
    Layout layout = Layout::Vrhands14;
    double rate_hz = 100.0;
    double minutes = 1.0;
    std::uint64_t seed = 1;
    std::vector<double> channel_std;  // per channel; defaults per layout
    std::size_t sinusoids = 4;
    double max_freq_hz = 0.8;
    double coupling = 0.8;        // variance share of the finger latent
    double intent_rate_hz = 0.0;  // mean step-change rate; 0 disables
    double jerk_limit = 0.0;      // units/s^3; 0 = unbounded

    static SynthSpec defaults(Layout layout, double rate_hz, double minutes, std::uint64_t seed);
};

MotionSequence synth_generate(const SynthSpec& spec);

// Checkpoint container: text manifest (config echo, metadata, array table)
// followed by a raw little-endian float payload. Model parameters are stored
// as 32-bit floats unless wide=true (64-bit, used for exact training resume).
struct Checkpoint {
    ModelConfig cfg;
    std::map<std::string, std::string> meta;
    ParamSet params;
    ParamSet extra;  // optimizer state and similar
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path, bool wide = false);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tagnn
