#include "tagnn/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload assumes a little-endian host");

namespace tagnn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, std::size_t row, std::size_t col) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IngestionError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                             ": cannot parse '" + s + "'");
    }
}

}  // namespace

MotionSequence load_motion_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "'");
    MotionSequence seq;

    std::string line;
    if (!std::getline(f, line)) throw IngestionError(path + ": empty file");
    line = trim(line);
    const std::string unit_tag = "# unit:";
    if (line.rfind(unit_tag, 0) != 0)
        throw IngestionError(path + ": missing required '# unit:' comment line");
    seq.meta.unit = parse_unit(trim(line.substr(unit_tag.size())));

    if (!std::getline(f, line)) throw IngestionError(path + ": missing header line");
    {
        std::stringstream ss(trim(line));
        std::string col;
        bool first = true;
        while (std::getline(ss, col, ',')) {
            if (first) {
                if (col != "time_ms")
                    throw IngestionError(path + ": header must start with time_ms, got '" + col +
                                         "'");
                first = false;
            } else {
                seq.meta.channels.push_back(col);
            }
        }
        if (seq.meta.channels.empty()) throw IngestionError(path + ": no channel columns");
    }

    const std::size_t c = seq.meta.channels.size();
    std::size_t row = 0;
    while (std::getline(f, line)) {
        ++row;
        line = trim(line);
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            const double v = parse_number(cell, row, col);
            if (col == 0) seq.timestamps_ms.push_back(v);
            else seq.frames.push_back(v);
            ++col;
        }
        if (col != c + 1)
            throw IngestionError(path + ": row " + std::to_string(row) + " has " +
                                 std::to_string(col) + " columns, expected " +
                                 std::to_string(c + 1));
    }
    if (seq.n_frames() < 2) throw IngestionError(path + ": need at least 2 frames");

    const double ts_ms = seq.timestamps_ms[1] - seq.timestamps_ms[0];
    if (ts_ms <= 0) throw IngestionError(path + ": timestamps not strictly increasing at row 2");
    for (std::size_t i = 1; i < seq.n_frames(); ++i) {
        const double d = seq.timestamps_ms[i] - seq.timestamps_ms[i - 1];
        if (d <= 0)
            throw IngestionError(path + ": timestamps not strictly increasing at row " +
                                 std::to_string(i + 1));
        if (std::abs(d - ts_ms) > 0.01 * ts_ms)
            throw IngestionError(path + ": non-uniform timestamp at row " + std::to_string(i + 1) +
                                 " (step " + format_double(d) + " ms vs " + format_double(ts_ms) +
                                 " ms)");
    }
    seq.meta.ts_sec = ts_ms / 1000.0;
    return seq;
}

void save_motion_csv(const MotionSequence& seq, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << "# unit: " << unit_name(seq.meta.unit) << "\n";
    f << "time_ms";
    for (const std::string& ch : seq.meta.channels) f << ',' << ch;
    f << "\n";
    const std::size_t c = seq.n_channels();
    for (std::size_t i = 0; i < seq.n_frames(); ++i) {
        f << format_double(seq.timestamps_ms[i]);
        const double* row = seq.frame_ptr(i);
        for (std::size_t ch = 0; ch < c; ++ch) f << ',' << format_double(row[ch]);
        f << "\n";
    }
    if (!f) throw IoError("short write to '" + path + "'");
}

std::vector<MotionSequence> load_motion_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("'" + dir + "' is not a directory");
    std::vector<std::string> paths;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv")
            paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
    std::vector<MotionSequence> out;
    out.reserve(paths.size());
    for (const std::string& p : paths) out.push_back(load_motion_csv(p));
    return out;
}

Dataset load_dataset_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    Dataset d;
    if (fs::is_directory(dir + "/train")) d.train = load_motion_dir(dir + "/train");
    if (fs::is_directory(dir + "/val")) d.val = load_motion_dir(dir + "/val");
    if (fs::is_directory(dir + "/test")) d.test = load_motion_dir(dir + "/test");
    if (d.train.empty() && d.val.empty() && d.test.empty())
        throw IoError("'" + dir + "' has no train/ val/ test/ subdirectories with csv files");
    return d;
}

std::size_t horizon_to_frames(double t_ms, double ts_sec) {
    if (t_ms <= 0 || ts_sec <= 0) throw ContractError("horizon_to_frames: nonpositive inputs");
    const double frames = t_ms / (1000.0 * ts_sec);
    const double rounded = std::round(frames);
    if (std::abs(frames - rounded) >= 0.5 - 1e-9 || rounded < 1)
        throw ContractError("horizon " + format_double(t_ms) +
                            " ms is not representable within half a frame at ts=" +
                            format_double(ts_sec * 1000.0) + " ms");
    return static_cast<std::size_t>(rounded);
}

SampleSet make_samples(const MotionSequence& seq, const std::vector<double>& horizons_ms,
                       std::size_t stride, std::size_t window_len, double sigma,
                       bool with_oracle) {
    if (stride < 1) throw ContractError("make_samples: stride must be >= 1");
    if (window_len < 2) throw ContractError("make_samples: window too short");
    if (horizons_ms.empty()) throw ContractError("make_samples: no horizons");

    SampleSet set;
    set.window_len = window_len;
    std::size_t max_h = 0;
    for (double t : horizons_ms) {
        const std::size_t hf = horizon_to_frames(t, seq.meta.ts_sec);
        set.horizon_frames.push_back(hf);
        set.horizon_sec.push_back(static_cast<double>(hf) * seq.meta.ts_sec);
        max_h = std::max(max_h, hf);
    }

    const std::size_t n = seq.n_frames();
    const auto radius = static_cast<std::size_t>(std::ceil(4.0 * sigma));
    const std::size_t tail = with_oracle ? std::max(max_h, radius) : max_h;
    if (n >= window_len + tail) {
        const std::size_t last_start = n - window_len - tail;
        for (std::size_t s = 0; s <= last_start; s += stride) {
            // the oracle support around t0 must stay inside the recording
            if (with_oracle && s + window_len - 1 < radius) continue;
            set.starts.push_back(s);
        }
    }
    if (set.starts.empty()) return set;

    if (with_oracle) {
        const std::size_t c = seq.n_channels();
        set.gv.resize(n * c);
        set.ga.resize(n * c);
        std::vector<double> col(n);
        for (std::size_t ch = 0; ch < c; ++ch) {
            for (std::size_t i = 0; i < n; ++i) col[i] = seq.frame(i, ch);
            const std::vector<double> v = gaussian_derivative_oracle(col, sigma, seq.meta.ts_sec, 1);
            const std::vector<double> a = gaussian_derivative_oracle(col, sigma, seq.meta.ts_sec, 2);
            for (std::size_t i = 0; i < n; ++i) {
                set.gv[i * c + ch] = v[i];
                set.ga[i * c + ch] = a[i];
            }
        }
    }
    return set;
}

std::vector<WindowRef> flatten_refs(std::span<const SampleSet> sets) {
    std::vector<WindowRef> refs;
    for (std::size_t s = 0; s < sets.size(); ++s)
        for (std::size_t i = 0; i < sets[s].count(); ++i)
            refs.push_back({static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(i)});
    return refs;
}

Batch gather_batch(std::span<const MotionSequence> seqs, std::span<const SampleSet> sets,
                   std::span<const WindowRef> refs) {
    if (refs.empty()) throw ContractError("gather_batch: empty reference list");
    if (seqs.size() != sets.size())
        throw ContractError("gather_batch: sequence/sample-set count mismatch");
    const SampleSet& first_set = sets[refs[0].seq];
    const MotionSequence& first_seq = seqs[refs[0].seq];

    Batch batch;
    batch.b = refs.size();
    batch.c = first_seq.n_channels();
    batch.win = first_set.window_len;
    batch.ts_sec = first_seq.meta.ts_sec;
    batch.t_sec = first_set.horizon_sec;
    const std::size_t nt = batch.t_sec.size();
    const bool with_oracle = !first_set.gv.empty();

    batch.windows.resize(batch.c * batch.b * batch.win);
    batch.theta0.resize(batch.b * batch.c);
    batch.targets.resize(nt * batch.b * batch.c);
    if (with_oracle) {
        batch.gv.resize(batch.b * batch.c);
        batch.ga.resize(batch.b * batch.c);
    }

    for (std::size_t s = 0; s < refs.size(); ++s) {
        const MotionSequence& seq = seqs[refs[s].seq];
        const SampleSet& set = sets[refs[s].seq];
        if (seq.n_channels() != batch.c || set.window_len != batch.win ||
            set.horizon_sec != batch.t_sec)
            throw ContractError("gather_batch: inconsistent sequences in one batch");
        const std::size_t start = set.starts[refs[s].sample];
        const std::size_t t0 = start + batch.win - 1;
        for (std::size_t ch = 0; ch < batch.c; ++ch)
            for (std::size_t k = 0; k < batch.win; ++k)
                batch.windows[(ch * batch.b + s) * batch.win + k] = seq.frame(start + k, ch);
        std::memcpy(&batch.theta0[s * batch.c], seq.frame_ptr(t0), batch.c * sizeof(double));
        for (std::size_t kt = 0; kt < nt; ++kt)
            std::memcpy(&batch.targets[(kt * batch.b + s) * batch.c],
                        seq.frame_ptr(t0 + set.horizon_frames[kt]), batch.c * sizeof(double));
        if (with_oracle) {
            std::memcpy(&batch.gv[s * batch.c], &set.gv[t0 * batch.c], batch.c * sizeof(double));
            std::memcpy(&batch.ga[s * batch.c], &set.ga[t0 * batch.c], batch.c * sizeof(double));
        }
    }
    return batch;
}

namespace {

// appendix statistics of per-channel spread, joint-major x,y,z
const double kVrhandsStd[42] = {
    0.34, 0.19, 5.71,   // J11
    0.60, 0.24, 7.76,   // J12
    0.52, 3.63, 16.94,  // J21
    0.02, 0.04, 23.19,  // J22
    0.25, 0.18, 14.63,  // J23
    0.12, 1.53, 19.17,  // J31
    0.03, 0.04, 25.62,  // J32
    1.33, 0.76, 16.06,  // J33
    0.17, 1.29, 21.43,  // J41
    0.31, 0.41, 23.99,  // J42
    0.85, 0.57, 13.58,  // J43
    0.87, 3.73, 24.04,  // J51
    0.62, 0.70, 21.55,  // J52
    0.54, 0.30, 13.71,  // J53
};

std::size_t finger_group(Layout layout, std::size_t joint) {
    if (layout == Layout::Vrhands14) return joint < 2 ? 0 : 1 + (joint - 2) / 3;
    return joint == 0 ? 0 : 1 + (joint - 1) / 4;  // wrist is its own group
}

struct SinusoidMix {
    std::vector<double> amp, freq, phase;

    double eval(double t) const {
        double v = 0.0;
        for (std::size_t k = 0; k < amp.size(); ++k)
            v += amp[k] * std::sin(2.0 * M_PI * freq[k] * t + phase[k]);
        return v;
    }
    double peak_jerk() const {
        double j = 0.0;
        for (std::size_t k = 0; k < amp.size(); ++k) {
            const double w = 2.0 * M_PI * freq[k];
            j += amp[k] * w * w * w;
        }
        return j;
    }
};

// unit-variance mix: sum of amp^2 / 2 == 1
SinusoidMix draw_mix(Rng& rng, std::size_t count, double fmax) {
    SinusoidMix m;
    double power = 0.0;
    const double fmin = std::min(std::max(0.05, fmax / 8.0), fmax);
    for (std::size_t k = 0; k < count; ++k) {
        m.freq.push_back(rng.uniform(fmin, fmax));
        m.phase.push_back(rng.uniform(0.0, 2.0 * M_PI));
        m.amp.push_back(rng.uniform(0.5, 1.0));
        power += m.amp.back() * m.amp.back() / 2.0;
    }
    const double scale = 1.0 / std::sqrt(power);
    for (double& a : m.amp) a *= scale;
    return m;
}

struct IntentTrack {
    std::vector<double> times, levels;
    double ramp = 0.3;

    double eval(double t) const {
        double v = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double u = (t - times[k]) / ramp;
            if (u <= 0) break;
            const double s = u >= 1.0 ? 1.0 : u * u * (3.0 - 2.0 * u);
            v += (levels[k] - v) * s;
        }
        return v;
    }
};

}  // namespace

SynthSpec SynthSpec::defaults(Layout layout, double rate_hz, double minutes, std::uint64_t seed) {
    SynthSpec s;
    s.layout = layout;
    s.rate_hz = rate_hz;
    s.minutes = minutes;
    s.seed = seed;
    if (layout == Layout::Vrhands14) {
        s.channel_std.assign(kVrhandsStd, kVrhandsStd + 42);
    } else {
        // positional keypoints in mm: quiet wrist, growing toward fingertips
        s.channel_std.assign(63, 0.0);
        for (std::size_t ch = 0; ch < 63; ++ch) {
            const std::size_t joint = ch / 3;
            s.channel_std[ch] = joint == 0 ? 2.0 : 4.0 + 3.0 * static_cast<double>((joint - 1) % 4 + 1);
        }
    }
    return s;
}

MotionSequence synth_generate(const SynthSpec& spec) {
    const HandSkeleton skel = build_skeleton(spec.layout);
    const std::size_t c = 3 * skel.joint_count();
    if (spec.rate_hz <= 0 || spec.minutes <= 0) throw SpecError("synth: rate and duration must be positive");
    if (spec.channel_std.size() != c)
        throw SpecError("synth: " + std::to_string(spec.channel_std.size()) +
                        " std targets for " + std::to_string(c) + " channels");
    for (double sd : spec.channel_std)
        if (sd < 0) throw SpecError("synth: negative std target");
    const bool any_motion =
        std::any_of(spec.channel_std.begin(), spec.channel_std.end(), [](double s) { return s > 0; });
    if (any_motion && (spec.sinusoids == 0 || spec.max_freq_hz <= 0))
        throw SpecError("synth: std targets require sinusoids >= 1 and max_freq_hz > 0");
    if (spec.max_freq_hz >= spec.rate_hz / 2)
        throw SpecError("synth: max_freq_hz must stay below the Nyquist rate");
    if (!(spec.coupling >= 0.0 && spec.coupling <= 1.0))
        throw SpecError("synth: coupling must lie in [0,1]");

    const auto n = static_cast<std::size_t>(std::llround(spec.minutes * 60.0 * spec.rate_hz));
    const double ts = 1.0 / spec.rate_hz;
    Rng rng(spec.seed);

    // draw order: finger latents, intents, then per-channel residuals
    const std::size_t fingers = 1 + finger_group(spec.layout, skel.joint_count() - 1);
    std::vector<SinusoidMix> latents;
    for (std::size_t f = 0; f < fingers; ++f)
        latents.push_back(draw_mix(rng, spec.sinusoids, spec.max_freq_hz));

    std::vector<IntentTrack> intents(fingers);
    if (spec.intent_rate_hz > 0) {
        double ramp = 0.3;
        if (spec.jerk_limit > 0) ramp = std::max(ramp, std::cbrt(24.0 / spec.jerk_limit));
        ramp = std::max(ramp, 2.0 * ts);
        for (std::size_t f = 0; f < fingers; ++f) {
            intents[f].ramp = ramp;
            double t = 0.0;
            while (true) {
                t += -std::log(1.0 - rng.uniform01()) / spec.intent_rate_hz;
                if (t >= spec.minutes * 60.0) break;
                intents[f].times.push_back(t);
                intents[f].levels.push_back(rng.uniform(-2.0, 2.0));
            }
        }
    }

    std::vector<SinusoidMix> residuals;
    residuals.reserve(c);
    for (std::size_t ch = 0; ch < c; ++ch)
        residuals.push_back(draw_mix(rng, spec.sinusoids, spec.max_freq_hz));

    if (spec.jerk_limit > 0) {
        for (std::size_t ch = 0; ch < c; ++ch) {
            const std::size_t f = finger_group(spec.layout, ch / 3);
            const double unit_jerk = std::sqrt(spec.coupling) * latents[f].peak_jerk() +
                                     std::sqrt(1.0 - spec.coupling) * residuals[ch].peak_jerk();
            if (spec.channel_std[ch] * unit_jerk > spec.jerk_limit)
                throw SpecError("synth: channel " + skel.channel_names()[ch] +
                                " violates the jerk limit; lower max_freq_hz or the std target");
        }
    }

    MotionSequence seq;
    seq.meta.ts_sec = ts;
    seq.meta.unit = spec.layout == Layout::Vrhands14 ? Unit::Degrees : Unit::Millimetres;
    seq.meta.channels = skel.channel_names();
    seq.timestamps_ms.resize(n);
    seq.frames.resize(n * c);
    const double wl = std::sqrt(spec.coupling);
    const double wr = std::sqrt(1.0 - spec.coupling);
    for (std::size_t i = 0; i < n; ++i)
        seq.timestamps_ms[i] = static_cast<double>(i) * (1000.0 / spec.rate_hz);

    std::vector<double> raw(n);
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double sd = spec.channel_std[ch];
        if (sd == 0.0) {
            for (std::size_t i = 0; i < n; ++i) seq.frames[i * c + ch] = 0.0;
            continue;
        }
        const std::size_t f = finger_group(spec.layout, ch / 3);
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) * ts;
            double v = wl * latents[f].eval(t) + wr * residuals[ch].eval(t);
            if (spec.intent_rate_hz > 0) v += wl * intents[f].eval(t);
            raw[i] = v;
            mean += v;
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (raw[i] - mean) * (raw[i] - mean);
        var /= static_cast<double>(n);
        const double scale = var > 0 ? sd / std::sqrt(var) : 0.0;
        for (std::size_t i = 0; i < n; ++i)
            seq.frames[i * c + ch] = mean + scale * (raw[i] - mean);
    }
    return seq;
}

// ---------------------------------------------------------------------------
// checkpoint container

namespace {

constexpr const char* kCkptMagic = "tagnn-checkpoint";
constexpr int kCkptVersion = 1;

struct ArrayEntry {
    std::string section, name, dtype;
    Shape shape;
    std::size_t offset = 0;

    std::size_t byte_size() const {
        std::size_t n = 1;
        for (auto e : shape) n *= e;
        return n * (dtype == "f64" ? 8 : 4);
    }
};

void write_section(std::ostream& os, const char* section, const ParamSet& ps, bool wide,
                   std::vector<char>& payload) {
    for (std::size_t i = 0; i < ps.count(); ++i) {
        const Array& a = ps.value(i);
        os << section << ' ' << ps.name(i) << ' ' << (wide ? "f64" : "f32") << ' ' << a.ndim();
        for (std::size_t d = 0; d < a.ndim(); ++d) os << ' ' << a.extent(d);
        os << ' ' << payload.size() << '\n';
        const std::size_t old = payload.size();
        if (wide) {
            payload.resize(old + a.numel() * 8);
            std::memcpy(payload.data() + old, a.data(), a.numel() * 8);
        } else {
            payload.resize(old + a.numel() * 4);
            for (std::size_t k = 0; k < a.numel(); ++k) {
                const float f = static_cast<float>(a[k]);
                std::memcpy(payload.data() + old + 4 * k, &f, 4);
            }
        }
    }
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path, bool wide) {
    std::ostringstream head;
    std::vector<char> payload;
    head << kCkptMagic << ' ' << kCkptVersion << '\n';
    const auto cfg_map = config_to_map(ckpt.cfg);
    head << "config " << cfg_map.size() << '\n';
    for (const auto& [k, v] : cfg_map) head << k << '=' << v << '\n';
    head << "meta " << ckpt.meta.size() << '\n';
    for (const auto& [k, v] : ckpt.meta) head << k << '=' << v << '\n';
    head << "arrays " << (ckpt.params.count() + ckpt.extra.count()) << '\n';
    write_section(head, "param", ckpt.params, wide, payload);
    write_section(head, "extra", ckpt.extra, true, payload);
    head << "payload " << payload.size() << '\n';

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write checkpoint '" + path + "'");
    const std::string h = head.str();
    f.write(h.data(), static_cast<std::streamsize>(h.size()));
    f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!f) throw IoError("short write to checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint '" + path + "'");
    std::string line;

    if (!std::getline(f, line)) throw IoError(path + ": empty checkpoint");
    {
        std::istringstream is(line);
        std::string magic;
        int version = -1;
        is >> magic >> version;
        if (magic != kCkptMagic) throw IoError(path + ": not a checkpoint file");
        if (version != kCkptVersion)
            throw IoError(path + ": unsupported checkpoint version " + std::to_string(version));
    }

    auto read_count = [&](const char* section) {
        if (!std::getline(f, line)) throw IoError(path + ": truncated manifest");
        std::istringstream is(line);
        std::string tag;
        std::size_t n = 0;
        is >> tag >> n;
        if (tag != section)
            throw IoError(path + ": expected '" + section + "' section, got '" + line + "'");
        return n;
    };

    Checkpoint ckpt;
    std::map<std::string, std::string> cfg_map;
    const std::size_t n_cfg = read_count("config");
    for (std::size_t i = 0; i < n_cfg; ++i) {
        if (!std::getline(f, line)) throw IoError(path + ": truncated config section");
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError(path + ": malformed config line '" + line + "'");
        cfg_map[line.substr(0, eq)] = line.substr(eq + 1);
    }
    ckpt.cfg = model_config_from_map(cfg_map);

    const std::size_t n_meta = read_count("meta");
    for (std::size_t i = 0; i < n_meta; ++i) {
        if (!std::getline(f, line)) throw IoError(path + ": truncated meta section");
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError(path + ": malformed meta line '" + line + "'");
        ckpt.meta[line.substr(0, eq)] = line.substr(eq + 1);
    }

    const std::size_t n_arrays = read_count("arrays");
    std::vector<ArrayEntry> entries(n_arrays);
    for (ArrayEntry& e : entries) {
        if (!std::getline(f, line)) throw IoError(path + ": truncated array table");
        std::istringstream is(line);
        std::size_t ndim = 0;
        is >> e.section >> e.name >> e.dtype >> ndim;
        for (std::size_t d = 0; d < ndim; ++d) {
            std::size_t ext = 0;
            is >> ext;
            e.shape.push_back(ext);
        }
        is >> e.offset;
        if (is.fail() || (e.dtype != "f32" && e.dtype != "f64") ||
            (e.section != "param" && e.section != "extra"))
            throw IoError(path + ": malformed array entry '" + line + "'");
    }

    std::size_t payload_bytes = 0;
    {
        if (!std::getline(f, line)) throw IoError(path + ": missing payload section");
        std::istringstream is(line);
        std::string tag;
        is >> tag >> payload_bytes;
        if (tag != "payload") throw IoError(path + ": missing payload section");
    }
    std::vector<char> payload(payload_bytes);
    f.read(payload.data(), static_cast<std::streamsize>(payload_bytes));
    if (static_cast<std::size_t>(f.gcount()) != payload_bytes)
        throw IoError(path + ": truncated payload (" + std::to_string(f.gcount()) + " of " +
                      std::to_string(payload_bytes) + " bytes)");

    // validate the shape of every stored parameter against the config echo
    // before touching the payload; an empty container is valid (absent arrays
    // surface as named errors at first use instead)
    TagnnModel model(ckpt.cfg);
    Rng zero(0);
    ParamSet expected = model.init_params(zero);
    for (const ArrayEntry& e : entries) {
        if (e.section != "param") continue;
        if (!expected.contains(e.name))
            throw IoError(path + ": array '" + e.name + "' does not belong to this config");
        if (expected.at(e.name).shape() != e.shape)
            throw IoError(path + ": array '" + e.name + "' has shape " + shape_str(e.shape) +
                          ", config requires " + expected.at(e.name).shape_str());
    }

    for (const ArrayEntry& e : entries) {
        if (e.offset + e.byte_size() > payload_bytes)
            throw IoError(path + ": array '" + e.name + "' overruns the payload");
        std::size_t numel = 1;
        for (auto d : e.shape) numel *= d;
        Array a(e.shape);
        if (e.dtype == "f64") {
            std::memcpy(a.data(), payload.data() + e.offset, numel * 8);
        } else {
            for (std::size_t k = 0; k < numel; ++k) {
                float v;
                std::memcpy(&v, payload.data() + e.offset + 4 * k, 4);
                a[k] = static_cast<double>(v);
            }
        }
        (e.section == "param" ? ckpt.params : ckpt.extra).add(e.name, std::move(a));
    }
    return ckpt;
}

}  // namespace tagnn
