#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tagnn/skeleton.hpp"

namespace tagnn {

// Architecture hyperparameters. Defaults reproduce the published VRHands
// configuration (1,469,822 parameters).
struct ModelConfig {
    Layout layout = Layout::Vrhands14;
    std::size_t window_len = 16;
    std::size_t ma_window = 10;
    double gaussian_sigma = 3.0;
    std::size_t extractor_hidden = 32;
    std::size_t encoder_hidden = 32;
    // output widths of the encoder head; input is 2*encoder_hidden
    std::vector<std::size_t> encoder_head_widths = {64, 128, 32, 1};
    double dropout_rate = 0.3;
    // output widths of the graph decoder; input feature width is 3
    std::vector<std::size_t> decoder_widths = {32, 64, 128, 128, 64, 32, 1};
    std::vector<double> horizons_ms = {40, 80, 120, 160, 200, 240, 280, 320, 360, 400};
    std::vector<double> horizon_weights = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    int taylor_order = 2;
    bool use_kfe = true;
    bool use_gcn = true;
    bool raw_adjacency = false;

    std::size_t joints() const { return layout == Layout::Vrhands14 ? 14 : 21; }
    std::size_t channels() const { return 3 * joints(); }

    void validate() const;
};

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 2048;
    double learning_rate = 0.001;
    double lr_decay = 0.95;
    std::size_t lr_decay_interval = 20;
    double weight_decay = 0.0;
    std::uint64_t seed = 1;
    bool deterministic = false;
    std::size_t stride = 1;      // training window stride
    std::size_t val_stride = 1;  // validation window stride

    void validate() const;
};

struct Config {
    ModelConfig model;
    TrainConfig train;
};

// Flat key=value text document; '#' starts a comment. Unknown keys are
// configuration errors. Missing keys keep their defaults.
Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);
void apply_config_line(Config& cfg, const std::string& key, const std::string& value);

std::map<std::string, std::string> config_to_map(const ModelConfig& cfg);
ModelConfig model_config_from_map(const std::map<std::string, std::string>& kv);

std::string format_double(double v);  // shortest round-trippable decimal

}  // namespace tagnn
