#pragma once

#include <string>

#include "bfly/metrics.hpp"
#include "bfly/training.hpp"

namespace bfly {

// Everything a run needs; every field has a default so a config file only
// states what it changes. Line format: "key = value", '#' comments.
struct RunConfig {
  TrainConfig train;
  SsnrConfig ssnr;
  std::string manifest;
  std::string checkpoint_out = "checkpoint.bfly";
  std::string loss_csv_out = "loss.csv";
  bool premixed = false;
};

// Unknown keys and malformed lines are rejected with the offending line
// number in the message.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace bfly
