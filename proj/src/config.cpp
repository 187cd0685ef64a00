#include "bfly/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bfly {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& origin, std::size_t line_no, const std::string& msg) {
  throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": " + msg);
}

double parse_double(const std::string& origin, std::size_t line_no, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) fail(origin, line_no, "trailing junk in number '" + v + "'");
    return x;
  } catch (const std::invalid_argument&) {
    fail(origin, line_no, "expected a number, got '" + v + "'");
  } catch (const std::out_of_range&) {
    fail(origin, line_no, "number out of range: '" + v + "'");
  }
}

std::size_t parse_size(const std::string& origin, std::size_t line_no, const std::string& v) {
  const double x = parse_double(origin, line_no, v);
  if (x < 0 || x != static_cast<double>(static_cast<std::size_t>(x)))
    fail(origin, line_no, "expected a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(x);
}

bool parse_bool(const std::string& origin, std::size_t line_no, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  fail(origin, line_no, "expected a boolean (0/1/true/false), got '" + v + "'");
}

std::vector<double> parse_list(const std::string& origin, std::size_t line_no,
                               const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(origin, line_no, item));
  }
  if (out.empty()) fail(origin, line_no, "expected a comma-separated list of numbers");
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::stringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, line_no, "empty key");
    if (value.empty()) fail(origin, line_no, "empty value for key '" + key + "'");

    if (key == "seed") cfg.train.seed = parse_size(origin, line_no, value);
    else if (key == "n") cfg.train.n = parse_size(origin, line_no, value);
    else if (key == "hop") cfg.train.hop = parse_size(origin, line_no, value);
    else if (key == "d") cfg.train.d = parse_size(origin, line_no, value);
    else if (key == "learning_rate") cfg.train.learning_rate = parse_double(origin, line_no, value);
    else if (key == "beta1") cfg.train.beta1 = parse_double(origin, line_no, value);
    else if (key == "beta2") cfg.train.beta2 = parse_double(origin, line_no, value);
    else if (key == "adam_epsilon") cfg.train.adam_epsilon = parse_double(origin, line_no, value);
    else if (key == "batch_size") cfg.train.batch_size = parse_size(origin, line_no, value);
    else if (key == "max_steps") cfg.train.max_steps = parse_size(origin, line_no, value);
    else if (key == "alpha") cfg.train.loss.alpha = parse_double(origin, line_no, value);
    else if (key == "lambda") cfg.train.loss.lambda = parse_double(origin, line_no, value);
    else if (key == "loss_epsilon") cfg.train.loss.epsilon = parse_double(origin, line_no, value);
    else if (key == "snr_list") cfg.train.snr_list = parse_list(origin, line_no, value);
    else if (key == "crop_seconds") cfg.train.crop_seconds = parse_double(origin, line_no, value);
    else if (key == "train_window_analysis")
      cfg.train.trainable.window_analysis = parse_bool(origin, line_no, value);
    else if (key == "train_window_synthesis")
      cfg.train.trainable.window_synthesis = parse_bool(origin, line_no, value);
    else if (key == "train_fft_forward")
      cfg.train.trainable.fft_forward = parse_bool(origin, line_no, value);
    else if (key == "train_fft_inverse")
      cfg.train.trainable.fft_inverse = parse_bool(origin, line_no, value);
    else if (key == "manifest") cfg.manifest = value;
    else if (key == "checkpoint_out") cfg.checkpoint_out = value;
    else if (key == "loss_csv_out") cfg.loss_csv_out = value;
    else if (key == "premixed") cfg.premixed = parse_bool(origin, line_no, value);
    else if (key == "ssnr_frame_len") cfg.ssnr.frame_len = parse_size(origin, line_no, value);
    else if (key == "ssnr_hop") cfg.ssnr.hop = parse_size(origin, line_no, value);
    else if (key == "ssnr_floor_db") cfg.ssnr.floor_db = parse_double(origin, line_no, value);
    else if (key == "ssnr_ceil_db") cfg.ssnr.ceil_db = parse_double(origin, line_no, value);
    else fail(origin, line_no, "unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace bfly
