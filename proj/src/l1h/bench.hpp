#pragma once

#include "l1h/operators.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace l1h::bench {

// Observes every full application of A and A^T made through the operator
// interface. Partial products read matrix() directly and stay invisible.
class CountingMatrix : public MatrixOperator {
 public:
  explicit CountingMatrix(const Matrix& a) : MatrixOperator(a) {}

  Vector apply(const Vector& x) const override;
  Vector apply_sparse(const Vector& x, const IndexList& support) const override;
  Vector apply_transpose(const Vector& r) const override;

  std::uint64_t forward() const { return forward_; }
  std::uint64_t adjoint() const { return adjoint_; }
  // Applications of A^T A, with A or A^T alone counting one half.
  double products() const { return 0.5 * static_cast<double>(forward_ + adjoint_); }
  void reset() { forward_ = adjoint_ = 0; }

 private:
  mutable std::uint64_t forward_ = 0;
  mutable std::uint64_t adjoint_ = 0;
};

enum class Kind { DynamicXBpdn, DynamicXDs, DynamicSeqBpdn, DynamicSeqDs, Decode, RobustDecode };
enum class Signal { Spikes, Blocks, PcwPoly, Pgm };

const char* kind_name(Kind kind);
Kind parse_kind(const std::string& name);
const char* signal_name(Signal signal);
Signal parse_signal(const std::string& name);

struct ExperimentConfig {
  Kind kind = Kind::DynamicXBpdn;
  Signal signal = Signal::Spikes;
  std::string image;  // PGM path for Signal::Pgm
  Index n = 256;
  Index m = 128;
  Index k = 25;          // spikes, or zeroed codeword entries for decoding
  Index p = 1;           // rows added per trial
  double lambda = 0.1;   // tau = lambda * ||A^T y||_inf for the BPDN/DS kinds
  double tau = 0.01;     // fixed tau for robust decoding
  double sigma = 0.01;
  double corruption = 0.1;  // Bernoulli rate on new codeword entries
  Index trials = 10;
  std::uint64_t seed = 1;
  Index jobs = 1;
  bool timing = false;  // wall-clock columns; off keeps reports bit-stable
  std::string label;
};

// Throws Config naming the offending field.
void validate(const ExperimentConfig& cfg);

struct TrialRecord {
  Index trial = 0;
  std::uint64_t seed = 0;
  Index warm_steps = 0;
  Index cold_steps = 0;
  double warm_products = 0.0;  // trace self-report
  double cold_products = 0.0;
  double warm_counted = 0.0;   // CountingMatrix observation
  double cold_counted = 0.0;
  double warm_seconds = 0.0;
  double cold_seconds = 0.0;
  double warm_cold_gap = 0.0;  // l_inf distance of the two final solutions
  double final_error = 0.0;    // against the ground truth of the instance
  bool kkt_pass = false;
  bool counts_agree = true;
  bool lucky_breakdown = false;
  bool flagged = false;
  std::string note;
};

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> records;
  Moments warm_products, cold_products, warm_steps, cold_steps, warm_seconds, cold_seconds, final_error;
  Index flagged = 0;

  bool ok() const { return flagged == 0; }
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);
TrialRecord run_trial(const ExperimentConfig& cfg, Index trial);
void summarize(ExperimentReport& report);

// Preset table rows. scale is "full" or "desk"; trials <= 0
// keeps the preset's default count.
std::vector<ExperimentConfig> table_preset(const std::string& table, const std::string& scale, Index trials,
                                           std::uint64_t seed);

// Encode, corrupt and decode one random message, optionally followed by a
// block of extra rows folded in by the warm update.
struct PipelineConfig {
  bool robust = false;
  Index n = 64;
  Index m = 128;
  Index errors = 25;   // zeroed codeword entries
  Index block = 0;     // rows appended after the initial decode
  double noise = 0.0;
  double tau = 0.01;   // robust decoding only
  std::uint64_t seed = 1;
};

struct PipelineResult {
  double max_error = 0.0;  // ||x_hat - x||_inf
  // Exact decoding: max_error <= 1e-6. Robust: max_error <= max(1e-6, 10 * noise).
  bool recovered = false;
  bool kkt_pass = false;
  bool lucky_breakdown = false;
  Index init_steps = 0;
  Index add_steps = 0;
  double init_products = 0.0;
  double add_products = 0.0;
  Index error_support = 0;  // size of the estimated error support
};

PipelineResult decode_pipeline(const PipelineConfig& cfg);
nlohmann::json to_json(const PipelineResult& r);

nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const ExperimentReport& report);
nlohmann::json to_json(const std::vector<ExperimentReport>& reports);
// Aggregate rows: method, lambda, mean nProdAtA, mean time, then p and mean steps.
std::string to_csv(const std::vector<ExperimentReport>& reports);

}  // namespace l1h::bench
