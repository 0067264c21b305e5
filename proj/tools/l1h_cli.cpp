// Command-line front end. Talks to the solvers only through the C API.
#include "l1homotopy.h"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitAcceptance = 3;

// Carries a C API failure up to main.
struct Failure {
  l1h_status status;
  std::string message;
};

void check(l1h_status st, const std::string& context) {
  if (st != L1H_OK) throw Failure{st, context + ": " + l1h_status_name(st) + ": " + l1h_last_error()};
}

int exit_code_for(l1h_status st) {
  // Bad flags, bad values and unreadable inputs are the caller's to fix.
  return st == L1H_ERR_CONFIG || st == L1H_ERR_IO ? kExitConfig : kExitSolver;
}

struct MatrixDeleter {
  void operator()(l1h_matrix* m) const { l1h_matrix_free(m); }
};
struct SessionDeleter {
  void operator()(l1h_session* s) const { l1h_session_free(s); }
};
struct ReportDeleter {
  void operator()(l1h_report* r) const { l1h_report_free(r); }
};
using MatrixPtr = std::unique_ptr<l1h_matrix, MatrixDeleter>;
using SessionPtr = std::unique_ptr<l1h_session, SessionDeleter>;
using ReportPtr = std::unique_ptr<l1h_report, ReportDeleter>;

MatrixPtr read_matrix(const std::string& path) {
  l1h_matrix* m = nullptr;
  check(l1h_matrix_read(path.c_str(), &m), "reading " + path);
  return MatrixPtr(m);
}

std::string take_string(char* s) {
  std::string out(s ? s : "");
  l1h_string_free(s);
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    check(l1h_write_file(path.c_str(), text.data(), text.size()), "writing " + path);
  }
}

std::string vector_csv(const l1h_matrix* m) {
  std::vector<double> values(l1h_matrix_rows(m) * l1h_matrix_cols(m));
  check(l1h_matrix_copy(m, values.data()), "copying solution");
  std::ostringstream out;
  out.precision(17);
  for (double v : values) out << v << '\n';
  return out.str();
}

std::string stats_line(const l1h_session* s) {
  l1h_run_stats st{};
  check(l1h_session_stats(s, &st), "reading statistics");
  std::ostringstream out;
  out << "steps=" << st.steps << " nProdAtA=" << st.products << " support=" << st.support << " tau=" << st.tau
      << " kkt=" << (st.kkt_pass ? "pass" : "FAIL") << '\n';
  return out.str();
}

// Seed from the flag, else L1H_SEED, else 1.
uint64_t resolve_seed(const std::string& flag) {
  std::string text = flag;
  if (text.empty()) {
    const char* env = std::getenv("L1H_SEED");
    text = env ? env : "1";
  }
  uint64_t seed = 0;
  check(l1h_parse_seed(text.c_str(), &seed), "seed");
  return seed;
}

void output_solution(const l1h_session* s, const std::string& out, bool binary) {
  l1h_matrix* x = nullptr;
  check(l1h_session_solution(s, &x), "reading solution");
  MatrixPtr xp(x);
  if (out.empty()) {
    std::cout << vector_csv(x);
  } else {
    check(l1h_matrix_write(x, out.c_str(), binary ? 1 : 0), "writing " + out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic l1 homotopy solvers"};
  app.require_subcommand(1);

  // solve
  std::string program, matrix_path, rhs_path, out_path, state_out;
  double tau_ratio = 0.0;
  bool binary = false;
  auto* solve = app.add_subcommand("solve", "Solve one BPDN or Dantzig selector instance from scratch");
  solve->add_option("program", program, "bpdn or ds")->required()->check(CLI::IsMember({"bpdn", "ds"}));
  solve->add_option("--matrix", matrix_path, "Measurement matrix (CSV or binary)")->required();
  solve->add_option("--rhs", rhs_path, "Measurement vector")->required();
  solve->add_option("--tau-ratio", tau_ratio, "tau as a fraction of ||A^T y||_inf")->required();
  solve->add_option("--out", out_path, "Solution file (stdout if omitted)");
  solve->add_option("--state", state_out, "Save the solved state for later updates");
  solve->add_flag("--binary", binary, "Write the solution in the binary layout");

  // update
  std::string mode, state_in, new_rhs, new_rows, new_values;
  std::optional<std::size_t> remove_row;
  auto* update = app.add_subcommand("update", "Warm-start a saved state on new data");
  update->add_option("mode", mode, "dynamic-x or dynamic-seq")
      ->required()
      ->check(CLI::IsMember({"dynamic-x", "dynamic-seq"}));
  update->add_option("--state", state_in, "State written by solve or a previous update")->required();
  auto* rhs_opt = update->add_option("--new-rhs", new_rhs, "dynamic-x: new measurement vector");
  auto* rows_opt = update->add_option("--new-row", new_rows, "dynamic-seq: rows to append (one per line)");
  update->add_option("--new-values", new_values, "dynamic-seq: measured values of the appended rows");
  update->add_option("--remove-row", remove_row, "dynamic-seq: drop this row instead (BPDN only)");
  update->add_option("--out", out_path, "Solution file (stdout if omitted)");
  update->add_option("--state-out", state_out, "Save the updated state (the input state is never modified)");
  update->add_flag("--binary", binary, "Write the solution in the binary layout");
  rhs_opt->excludes(rows_opt);

  // decode
  std::string decode_mode, seed_text, report_path;
  l1h_decode_config dcfg;
  l1h_decode_config_init(&dcfg);
  auto* decode = app.add_subcommand("decode", "Encode, corrupt and decode a random message");
  decode->add_option("mode", decode_mode, "run or robust")->required()->check(CLI::IsMember({"run", "robust"}));
  decode->add_option("--n", dcfg.n, "Message length")->required();
  decode->add_option("--m", dcfg.m, "Codeword length")->required();
  decode->add_option("--errors", dcfg.errors, "Zeroed codeword entries")->required();
  decode->add_option("--noise", dcfg.noise, "Noise standard deviation");
  decode->add_option("--block", dcfg.block, "Rows appended after the initial decode");
  decode->add_option("--tau", dcfg.tau, "robust: l1 weight");
  decode->add_option("--seed", seed_text, "Seed (decimal or 0x hex; default $L1H_SEED or 1)");
  decode->add_option("--report", report_path, "JSON result file (stdout if omitted)");

  // bench
  std::string table, scale = "desk", csv_path;
  long trials = 0, jobs = 1;
  bool timing = false;
  l1h_experiment_config ecfg;
  l1h_experiment_config_init(&ecfg);
  std::string kind = ecfg.kind, signal = ecfg.signal, image;
  auto* bench = app.add_subcommand("bench", "Run a table preset or a custom experiment");
  bench->add_option("table", table, "tableI, tableII, tableIII or custom")
      ->required()
      ->check(CLI::IsMember({"tableI", "tableII", "tableIII", "custom"}));
  bench->add_option("--scale", scale, "full or desk")->check(CLI::IsMember({"full", "desk"}));
  bench->add_option("--trials", trials, "Trials per row (preset default if omitted)");
  bench->add_option("--seed", seed_text, "Seed (decimal or 0x hex; default $L1H_SEED or 1)");
  bench->add_option("--report", report_path, "JSON report file (stdout if omitted)");
  bench->add_option("--csv", csv_path, "Aggregate CSV file");
  bench->add_option("--jobs", jobs, "Parallel trials")->check(CLI::PositiveNumber);
  bench->add_flag("--timing", timing, "Record wall-clock columns (reports stop being bit-stable)");
  bench->add_option("--kind", kind, "custom: experiment kind");
  bench->add_option("--signal", signal, "custom: spikes, blocks, pcwpoly or slices");
  bench->add_option("--image", image, "custom: PGM image for slices");
  bench->add_option("--n", ecfg.n, "custom: signal length");
  bench->add_option("--m", ecfg.m, "custom: measurements");
  bench->add_option("--k", ecfg.k, "custom: spikes or zeroed entries");
  bench->add_option("--p", ecfg.p, "custom: rows added per trial");
  bench->add_option("--lambda", ecfg.lambda, "custom: tau ratio");
  bench->add_option("--tau", ecfg.tau, "custom: robust decoding tau");
  bench->add_option("--sigma", ecfg.sigma, "custom: noise standard deviation");
  bench->add_option("--corruption", ecfg.corruption, "custom: corruption rate of new entries");

  // selftest
  l1h_selftest_counts counts{50, 30, 30, 80};
  auto* selftest = app.add_subcommand("selftest", "Run the oracle equivalence and certificate suites");
  selftest->add_option("--seed", seed_text, "Seed (decimal or 0x hex; default $L1H_SEED or 1)");
  selftest->add_option("--report", report_path, "JSON summary file (stdout if omitted)");
  selftest->add_option("--bpdn", counts.bpdn, "BPDN oracle instances")->check(CLI::PositiveNumber);
  selftest->add_option("--ds", counts.ds, "Dantzig oracle instances")->check(CLI::PositiveNumber);
  selftest->add_option("--decode", counts.decode, "Decoding oracle instances")->check(CLI::PositiveNumber);
  selftest->add_option("--kkt", counts.kkt, "Certificate instances")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve) {
      const MatrixPtr a = read_matrix(matrix_path);
      const MatrixPtr y = read_matrix(rhs_path);
      l1h_session* raw = nullptr;
      check(l1h_solve(program == "bpdn" ? L1H_BPDN : L1H_DANTZIG, a.get(), y.get(), tau_ratio, &raw), "solve");
      const SessionPtr s(raw);
      output_solution(s.get(), out_path, binary);
      if (!state_out.empty()) check(l1h_session_save(s.get(), state_out.c_str()), "saving " + state_out);
      std::cerr << stats_line(s.get());
    } else if (*update) {
      l1h_session* raw = nullptr;
      check(l1h_session_load(state_in.c_str(), &raw), "loading " + state_in);
      const SessionPtr s(raw);
      if (mode == "dynamic-x") {
        if (new_rhs.empty()) throw Failure{L1H_ERR_CONFIG, "update dynamic-x: --new-rhs is required"};
        const MatrixPtr y = read_matrix(new_rhs);
        check(l1h_session_update_signal(s.get(), y.get()), "update");
      } else if (remove_row) {
        check(l1h_session_remove_row(s.get(), *remove_row), "update");
      } else {
        if (new_rows.empty() || new_values.empty())
          throw Failure{L1H_ERR_CONFIG, "update dynamic-seq: --new-row and --new-values are required"};
        const MatrixPtr b = read_matrix(new_rows);
        const MatrixPtr w = read_matrix(new_values);
        check(l1h_session_add_rows(s.get(), b.get(), w.get()), "update");
      }
      output_solution(s.get(), out_path, binary);
      if (!state_out.empty()) check(l1h_session_save(s.get(), state_out.c_str()), "saving " + state_out);
      std::cerr << stats_line(s.get());
    } else if (*decode) {
      dcfg.robust = decode_mode == "robust" ? 1 : 0;
      dcfg.seed = resolve_seed(seed_text);
      l1h_decode_result r{};
      check(l1h_decode_run(&dcfg, &r), "decode");
      std::ostringstream out;
      out.precision(17);
      out << "{\n  \"recovered\": " << (r.recovered ? "true" : "false") << ",\n  \"max_error\": " << r.max_error
          << ",\n  \"kkt_pass\": " << (r.kkt_pass ? "true" : "false")
          << ",\n  \"lucky_breakdown\": " << (r.lucky_breakdown ? "true" : "false")
          << ",\n  \"init_steps\": " << r.init_steps << ",\n  \"init_nProdAtA\": " << r.init_products
          << ",\n  \"add_steps\": " << r.add_steps << ",\n  \"add_nProdAtA\": " << r.add_products
          << ",\n  \"error_support\": " << r.error_support << "\n}\n";
      emit(out.str(), report_path);
    } else if (*bench) {
      const uint64_t seed = resolve_seed(seed_text);
      l1h_report* raw = nullptr;
      if (table == "custom") {
        ecfg.kind = kind.c_str();
        ecfg.signal = signal.c_str();
        ecfg.image = image.empty() ? nullptr : image.c_str();
        ecfg.trials = trials > 0 ? trials : ecfg.trials;
        ecfg.seed = seed;
        ecfg.jobs = jobs;
        ecfg.timing = timing ? 1 : 0;
        check(l1h_bench_run(&ecfg, &raw), "bench");
      } else {
        check(l1h_bench_table(table.c_str(), scale.c_str(), trials, seed, jobs, timing ? 1 : 0, &raw), "bench");
      }
      const ReportPtr report(raw);
      char* json = nullptr;
      check(l1h_report_json(report.get(), &json), "report");
      emit(take_string(json), report_path);
      if (!csv_path.empty()) {
        char* csv = nullptr;
        check(l1h_report_csv(report.get(), &csv), "report");
        emit(take_string(csv), csv_path);
      }
      for (std::size_t i = 0; i < l1h_report_size(report.get()); ++i) {
        l1h_experiment_summary sum{};
        check(l1h_report_summary(report.get(), i, &sum), "report");
        std::cerr << "n=" << sum.n << " m=" << sum.m << " p=" << sum.p << " lambda=" << sum.lambda
                  << " warm nProdAtA=" << sum.warm_products << " cold nProdAtA=" << sum.cold_products
                  << " warm steps=" << sum.warm_steps << " cold steps=" << sum.cold_steps
                  << " flagged=" << sum.flagged << "/" << sum.trials << '\n';
      }
      if (!l1h_report_ok(report.get())) {
        std::cerr << "bench: flagged trials present\n";
        return kExitAcceptance;
      }
    } else if (*selftest) {
      const uint64_t seed = resolve_seed(seed_text);
      int passed = 0;
      char* summary = nullptr;
      check(l1h_selftest(&counts, seed, &passed, &summary), "selftest");
      emit(take_string(summary), report_path);
      std::cerr << "selftest: " << (passed ? "pass" : "FAIL") << '\n';
      if (!passed) return kExitAcceptance;
    }
  } catch (const Failure& f) {
    std::cerr << f.message << '\n';
    return exit_code_for(f.status);
  }
  return kExitOk;
}
