#include "l1homotopy.h"

#include "l1h/bench.hpp"
#include "l1h/error.hpp"
#include "l1h/matrix_io.hpp"
#include "l1h/problems.hpp"
#include "l1h/selftest.hpp"
#include "l1h/session.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct l1h_matrix {
  l1h::Matrix m;
};

struct l1h_session {
  l1h::Session s;
};

struct l1h_report {
  std::vector<l1h::bench::ExperimentReport> reports;
};

namespace {

thread_local std::string last_error;

l1h_status fail(l1h_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body and converts exceptions into status codes.
template <typename F>
l1h_status guarded(F&& body) {
  try {
    body();
    return L1H_OK;
  } catch (const l1h::Error& e) {
    return fail(static_cast<l1h_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(L1H_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(L1H_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(L1H_ERR_INTERNAL, "unknown failure");
  }
}

void require(bool ok, const char* what) {
  if (!ok) l1h::raise(l1h::ErrorCode::InvalidArgument, what);
}

l1h::Vector as_vector(const l1h_matrix* v, const char* name) {
  require(v != nullptr, name);
  if (v->m.cols() != 1 && v->m.rows() != 1 && v->m.size() != 0)
    l1h::raise(l1h::ErrorCode::InvalidArgument, std::string(name) + " must have one row or one column");
  return Eigen::Map<const l1h::Vector>(v->m.data(), v->m.size());
}

l1h::Program program_of(l1h_program p) {
  if (p == L1H_BPDN) return l1h::Program::Bpdn;
  if (p == L1H_DANTZIG) return l1h::Program::Ds;
  l1h::raise(l1h::ErrorCode::Config, "unknown program");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

l1h_matrix* wrap(l1h::Matrix m) { return new l1h_matrix{std::move(m)}; }

}  // namespace

extern "C" {

const char* l1h_status_name(l1h_status status) {
  if (status == L1H_OK) return "Ok";
  if (status == L1H_ERR_INTERNAL) return "Internal";
  if (status >= L1H_ERR_CONFIG && status <= L1H_ERR_NO_CERTIFIED_SOLUTION)
    return l1h::error_code_name(static_cast<l1h::ErrorCode>(static_cast<int>(status)));
  return "Unknown";
}

const char* l1h_last_error(void) { return last_error.c_str(); }

const char* l1h_version(void) { return "1.0.0"; }

void l1h_string_free(char* s) { std::free(s); }

l1h_status l1h_matrix_new(size_t rows, size_t cols, const double* data, l1h_matrix** out) {
  return guarded([&] {
    require(out != nullptr, "output handle is null");
    l1h::Matrix m = l1h::Matrix::Zero(static_cast<l1h::Index>(rows), static_cast<l1h::Index>(cols));
    if (data) {
      for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) m(static_cast<l1h::Index>(i), static_cast<l1h::Index>(j)) = data[i * cols + j];
    }
    *out = wrap(std::move(m));
  });
}

l1h_status l1h_matrix_read(const char* path, l1h_matrix** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = wrap(l1h::read_matrix(path));
  });
}

l1h_status l1h_matrix_write(const l1h_matrix* m, const char* path, int binary) {
  return guarded([&] {
    require(m && path, "null argument");
    if (binary) {
      l1h::write_matrix_binary(path, m->m);
    } else {
      l1h::write_matrix_csv(path, m->m);
    }
  });
}

size_t l1h_matrix_rows(const l1h_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }

size_t l1h_matrix_cols(const l1h_matrix* m) { return m ? static_cast<size_t>(m->m.cols()) : 0; }

l1h_status l1h_matrix_copy(const l1h_matrix* m, double* out) {
  return guarded([&] {
    require(m && out, "null argument");
    const auto cols = static_cast<size_t>(m->m.cols());
    for (l1h::Index i = 0; i < m->m.rows(); ++i)
      for (l1h::Index j = 0; j < m->m.cols(); ++j) out[static_cast<size_t>(i) * cols + static_cast<size_t>(j)] = m->m(i, j);
  });
}

void l1h_matrix_free(l1h_matrix* m) { delete m; }

l1h_status l1h_solve(l1h_program program, const l1h_matrix* a, const l1h_matrix* y, double tau_ratio,
                     l1h_session** out) {
  return guarded([&] {
    require(a && out, "null argument");
    *out = new l1h_session{l1h::Session::solve_ratio(program_of(program), a->m, as_vector(y, "rhs"), tau_ratio)};
  });
}

l1h_status l1h_solve_tau(l1h_program program, const l1h_matrix* a, const l1h_matrix* y, double tau,
                         l1h_session** out) {
  return guarded([&] {
    require(a && out, "null argument");
    if (!(tau > 0.0)) l1h::raise(l1h::ErrorCode::Config, "tau must be positive");
    *out = new l1h_session{l1h::Session::solve(program_of(program), a->m, as_vector(y, "rhs"), tau)};
  });
}

l1h_status l1h_session_update_signal(l1h_session* s, const l1h_matrix* y_new) {
  return guarded([&] {
    require(s != nullptr, "null session");
    s->s.update_signal(as_vector(y_new, "new rhs"));
  });
}

l1h_status l1h_session_add_rows(l1h_session* s, const l1h_matrix* b, const l1h_matrix* w) {
  return guarded([&] {
    require(s && b, "null argument");
    s->s.add_rows(b->m, as_vector(w, "row values"));
  });
}

l1h_status l1h_session_remove_row(l1h_session* s, size_t row) {
  return guarded([&] {
    require(s != nullptr, "null session");
    s->s.remove_row(static_cast<l1h::Index>(row));
  });
}

l1h_status l1h_session_solution(const l1h_session* s, l1h_matrix** x_out) {
  return guarded([&] {
    require(s && x_out, "null argument");
    *x_out = wrap(s->s.x());
  });
}

l1h_status l1h_session_dual(const l1h_session* s, l1h_matrix** lambda_out) {
  return guarded([&] {
    require(s && lambda_out, "null argument");
    if (s->s.program() != l1h::Program::Ds) l1h::raise(l1h::ErrorCode::Config, "only Dantzig sessions carry a dual");
    *lambda_out = wrap(s->s.lambda());
  });
}

l1h_status l1h_session_stats(const l1h_session* s, l1h_run_stats* out) {
  return guarded([&] {
    require(s && out, "null argument");
    out->steps = static_cast<long>(s->s.last_trace().iterations());
    out->products = s->s.last_trace().products;
    out->support = s->s.support().size();
    out->tau = s->s.tau();
    out->kkt_pass = s->s.kkt().pass ? 1 : 0;
  });
}

l1h_status l1h_session_save(const l1h_session* s, const char* path) {
  return guarded([&] {
    require(s && path, "null argument");
    s->s.save(path);
  });
}

l1h_status l1h_session_load(const char* path, l1h_session** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new l1h_session{l1h::Session::load(path)};
  });
}

void l1h_session_free(l1h_session* s) { delete s; }

void l1h_decode_config_init(l1h_decode_config* cfg) {
  if (!cfg) return;
  const l1h::bench::PipelineConfig d;
  cfg->robust = d.robust ? 1 : 0;
  cfg->n = static_cast<size_t>(d.n);
  cfg->m = static_cast<size_t>(d.m);
  cfg->errors = static_cast<size_t>(d.errors);
  cfg->block = static_cast<size_t>(d.block);
  cfg->noise = d.noise;
  cfg->tau = d.tau;
  cfg->seed = d.seed;
}

l1h_status l1h_decode_run(const l1h_decode_config* cfg, l1h_decode_result* out) {
  return guarded([&] {
    require(cfg && out, "null argument");
    l1h::bench::PipelineConfig c;
    c.robust = cfg->robust != 0;
    c.n = static_cast<l1h::Index>(cfg->n);
    c.m = static_cast<l1h::Index>(cfg->m);
    c.errors = static_cast<l1h::Index>(cfg->errors);
    c.block = static_cast<l1h::Index>(cfg->block);
    c.noise = cfg->noise;
    c.tau = cfg->tau;
    c.seed = cfg->seed;
    const l1h::bench::PipelineResult r = l1h::bench::decode_pipeline(c);
    out->max_error = r.max_error;
    out->recovered = r.recovered;
    out->kkt_pass = r.kkt_pass;
    out->lucky_breakdown = r.lucky_breakdown;
    out->init_steps = static_cast<long>(r.init_steps);
    out->add_steps = static_cast<long>(r.add_steps);
    out->init_products = r.init_products;
    out->add_products = r.add_products;
    out->error_support = static_cast<size_t>(r.error_support);
  });
}

void l1h_experiment_config_init(l1h_experiment_config* cfg) {
  if (!cfg) return;
  const l1h::bench::ExperimentConfig d;
  cfg->kind = l1h::bench::kind_name(d.kind);
  cfg->signal = l1h::bench::signal_name(d.signal);
  cfg->image = nullptr;
  cfg->n = static_cast<size_t>(d.n);
  cfg->m = static_cast<size_t>(d.m);
  cfg->k = static_cast<size_t>(d.k);
  cfg->p = static_cast<size_t>(d.p);
  cfg->lambda = d.lambda;
  cfg->tau = d.tau;
  cfg->sigma = d.sigma;
  cfg->corruption = d.corruption;
  cfg->trials = static_cast<long>(d.trials);
  cfg->seed = d.seed;
  cfg->jobs = static_cast<long>(d.jobs);
  cfg->timing = d.timing ? 1 : 0;
}

l1h_status l1h_bench_run(const l1h_experiment_config* cfg, l1h_report** out) {
  return guarded([&] {
    require(cfg && out, "null argument");
    l1h::bench::ExperimentConfig c;
    c.kind = l1h::bench::parse_kind(cfg->kind ? cfg->kind : "");
    c.signal = l1h::bench::parse_signal(cfg->signal ? cfg->signal : "spikes");
    c.image = cfg->image ? cfg->image : "";
    c.n = static_cast<l1h::Index>(cfg->n);
    c.m = static_cast<l1h::Index>(cfg->m);
    c.k = static_cast<l1h::Index>(cfg->k);
    c.p = static_cast<l1h::Index>(cfg->p);
    c.lambda = cfg->lambda;
    c.tau = cfg->tau;
    c.sigma = cfg->sigma;
    c.corruption = cfg->corruption;
    c.trials = static_cast<l1h::Index>(cfg->trials);
    c.seed = cfg->seed;
    c.jobs = static_cast<l1h::Index>(cfg->jobs);
    c.timing = cfg->timing != 0;
    auto* r = new l1h_report;
    try {
      r->reports.push_back(l1h::bench::run_experiment(c));
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

l1h_status l1h_bench_table(const char* table, const char* scale, long trials, uint64_t seed, long jobs, int timing,
                           l1h_report** out) {
  return guarded([&] {
    require(table && scale && out, "null argument");
    auto rows = l1h::bench::table_preset(table, scale, static_cast<l1h::Index>(trials), seed);
    auto* r = new l1h_report;
    try {
      for (auto& c : rows) {
        c.jobs = static_cast<l1h::Index>(jobs);
        c.timing = timing != 0;
        r->reports.push_back(l1h::bench::run_experiment(c));
      }
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

int l1h_report_ok(const l1h_report* r) {
  if (!r) return 0;
  for (const auto& rep : r->reports)
    if (!rep.ok()) return 0;
  return 1;
}

size_t l1h_report_size(const l1h_report* r) { return r ? r->reports.size() : 0; }

l1h_status l1h_report_summary(const l1h_report* r, size_t index, l1h_experiment_summary* out) {
  return guarded([&] {
    require(r && out, "null argument");
    require(index < r->reports.size(), "experiment index out of range");
    const auto& rep = r->reports[index];
    out->trials = static_cast<long>(rep.records.size());
    out->flagged = static_cast<long>(rep.flagged);
    out->n = static_cast<size_t>(rep.config.n);
    out->m = static_cast<size_t>(rep.config.m);
    out->k = static_cast<size_t>(rep.config.k);
    out->p = static_cast<size_t>(rep.config.p);
    out->lambda = rep.config.lambda;
    out->warm_products = rep.warm_products.mean;
    out->cold_products = rep.cold_products.mean;
    out->warm_products_sd = rep.warm_products.stddev;
    out->cold_products_sd = rep.cold_products.stddev;
    out->warm_steps = rep.warm_steps.mean;
    out->cold_steps = rep.cold_steps.mean;
    out->final_error = rep.final_error.mean;
  });
}

l1h_status l1h_report_json(const l1h_report* r, char** out) {
  return guarded([&] {
    require(r && out, "null argument");
    *out = copy_string(l1h::bench::to_json(r->reports).dump(2) + "\n");
  });
}

l1h_status l1h_report_csv(const l1h_report* r, char** out) {
  return guarded([&] {
    require(r && out, "null argument");
    *out = copy_string(l1h::bench::to_csv(r->reports));
  });
}

void l1h_report_free(l1h_report* r) { delete r; }

l1h_status l1h_selftest(const l1h_selftest_counts* counts, uint64_t seed, int* passed, char** summary) {
  return guarded([&] {
    require(passed != nullptr, "null argument");
    l1h::selftest::Counts c;
    if (counts) {
      c.bpdn = counts->bpdn;
      c.ds = counts->ds;
      c.decode = counts->decode;
      c.kkt = counts->kkt;
    }
    const auto suites = l1h::selftest::run_all(c, seed);
    bool ok = true;
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : suites) {
      ok = ok && s.ok();
      j.push_back({{"suite", s.name},
                   {"total", s.total},
                   {"passed", s.passed},
                   {"skipped", s.skipped},
                   {"worst", s.worst},
                   {"first_failure", s.first_failure}});
    }
    *passed = ok ? 1 : 0;
    if (summary) *summary = copy_string(nlohmann::json{{"ok", ok}, {"suites", j}}.dump(2) + "\n");
  });
}

l1h_status l1h_parse_seed(const char* text, uint64_t* out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = l1h::parse_seed(text);
  });
}

l1h_status l1h_write_file(const char* path, const char* bytes, size_t size) {
  return guarded([&] {
    require(path && (bytes || size == 0), "null argument");
    l1h::write_file_atomic(path, std::string(bytes ? bytes : "", size));
  });
}

}  // extern "C"
