#include "nmor.h"

#include <cmath>
#include <cstring>
#include <string>

#include "nmor/config.hpp"
#include "nmor/pipeline.hpp"

// The C boundary: every entry point traps C++ exceptions and folds them into
// status codes + a per-handle message. No exception may cross extern "C".

struct nmor_experiment {
    nmor::ExperimentConfig cfg;
    nmor::RunResult result;
    bool has_result = false;
    std::string last_error;
    std::string out_dir_cache;
};

namespace {

int fail(nmor_experiment* exp, int code, const std::string& msg) {
    if (exp) exp->last_error = msg;
    return code;
}

template <typename Fn>
int guarded(nmor_experiment* exp, Fn&& fn) {
    if (!exp) return NMOR_EINVAL;
    try {
        fn();
        exp->last_error.clear();
        return NMOR_OK;
    } catch (const nmor::config_error& e) {
        return fail(exp, NMOR_ECONFIG, e.what());
    } catch (const nmor::io_error& e) {
        return fail(exp, NMOR_EIO, e.what());
    } catch (const std::exception& e) {
        return fail(exp, NMOR_ERUNTIME, e.what());
    }
}

const nmor::Table* table_at(const nmor_experiment* exp, int table) {
    if (!exp || !exp->has_result) return nullptr;
    if (table < 0 || std::size_t(table) >= exp->result.tables.size()) return nullptr;
    return &exp->result.tables[std::size_t(table)];
}

}  // namespace

extern "C" {

const char* nmor_version(void) { return "1.0.0"; }

nmor_experiment* nmor_create(void) {
    try {
        return new nmor_experiment{};
    } catch (...) {
        return nullptr;
    }
}

void nmor_destroy(nmor_experiment* exp) { delete exp; }

const char* nmor_last_error(const nmor_experiment* exp) {
    return exp ? exp->last_error.c_str() : "null handle";
}

int nmor_load_config(nmor_experiment* exp, const char* path) {
    if (!path) return fail(exp, NMOR_EINVAL, "null path");
    return guarded(exp, [&] {
        exp->cfg = nmor::load_config(path);
        exp->has_result = false;
    });
}

int nmor_set(nmor_experiment* exp, const char* dotted_key, const char* value) {
    if (!dotted_key || !value) return fail(exp, NMOR_EINVAL, "null key or value");
    return guarded(exp, [&] { nmor::apply_key(exp->cfg, dotted_key, value); });
}

int nmor_validate(const nmor_experiment* exp, char* report, size_t cap) {
    if (!exp) return NMOR_EINVAL;
    auto* mut = const_cast<nmor_experiment*>(exp);
    std::string text;
    int code = NMOR_OK;
    try {
        const std::vector<std::string> errs = nmor::validation_errors(exp->cfg);
        if (errs.empty()) {
            text = "ok\n";
        } else {
            code = NMOR_ECONFIG;
            for (const auto& e : errs) text += e + "\n";
        }
    } catch (const std::exception& e) {
        code = NMOR_ERUNTIME;
        text = e.what();
    }
    mut->last_error = (code == NMOR_OK) ? "" : text;
    if (report && cap > 0) {
        const size_t n = std::min(cap - 1, text.size());
        std::memcpy(report, text.data(), n);
        report[n] = '\0';
    }
    return code;
}

uint64_t nmor_config_hash(const nmor_experiment* exp) {
    if (!exp) return 0;
    try {
        return nmor::config_hash(exp->cfg);
    } catch (...) {
        return 0;
    }
}

int nmor_run(nmor_experiment* exp, const char* command) {
    if (!command) return fail(exp, NMOR_EINVAL, "null command");
    return guarded(exp, [&] {
        exp->result = nmor::run_command(exp->cfg, command);
        exp->has_result = true;
    });
}

int nmor_table_count(const nmor_experiment* exp) {
    return (exp && exp->has_result) ? int(exp->result.tables.size()) : 0;
}

const char* nmor_table_name(const nmor_experiment* exp, int table) {
    const nmor::Table* t = table_at(exp, table);
    return t ? t->name.c_str() : nullptr;
}

int nmor_table_rows(const nmor_experiment* exp, int table) {
    const nmor::Table* t = table_at(exp, table);
    return t ? int(t->rows.size()) : -1;
}

int nmor_table_cols(const nmor_experiment* exp, int table) {
    const nmor::Table* t = table_at(exp, table);
    return t ? int(t->columns.size()) : -1;
}

const char* nmor_table_column(const nmor_experiment* exp, int table, int col) {
    const nmor::Table* t = table_at(exp, table);
    if (!t || col < 0 || std::size_t(col) >= t->columns.size()) return nullptr;
    return t->columns[std::size_t(col)].c_str();
}

double nmor_table_value(const nmor_experiment* exp, int table, int row, int col) {
    const nmor::Table* t = table_at(exp, table);
    if (!t || row < 0 || std::size_t(row) >= t->rows.size() || col < 0 ||
        std::size_t(col) >= t->columns.size())
        return std::nan("");
    return t->rows[std::size_t(row)][std::size_t(col)];
}

const char* nmor_out_dir(const nmor_experiment* exp) {
    if (!exp) return nullptr;
    auto* mut = const_cast<nmor_experiment*>(exp);
    try {
        mut->out_dir_cache = nmor::resolve_out_dir(exp->cfg);
    } catch (...) {
        mut->out_dir_cache = ".";
    }
    return mut->out_dir_cache.c_str();
}

int nmor_write_outputs(nmor_experiment* exp, const char* dir) {
    return guarded(exp, [&] {
        if (!exp->has_result) throw nmor::config_error("nothing to write: run a command first");
        const std::string target = (dir && *dir) ? dir : nmor::resolve_out_dir(exp->cfg);
        nmor::write_outputs(exp->result, exp->cfg, target);
    });
}

}  // extern "C"
